"""Declarative benchmark runs: dataset -> preprocessing -> kernels -> report.

A run configuration is a YAML mapping with these sections (all optional
unless noted):

    seed: 42                     # master seed; sections default to it
    output_dir: out
    dataset:                     # required: either synthetic or path
      synthetic: {kind: two_moons, m: 200, noise: 0.1, seed: 42}
      # path: data.csv
      # label_column: label
      # delimiter: ","
    pipeline:
      impute: none               # none | median
      scaler: minmax             # minmax | standard
      pca_components: null       # int, variance threshold in (0,1), or null
      train_fraction: 0.75
      train_cap: null
      test_cap: null
      stratify: true
    ansatz:
      n_layers: 5
      n_qubits: auto             # auto: ceil(log2 d) for qamp, 2 for qrbf
      extra_qubits: 0
    training:
      learning_rate: 0.05
      steps: 500
      batch_size: 4
      eval_every: 50
      init_seed: 42
    kernels:                     # required, at least one entry
      - kind: linear             # linear | rbf | qamp | qrbf
        C_grid: [0.1, 1, 10, 100, 1000]
        gamma_grid: [scale]      # rbf only
      - kind: qamp
        n_qubits: 2              # overrides ansatz.n_qubits
        search: {total_iterations: 14, baseline: auto}
        # fixed: {s: 0.05, C: 10}         # skips the search
        # (qrbf fixed additionally takes c)

Timing and timestamps go to run_meta.json; results.json is a pure function
of the configuration so reruns are byte-identical.
"""
from __future__ import annotations

import json
import platform
import time
from dataclasses import dataclass, replace
from hashlib import sha256
from pathlib import Path

import numpy as np
import yaml

from . import __version__, datapipe, kernels, kta, search, svgplot, svm
from .datapipe import Dataset, PipelineSpec
from .errors import ConfigError, DataError
from .featuremap import AnsatzParams, EncoderSpec, extended_variant, resource_count
from .kta import TrainConfig

CLASSICAL_KINDS = ("linear", "rbf")
QUANTUM_KINDS = ("qamp", "qrbf")


@dataclass
class KernelConfig:
    kind: str
    C_grid: tuple = search.DEFAULT_C_VALUES
    gamma_grid: tuple = ("scale",)
    n_qubits: int | None = None
    search_space: search.SearchSpace | None = None
    baseline: str | float | None = "auto"
    fixed: dict | None = None


@dataclass
class RunConfig:
    dataset: dict
    kernels: list[KernelConfig]
    pipeline: PipelineSpec
    training: TrainConfig
    seed: int = 42
    output_dir: Path = Path("out")
    n_layers: int = 5
    default_qubits: int | str = "auto"
    extra_qubits: int = 0


def _expect_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    return value


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    return config_from_dict(_expect_mapping(raw, "config"))


def config_from_dict(raw: dict) -> RunConfig:
    seed = int(raw.get("seed", 42))
    dataset = _expect_mapping(raw.get("dataset"), "dataset") if "dataset" in raw else None
    if not dataset:
        raise ConfigError("dataset: section is required")
    if ("synthetic" in dataset) == ("path" in dataset):
        raise ConfigError("dataset: give exactly one of 'synthetic' or 'path'")
    if "synthetic" in dataset:
        syn = _expect_mapping(dataset["synthetic"], "dataset.synthetic")
        if "kind" not in syn or "m" not in syn:
            raise ConfigError("dataset.synthetic: needs 'kind' and 'm'")
    elif "label_column" not in dataset:
        raise ConfigError("dataset.label_column: required for CSV datasets")

    pipe_raw = dict(_expect_mapping(raw.get("pipeline", {}), "pipeline"))
    pipe_raw.setdefault("seed", seed)
    try:
        pipeline = PipelineSpec(**pipe_raw)
    except TypeError as exc:
        raise ConfigError(f"pipeline: {exc}") from None

    train_raw = dict(_expect_mapping(raw.get("training", {}), "training"))
    train_raw.setdefault("init_seed", seed)
    try:
        training = TrainConfig(**train_raw)
    except TypeError as exc:
        raise ConfigError(f"training: {exc}") from None

    ansatz = _expect_mapping(raw.get("ansatz", {}), "ansatz")
    n_layers = int(ansatz.get("n_layers", 5))
    if n_layers < 1:
        raise ConfigError("ansatz.n_layers: must be >= 1")
    default_qubits = ansatz.get("n_qubits", "auto")
    if default_qubits != "auto":
        default_qubits = int(default_qubits)
        if default_qubits < 1:
            raise ConfigError("ansatz.n_qubits: must be >= 1 or 'auto'")
    extra_qubits = int(ansatz.get("extra_qubits", 0))
    if extra_qubits < 0:
        raise ConfigError("ansatz.extra_qubits: must be >= 0")

    kernel_entries = raw.get("kernels")
    if not isinstance(kernel_entries, list) or not kernel_entries:
        raise ConfigError("kernels: need a nonempty list")
    kernel_configs = []
    for k, entry in enumerate(kernel_entries):
        entry = _expect_mapping(entry, f"kernels[{k}]")
        kind = entry.get("kind")
        if kind not in CLASSICAL_KINDS + QUANTUM_KINDS:
            raise ConfigError(f"kernels[{k}].kind: unknown kernel {kind!r}")
        kc = KernelConfig(kind=kind)
        if "C_grid" in entry:
            kc.C_grid = tuple(float(v) for v in entry["C_grid"])
        if "gamma_grid" in entry:
            kc.gamma_grid = tuple(
                v if isinstance(v, str) else float(v) for v in entry["gamma_grid"]
            )
        if "n_qubits" in entry:
            kc.n_qubits = int(entry["n_qubits"])
        if "fixed" in entry:
            kc.fixed = {key: float(v) for key, v in _expect_mapping(entry["fixed"], f"kernels[{k}].fixed").items()}
        if "search" in entry:
            sr = dict(_expect_mapping(entry["search"], f"kernels[{k}].search"))
            kc.baseline = sr.pop("baseline", "auto")
            sr.setdefault("seed", seed)
            for key in ("s_values", "C_values", "c_values"):
                if key in sr:
                    sr[key] = tuple(float(v) for v in sr[key])
            try:
                kc.search_space = search.SearchSpace(**sr)
            except TypeError as exc:
                raise ConfigError(f"kernels[{k}].search: {exc}") from None
        elif kind in QUANTUM_KINDS and kc.fixed is None:
            kc.search_space = search.SearchSpace(seed=seed)
        kernel_configs.append(kc)

    return RunConfig(
        dataset=dataset,
        kernels=kernel_configs,
        pipeline=pipeline,
        training=training,
        seed=seed,
        output_dir=Path(raw.get("output_dir", "out")),
        n_layers=n_layers,
        default_qubits=default_qubits,
        extra_qubits=extra_qubits,
    )


def _load_dataset(config: RunConfig) -> Dataset:
    ds = config.dataset
    if "synthetic" in ds:
        syn = ds["synthetic"]
        return datapipe.make_synthetic(
            syn["kind"],
            int(syn["m"]),
            float(syn.get("noise", 0.0)),
            int(syn.get("seed", config.seed)),
            n_classes=int(syn.get("n_classes", 2)),
        )
    return datapipe.load_csv(ds["path"], ds["label_column"], ds.get("delimiter", ","))


def _split(ds: Dataset, pipeline: PipelineSpec) -> tuple[Dataset, Dataset]:
    if pipeline.stratify:
        train, test = datapipe.stratified_split(ds, pipeline.train_fraction, pipeline.seed)
    else:
        rng = np.random.default_rng(pipeline.seed)
        perm = rng.permutation(ds.m)
        n_tr = int(round(pipeline.train_fraction * ds.m))
        train, test = ds.subset(np.sort(perm[:n_tr])), ds.subset(np.sort(perm[n_tr:]))
    if pipeline.train_cap is not None:
        train = datapipe.stratified_sample(train, pipeline.train_cap, pipeline.seed)
    if pipeline.test_cap is not None:
        test = datapipe.stratified_sample(test, pipeline.test_cap, pipeline.seed)
    return train, test


def _resolve_qubits(kc: KernelConfig, config: RunConfig, d: int) -> int:
    if kc.n_qubits is not None:
        return kc.n_qubits
    if config.default_qubits != "auto":
        return int(config.default_qubits)
    if kc.kind == "qamp":
        return max(1, int(np.ceil(np.log2(max(d, 2)))))
    return 2


def _base_spec(kc: KernelConfig, config: RunConfig, d: int, c: float = 1.0) -> EncoderSpec:
    n = _resolve_qubits(kc, config, d)
    if kc.kind == "qamp" and (1 << (n + config.extra_qubits)) < d:
        raise ConfigError(
            f"qamp on {n + config.extra_qubits} qubits holds {1 << (n + config.extra_qubits)} "
            f"amplitudes but the data has {d} features"
        )
    spec = EncoderSpec(kc.kind, n, c if kc.kind == "qrbf" else None)
    return extended_variant(spec, config.extra_qubits)


def _with_c(spec: EncoderSpec, hyper: dict) -> EncoderSpec:
    if spec.kind == "qrbf":
        return EncoderSpec(spec.kind, spec.n_qubits, hyper["c"], spec.entangler)
    return spec


def _classical_grams(kind: str, hyper: dict, X_fit, X_eval):
    if kind == "linear":
        return kernels.gram_linear(X_fit).values, kernels.gram_linear(X_eval, X_fit).values
    gamma = kernels.resolve_gamma(hyper["gamma"], X_fit)
    return (
        kernels.gram_rbf(X_fit, gamma=gamma).values,
        kernels.gram_rbf(X_eval, X_fit, gamma=gamma).values,
    )


def _run_classical(kc: KernelConfig, X_tr, y_tr, X_te, y_te, seed: int) -> dict:
    result = search.grid_search_classical(
        kc.kind, X_tr, y_tr, kc.C_grid, kc.gamma_grid, seed=seed
    )
    K_tr, K_te = _classical_grams(kc.kind, result.best_params, X_tr, X_te)
    pred = svm.fit_predict_multiclass(K_tr, y_tr, result.best_params["C"], K_te)
    return {
        "kind": kc.kind,
        "hyperparameters": result.best_params,
        "validation_score": result.best_score,
        "test_accuracy": svm.accuracy(pred, y_te),
        "search_trials": len(result.trials),
    }


def _run_quantum(
    kc: KernelConfig,
    config: RunConfig,
    X_tr,
    y_tr,
    X_te,
    y_te,
    baseline_score: float | None,
    out_dir: Path | None,
) -> dict:
    spec0 = _base_spec(kc, config, X_tr.shape[1])
    tcfg = config.training
    sub_idx, val_idx = kta.subsplit_indices(y_tr, tcfg)
    X_sub, y_sub = X_tr[sub_idx], y_tr[sub_idx]
    X_val, y_val = X_tr[val_idx], y_tr[val_idx]
    reports: dict[str, kta.TrainReport] = {}

    def hyper_key(hyper: dict) -> str:
        return json.dumps(hyper, sort_keys=True)

    def train_fn(hyper: dict) -> kta.TrainReport:
        rep = kta.train(X_tr, y_tr, _with_c(spec0, hyper), hyper["s"], tcfg, config.n_layers)
        reports[hyper_key(hyper)] = rep
        return rep

    def eval_fn(hyper: dict, rep: kta.TrainReport) -> float:
        spec = _with_c(spec0, hyper)
        K_sub = kernels.gram_quantum(X_sub, None, spec, rep.best_params, hyper["s"])
        K_val = kernels.gram_quantum(X_val, X_sub, spec, rep.best_params, hyper["s"])
        pred = svm.fit_predict_multiclass(K_sub.values, y_sub, hyper["C"], K_val.values)
        return svm.accuracy(pred, y_val)

    if kc.fixed is not None:
        hyper = dict(kc.fixed)
        rep = train_fn(hyper)
        best_score = eval_fn(hyper, rep)
        trials_info = {"search_trials": 0, "early_stopped": False}
    else:
        space = kc.search_space or search.SearchSpace(seed=config.seed)
        if kc.baseline == "auto":
            if baseline_score is not None:
                space = replace(space, baseline_accuracy=float(baseline_score))
        elif kc.baseline is not None:
            space = replace(space, baseline_accuracy=float(kc.baseline))
        log_path = out_dir / f"{kc.kind}_trials.jsonl" if out_dir is not None else None
        if log_path is not None and log_path.exists():
            log_path.unlink()
        result = search.two_stage_random_search(
            kc.kind, space, train_fn, eval_fn, log_path=log_path
        )
        hyper = result.best_params
        best_score = result.best_score
        rep = reports.get(hyper_key(hyper)) or train_fn(hyper)
        trials_info = {
            "search_trials": len(result.trials),
            "early_stopped": result.early_stopped,
            "baseline_accuracy": space.baseline_accuracy,
        }

    spec = _with_c(spec0, hyper)
    params = rep.best_params
    ck_hash = kta.checkpoint_hash(params, hyper["s"])
    K_tr = kernels.gram_quantum(X_tr, None, spec, params, hyper["s"])
    K_te = kernels.gram_quantum(X_te, X_tr, spec, params, hyper["s"])
    K_tr.meta["checkpoint_hash"] = ck_hash
    if out_dir is not None:
        kernels.save_kernel(K_tr, out_dir / f"{kc.kind}_train_gram")
    pred = svm.fit_predict_multiclass(K_tr.values, y_tr, hyper["C"], K_te.values)
    res = resource_count(spec, config.n_layers)
    out = {
        "kind": kc.kind,
        "hyperparameters": hyper,
        "validation_score": best_score,
        "test_accuracy": svm.accuracy(pred, y_te),
        "kta_history": [
            {"step": e.step, "train_batch_kta": e.train_batch_kta, "validation_kta": e.validation_kta}
            for e in rep.history
        ],
        "best_validation_kta": rep.best_validation_kta,
        "checkpoint_hash": ck_hash,
        "resources": {
            "n_qubits": spec.n_qubits,
            "n_layers": config.n_layers,
            "cnots": res.cnots,
            "single_qubit_gates": res.single_qubit_gates,
            "depth": res.depth,
            "full_depth": res.full_depth,
        },
    }
    out.update(trials_info)
    if out_dir is not None:
        kta.save_checkpoint(
            out_dir / f"{kc.kind}_checkpoint.json", params, hyper["s"], tcfg.init_seed, rep.history
        )
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _fingerprint() -> dict:
    return {
        "qkbench": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
    }


def _config_digest(config: RunConfig) -> str:
    blob = json.dumps(_jsonable(config.__dict__), sort_keys=True, default=str)
    return sha256(blob.encode()).hexdigest()[:16]


def _write_report(report: dict, timings: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "results.json").write_text(
        json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    )
    meta = {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"), "wall_clock_s": timings}
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def run(config: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Execute the benchmark and write results.json/csv/svg artifacts."""
    out = Path(out_dir) if out_dir is not None else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    ds = _load_dataset(config)
    train, test = _split(ds, config.pipeline)
    X_tr, X_te, pipe_info = datapipe.apply_pipeline(train.X, test.X, config.pipeline)
    y_tr, y_te = train.y, test.y

    report = {
        "config_digest": _config_digest(config),
        "environment": _fingerprint(),
        "dataset": {
            "provenance": ds.provenance,
            "n_train": len(y_tr),
            "n_test": len(y_te),
            "n_features": X_tr.shape[1],
            "classes": sorted(np.unique(ds.y).tolist()),
        },
        "pipeline": pipe_info,
        "kernels": {},
    }
    timings: dict[str, float] = {}
    baseline_score: float | None = None
    classical = [kc for kc in config.kernels if kc.kind in CLASSICAL_KINDS]
    quantum = [kc for kc in config.kernels if kc.kind in QUANTUM_KINDS]
    for kc in classical:
        t0 = time.perf_counter()
        entry = _run_classical(kc, X_tr, y_tr, X_te, y_te, config.seed)
        timings[kc.kind] = round(time.perf_counter() - t0, 3)
        report["kernels"][kc.kind] = entry
        if baseline_score is None or entry["validation_score"] > baseline_score:
            baseline_score = entry["validation_score"]
    for kc in quantum:
        t0 = time.perf_counter()
        entry = _run_quantum(kc, config, X_tr, y_tr, X_te, y_te, baseline_score, out)
        timings[kc.kind] = round(time.perf_counter() - t0, 3)
        report["kernels"][kc.kind] = entry

    _write_report(report, timings, out)
    kinds = [kc.kind for kc in config.kernels]
    accs = [report["kernels"][k]["test_accuracy"] for k in kinds]
    write_csv(out / "results_accuracy.csv", ["kernel", "test_accuracy"], list(map(list, zip(kinds, accs))))
    svgplot.bar_chart(
        out / "results.svg", kinds, [("test accuracy", accs)],
        title="Kernel test accuracy", ylabel="accuracy",
    )
    return report


def _tuned_C(K_sub, y_sub, K_val, y_val, C_grid) -> tuple[float, float]:
    best = None
    for C in sorted(C_grid):
        pred = svm.fit_predict_multiclass(K_sub, y_sub, float(C), K_val)
        score = svm.accuracy(pred, y_val)
        if best is None or score > best[1]:
            best = (float(C), score)
    return best


def ablate_scaling(config: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Four-cell comparison per quantum kernel: {unscaled s=1, tuned s} x
    {initial, trained} test accuracies, with C tuned per cell on validation."""
    out = Path(out_dir) if out_dir is not None else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    quantum = [kc for kc in config.kernels if kc.kind in QUANTUM_KINDS]
    if not quantum:
        raise ConfigError("ablate-scaling needs at least one quantum kernel in the config")
    ds = _load_dataset(config)
    train, test = _split(ds, config.pipeline)
    X_tr, X_te, _ = datapipe.apply_pipeline(train.X, test.X, config.pipeline)
    y_tr, y_te = train.y, test.y
    tcfg = config.training
    sub_idx, val_idx = kta.subsplit_indices(y_tr, tcfg)

    report = {"config_digest": _config_digest(config), "kernels": {}}
    for kc in quantum:
        hyper = _resolve_hypers(kc, config, X_tr, y_tr, X_te, y_te)
        spec = _with_c(_base_spec(kc, config, X_tr.shape[1]), hyper)
        cells = {}
        for s_label, s_val in (("unscaled", 1.0), ("scaled", float(hyper["s"]))):
            init_params = kta.init_params(config.n_layers, spec.n_qubits, tcfg.init_seed)
            trained = kta.train(X_tr, y_tr, spec, s_val, tcfg, config.n_layers).best_params
            for p_label, params in (("initial", init_params), ("trained", trained)):
                K_sub = kernels.gram_quantum(X_tr[sub_idx], None, spec, params, s_val).values
                K_val = kernels.gram_quantum(X_tr[val_idx], X_tr[sub_idx], spec, params, s_val).values
                C, _ = _tuned_C(K_sub, y_tr[sub_idx], K_val, y_tr[val_idx], kc.C_grid)
                K_full = kernels.gram_quantum(X_tr, None, spec, params, s_val).values
                K_test = kernels.gram_quantum(X_te, X_tr, spec, params, s_val).values
                pred = svm.fit_predict_multiclass(K_full, y_tr, C, K_test)
                cells[f"{s_label}_{p_label}"] = {
                    "s": s_val,
                    "C": C,
                    "test_accuracy": svm.accuracy(pred, y_te),
                }
        report["kernels"][kc.kind] = cells

    (out / "ablation.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    rows = [
        [kind, cell, vals["s"], vals["C"], vals["test_accuracy"]]
        for kind, cells in report["kernels"].items()
        for cell, vals in cells.items()
    ]
    write_csv(out / "ablation.csv", ["kernel", "cell", "s", "C", "test_accuracy"], rows)
    cats = list(report["kernels"].keys())
    cell_names = ["unscaled_initial", "unscaled_trained", "scaled_initial", "scaled_trained"]
    series = [
        (name, [report["kernels"][k][name]["test_accuracy"] for k in cats]) for name in cell_names
    ]
    svgplot.bar_chart(out / "ablation.svg", cats, series, title="Scaling ablation", ylabel="accuracy")
    return report


def _resolve_hypers(kc: KernelConfig, config: RunConfig, X_tr, y_tr, X_te, y_te) -> dict:
    if kc.fixed is not None:
        return dict(kc.fixed)
    entry = _run_quantum(kc, config, X_tr, y_tr, X_te, y_te, None, None)
    return entry["hyperparameters"]


def qubit_sweep(config: RunConfig, extras: list[int], out_dir: str | Path | None = None) -> dict:
    """Accuracy series over additional qubits for each quantum kernel."""
    out = Path(out_dir) if out_dir is not None else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    quantum = [kc for kc in config.kernels if kc.kind in QUANTUM_KINDS]
    if not quantum:
        raise ConfigError("qubit-sweep needs at least one quantum kernel in the config")
    if any(e < 0 for e in extras):
        raise ConfigError("extras must be >= 0")
    ds = _load_dataset(config)
    train, test = _split(ds, config.pipeline)
    X_tr, X_te, _ = datapipe.apply_pipeline(train.X, test.X, config.pipeline)
    y_tr, y_te = train.y, test.y

    report = {"config_digest": _config_digest(config), "extras": list(extras), "kernels": {}}
    for kc in quantum:
        series = []
        for extra in extras:
            cfg_e = replace(config, extra_qubits=extra)
            entry = _run_quantum(kc, cfg_e, X_tr, y_tr, X_te, y_te, None, None)
            series.append(
                {
                    "extra_qubits": extra,
                    "test_accuracy": entry["test_accuracy"],
                    "resources": entry["resources"],
                }
            )
        report["kernels"][kc.kind] = series

    (out / "qubit_sweep.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    rows = [
        [kind, pt["extra_qubits"], pt["test_accuracy"]]
        for kind, pts in report["kernels"].items()
        for pt in pts
    ]
    write_csv(out / "qubit_sweep.csv", ["kernel", "extra_qubits", "test_accuracy"], rows)
    series_plot = [
        (kind, [float(pt["extra_qubits"]) for pt in pts], [pt["test_accuracy"] for pt in pts])
        for kind, pts in report["kernels"].items()
    ]
    svgplot.line_chart(
        out / "qubit_sweep.svg", series_plot,
        title="Accuracy vs additional qubits", xlabel="extra qubits", ylabel="accuracy",
    )
    return report


def learning_curve_report(
    config: RunConfig, sizes: list[int] | None = None, out_dir: str | Path | None = None
) -> dict:
    """Proxy-model learning curve artifacts for the configured dataset."""
    out = Path(out_dir) if out_dir is not None else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    ds = _load_dataset(config)
    if sizes is None:
        train, _ = datapipe.stratified_split(ds, 0.75, config.seed)
        sizes = sorted({max(4, int(round(f * train.m))) for f in (0.25, 0.5, 0.75, 1.0)})
    points = datapipe.learning_curve(ds, sizes, seed=config.seed)
    report = {"sizes": [int(s) for s, _ in points], "accuracy": [a for _, a in points]}
    write_csv(out / "learning_curve.csv", ["size", "test_accuracy"], [[s, a] for s, a in points])
    svgplot.line_chart(
        out / "learning_curve.svg",
        [("rbf-svc proxy", [float(s) for s, _ in points], [a for _, a in points])],
        title="Learning curve", xlabel="train size", ylabel="accuracy",
    )
    return report


def pca_report(config: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Cumulative explained-variance artifacts for the configured dataset."""
    out = Path(out_dir) if out_dir is not None else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    ds = _load_dataset(config)
    train, test = _split(ds, config.pipeline)
    X_tr, X_te = train.X, test.X
    if config.pipeline.impute == "median":
        X_tr, X_te = datapipe.impute_median(X_tr, X_te)
    scaler = datapipe.scale_minmax if config.pipeline.scaler == "minmax" else datapipe.scale_standard
    X_tr, X_te = scaler(X_tr, X_te)
    _, _, cum = datapipe.pca_fit_transform(X_tr, X_te, None)
    report = {"cumulative_variance": cum.tolist()}
    target = config.pipeline.pca_components
    if isinstance(target, float) and 0 < target < 1:
        reached = np.flatnonzero(cum >= target)
        report["threshold"] = target
        report["components_for_threshold"] = int(reached[0]) + 1 if reached.size else None
    write_csv(
        out / "pca_variance.csv",
        ["component", "cumulative_variance"],
        [[k + 1, v] for k, v in enumerate(cum.tolist())],
    )
    svgplot.line_chart(
        out / "pca_variance.svg",
        [("cumulative variance", [float(k + 1) for k in range(len(cum))], cum.tolist())],
        title="PCA cumulative explained variance", xlabel="components", ylabel="ratio",
    )
    return report
