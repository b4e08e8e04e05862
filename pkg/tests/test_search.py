"""Grid search and the two-stage randomized search contract."""
import json
import math

import numpy as np
import pytest

from qkbench.datapipe import make_synthetic
from qkbench.errors import ConfigError
from qkbench.search import (
    DEFAULT_ITERATIONS,
    SearchSpace,
    grid_search_classical,
    two_stage_random_search,
)


def scripted_eval(scores_by_key=None, constant=0.5):
    """eval_fn stub: score from a lookup on rounded params, else a constant."""

    def eval_fn(params, trained):
        if scores_by_key:
            key = round(params["s"], 6)
            if key in scores_by_key:
                return scores_by_key[key]
        return constant

    return eval_fn


def test_grid_search_single_point():
    ds = make_synthetic("blobs", 24, noise=0.4, seed=0)
    res = grid_search_classical("linear", ds.X, ds.y, [3.0], seed=0)
    assert res.best_params == {"C": 3.0}
    assert len(res.trials) == 1


def test_grid_search_trial_count_rbf():
    ds = make_synthetic("blobs", 24, noise=0.4, seed=1)
    res = grid_search_classical("rbf", ds.X, ds.y, [0.1, 1, 10], ["scale", 0.5], seed=1)
    assert len(res.trials) == 6


def test_grid_search_separable_blobs_reach_perfect_validation():
    ds = make_synthetic("blobs", 40, noise=0.2, seed=2)
    res = grid_search_classical("rbf", ds.X, ds.y, [0.1, 1, 10, 100], ["scale"], seed=2)
    assert res.best_score == 1.0


def test_grid_search_tie_prefers_smaller_hyperparameters():
    ds = make_synthetic("blobs", 24, noise=0.0, seed=3)  # every grid point is perfect
    res = grid_search_classical("rbf", ds.X, ds.y, [10, 0.1, 1], [1.0, 0.1], seed=3)
    assert res.best_params["C"] == 0.1
    assert res.best_params["gamma"] == 0.1


def test_grid_search_validation():
    ds = make_synthetic("blobs", 24, noise=0.4, seed=4)
    with pytest.raises(ConfigError):
        grid_search_classical("poly", ds.X, ds.y, [1.0])
    with pytest.raises(ConfigError):
        grid_search_classical("rbf", ds.X, ds.y, [], ["scale"])


def test_two_stage_respects_budget_and_defaults():
    for kernel in ("qamp", "qrbf"):
        space = SearchSpace(seed=0)  # baseline 1.1: unreachable
        res = two_stage_random_search(kernel, space, lambda p: None, scripted_eval())
        assert len(res.trials) == DEFAULT_ITERATIONS[kernel]
        assert not res.early_stopped
        stages = [t.stage for t in res.trials]
        half = (DEFAULT_ITERATIONS[kernel] + 1) // 2
        assert stages == [1] * half + [2] * (len(stages) - half)


def test_two_stage_early_stops_on_zero_baseline():
    space = SearchSpace(seed=1, baseline_accuracy=0.0)
    res = two_stage_random_search("qamp", space, lambda p: None, scripted_eval())
    assert len(res.trials) == 1
    assert res.early_stopped


def test_two_stage_deterministic_trials():
    space = SearchSpace(seed=7, total_iterations=8)
    a = two_stage_random_search("qrbf", space, lambda p: None, scripted_eval())
    b = two_stage_random_search("qrbf", space, lambda p: None, scripted_eval())
    assert [t.params for t in a.trials] == [t.params for t in b.trials]


def test_stage2_samples_inside_log_window():
    space = SearchSpace(seed=3, total_iterations=20)
    res = two_stage_random_search("qrbf", space, lambda p: None, scripted_eval())
    stage1 = [t for t in res.trials if t.stage == 1]
    best1 = max(stage1, key=lambda t: (t.score, -t.iteration)).params
    for t in res.trials:
        if t.stage == 2:
            for key in ("s", "C"):
                assert abs(math.log10(t.params[key]) - math.log10(best1[key])) <= 0.5 + 1e-12
            assert t.params["c"] in space.c_values  # c stays on the discrete set


def test_stage2_centers_on_stage1_best():
    # give one stage-1 point a standout score and confirm stage 2 hugs it
    space = SearchSpace(seed=5, total_iterations=10)
    probe = two_stage_random_search("qamp", space, lambda p: None, scripted_eval())
    target_s = probe.trials[2].params["s"]

    def eval_fn(params, trained):
        return 0.9 if abs(params["s"] - target_s) < 1e-12 else 0.1

    res = two_stage_random_search("qamp", space, lambda p: None, eval_fn)
    for t in res.trials:
        if t.stage == 2:
            assert abs(math.log10(t.params["s"]) - math.log10(target_s)) <= 0.5 + 1e-12


def test_best_result_consistent_with_trial_log():
    space = SearchSpace(seed=9, total_iterations=6)
    rng = np.random.default_rng(0)

    def eval_fn(params, trained):
        return float(rng.random())

    res = two_stage_random_search("qamp", space, lambda p: None, eval_fn)
    scores = [t.score for t in res.trials]
    assert res.best_score == max(scores)
    assert res.best_params == res.trials[int(np.argmax(scores))].params


def test_failures_recorded_and_search_continues():
    space = SearchSpace(seed=11, total_iterations=6)
    calls = {"n": 0}

    def train_fn(params):
        calls["n"] += 1
        if calls["n"] % 2 == 1:
            raise RuntimeError("diverged")
        return None

    res = two_stage_random_search("qamp", space, train_fn, scripted_eval())
    assert len(res.trials) == 6
    errored = [t for t in res.trials if t.error is not None]
    assert len(errored) == 3
    assert all("diverged" in t.error for t in errored)


def test_trial_log_persists_and_resumes(tmp_path):
    log = tmp_path / "trials.jsonl"
    space = SearchSpace(seed=13, total_iterations=6, baseline_accuracy=1.1)
    counter = {"n": 0}

    def flaky_eval(params, trained):
        counter["n"] += 1
        if counter["n"] == 4:
            raise KeyboardInterrupt  # simulate dying mid-search
        return 0.3

    with pytest.raises(KeyboardInterrupt):
        two_stage_random_search("qamp", space, lambda p: None, flaky_eval, log_path=log)
    lines = [json.loads(ln) for ln in log.read_text().splitlines()]
    assert len(lines) == 3

    res = two_stage_random_search(
        "qamp", space, lambda p: None, scripted_eval(constant=0.3), log_path=log, resume=True
    )
    assert len(res.trials) == 6
    fresh = two_stage_random_search("qamp", space, lambda p: None, scripted_eval(constant=0.3))
    assert [t.params for t in res.trials] == [t.params for t in fresh.trials]


def test_search_space_validation():
    with pytest.raises(ConfigError):
        SearchSpace(s_values=())
    with pytest.raises(ConfigError):
        SearchSpace(C_values=(1.0, -2.0))
    with pytest.raises(ConfigError):
        SearchSpace(total_iterations=1)
