"""Support-vector classification over precomputed kernel matrices.

fit_binary solves the standard soft-margin dual
    max  sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
    s.t. 0 <= alpha_i <= C,  sum_i alpha_i y_i = 0
with sequential minimal optimization using second-order working-set
selection (maximal-violation first index, best quadratic-gain second).
Non-positive pair curvature falls back to a tau-regularised step.
Multiclass goes one-vs-one with majority voting.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NumericalError
from .kernels import KernelMatrix

TAU = 1e-12


@dataclass
class SvcModel:
    """Fitted dual solution restricted to the support vectors."""

    dual_coefs: np.ndarray  # alpha_i * y_i over support vectors
    support_idx: np.ndarray  # indices into the training set
    bias: float
    C: float
    classes: list
    n_train: int
    train_ids: list | None = None
    converged: bool = True
    n_iter: int = 0
    objective: float = 0.0


def _as_values(K) -> tuple[np.ndarray, list | None]:
    if isinstance(K, KernelMatrix):
        return np.asarray(K.values, dtype=np.float64), K.col_ids
    return np.asarray(K, dtype=np.float64), None


def fit_binary(
    K,
    y: np.ndarray,
    C: float,
    tol: float = 1e-3,
    max_iter: int = 100_000,
) -> SvcModel:
    """SMO on a precomputed square train Gram with labels in {-1, +1}."""
    Kv, ids = _as_values(K)
    y = np.asarray(y, dtype=np.float64)
    m = len(y)
    if Kv.shape != (m, m):
        raise ValueError(f"kernel {Kv.shape} does not match {m} labels")
    if not np.all(np.isfinite(Kv)):
        raise NumericalError("kernel matrix contains non-finite entries")
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise ValueError("fit_binary needs both labels, coded as -1/+1")
    if not C > 0:
        raise ValueError("C must be positive")

    Q = (y[:, None] * y[None, :]) * Kv
    diag = np.diag(Kv).copy()
    alpha = np.zeros(m)
    grad = -np.ones(m)  # gradient of 1/2 a^T Q a - sum(a)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        minus_yg = -(y * grad)
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(minus_yg[up])])
        m_up = minus_yg[i]
        m_low = minus_yg[low].min()
        if m_up - m_low < tol:
            converged = True
            break
        # second-order choice of j among violating members of the low set
        cand = low & (minus_yg < m_up)
        b_vec = m_up - minus_yg
        a_vec = diag[i] + diag - 2.0 * Kv[i]
        a_vec = np.where(a_vec > 0, a_vec, TAU)
        gain = -(b_vec * b_vec) / a_vec
        j = int(np.flatnonzero(cand)[np.argmin(gain[cand])])

        old_i, old_j = alpha[i], alpha[j]
        quad = a_vec[j]
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        grad += Q[:, i] * (alpha[i] - old_i) + Q[:, j] * (alpha[j] - old_j)

    bias = _bias(alpha, grad, y, C)
    support = np.flatnonzero(alpha > 0)
    objective = float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
    return SvcModel(
        dual_coefs=alpha[support] * y[support],
        support_idx=support,
        bias=bias,
        C=float(C),
        classes=[-1, 1],
        n_train=m,
        train_ids=ids,
        converged=converged,
        n_iter=it,
        objective=objective,
    )


def _bias(alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, C: float) -> float:
    # free support vectors pin the bias exactly; otherwise take the midpoint
    # of the interval allowed by the bound constraints
    minus_yg = -(y * grad)
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(minus_yg[free].mean())
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
    lo = minus_yg[up].max() if up.any() else -np.inf
    hi = minus_yg[low].min() if low.any() else np.inf
    if np.isinf(lo):
        return float(hi)
    if np.isinf(hi):
        return float(lo)
    return float(0.5 * (lo + hi))


def decision_function(model: SvcModel, K_test) -> np.ndarray:
    """f(x) = sum over support vectors of dual_coef * K(x, sv) + bias."""
    Kv, ids = _as_values(K_test)
    Kv = np.atleast_2d(Kv)
    if Kv.size == 0:
        return np.zeros(0)
    if Kv.shape[1] != model.n_train:
        raise ValueError(
            f"test kernel has {Kv.shape[1]} columns, model was trained on {model.n_train}"
        )
    if ids is not None and model.train_ids is not None and list(ids) != list(model.train_ids):
        raise ValueError("test kernel columns are not aligned with the training sample ids")
    return Kv[:, model.support_idx] @ model.dual_coefs + model.bias


def fit_predict_multiclass(
    K_train,
    y: np.ndarray,
    C: float,
    K_test,
    tol: float = 1e-3,
    max_iter: int = 100_000,
) -> np.ndarray:
    """One-vs-one SVC: majority vote, ties broken by summed decision values,
    then by the lowest class label."""
    Kv, _ = _as_values(K_train)
    Tv, _ = _as_values(K_test)
    Tv = np.atleast_2d(Tv)
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("need at least 2 classes")
    n_test = Tv.shape[0]
    votes = np.zeros((n_test, len(classes)))
    scores = np.zeros((n_test, len(classes)))
    for a in range(len(classes)):
        for b in range(a + 1, len(classes)):
            mask = (y == classes[a]) | (y == classes[b])
            idx = np.flatnonzero(mask)
            yab = np.where(y[idx] == classes[b], 1.0, -1.0)
            model = fit_binary(Kv[np.ix_(idx, idx)], yab, C, tol, max_iter)
            dec = Tv[:, idx][:, model.support_idx] @ model.dual_coefs + model.bias
            wins_b = dec > 0
            votes[wins_b, b] += 1
            votes[~wins_b, a] += 1
            scores[:, b] += dec
            scores[:, a] -= dec
    out = []
    for t in range(n_test):
        best = np.flatnonzero(votes[t] == votes[t].max())
        if len(best) > 1:
            top = scores[t, best].max()
            best = best[scores[t, best] == top]
        out.append(classes[best[0]])
    return np.array(out)


def accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of exact matches."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("empty prediction vector")
    return float(np.mean(pred == truth))


def model_to_json(model: SvcModel, path: str | Path) -> Path:
    payload = {
        "dual_coefs": model.dual_coefs.tolist(),
        "support_idx": model.support_idx.tolist(),
        "bias": model.bias,
        "C": model.C,
        "classes": [c.item() if hasattr(c, "item") else c for c in model.classes],
        "n_train": model.n_train,
        "train_ids": model.train_ids,
        "converged": model.converged,
        "n_iter": model.n_iter,
        "objective": model.objective,
    }
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def model_from_json(path: str | Path) -> SvcModel:
    p = json.loads(Path(path).read_text())
    return SvcModel(
        dual_coefs=np.array(p["dual_coefs"]),
        support_idx=np.array(p["support_idx"], dtype=int),
        bias=float(p["bias"]),
        C=float(p["C"]),
        classes=p["classes"],
        n_train=int(p["n_train"]),
        train_ids=p["train_ids"],
        converged=bool(p["converged"]),
        n_iter=int(p["n_iter"]),
        objective=float(p["objective"]),
    )
