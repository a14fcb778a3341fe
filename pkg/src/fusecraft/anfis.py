"""Grid-partitioned first-order Sugeno engine with hybrid training.

Layout and notation for the two-input case:

    mu1       (n1,)  premise degrees of x1, one per term on input 1
    mu2       (n2,)  premise degrees of x2
    w         (R,)   rule firing strengths, R = n1*n2, w[i*n2+j] = mu1[i]*mu2[j]
    wbar      (R,)   w normalized to sum 1 (0 everywhere if all rules silent)
    (p, q, r) per rule, rule output f = p*x1 + q*x2 + r
    output    y = sum(wbar * f)

Training alternates a least-squares solve for all (p, q, r) with the
premises frozen, and one batch gradient-descent step on the premise
parameters with the consequents frozen. Everything is deterministic:
identical inputs produce bit-identical trained models.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParametersError, SingularSystemError

GRAY_DOMAIN = (0.0, 255.0)
MIN_WIDTH = 1e-3
_OVERFLOW_CAP = 1e150

PREMISE_SHAPES = {"gbell": 3, "gaussian": 2}  # parameter count per term


class AllRulesSilentWarning(RuntimeWarning):
    """Raised (as a warning) when an input fires no rule at all."""


@dataclass(frozen=True, eq=False)
class SugenoFis:
    """Immutable Sugeno engine; training returns updated copies.

    premises1/premises2 hold one parameter row per term: (a, b, c) for
    gbell, (mean, sigma) for gaussian. consequents is (n1*n2, 3) with
    rows (p, q, r); rule (i, j) sits at index i*n2 + j.
    """

    shape: str
    premises1: np.ndarray
    premises2: np.ndarray
    consequents: np.ndarray
    domain: tuple = GRAY_DOMAIN

    def __post_init__(self):
        if self.shape not in PREMISE_SHAPES:
            raise InvalidParametersError(f"unknown premise shape {self.shape!r}")
        n_params = PREMISE_SHAPES[self.shape]
        for name in ("premises1", "premises2", "consequents"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.premises1.ndim != 2 or self.premises1.shape[1] != n_params:
            raise InvalidParametersError(f"premises1 must be (n1, {n_params})")
        if self.premises2.ndim != 2 or self.premises2.shape[1] != n_params:
            raise InvalidParametersError(f"premises2 must be (n2, {n_params})")
        n_rules = self.premises1.shape[0] * self.premises2.shape[0]
        if self.consequents.shape != (n_rules, 3):
            raise InvalidParametersError(
                f"consequents must be ({n_rules}, 3), got {self.consequents.shape}"
            )
        width_col = 0 if self.shape == "gbell" else 1
        if (self.premises1[:, width_col] <= 0).any() or (
            self.premises2[:, width_col] <= 0
        ).any():
            raise InvalidParametersError("premise widths must stay positive")

    @property
    def n_mfs(self) -> tuple:
        return (self.premises1.shape[0], self.premises2.shape[0])

    @property
    def n_rules(self) -> int:
        return self.premises1.shape[0] * self.premises2.shape[0]

    def to_dict(self) -> dict:
        return {
            "shape": self.shape,
            "domain": list(self.domain),
            "premises1": self.premises1.tolist(),
            "premises2": self.premises2.tolist(),
            "consequents": self.consequents.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SugenoFis":
        return cls(
            shape=doc["shape"],
            premises1=np.asarray(doc["premises1"], dtype=np.float64),
            premises2=np.asarray(doc["premises2"], dtype=np.float64),
            consequents=np.asarray(doc["consequents"], dtype=np.float64),
            domain=tuple(doc.get("domain", GRAY_DOMAIN)),
        )


@dataclass(frozen=True)
class TrainingReport:
    """Per-epoch root-mean-square training error trace."""

    epochs_run: int
    rmse_history: tuple
    final_rmse: float

    def __post_init__(self):
        object.__setattr__(self, "rmse_history", tuple(float(v) for v in self.rmse_history))
        if len(self.rmse_history) != self.epochs_run:
            raise InvalidParametersError("rmse_history length must equal epochs_run")

    def to_dict(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "rmse_history": list(self.rmse_history),
            "final_rmse": self.final_rmse,
        }


@dataclass(frozen=True)
class AnfisSettings:
    """Hyperparameters for building and training a fusion engine."""

    n_mfs: int = 3
    shape: str = "gbell"
    epochs: int = 50
    step_size: float = 0.01
    target: str = "identity"

    def __post_init__(self):
        if self.shape not in PREMISE_SHAPES:
            raise InvalidParametersError(f"unknown premise shape {self.shape!r}")
        if self.target not in ("identity", "mean", "max"):
            raise InvalidParametersError(f"unknown training target {self.target!r}")
        if self.n_mfs < 2:
            raise InvalidParametersError("n_mfs must be >= 2")
        if self.epochs < 0:
            raise InvalidParametersError("epochs must be >= 0")
        if not self.step_size > 0:
            raise InvalidParametersError("step_size must be > 0")

    def to_dict(self) -> dict:
        return {
            "n_mfs": self.n_mfs,
            "shape": self.shape,
            "epochs": self.epochs,
            "step_size": self.step_size,
            "target": self.target,
        }


# ---------------------------------------------------------------------------
# Construction


def grid_partition(n_mfs: int, shape: str = "gbell", domain=GRAY_DOMAIN) -> SugenoFis:
    """Engine with n_mfs evenly spaced terms per input and zeroed consequents.

    Adjacent terms cross at membership 0.5; the rule list is the full
    n_mfs x n_mfs grid.
    """
    if n_mfs < 2:
        raise InvalidParametersError(f"grid partition needs n_mfs >= 2, got {n_mfs}")
    if shape not in PREMISE_SHAPES:
        raise InvalidParametersError(f"unknown premise shape {shape!r}")
    lo, hi = float(domain[0]), float(domain[1])
    centers = np.linspace(lo, hi, n_mfs)
    spacing = (hi - lo) / (n_mfs - 1)
    if shape == "gbell":
        # gbell hits 0.5 at |x - c| == a
        params = np.column_stack(
            [np.full(n_mfs, spacing / 2.0), np.full(n_mfs, 2.0), centers]
        )
    else:
        sigma = spacing / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        params = np.column_stack([centers, np.full(n_mfs, sigma)])
    consequents = np.zeros((n_mfs * n_mfs, 3))
    return SugenoFis(shape, params, params.copy(), consequents, (lo, hi))


# ---------------------------------------------------------------------------
# Forward pass


def _premise_degrees(shape: str, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Membership of each x (N,) in each term (M,) -> (N, M)."""
    x = x[:, None]
    if shape == "gbell":
        a, b, c = params[:, 0], params[:, 1], params[:, 2]
        t = np.abs((x - c) / a)
        with np.errstate(over="ignore"):
            return 1.0 / (1.0 + t ** (2.0 * b))
    mean, sigma = params[:, 0], params[:, 1]
    z = (x - mean) / sigma
    return np.exp(-0.5 * z * z)


def _rule_outputs(model: SugenoFis, X: np.ndarray) -> np.ndarray:
    """Linear rule outputs f = p*x1 + q*x2 + r, shape (N, R).

    Broadcast arithmetic (not a matmul) so each row's result is
    independent of the batch size, keeping predict() bit-identical to
    mapping forward() over the rows.
    """
    cons = model.consequents
    return X[:, 0:1] * cons[:, 0] + X[:, 1:2] * cons[:, 1] + cons[:, 2]


def _forward_parts(model: SugenoFis, X: np.ndarray):
    """Return (y, wbar, w, f, S) for a batch X of shape (N, 2)."""
    mu1 = _premise_degrees(model.shape, model.premises1, X[:, 0])
    mu2 = _premise_degrees(model.shape, model.premises2, X[:, 1])
    n = X.shape[0]
    w = (mu1[:, :, None] * mu2[:, None, :]).reshape(n, model.n_rules)
    total = w.sum(axis=1)
    safe = np.where(total == 0.0, 1.0, total)
    wbar = w / safe[:, None]
    f = _rule_outputs(model, X)
    y = (wbar * f).sum(axis=1)
    return y, wbar, w, f, total


def forward(model: SugenoFis, x1: float, x2: float):
    """One five-layer evaluation; returns (output, per-rule strengths)."""
    X = np.array([[float(x1), float(x2)]])
    y, _, w, _, total = _forward_parts(model, X)
    if total[0] == 0.0:
        warnings.warn(
            f"no rule fires at ({x1}, {x2}); output forced to 0",
            AllRulesSilentWarning,
            stacklevel=2,
        )
    return float(y[0]), w[0].copy()


def predict(model: SugenoFis, pairs) -> np.ndarray:
    """Forward over a sequence of (x1, x2) pairs; outputs are not clamped."""
    X = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if X.shape[0] == 0:
        return np.empty(0)
    y, _, _, _, _ = _forward_parts(model, X)
    return y


# ---------------------------------------------------------------------------
# Training


def _as_training_data(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] == 0:
        raise InvalidParametersError(
            f"training data must be a non-empty (n, 3) array, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidParametersError("training data must be finite")
    return arr


def default_training_data(target: str = "identity") -> np.ndarray:
    """Synthetic (x1, x2, target) rows over the 8-bit gray range.

    identity: the 256 diagonal rows (k, k, k). mean and max: all pairs
    from a 17-point grid (16 equal steps across [0, 255]) with targets
    (x1 + x2) / 2 and max(x1, x2).
    """
    if target == "identity":
        k = np.arange(256, dtype=np.float64)
        return np.column_stack([k, k, k])
    if target in ("mean", "max"):
        grid = np.linspace(0.0, 255.0, 17)
        x1, x2 = [g.ravel() for g in np.meshgrid(grid, grid, indexing="ij")]
        t = (x1 + x2) / 2.0 if target == "mean" else np.maximum(x1, x2)
        return np.column_stack([x1, x2, t])
    raise InvalidParametersError(f"unknown training target {target!r}")


def lse_consequents(model: SugenoFis, data, damping: float = 1e-9) -> SugenoFis:
    """Least-squares consequents with the premises frozen.

    Solves the normal equations for all (p, q, r) at once; ridge damping
    keeps rank-deficient designs (e.g. diagonal-only data) well posed.
    """
    arr = _as_training_data(data)
    X, t = arr[:, :2], arr[:, 2]
    _, wbar, _, _, _ = _forward_parts(model, X)
    n = arr.shape[0]
    regressors = np.column_stack([X[:, 0], X[:, 1], np.ones(n)])
    phi = (wbar[:, :, None] * regressors[:, None, :]).reshape(n, 3 * model.n_rules)
    normal = phi.T @ phi
    if damping:
        normal[np.diag_indices_from(normal)] += damping
    try:
        theta = np.linalg.solve(normal, phi.T @ t)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "normal equations are singular; enable damping or enrich the data"
        ) from exc
    return SugenoFis(
        model.shape,
        model.premises1,
        model.premises2,
        theta.reshape(model.n_rules, 3),
        model.domain,
    )


def _premise_param_grads(shape: str, params: np.ndarray, x: np.ndarray):
    """d(membership)/d(parameter) for each x and term -> (N, M, P)."""
    x = x[:, None]
    if shape == "gbell":
        a, b, c = params[:, 0], params[:, 1], params[:, 2]
        diff = x - c
        t = np.abs(diff / a)
        with np.errstate(over="ignore"):
            v = np.minimum(t ** (2.0 * b), _OVERFLOW_CAP)
        mu = 1.0 / (1.0 + v)
        common = 2.0 * b * v * mu * mu
        d_a = common / a
        with np.errstate(divide="ignore", invalid="ignore"):
            d_c = np.where(diff != 0.0, common / diff, 0.0)
            d_b = np.where(t > 0.0, -v * (2.0 * np.log(np.where(t > 0, t, 1.0))) * mu * mu, 0.0)
        return np.stack([d_a, d_b, d_c], axis=2)
    mean, sigma = params[:, 0], params[:, 1]
    z = (x - mean) / sigma
    mu = np.exp(-0.5 * z * z)
    d_mean = mu * z / sigma
    d_sigma = mu * z * z / sigma
    return np.stack([d_mean, d_sigma], axis=2)


def _premise_gradients(model: SugenoFis, arr: np.ndarray):
    """Gradient of the sum-of-squared-errors loss w.r.t. both premise arrays."""
    X, t = arr[:, :2], arr[:, 2]
    n1, n2 = model.n_mfs
    mu1 = _premise_degrees(model.shape, model.premises1, X[:, 0])
    mu2 = _premise_degrees(model.shape, model.premises2, X[:, 1])
    n = arr.shape[0]
    w = (mu1[:, :, None] * mu2[:, None, :]).reshape(n, model.n_rules)
    total = w.sum(axis=1)
    safe = np.where(total == 0.0, 1.0, total)
    wbar = w / safe[:, None]
    f = _rule_outputs(model, X)
    y = (wbar * f).sum(axis=1)
    resid = y - t

    # dL/dw (N, n1, n2); silent rows contribute nothing
    alive = (total != 0.0).astype(np.float64)
    dl_dw = (2.0 * resid * alive / safe)[:, None] * (f - y[:, None])
    dl_dw = dl_dw.reshape(n, n1, n2)
    dl_dmu1 = np.einsum("nij,nj->ni", dl_dw, mu2)
    dl_dmu2 = np.einsum("nij,ni->nj", dl_dw, mu1)

    dmu1 = _premise_param_grads(model.shape, model.premises1, X[:, 0])
    dmu2 = _premise_param_grads(model.shape, model.premises2, X[:, 1])
    grad1 = np.einsum("ni,nip->ip", dl_dmu1, dmu1)
    grad2 = np.einsum("nj,njp->jp", dl_dmu2, dmu2)
    return grad1, grad2


def premise_gradient_step(model: SugenoFis, data, step_size: float) -> SugenoFis:
    """One batch gradient-descent step on the premise parameters.

    Width parameters are clamped to MIN_WIDTH afterwards so memberships
    stay well defined.
    """
    if step_size < 0:
        raise InvalidParametersError("step_size must be >= 0")
    arr = _as_training_data(data)
    grad1, grad2 = _premise_gradients(model, arr)
    new1 = model.premises1 - step_size * grad1
    new2 = model.premises2 - step_size * grad2
    width_col = 0 if model.shape == "gbell" else 1
    new1[:, width_col] = np.maximum(new1[:, width_col], MIN_WIDTH)
    new2[:, width_col] = np.maximum(new2[:, width_col], MIN_WIDTH)
    return SugenoFis(model.shape, new1, new2, model.consequents, model.domain)


def _rmse(model: SugenoFis, arr: np.ndarray) -> float:
    resid = predict(model, arr[:, :2]) - arr[:, 2]
    return float(np.sqrt(np.mean(resid * resid)))


def train_hybrid(
    model: SugenoFis, data, epochs: int, step_size: float = 0.01
) -> tuple:
    """Hybrid training: per epoch, solve consequents then step the premises.

    The step size is multiplied by 0.9 whenever the epoch RMSE rises and
    by 1.1 after two consecutive drops. epochs == 0 returns the model
    unchanged with an empty history.
    """
    if epochs < 0:
        raise InvalidParametersError("epochs must be >= 0")
    if not step_size > 0:
        raise InvalidParametersError("step_size must be > 0")
    if epochs == 0:
        return model, TrainingReport(0, (), float("nan"))
    arr = _as_training_data(data)
    step = float(step_size)
    drops = 0
    history = []
    current = model
    for _ in range(epochs):
        current = lse_consequents(current, arr)
        current = premise_gradient_step(current, arr, step)
        epoch_rmse = _rmse(current, arr)
        if history:
            if epoch_rmse > history[-1]:
                step *= 0.9
                drops = 0
            elif epoch_rmse < history[-1]:
                drops += 1
                if drops >= 2:
                    step *= 1.1
                    drops = 0
            else:
                drops = 0
        history.append(epoch_rmse)
    report = TrainingReport(epochs, tuple(history), history[-1])
    return current, report


# ---------------------------------------------------------------------------
# Persistence


def save_model(model: SugenoFis, path, metadata: dict | None = None) -> None:
    """Write the model as JSON so a fusion run is reproducible untrained."""
    doc = model.to_dict()
    if metadata:
        doc["metadata"] = metadata
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")


def load_model(path) -> SugenoFis:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return SugenoFis.from_dict(doc)
