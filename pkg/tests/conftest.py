"""Shared test helpers: random rasters and independent reference oracles.

The oracles deliberately avoid the library's computation paths: the
inference oracle rebuilds membership curves from breakpoints / plain
formulas and integrates with the trapezoid rule, and the information
oracle enumerates joint cells one by one with math.log2.
"""

import math
from collections import Counter

import numpy as np

from fusecraft import Image
from fusecraft.fuzzy import Gaussian, GeneralizedBell, Trapezoidal, Triangular


def random_image(rng, rows, cols) -> Image:
    return Image(rng.integers(0, 256, (rows, cols), dtype=np.uint8))


def random_nonconstant_image(rng, rows, cols) -> Image:
    arr = rng.integers(0, 256, (rows, cols), dtype=np.uint8)
    if arr.min() == arr.max():
        arr = arr.copy()
        arr[0, 0] = (int(arr[0, 0]) + 1) % 256
    return Image(arr)


# ---------------------------------------------------------------------------
# Mamdani inference oracle


def oracle_curve(mf, ys: np.ndarray) -> np.ndarray:
    """Membership curve rebuilt from first principles (interp/formulas)."""
    if isinstance(mf, Triangular):
        xp, fp = [mf.a, mf.b, mf.c], [0.0, 1.0, 0.0]
        if mf.a == mf.b:
            xp, fp = [mf.b, mf.c], [1.0, 0.0]
        if mf.b == mf.c:
            xp, fp = xp[:-1], fp[:-1]
        return np.interp(ys, xp, fp, left=0.0, right=0.0)
    if isinstance(mf, Trapezoidal):
        xp = [mf.a, mf.b, mf.c, mf.d]
        fp = [0.0, 1.0, 1.0, 0.0]
        pairs = []
        for x, f in zip(xp, fp):
            if not pairs or x > pairs[-1][0]:
                pairs.append((x, f))
            else:
                pairs[-1] = (x, max(pairs[-1][1], f))
        xs = [p[0] for p in pairs]
        vs = [p[1] for p in pairs]
        return np.interp(ys, xs, vs, left=0.0, right=0.0)
    if isinstance(mf, Gaussian):
        return np.exp(-((ys - mf.mean) ** 2) / (2.0 * mf.sigma**2))
    if isinstance(mf, GeneralizedBell):
        with np.errstate(over="ignore"):
            return 1.0 / (1.0 + np.abs((ys - mf.c) / mf.a) ** (2 * mf.b))
    raise TypeError(f"no oracle for {type(mf)}")


def oracle_degree(mf, x: float) -> float:
    return float(oracle_curve(mf, np.array([float(x)]))[0])


def oracle_crisp(fis, x1: float, x2: float, resolution: int = 100_000) -> float:
    """Reference defuzzifier: trapezoid-rule centroid at high resolution.

    Mirrors the engine's documented conventions (min/max connectives,
    clip implication, max aggregation, mean-of-inputs fallback) but not
    its code.
    """
    lo1, hi1 = fis.inputs[0].domain
    lo2, hi2 = fis.inputs[1].domain
    x1 = min(max(float(x1), lo1), hi1)
    x2 = min(max(float(x2), lo2), hi2)
    degrees = [
        {label: oracle_degree(mf, x) for label, mf in var.terms}
        for var, x in zip(fis.inputs, (x1, x2))
    ]
    lo, hi = fis.output.domain
    ys = np.linspace(lo, hi, resolution)
    aggregated = np.zeros_like(ys)
    fired = False
    for rule in fis.rules:
        vals = [degrees[idx - 1][label] for idx, label in rule.antecedent]
        strength = (min(vals) if rule.connective == "and" else max(vals)) * rule.weight
        if strength > 0.0:
            fired = True
            clipped = np.minimum(oracle_curve(fis.output.term(rule.consequent), ys), strength)
            aggregated = np.maximum(aggregated, clipped)
    mass = np.trapezoid(aggregated, ys)
    if not fired or mass == 0.0:
        return (x1 + x2) / 2.0
    return float(np.trapezoid(ys * aggregated, ys) / mass)


# ---------------------------------------------------------------------------
# Information oracles


def oracle_mutual_information(a: Image, b: Image) -> float:
    """Cell-by-cell joint-histogram enumeration, log base 2."""
    xs = a.pixels.tolist()
    ys = b.pixels.tolist()
    n = len(xs)
    joint = Counter(zip(xs, ys))
    pa = Counter(xs)
    pb = Counter(ys)
    total = 0.0
    for (x, y), count in sorted(joint.items()):
        pxy = count / n
        total += pxy * math.log2(pxy / ((pa[x] / n) * (pb[y] / n)))
    return total


def oracle_entropy(img: Image) -> float:
    counts = Counter(img.pixels.tolist())
    n = img.rows * img.cols
    return -sum((c / n) * math.log2(c / n) for c in sorted(counts.values()))


# ---------------------------------------------------------------------------
# Finite-difference gradient oracle


def random_sugeno_model(rng, shape="gbell", n1=2, n2=2):
    from fusecraft.anfis import SugenoFis

    def premises(count):
        if shape == "gbell":
            return np.column_stack(
                [
                    rng.uniform(20.0, 80.0, count),
                    rng.uniform(1.5, 3.0, count),
                    rng.uniform(10.0, 245.0, count),
                ]
            )
        return np.column_stack(
            [rng.uniform(10.0, 245.0, count), rng.uniform(20.0, 80.0, count)]
        )

    consequents = np.column_stack(
        [
            rng.uniform(-1.0, 1.0, n1 * n2),
            rng.uniform(-1.0, 1.0, n1 * n2),
            rng.uniform(-50.0, 50.0, n1 * n2),
        ]
    )
    return SugenoFis(shape, premises(n1), premises(n2), consequents)


def random_training_rows(rng, n=10) -> np.ndarray:
    return np.column_stack(
        [
            rng.uniform(0.0, 255.0, n),
            rng.uniform(0.0, 255.0, n),
            rng.uniform(0.0, 255.0, n),
        ]
    )


def fd_premise_gradients(model, data, h=1e-5):
    """Central finite differences of the SSE loss, element by element."""
    import dataclasses

    from fusecraft.anfis import predict

    arr = np.asarray(data, dtype=np.float64)

    def loss(m):
        resid = predict(m, arr[:, :2]) - arr[:, 2]
        return float(np.sum(resid * resid))

    out = []
    for attr in ("premises1", "premises2"):
        base = getattr(model, attr)
        grad = np.zeros_like(base)
        for idx in np.ndindex(base.shape):
            plus = np.array(base)
            minus = np.array(base)
            plus[idx] += h
            minus[idx] -= h
            grad[idx] = (
                loss(dataclasses.replace(model, **{attr: plus}))
                - loss(dataclasses.replace(model, **{attr: minus}))
            ) / (2.0 * h)
        out.append(grad)
    return out


def gradient_max_rel_err(analytic, numeric) -> float:
    worst = 0.0
    for ga, gf in zip(analytic, numeric):
        denom = np.maximum(1.0, np.maximum(np.abs(ga), np.abs(gf)))
        worst = max(worst, float(np.max(np.abs(ga - gf) / denom)))
    return worst
