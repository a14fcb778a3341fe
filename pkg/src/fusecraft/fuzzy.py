"""Two-input Mamdani fuzzy inference over the gray-level domain.

Semantics are the classical ones: AND = min, OR = max, implication clips
the consequent set at the rule's firing strength, rules aggregate by
pointwise max, and the crisp output is the centroid of the aggregated
curve sampled on a uniform grid. When no rule fires at all, the engine
falls back to the mean of the two (clamped) inputs so that every input
pair still produces a fused value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import (
    EmptyRuleBaseError,
    InvalidParametersError,
    UnknownTermLabelError,
)

GRAY_DOMAIN = (0.0, 255.0)


# ---------------------------------------------------------------------------
# Membership functions


@dataclass(frozen=True)
class Triangular:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c:
            raise InvalidParametersError(
                f"triangular needs a <= b <= c, got {(self.a, self.b, self.c)}"
            )

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(over="ignore"):
            rise = (
                (x - self.a) / (self.b - self.a)
                if self.b > self.a
                else (x >= self.b).astype(np.float64)
            )
            fall = (
                (self.c - x) / (self.c - self.b)
                if self.c > self.b
                else (x <= self.b).astype(np.float64)
            )
        return np.clip(np.minimum(rise, fall), 0.0, 1.0)

    @property
    def support(self):
        return (self.a, self.c)


@dataclass(frozen=True)
class Trapezoidal:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c <= self.d:
            raise InvalidParametersError(
                f"trapezoidal needs a <= b <= c <= d, got "
                f"{(self.a, self.b, self.c, self.d)}"
            )

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        rise = (
            (x - self.a) / (self.b - self.a)
            if self.b > self.a
            else (x >= self.b).astype(np.float64)
        )
        fall = (
            (self.d - x) / (self.d - self.c)
            if self.d > self.c
            else (x <= self.c).astype(np.float64)
        )
        return np.clip(np.minimum(rise, fall), 0.0, 1.0)

    @property
    def support(self):
        return (self.a, self.d)


@dataclass(frozen=True)
class Gaussian:
    mean: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParametersError(f"gaussian needs sigma > 0, got {self.sigma}")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        z = (x - self.mean) / self.sigma
        return np.exp(-0.5 * z * z)

    @property
    def support(self):
        return (-np.inf, np.inf)


@dataclass(frozen=True)
class GeneralizedBell:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.a > 0:
            raise InvalidParametersError(f"gbell needs width a > 0, got {self.a}")
        if not self.b > 0:
            raise InvalidParametersError(f"gbell needs slope b > 0, got {self.b}")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        t = np.abs((x - self.c) / self.a)
        with np.errstate(over="ignore"):
            return 1.0 / (1.0 + t ** (2.0 * self.b))

    @property
    def support(self):
        return (-np.inf, np.inf)


MembershipFunction = Union[Triangular, Trapezoidal, Gaussian, GeneralizedBell]

MF_SHAPES = {
    "triangular": Triangular,
    "trapezoidal": Trapezoidal,
    "gaussian": Gaussian,
    "gbell": GeneralizedBell,
}


def membership(mf: MembershipFunction, x) -> float:
    """Degree in [0, 1] to which x belongs to the fuzzy set mf."""
    return float(mf(x))


# ---------------------------------------------------------------------------
# Variables, rules, engine


@dataclass(frozen=True)
class LinguisticVariable:
    """A named input or output with an ordered list of labelled terms."""

    name: str
    terms: tuple
    domain: tuple = GRAY_DOMAIN

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((str(l), mf) for l, mf in self.terms))
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))
        if not self.terms:
            raise InvalidParametersError(f"variable {self.name!r} has no terms")
        labels = [label for label, _ in self.terms]
        if len(set(labels)) != len(labels):
            raise InvalidParametersError(f"duplicate term labels in {self.name!r}")
        lo, hi = self.domain
        if not lo < hi:
            raise InvalidParametersError(f"empty domain for {self.name!r}")
        for label, mf in self.terms:
            s_lo, s_hi = mf.support
            if max(s_lo, lo) > min(s_hi, hi):
                raise InvalidParametersError(
                    f"term {label!r} of {self.name!r} lies outside the domain"
                )

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.terms)

    def term(self, label: str) -> MembershipFunction:
        for term_label, mf in self.terms:
            if term_label == label:
                return mf
        raise UnknownTermLabelError(f"{self.name!r} has no term {label!r}")


@dataclass(frozen=True)
class FuzzyRule:
    """If-then rule; antecedent entries are (input number, term label).

    Input numbers are 1-based. A single-entry antecedent ignores the
    connective.
    """

    antecedent: tuple
    connective: str
    consequent: str
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "antecedent", tuple((int(i), str(l)) for i, l in self.antecedent)
        )
        object.__setattr__(self, "connective", str(self.connective).lower())
        if not self.antecedent:
            raise InvalidParametersError("rule needs at least one antecedent entry")
        if self.connective not in ("and", "or"):
            raise InvalidParametersError(f"unknown connective {self.connective!r}")
        if not 0.0 < self.weight <= 1.0:
            raise InvalidParametersError(f"rule weight must be in (0, 1], got {self.weight}")


@dataclass(frozen=True)
class MamdaniFis:
    """Immutable two-input, one-output Mamdani engine."""

    inputs: tuple
    output: LinguisticVariable
    rules: tuple
    defuzz_resolution: int = 256

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        if len(self.inputs) != 2:
            raise InvalidParametersError("engine needs exactly two input variables")
        if not self.rules:
            raise EmptyRuleBaseError("engine needs at least one rule")
        if self.defuzz_resolution < 2:
            raise InvalidParametersError("defuzz_resolution must be >= 2")
        _check_labels(self.inputs, self.output, self.rules)


def _check_labels(inputs, output, rules):
    for rule in rules:
        for idx, label in rule.antecedent:
            if not 1 <= idx <= len(inputs):
                raise UnknownTermLabelError(f"rule references input {idx}, have 1..{len(inputs)}")
            if label not in inputs[idx - 1].labels:
                raise UnknownTermLabelError(
                    f"input {idx} ({inputs[idx - 1].name!r}) has no term {label!r}"
                )
        if rule.consequent not in output.labels:
            raise UnknownTermLabelError(
                f"output {output.name!r} has no term {rule.consequent!r}"
            )


def build_fis(inputs, output, rules, defuzz_resolution: int = 256) -> MamdaniFis:
    """Validate and assemble an engine, dropping exact duplicate rules.

    Duplicates (same antecedent, connective, and consequent) are no-ops
    under max-aggregation; the first occurrence wins.
    """
    inputs = tuple(inputs)
    rules = tuple(rules)
    if len(inputs) != 2:
        raise InvalidParametersError("engine needs exactly two input variables")
    if not rules:
        raise EmptyRuleBaseError("rule list is empty")
    _check_labels(inputs, output, rules)
    seen = set()
    kept = []
    for rule in rules:
        key = (rule.antecedent, rule.connective, rule.consequent)
        if key not in seen:
            seen.add(key)
            kept.append(rule)
    return MamdaniFis(inputs, output, tuple(kept), defuzz_resolution)


def default_rule_base():
    """The stock three-term engine definition for 8-bit fusion.

    Each variable carries triangular terms mf1/mf2/mf3 peaked at 0,
    127.5, and 255 with 50% overlap. The stock rule list contains one
    textually duplicated rule; it is dropped, leaving five.
    """
    def three_terms():
        return (
            ("mf1", Triangular(-127.5, 0.0, 127.5)),
            ("mf2", Triangular(0.0, 127.5, 255.0)),
            ("mf3", Triangular(127.5, 255.0, 382.5)),
        )

    inputs = (
        LinguisticVariable("input1", three_terms()),
        LinguisticVariable("input2", three_terms()),
    )
    output = LinguisticVariable("output1", three_terms())
    raw_rules = (
        FuzzyRule(((1, "mf1"), (2, "mf2")), "and", "mf1"),
        FuzzyRule(((1, "mf2"), (2, "mf2")), "and", "mf2"),
        FuzzyRule(((1, "mf2"), (2, "mf2")), "and", "mf2"),
        FuzzyRule(((1, "mf3"), (2, "mf2")), "or", "mf3"),
        FuzzyRule(((1, "mf1"), (2, "mf3")), "and", "mf1"),
        FuzzyRule(((1, "mf3"), (2, "mf3")), "or", "mf2"),
    )
    seen = set()
    rules = []
    for rule in raw_rules:
        key = (rule.antecedent, rule.connective, rule.consequent)
        if key not in seen:
            seen.add(key)
            rules.append(rule)
    return inputs, output, tuple(rules)


def default_fis(defuzz_resolution: int = 256) -> MamdaniFis:
    inputs, output, rules = default_rule_base()
    return build_fis(inputs, output, rules, defuzz_resolution)


# ---------------------------------------------------------------------------
# Inference


@lru_cache(maxsize=32)
def _engine_tables(fis: MamdaniFis):
    """Sampled output grid and per-rule consequent curves, cached per engine."""
    lo, hi = fis.output.domain
    ys = np.linspace(lo, hi, fis.defuzz_resolution)
    ys.setflags(write=False)
    curves = []
    for rule in fis.rules:
        curve = fis.output.term(rule.consequent)(ys)
        curve.setflags(write=False)
        curves.append(curve)
    return ys, tuple(curves)


def _rule_strengths(fis: MamdaniFis, degrees1, degrees2) -> list:
    """Firing strengths given per-term degrees (python floats) per input."""
    lookup = (degrees1, degrees2)
    strengths = []
    for rule in fis.rules:
        values = [lookup[idx - 1][label] for idx, label in rule.antecedent]
        s = min(values) if rule.connective == "and" else max(values)
        strengths.append(s * rule.weight)
    return strengths


def _centroid(ys, curves, strengths):
    """Centroid of the max-aggregated clipped curves; None if all zero."""
    agg = np.zeros_like(ys)
    for s, curve in zip(strengths, curves):
        if s > 0.0:
            np.maximum(agg, np.minimum(curve, s), out=agg)
    total = float(np.sum(agg))
    if total == 0.0:
        return None
    return float(np.dot(ys, agg) / total)


def _term_degrees(variable: LinguisticVariable, x: float) -> dict:
    return {label: float(mf(x)) for label, mf in variable.terms}


def _clamp(x: float, domain) -> float:
    return min(max(float(x), domain[0]), domain[1])


def evaluate(fis: MamdaniFis, x1: float, x2: float) -> float:
    """Crisp fused value for one input pair.

    Inputs are clamped to their variable domains. If no rule fires the
    result is the mean of the clamped inputs.
    """
    x1c = _clamp(x1, fis.inputs[0].domain)
    x2c = _clamp(x2, fis.inputs[1].domain)
    degrees1 = _term_degrees(fis.inputs[0], x1c)
    degrees2 = _term_degrees(fis.inputs[1], x2c)
    strengths = _rule_strengths(fis, degrees1, degrees2)
    ys, curves = _engine_tables(fis)
    crisp = _centroid(ys, curves, strengths)
    if crisp is None:
        return (x1c + x2c) / 2.0
    return crisp


def evaluate_lut(fis: MamdaniFis) -> np.ndarray:
    """256x256 table with table[i, j] == evaluate(fis, i, j), bit-exact.

    Per-pixel inference over 8-bit inputs only ever sees integer pairs,
    so fusion can use this table interchangeably with evaluate().
    """
    xs = np.arange(256, dtype=np.float64)
    xs1 = np.clip(xs, *fis.inputs[0].domain)
    xs2 = np.clip(xs, *fis.inputs[1].domain)

    def degree_dicts(variable, values):
        grids = [mf(values) for _, mf in variable.terms]
        labels = variable.labels
        return [
            {label: float(grid[k]) for label, grid in zip(labels, grids)}
            for k in range(len(values))
        ]

    degrees1_all = degree_dicts(fis.inputs[0], xs1)
    degrees2_all = degree_dicts(fis.inputs[1], xs2)
    ys, curves = _engine_tables(fis)

    table = np.empty((256, 256), dtype=np.float64)
    for i in range(256):
        degrees1 = degrees1_all[i]
        fallback_left = float(xs1[i])
        for j in range(256):
            strengths = _rule_strengths(fis, degrees1, degrees2_all[j])
            crisp = _centroid(ys, curves, strengths)
            if crisp is None:
                crisp = (fallback_left + float(xs2[j])) / 2.0
            table[i, j] = crisp
    table.setflags(write=False)
    return table
