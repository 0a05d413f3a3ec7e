"""Mixed and behavioural strategy spaces over a two-move decision tree.

Player X picks x with probability alpha1; player Y either commits in advance
to one of four pure reaction plans (mixed representation, weights beta0..beta3
over the plans (y|x=0, y|x=1) = (0,0), (0,1), (1,0), (1,1)) or plays the
branch probabilities directly (behavioural representation: q = P(y=1|x=0),
r = P(y=1|x=1)).  Both induce the same joint distribution on the 4-outcome
space via p = alpha1, q = beta2+beta3, r = beta1+beta3.

The comparison table evaluates a battery of distributional relations in four
ways: ambient gradients approached down an epsilon ladder in each
representation, and substituted (constrained) gradients in each
representation, at perfectly-correlated and at independent points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .core import Constrained, ConstraintSet, GradientResult, Limit, gradient
from .errors import DegenerateMarginal, OutOfRange, PreconditionError
from .jointbinary import (
    JointPoint,
    conditional_x0_given_y,
    correlation_of_joint,
    entropy_x,
    entropy_xy,
    entropy_y,
    mean_x,
    mean_xy,
    mean_y,
    var_x,
    var_y,
)

PROB_TOL = 1e-12

# ladder approach directions: into the interior, off the special manifold
MIXED_CORR_DIRECTION = tuple(np.array([0.0, -3.0, 1.0, 1.0]) / math.sqrt(11))
BEHAV_CORR_DIRECTION = (0.0, 1.0 / math.sqrt(2), -1.0 / math.sqrt(2))
MIXED_IND_DIRECTION = (0.0, 0.0, 1.0, 0.0)    # step beta2 off beta1 = beta2
BEHAV_IND_DIRECTION = (0.0, 0.0, 1.0)         # step r off r = q


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not -PROB_TOL <= value <= 1.0 + PROB_TOL:
        raise OutOfRange(f"{name} = {value!r} outside [0, 1]")
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class MixedPoint:
    """Weights over X's move and Y's four advance-commitment plans."""

    alpha1: float
    beta1: float
    beta2: float
    beta3: float

    def __post_init__(self):
        object.__setattr__(self, "alpha1",
                           _check_unit_interval("alpha1", self.alpha1))
        for name in ("beta1", "beta2", "beta3"):
            object.__setattr__(self, name,
                               _check_unit_interval(name, getattr(self, name)))
        if self.beta1 + self.beta2 + self.beta3 > 1.0 + 1e-9:
            raise OutOfRange(
                f"beta weights sum to {self.beta1 + self.beta2 + self.beta3}")

    @property
    def beta0(self) -> float:
        return max(0.0, 1.0 - self.beta1 - self.beta2 - self.beta3)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha1, self.beta1, self.beta2, self.beta3])


@dataclass(frozen=True)
class BehaviouralPoint:
    """Branch probabilities of the decision tree."""

    p: float
    q: float
    r: float

    def __post_init__(self):
        for name in ("p", "q", "r"):
            object.__setattr__(self, name,
                               _check_unit_interval(name, getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q, self.r])


# ---------------------------------------------------------------------------
# induced joints and the representation mapping

def mixed_joint_array(z) -> np.ndarray:
    """Joint 4-vector from raw (alpha1, beta1, beta2, beta3)."""
    a1, b1, b2, b3 = (float(v) for v in z)
    return np.array([
        (1.0 - a1) * (1.0 - b2 - b3),
        (1.0 - a1) * (b2 + b3),
        a1 * (1.0 - b1 - b3),
        a1 * (b1 + b3),
    ])


def behavioural_joint_array(z) -> np.ndarray:
    """Joint 4-vector from raw (p, q, r)."""
    p, q, r = (float(v) for v in z)
    return np.array([
        (1.0 - p) * (1.0 - q),
        (1.0 - p) * q,
        p * (1.0 - r),
        p * r,
    ])


def mixed_joint(m: MixedPoint) -> JointPoint:
    return JointPoint(*mixed_joint_array(m.as_array()))


def behavioural_joint(b: BehaviouralPoint) -> JointPoint:
    return JointPoint(*behavioural_joint_array(b.as_array()))


def behavioural_from_mixed(m: MixedPoint) -> BehaviouralPoint:
    """Collapse plan weights to branch probabilities (joint-preserving)."""
    return BehaviouralPoint(m.alpha1, m.beta2 + m.beta3, m.beta1 + m.beta3)


# ---------------------------------------------------------------------------
# closed-form statistics in each parameterization

def moments(point) -> dict[str, float]:
    """Means, variances, and entropies straight from the parameters."""
    if isinstance(point, MixedPoint):
        a1, b1, b2, b3 = point.as_array()
        p, q, r = a1, b2 + b3, b1 + b3
    elif isinstance(point, BehaviouralPoint):
        p, q, r = point.as_array()
    else:
        raise PreconditionError(f"unsupported point type {type(point)!r}")
    y_bar = q + p * (r - q)
    cells = behavioural_joint_array((p, q, r))
    return {
        "<x>": p,
        "<y>": y_bar,
        "<xy>": p * r,
        "V(x)": p * (1.0 - p),
        "V(y)": y_bar * (1.0 - y_bar),
        "E_x": float(-xlogy(1.0 - p, 1.0 - p) - xlogy(p, p)),
        "E_y": float(-xlogy(1.0 - y_bar, 1.0 - y_bar) - xlogy(y_bar, y_bar)),
        "E_xy": float(-xlogy(cells, cells).sum()),
    }


def mixed_correlation(m: MixedPoint) -> float:
    """sqrt(a1(1-a1)) (b1-b2) / sqrt(<y>(1-<y>))."""
    vx = m.alpha1 * (1.0 - m.alpha1)
    y_bar = moments(m)["<y>"]
    vy = y_bar * (1.0 - y_bar)
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateMarginal(f"zero-variance marginal: V(x)={vx}, V(y)={vy}")
    return math.sqrt(vx) * (m.beta1 - m.beta2) / math.sqrt(vy)


def behavioural_correlation(b: BehaviouralPoint) -> float:
    """sqrt(p(1-p)) (r-q) / sqrt(<y>(1-<y>))."""
    vx = b.p * (1.0 - b.p)
    y_bar = b.q + b.p * (b.r - b.q)
    vy = y_bar * (1.0 - y_bar)
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateMarginal(f"zero-variance marginal: V(x)={vx}, V(y)={vy}")
    return math.sqrt(vx) * (b.r - b.q) / math.sqrt(vy)


# ---------------------------------------------------------------------------
# the comparison table

@dataclass(frozen=True)
class ColumnSpec:
    """One way of differentiating: a parameterization plus a semantics."""

    name: str
    kind: str                         # "limit" | "constrained"
    parameters: tuple[str, ...]
    dimension: int
    point_of: object = field(repr=False)      # sample -> coordinate array
    joint_of: object = field(repr=False)      # coordinates -> joint 4-vector
    direction: tuple | None = None            # limit columns only


@dataclass(frozen=True)
class RowSpec:
    label: str
    group: str
    relation: object = field(repr=False)      # joint 4-vector -> float


@dataclass(frozen=True)
class TableEntry:
    """One (relation, column) cell, aggregated over all sample points."""

    row: str
    group: str
    column: str
    expected: str                    # "components" | "zero" | "unit" | "nonzero"
    dimension: int
    kinds: tuple[str, ...]           # gradient kinds seen across samples
    components: tuple | None         # result at the first sample (if finite)
    worst_error: float | None        # vs closed form / zero, where applicable
    evidence: float | None           # smallest ladder magnitude (nonzero rows)
    passed: bool


@dataclass(frozen=True)
class Table1Report:
    case: str
    seed: int
    n_samples: int
    columns: tuple[ColumnSpec, ...]
    entries: tuple[TableEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, row: str, column: str) -> TableEntry:
        for e in self.entries:
            if e.row == row and e.column == column:
                return e
        raise KeyError((row, column))

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "columns": [
                {"name": c.name, "kind": c.kind,
                 "parameters": list(c.parameters), "dimension": c.dimension}
                for c in self.columns],
            "passed": self.passed,
            "entries": [
                {"row": e.row, "group": e.group, "column": e.column,
                 "expected": e.expected, "dimension": e.dimension,
                 "kinds": list(e.kinds),
                 "components": (None if e.components is None
                                else list(e.components)),
                 "worst_error": e.worst_error, "evidence": e.evidence,
                 "passed": e.passed}
                for e in self.entries],
        }


def _cov(j) -> float:
    return mean_xy(j) - mean_x(j) * mean_y(j)


CORRELATED_ROWS = (
    RowSpec("P(0,0)+P(1,1)", "probability conservation",
            lambda j: float(j[0] + j[3])),
    RowSpec("P(0,1)+P(1,0)", "probability conservation",
            lambda j: float(j[1] + j[2])),
    RowSpec("P_x|y(0|0)", "conditionals", lambda j: conditional_x0_given_y(j, 0)),
    RowSpec("P_x|y(0|1)", "conditionals", lambda j: conditional_x0_given_y(j, 1)),
    RowSpec("<x>", "expectations", mean_x),
    RowSpec("<y>", "expectations", mean_y),
    RowSpec("<xy>", "expectations", mean_xy),
    RowSpec("V(x)+V(y)-2cov", "variance",
            lambda j: var_x(j) + var_y(j) - 2.0 * _cov(j)),
    RowSpec("E_xy-E_x", "entropy", lambda j: entropy_xy(j) - entropy_x(j)),
    RowSpec("rho_xy", "correlation", correlation_of_joint),
)

INDEPENDENT_ROWS = (
    RowSpec("P(0,0)-Px(0)Py(0)", "probability",
            lambda j: float(j[0] - (j[0] + j[1]) * (j[0] + j[2]))),
    RowSpec("P(0,1)-Px(0)Py(1)", "probability",
            lambda j: float(j[1] - (j[0] + j[1]) * (j[1] + j[3]))),
    RowSpec("P(1,0)-Px(1)Py(0)", "probability",
            lambda j: float(j[2] - (j[2] + j[3]) * (j[0] + j[2]))),
    RowSpec("P(1,1)-Px(1)Py(1)", "probability",
            lambda j: float(j[3] - (j[2] + j[3]) * (j[1] + j[3]))),
    RowSpec("P_x|y(0|0)-Px(0)", "conditionals",
            lambda j: conditional_x0_given_y(j, 0) - float(j[0] + j[1])),
    RowSpec("P_x|y(0|1)-Px(0)", "conditionals",
            lambda j: conditional_x0_given_y(j, 1) - float(j[0] + j[1])),
    RowSpec("<xy>-<x><y>", "expectation", _cov),
    RowSpec("E_xy-E_x-E_y", "entropy",
            lambda j: entropy_xy(j) - entropy_x(j) - entropy_y(j)),
    RowSpec("rho_xy", "correlation", correlation_of_joint),
)


def _correlated_columns() -> tuple[ColumnSpec, ...]:
    return (
        ColumnSpec("P_M", "limit", ("alpha1", "beta1", "beta2", "beta3"), 4,
                   lambda s: np.array([s["alpha1"], 1.0, 0.0, 0.0]),
                   mixed_joint_array, MIXED_CORR_DIRECTION),
        ColumnSpec("P_B", "limit", ("p", "q", "r"), 3,
                   lambda s: np.array([s["p"], 0.0, 1.0]),
                   behavioural_joint_array, BEHAV_CORR_DIRECTION),
        ColumnSpec("P_M|beta1=1", "constrained", ("alpha1",), 1,
                   lambda s: np.array([s["alpha1"]]),
                   lambda z: mixed_joint_array((z[0], 1.0, 0.0, 0.0))),
        ColumnSpec("P_B|(q,r)=(0,1)", "constrained", ("p",), 1,
                   lambda s: np.array([s["p"]]),
                   lambda z: behavioural_joint_array((z[0], 0.0, 1.0))),
    )


def _independent_columns() -> tuple[ColumnSpec, ...]:
    return (
        ColumnSpec("P_M", "limit", ("alpha1", "beta1", "beta2", "beta3"), 4,
                   lambda s: np.array([s["alpha1"], s["beta12"], s["beta12"],
                                       s["beta3"]]),
                   mixed_joint_array, MIXED_IND_DIRECTION),
        ColumnSpec("P_B", "limit", ("p", "q", "r"), 3,
                   lambda s: np.array([s["p"], s["q"], s["q"]]),
                   behavioural_joint_array, BEHAV_IND_DIRECTION),
        ColumnSpec("P_M|beta1=beta2", "constrained", ("alpha1", "beta_bar"), 2,
                   lambda s: np.array([s["alpha1"], s["beta12"] + s["beta3"]]),
                   lambda z: behavioural_joint_array((z[0], z[1], z[1]))),
        ColumnSpec("P_B|r=q", "constrained", ("p", "q"), 2,
                   lambda s: np.array([s["p"], s["q"]]),
                   lambda z: behavioural_joint_array((z[0], z[1], z[1]))),
    )


def _correlated_expected() -> dict:
    """Closed-form component patterns per (row, column)."""
    def mix(f):
        return ("components", lambda s: f(s["alpha1"]))

    def beh(f):
        return ("components", lambda s: f(s["p"]))

    zero, unit, nonzero = ("zero",), ("unit",), ("nonzero",)
    table = {
        "P(0,0)+P(1,1)": (
            mix(lambda a: (0.0, a, -(1 - a), 2 * a - 1)),
            beh(lambda p: (0.0, -(1 - p), p)), zero, zero),
        "P(0,1)+P(1,0)": (
            mix(lambda a: (0.0, -a, 1 - a, 1 - 2 * a)),
            beh(lambda p: (0.0, 1 - p, -p)), zero, zero),
        "P_x|y(0|0)": (
            mix(lambda a: (0.0, a / (1 - a), 0.0, a / (1 - a))),
            beh(lambda p: (0.0, 0.0, p / (1 - p))), zero, zero),
        "P_x|y(0|1)": (
            mix(lambda a: (0.0, 0.0, (1 - a) / a, (1 - a) / a)),
            beh(lambda p: (0.0, (1 - p) / p, 0.0)), zero, zero),
        "<x>": (mix(lambda a: (1.0, 0.0, 0.0, 0.0)),
                beh(lambda p: (1.0, 0.0, 0.0)), unit, unit),
        "<y>": (mix(lambda a: (1.0, a, 1 - a, 1.0)),
                beh(lambda p: (1.0, 1 - p, p)), unit, unit),
        "<xy>": (mix(lambda a: (1.0, a, 0.0, a)),
                 beh(lambda p: (1.0, 0.0, p)), unit, unit),
        "V(x)+V(y)-2cov": (
            mix(lambda a: (0.0, -a, 1 - a, 1 - 2 * a)),
            beh(lambda p: (0.0, 1 - p, -p)), zero, zero),
        "E_xy-E_x": (nonzero, nonzero, zero, zero),
        "rho_xy": (nonzero, nonzero, zero, zero),
    }
    return table


def _independent_expected() -> dict:
    def mix(f):
        return ("components",
                lambda s: f(s["alpha1"], s["beta12"] + s["beta3"]))

    def beh(f):
        return ("components", lambda s: f(s["p"], s["q"]))

    zero, nonzero = ("zero",), ("nonzero",)

    def k(a):
        return a * (1 - a)

    table = {
        "P(0,0)-Px(0)Py(0)": (
            mix(lambda a, bb: (0.0, k(a), -k(a), 0.0)),
            beh(lambda p, q: (0.0, -k(p), k(p))), zero, zero),
        "P(0,1)-Px(0)Py(1)": (
            mix(lambda a, bb: (0.0, -k(a), k(a), 0.0)),
            beh(lambda p, q: (0.0, k(p), -k(p))), zero, zero),
        "P(1,0)-Px(1)Py(0)": (
            mix(lambda a, bb: (0.0, -k(a), k(a), 0.0)),
            beh(lambda p, q: (0.0, k(p), -k(p))), zero, zero),
        "P(1,1)-Px(1)Py(1)": (
            mix(lambda a, bb: (0.0, k(a), -k(a), 0.0)),
            beh(lambda p, q: (0.0, -k(p), k(p))), zero, zero),
        "P_x|y(0|0)-Px(0)": (
            mix(lambda a, bb: (0.0, k(a) / (1 - bb), -k(a) / (1 - bb), 0.0)),
            beh(lambda p, q: (0.0, -k(p) / (1 - q), k(p) / (1 - q))),
            zero, zero),
        "P_x|y(0|1)-Px(0)": (
            mix(lambda a, bb: (0.0, -k(a) / bb, k(a) / bb, 0.0)),
            beh(lambda p, q: (0.0, k(p) / q, -k(p) / q)), zero, zero),
        "<xy>-<x><y>": (
            mix(lambda a, bb: (0.0, k(a), -k(a), 0.0)),
            beh(lambda p, q: (0.0, -k(p), k(p))), zero, zero),
        "E_xy-E_x-E_y": (nonzero, nonzero, zero, zero),
        "rho_xy": (nonzero, nonzero, zero, zero),
    }
    return table


CASES = {
    "correlated": (CORRELATED_ROWS, _correlated_columns, _correlated_expected),
    "independent": (INDEPENDENT_ROWS, _independent_columns,
                    _independent_expected),
}

COMPONENT_TOL = 1e-5
ZERO_TOL = 1e-8
NONZERO_FLOOR = 1e-6


def sample_points(case: str, n: int, seed: int) -> list[dict]:
    """Reproducible parameter draws keeping every denominator comfortable."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        s = {"alpha1": rng.uniform(0.15, 0.85), "p": rng.uniform(0.15, 0.85)}
        if case == "independent":
            s["beta12"] = rng.uniform(0.10, 0.30)
            s["beta3"] = rng.uniform(0.05, 0.30)
            s["q"] = rng.uniform(0.15, 0.85)
        out.append(s)
    return out


def _evaluate_cell(row: RowSpec, col: ColumnSpec, expected, samples):
    rel = lambda z: float(row.relation(col.joint_of(z)))
    kinds, components, worst, evidence = [], None, 0.0, math.inf
    passed = True
    for i, s in enumerate(samples):
        z = col.point_of(s)
        if col.kind == "limit":
            res = gradient(rel, z, Limit(col.direction))
        else:
            res = gradient(rel, z, Constrained(ConstraintSet.empty()))
        kinds.append(res.kind)
        if len(res) and len(res) != col.dimension:
            passed = False
        if i == 0 and res.components is not None:
            components = res.components
        if expected[0] == "components":
            want = np.asarray(expected[1](s), dtype=float)
            if not res.is_finite:
                passed = False
                continue
            err = float(np.max(np.abs(np.asarray(res.components) - want)))
            worst = max(worst, err)
            passed = passed and err <= COMPONENT_TOL
        elif expected[0] == "unit":
            if not res.is_finite:
                passed = False
                continue
            err = float(np.max(np.abs(np.asarray(res.components) - 1.0)))
            worst = max(worst, err)
            passed = passed and err <= ZERO_TOL
        elif expected[0] == "zero":
            if not res.is_finite:
                passed = False
                continue
            worst = max(worst, res.magnitude)
            passed = passed and res.magnitude <= ZERO_TOL
        else:   # "nonzero"
            mag = res.max_ladder_magnitude
            evidence = min(evidence, mag)
            passed = passed and (res.kind == "diverging"
                                 or mag > NONZERO_FLOOR)
    return TableEntry(
        row=row.label, group=row.group, column=col.name, expected=expected[0],
        dimension=col.dimension, kinds=tuple(sorted(set(kinds))),
        components=components,
        worst_error=None if expected[0] == "nonzero" else worst,
        evidence=None if expected[0] != "nonzero" else
        (evidence if math.isfinite(evidence) else None),
        passed=passed)


def table1(case: str, n_samples: int = 20, seed: int = 42) -> Table1Report:
    """Evaluate every table row in all four columns at seeded sample points.

    case is "correlated" (the rho = 1 half) or "independent" (rho = 0).
    """
    if case not in CASES:
        raise PreconditionError(
            f"unknown case {case!r}; one of {sorted(CASES)}")
    rows, columns_fn, expected_fn = CASES[case]
    columns = columns_fn()
    expected = expected_fn()
    samples = sample_points(case, n_samples, seed)
    entries = []
    for row in rows:
        for col, exp in zip(columns, expected[row.label]):
            entries.append(_evaluate_cell(row, col, exp, samples))
    return Table1Report(case=case, seed=seed, n_samples=n_samples,
                        columns=columns, entries=tuple(entries))
