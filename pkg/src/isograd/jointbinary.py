"""Joint distributions of two binary variables on the 4-outcome simplex.

Outcomes are ordered (x,y) = (0,0), (0,1), (1,0), (1,1) with probabilities
(a, b, c, d); d is resolved by normalization, so gradients act on (a, b, c).

Two sub-families matter:

* perfectly correlated points, b = c = 0 — a 1-dimensional space;
* independent points, ad = bc — a 2-dimensional manifold.

Every statistic (correlation, entropies, Fisher information, likelihood
gradients) is computed both on the constrained space and on the full ambient
space, and the two disagree in exactly the ways the relation suite documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .core import (
    ConstraintSet,
    Constrained,
    GradientResult,
    Limit,
    ProbVector,
    finite_difference,
    gradient,
    resolve,
)
from .errors import (
    DegenerateMarginal,
    DomainError,
    EmptyData,
    InfeasiblePoint,
    PreconditionError,
)

SQRT2 = math.sqrt(2.0)
CORRELATED_DIRECTION = (0.0, 1.0 / SQRT2, 1.0 / SQRT2)   # b,c off the face
INDEPENDENT_DIRECTION = (1.0, 0.0, 0.0)                  # off ad = bc


@dataclass(frozen=True)
class JointPoint:
    """A joint distribution (a, b, c, d) with d resolved by normalization."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        pv = resolve((self.a, self.b, self.c, self.d))
        for name, val in zip("abcd", pv.probs):
            object.__setattr__(self, name, val)

    @property
    def pv(self) -> ProbVector:
        return ProbVector((self.a, self.b, self.c, self.d), 3)

    @property
    def probs(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def free_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=float)


@dataclass(frozen=True)
class CountData:
    """Observed outcome counts for the four joint cells."""

    n_a: int
    n_b: int
    n_c: int
    n_d: int

    def __post_init__(self):
        for v in self.counts:
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise PreconditionError(f"counts must be nonnegative ints: {v!r}")

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.n_a, self.n_b, self.n_c, self.n_d)

    @property
    def n(self) -> int:
        return sum(self.counts)


# ---------------------------------------------------------------------------
# statistics of a joint 4-vector (free-coordinate callables used by gradients)

def joint_from_free(free) -> np.ndarray:
    free = np.asarray(free, dtype=float)
    return np.append(free, 1.0 - free.sum())


def mean_x(j) -> float:
    return float(j[2] + j[3])


def mean_y(j) -> float:
    return float(j[1] + j[3])


def mean_xy(j) -> float:
    return float(j[3])


def var_x(j) -> float:
    return float((j[2] + j[3]) * (j[0] + j[1]))


def var_y(j) -> float:
    return float((j[1] + j[3]) * (j[0] + j[2]))


def entropy_xy(j) -> float:
    j = np.asarray(j, dtype=float)
    return float(-xlogy(j, j).sum())


def entropy_x(j) -> float:
    p0 = j[0] + j[1]
    p1 = j[2] + j[3]
    return float(-(xlogy(p0, p0) + xlogy(p1, p1)))


def entropy_y(j) -> float:
    p0 = j[0] + j[2]
    p1 = j[1] + j[3]
    return float(-(xlogy(p0, p0) + xlogy(p1, p1)))


def conditional_x0_given_y(j, y: int) -> float:
    """P(x = 0 | y) from the joint 4-vector."""
    if y == 0:
        return float(j[0] / (j[0] + j[2]))
    return float(j[1] / (j[1] + j[3]))


def correlation_of_joint(j) -> float:
    a, b, c, d = (float(v) for v in j)
    factors = ((c + d), (a + b), (b + d), (a + c))
    if min(factors) <= 0.0:
        raise DegenerateMarginal(
            f"marginal with zero variance: factors {factors}")
    return (a * d - b * c) / math.sqrt(
        factors[0] * factors[1] * factors[2] * factors[3])


def correlation(p: JointPoint) -> float:
    """Pearson correlation (ad - bc) / sqrt((c+d)(a+b)(b+d)(a+c))."""
    return correlation_of_joint(p.probs)


# ---------------------------------------------------------------------------
# gradient-mode plumbing

CORRELATED_CONSTRAINTS = ConstraintSet.pin({1: 0.0, 2: 0.0}, "b=c=0")
INDEPENDENT_CONSTRAINTS = ConstraintSet(
    ((lambda x: float(x[0] * (1.0 - x[0] - x[1] - x[2]) - x[1] * x[2]), 0.0),),
    "ad=bc")


def _mode_for(p: JointPoint, mode: str, direction, epsilons,
              constraints: ConstraintSet):
    if mode == "constrained":
        return Constrained(constraints)
    if mode == "unconstrained":
        return Constrained(ConstraintSet.empty())
    if mode == "limit":
        d = direction if direction is not None else (
            CORRELATED_DIRECTION if constraints is CORRELATED_CONSTRAINTS
            else INDEPENDENT_DIRECTION)
        if epsilons is not None:
            return Limit(tuple(d), tuple(epsilons))
        return Limit(tuple(d))
    raise PreconditionError(f"unknown mode {mode!r}")


def entropy_gradient(p: JointPoint, mode: str = "constrained",
                     direction=None, epsilons=None) -> GradientResult:
    """Gradient of the joint entropy E_xy under the chosen semantics.

    The finite modes return the closed form d(-sum p log p)/dp_i =
    log(d / p_i) with the last cell resolved (restricted to the single
    free coordinate on the pinned b = c = 0 family); limit mode follows
    the ambient approach ladder.
    """
    a, b, c, d = p.probs
    if mode == "constrained":
        if b != 0.0 or c != 0.0:
            raise InfeasiblePoint("constrained entropy gradient needs "
                                  "b = c = 0")
        if a <= 0.0 or d <= 0.0:
            raise DomainError("entropy gradient needs a, d > 0")
        return GradientResult(kind="finite",
                              components=(math.log(d / a),),
                              basis=((1.0, 0.0, 0.0),))
    if mode == "unconstrained":
        if min(p.probs) <= 0.0:
            raise DomainError("entropy gradient needs an interior point")
        return GradientResult(
            kind="finite",
            components=tuple(math.log(d / v) for v in (a, b, c)))
    f = lambda x: entropy_xy(joint_from_free(x))
    m = _mode_for(p, mode, direction, epsilons, CORRELATED_CONSTRAINTS)
    return gradient(f, p.pv, m)


def fisher_information(p: JointPoint, mode: str = "constrained") -> np.ndarray:
    """Fisher information matrix of the multinomial joint model.

    Constrained mode works on the b = c = 0 family with the single free
    parameter a: F = 1/a + 1/d = 1/(a(1-a)).  Unconstrained mode is the full
    3x3 defining sum over (a, b, c) with d resolved.
    """
    a, b, c, d = p.probs
    if mode == "constrained":
        if b != 0.0 or c != 0.0:
            raise InfeasiblePoint("constrained Fisher needs b = c = 0")
        if a <= 0.0 or d <= 0.0:
            raise DomainError("constrained Fisher needs a, d > 0")
        return np.array([[1.0 / a + 1.0 / d]])
    if mode == "unconstrained":
        if min(p.probs) <= 0.0:
            raise DomainError("unconstrained Fisher needs an interior point")
        # score vectors d log P_o / d(a,b,c); the resolved cell pulls -1/d
        scores = np.array([
            [1.0 / a, 0.0, 0.0],
            [0.0, 1.0 / b, 0.0],
            [0.0, 0.0, 1.0 / c],
            [-1.0 / d, -1.0 / d, -1.0 / d],
        ])
        weights = np.array(p.probs)
        return (scores.T * weights) @ scores
    raise PreconditionError(f"unknown mode {mode!r}")


def log_likelihood(counts: CountData, j) -> float:
    """Multinomial log likelihood sum n_o log p_o (0 log 0 = 0)."""
    n = np.asarray(counts.counts, dtype=float)
    j = np.asarray(j, dtype=float)
    if np.any((n > 0) & (j <= 0.0)):
        return -math.inf
    with np.errstate(divide="ignore"):
        logs = np.where(n > 0, np.log(np.where(j > 0, j, 1.0)), 0.0)
    return float((n * logs).sum())


def log_likelihood_gradient(counts: CountData, p: JointPoint,
                            mode: str = "constrained") -> GradientResult:
    if counts.n == 0:
        raise EmptyData("no observations")
    a, b, c, d = p.probs
    n_a, n_b, n_c, n_d = counts.counts
    if mode == "constrained":
        if b != 0.0 or c != 0.0:
            raise InfeasiblePoint("constrained likelihood needs b = c = 0")
        if n_b or n_c:
            raise DomainError("counts on zero-probability cells")
        if a <= 0.0 or d <= 0.0:
            raise DomainError("likelihood gradient needs a, d > 0")
        comp = n_a / a - (counts.n - n_a) / (1.0 - a)
        return GradientResult(kind="finite", components=(float(comp),),
                              basis=((1.0, 0.0, 0.0),))
    if mode == "unconstrained":
        if min(p.probs) <= 0.0:
            raise DomainError("likelihood gradient needs an interior point")
        comps = (n_a / a - n_d / d, n_b / b - n_d / d, n_c / c - n_d / d)
        return GradientResult(kind="finite",
                              components=tuple(float(v) for v in comps))
    raise PreconditionError(f"unknown mode {mode!r}")


def mle(counts: CountData, mode: str = "constrained") -> JointPoint:
    """Maximum-likelihood estimate: relative frequencies under both modes."""
    if mode not in ("constrained", "unconstrained"):
        raise PreconditionError(f"unknown mode {mode!r}")
    n = counts.n
    if n == 0:
        raise EmptyData("no observations")
    if mode == "constrained" and (counts.n_b or counts.n_c):
        raise DomainError("counts on zero-probability cells")
    return JointPoint(counts.n_a / n, counts.n_b / n, counts.n_c / n,
                      counts.n_d / n)


# ---------------------------------------------------------------------------
# relation suites

_CORRELATED_RELATIONS = (
    ("<x>-<y>", lambda j: mean_x(j) - mean_y(j)),
    ("V(x)-V(y)", lambda j: var_x(j) - var_y(j)),
    ("E_xy-E_x", lambda j: entropy_xy(j) - entropy_x(j)),
    ("rho_xy-1", lambda j: correlation_of_joint(j) - 1.0),
)

_INDEPENDENT_RELATIONS = (
    ("P(0,0)-Px(0)Py(0)",
     lambda j: float(j[0]) - (j[0] + j[1]) * (j[0] + j[2])),
    ("<xy>-<x><y>", lambda j: mean_xy(j) - mean_x(j) * mean_y(j)),
    ("P(x=0|y=0)-Px(0)",
     lambda j: conditional_x0_given_y(j, 0) - (j[0] + j[1])),
    ("E_xy-E_x-E_y", lambda j: entropy_xy(j) - entropy_x(j) - entropy_y(j)),
)

FAMILIES = {
    "correlated": (_CORRELATED_RELATIONS, CORRELATED_CONSTRAINTS),
    "independent": (_INDEPENDENT_RELATIONS, INDEPENDENT_CONSTRAINTS),
}


def relation_suite(p: JointPoint, family: str, mode: str = "constrained",
                   direction=None, epsilons=None
                   ) -> list[tuple[str, GradientResult]]:
    """Gradients of every family relation at ``p`` under one semantics.

    Constrained mode returns zero vectors (the relations hold identically on
    the family manifold); limit mode returns the ambient gradients along the
    approach, which stay nonzero or outright diverge.
    """
    if family not in FAMILIES:
        raise PreconditionError(f"unknown family {family!r}")
    relations, constraints = FAMILIES[family]
    m = _mode_for(p, mode, direction, epsilons, constraints)
    out = []
    for label, rel in relations:
        f = lambda x, rel=rel: float(rel(joint_from_free(x)))
        out.append((label, gradient(f, p.pv, m)))
    return out
