"""Entropy-payoff comparison of dice with different side counts.

Each die with n sides (2, 3 or 4) lives on its own (n-1)-simplex but is
embedded in the common 4-outcome space by padding with zero-probability
outcomes.  The payoff is F = V(n)^2 * E(p): squared simplex volume times the
Shannon entropy of the live coordinates.  Three maximization routes are
provided; the first two agree per die, while the third (dropping the embedding
constraints altogether) lands on the uniform 4-outcome point and disagrees
with the per-die winners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import xlogy

from .core import ConstraintSet, ProbVector, entropy, resolve, simplex_volume
from .errors import BadDimension, InfeasiblePoint
from .reports import OptimumReport

DEFAULT_RESOLUTION = 200


@dataclass(frozen=True)
class DieSpace:
    """A die's outcome space and its embedding into the 4-outcome simplex."""

    label: str
    sides: int
    embedding: ConstraintSet

    @property
    def volume(self) -> float:
        return simplex_volume(self.sides)

    def live_uniform(self) -> ProbVector:
        """Uniform distribution on the live coordinates, embedded."""
        point = [1.0 / self.sides] * self.sides + [0.0] * (4 - self.sides)
        return resolve(point)

    def face_point(self, params) -> ProbVector:
        """Embed free face parameters (length sides-1) as a 4-outcome point."""
        params = [float(v) for v in params]
        if len(params) != self.sides - 1:
            raise BadDimension(
                f"{self.label} face takes {self.sides - 1} parameters")
        live = params + [1.0 - math.fsum(params)]
        return resolve(live + [0.0] * (4 - self.sides))


def _die_space(label: str, sides: int) -> DieSpace:
    # embedding constraints pin the padded coordinates of (a, b, c | d) to zero
    eqs = []
    if sides <= 2:
        eqs.append((lambda x: float(x[2]), 0.0))                      # c = 0
    if sides <= 3:
        eqs.append((lambda x: float(1.0 - x[0] - x[1] - x[2]), 0.0))  # d = 0
    return DieSpace(label, sides, ConstraintSet(tuple(eqs), f"{label} face"))


COIN = _die_space("Coin", 2)
TRIANGLE = _die_space("Triangle", 3)
SQUARE = _die_space("Square", 4)
ALL_SPACES = (COIN, TRIANGLE, SQUARE)


def objective_F(p: ProbVector, space: DieSpace) -> float:
    """Payoff V^2 * E at a point of the embedded die space."""
    if p.n != 4:
        raise BadDimension("points live in the 4-outcome target space")
    if not space.embedding.satisfied(p.free_array()):
        raise InfeasiblePoint(f"point is not on the {space.label} face")
    return space.volume ** 2 * entropy(p)


def marginal_entropy_gradient(free: np.ndarray) -> np.ndarray:
    """Closed-form entropy gradient -log(x_i / x_rest) over free coordinates."""
    free = np.asarray(free, dtype=float)
    rest = 1.0 - free.sum()
    return -np.log(free / rest)


def _entropy_on_grid(sides: int, resolution: int):
    """Exhaustive entropy evaluation on the die's face grid.

    Returns (best_params, best_entropy); ties resolve to the lexicographically
    smallest parameter vector because scanning is in ascending C order.
    """
    g = np.arange(resolution + 1) / resolution
    if sides == 2:
        ent = -(xlogy(g, g) + xlogy(1 - g, 1 - g))
        i = int(np.argmax(ent))
        return (g[i],), float(ent[i])
    if sides == 3:
        A, B = np.meshgrid(g, g, indexing="ij")
        C = 1.0 - A - B
        valid = C >= -1e-12
        ent = np.where(
            valid,
            -(xlogy(A, A) + xlogy(B, B) + xlogy(np.maximum(C, 0.0),
                                                np.maximum(C, 0.0))),
            -np.inf)
        i = int(np.argmax(ent))
        ia, ib = np.unravel_index(i, ent.shape)
        return (g[ia], g[ib]), float(ent[ia, ib])
    # sides == 4: loop the outermost axis to keep the working set small
    best_val = -np.inf
    best = None
    B, C = np.meshgrid(g, g, indexing="ij")
    for a in g:
        D = 1.0 - a - B - C
        valid = D >= -1e-12
        Dp = np.maximum(D, 0.0)
        ent = np.where(
            valid,
            -(xlogy(a, a) + xlogy(B, B) + xlogy(C, C) + xlogy(Dp, Dp)),
            -np.inf)
        i = int(np.argmax(ent))
        ib, ic = np.unravel_index(i, ent.shape)
        if ent[ib, ic] > best_val:
            best_val = float(ent[ib, ic])
            best = (float(a), float(B[ib, ic]), float(C[ib, ic]))
    return best, best_val


def _entropy_of_params(params: np.ndarray) -> float:
    vals = np.append(params, 1.0 - params.sum())
    if np.any(vals < 0.0) or np.any(vals > 1.0):
        return -np.inf
    return float(-xlogy(vals, vals).sum())


def _polish(params, value):
    """Nelder-Mead refinement; keeps the grid point unless strictly better."""
    x0 = np.asarray(params, dtype=float)
    res = minimize(lambda x: -_entropy_of_params(x), x0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000})
    if math.isfinite(res.fun) and -res.fun > value:
        return tuple(float(v) for v in res.x), float(-res.fun), int(res.nit)
    return tuple(float(v) for v in params), float(value), 0


def maximize_per_space() -> list[OptimumReport]:
    """Method 1: closed-form optimum per die (uniform on live coordinates)."""
    reports = []
    for space in ALL_SPACES:
        p = space.live_uniform()
        reports.append(OptimumReport(
            label=space.label,
            point=p.probs,
            value=objective_F(p, space),
            mode="per-space",
            diagnostics={"sides": space.sides, "volume": space.volume},
        ))
    return reports


def maximize_constrained_target(resolution: int = DEFAULT_RESOLUTION
                                ) -> list[OptimumReport]:
    """Method 2: grid + refinement on each embedded face of the 4-space."""
    reports = []
    for space in ALL_SPACES:
        params, ent = _entropy_on_grid(space.sides, resolution)
        params, ent, iters = _polish(params, ent)
        point = space.face_point(params)
        reports.append(OptimumReport(
            label=space.label,
            point=point.probs,
            value=space.volume ** 2 * ent,
            mode="constrained-target",
            diagnostics={"grid_resolution": resolution,
                         "refinement_iterations": iters},
        ))
    return reports


def maximize_unconstrained(resolution: int = DEFAULT_RESOLUTION) -> OptimumReport:
    """Method 3: drop the embedding constraints on the 4-outcome simplex.

    The optimum is the uniform 4-outcome point with payoff log(4)/36, which
    conflicts with (is far below) the per-die winners of methods 1 and 2.
    """
    params, ent = _entropy_on_grid(4, resolution)
    params, ent, iters = _polish(params, ent)
    point = SQUARE.face_point(params)
    value = SQUARE.volume ** 2 * ent
    best_constrained = max(maximize_per_space(), key=lambda r: r.value)
    return OptimumReport(
        label="unconstrained",
        point=point.probs,
        value=value,
        mode="unconstrained",
        diagnostics={
            "grid_resolution": resolution,
            "refinement_iterations": iters,
            "conflicts_with_constrained": value < best_constrained.value,
            "best_constrained_label": best_constrained.label,
            "best_constrained_value": best_constrained.value,
        },
    )
