"""Linear separability of reservoir feature vectors.

Classes A and B are separable iff some decoder D and threshold t give
<v, D> >= t on A and <v, D> < t on B. Appending -1 to every vector and
negating class B turns this into: does the convex hull of the columns of P
avoid the origin? That is decided by the LP

    P x = 0,  sum(x) = 1,  x >= 0

whose feasibility certifies non-separability. When it is infeasible the
alternative system P^T y >= 1 is solved for a separating functional
y = (D, t), which becomes the decoder witness.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

try:
    from .spike_core import SpikeTrain
except ImportError:
    from spike_core import SpikeTrain  # type: ignore[no-redef]


_LOGGER = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
CERTIFICATE_TOL = 1e-7
BOUNDARY_TOL = 1e-9

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": FEASIBILITY_TOL,
    "dual_feasibility_tolerance": FEASIBILITY_TOL,
}

# Attempted in order; the second is the re-solve used on non-convergence.
_SOLVER_METHODS = ("highs-ds", "highs-ipm")

_LP_OPTIMAL = 0
_LP_INFEASIBLE = 2


class LPSolveError(RuntimeError):
    """The hull LP reached no definitive status, even after re-solving."""


class CertificateError(RuntimeError):
    """A produced certificate did not re-verify at CERTIFICATE_TOL."""


@dataclass(frozen=True)
class FeatureVector:
    v: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not all(math.isfinite(x) for x in self.v):
            raise ValueError(f"feature vector has non-finite entries: {self.v!r}")

    def __len__(self) -> int:
        return len(self.v)

    def scaled(self, c: float) -> "FeatureVector":
        return FeatureVector(tuple(c * x for x in self.v))

    def permuted(self, order: Sequence[int]) -> "FeatureVector":
        return FeatureVector(tuple(self.v[i] for i in order))


def features(outputs: Sequence[SpikeTrain]) -> FeatureVector:
    """Per-channel signed sums of emitted amplitudes (not the l1 norm)."""

    return FeatureVector(tuple(train.total() for train in outputs))


def _as_feature(value: object) -> FeatureVector:
    if isinstance(value, FeatureVector):
        return value
    return FeatureVector(tuple(float(x) for x in value))  # type: ignore[union-attr]


@dataclass(frozen=True)
class SeparabilityInstance:
    class_a: Tuple[FeatureVector, ...]
    class_b: Tuple[FeatureVector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "class_a", tuple(_as_feature(v) for v in self.class_a))
        object.__setattr__(self, "class_b", tuple(_as_feature(v) for v in self.class_b))
        if not self.class_a or not self.class_b:
            raise ValueError("both classes must be non-empty")
        dims = {len(v) for v in self.class_a + self.class_b}
        if len(dims) != 1:
            raise ValueError(f"feature vectors differ in dimension: {sorted(dims)}")

    @property
    def dimension(self) -> int:
        return len(self.class_a[0])

    def swapped(self) -> "SeparabilityInstance":
        return SeparabilityInstance(self.class_b, self.class_a)

    def matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        a = np.array([f.v for f in self.class_a], dtype=float).reshape(len(self.class_a), -1)
        b = np.array([f.v for f in self.class_b], dtype=float).reshape(len(self.class_b), -1)
        return a, b


@dataclass(frozen=True)
class Witness:
    decoder: Tuple[float, ...]
    threshold: float


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    witness: Optional[Witness] = None
    hull_combination: Optional[Tuple[float, ...]] = None
    boundary: bool = False


@dataclass(frozen=True)
class HullResult:
    """Outcome of the hull LP with exactly one certificate set.

    `combination` is x with P x = 0, sum(x) = 1, x >= 0 when the origin is in
    the hull; `functional` is y with P^T y >= 1 otherwise.
    """

    contains_origin: bool
    combination: Optional[np.ndarray] = None
    functional: Optional[np.ndarray] = None


def homogenize(instance: SeparabilityInstance) -> np.ndarray:
    """Columns (v_a, -1) for class A followed by (-v_b, +1) for class B."""

    a, b = instance.matrices()
    cols_a = np.hstack([a, -np.ones((a.shape[0], 1))])
    cols_b = -np.hstack([b, -np.ones((b.shape[0], 1))])
    return np.vstack([cols_a, cols_b]).T


def _column_scales(p: np.ndarray) -> np.ndarray:
    scales = np.max(np.abs(p), axis=0)
    scales[scales == 0] = 1.0
    return scales


def _solve_combination(p: np.ndarray, method: str) -> Tuple[int, Optional[np.ndarray]]:
    d, m = p.shape
    a_eq = np.vstack([p, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(d), [1.0]])
    res = linprog(
        np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method=method,
        options=_HIGHS_OPTIONS,
    )
    return int(res.status), (np.asarray(res.x) if res.status == _LP_OPTIMAL else None)


def _solve_functional(p: np.ndarray, method: str) -> Tuple[int, Optional[np.ndarray]]:
    d, m = p.shape
    res = linprog(
        np.zeros(d), A_ub=-p.T, b_ub=-np.ones(m), bounds=(None, None), method=method,
        options=_HIGHS_OPTIONS,
    )
    return int(res.status), (np.asarray(res.x) if res.status == _LP_OPTIMAL else None)


def verify_hull_certificate(
    p: np.ndarray, result: HullResult, tol: float = CERTIFICATE_TOL
) -> bool:
    p = np.asarray(p, dtype=float)
    if (result.combination is None) == (result.functional is None):
        return False
    if result.contains_origin:
        x = result.combination
        if x is None or x.shape != (p.shape[1],):
            return False
        scale = max(1.0, float(np.max(np.abs(p)))) if p.size else 1.0
        return bool(
            np.all(x >= -tol)
            and abs(float(np.sum(x)) - 1.0) <= tol
            and float(np.max(np.abs(p @ x), initial=0.0)) <= tol * scale
        )
    y = result.functional
    if y is None or y.shape != (p.shape[0],):
        return False
    return bool(np.all(p.T @ y >= 1.0 - tol))


def lp_contains_origin(p: np.ndarray) -> HullResult:
    """Decide whether 0 lies in the convex hull of the columns of `p`.

    Columns are rescaled to unit max-norm first (this leaves the answer
    unchanged); certificates are mapped back to the original columns.
    """

    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[1] == 0:
        raise ValueError(f"P must be a non-empty 2-D matrix, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("P has non-finite entries")

    zero_cols = np.flatnonzero(np.all(p == 0.0, axis=0))
    if zero_cols.size:
        x = np.zeros(p.shape[1])
        x[zero_cols[0]] = 1.0
        return HullResult(True, combination=x)

    scales = _column_scales(p)
    scaled = p / scales

    for method in _SOLVER_METHODS:
        status, x = _solve_combination(scaled, method)
        if status == _LP_OPTIMAL and x is not None:
            x = np.clip(x, 0.0, None) / scales
            total = float(np.sum(x))
            if total > 0:
                result = HullResult(True, combination=x / total)
                if verify_hull_certificate(p, result):
                    return result
            _LOGGER.debug("Hull combination from %s failed verification; retrying", method)
            continue
        if status != _LP_INFEASIBLE:
            _LOGGER.debug("Hull LP status %d with %s; retrying", status, method)
            continue

        f_status, y = _solve_functional(scaled, method)
        if f_status == _LP_OPTIMAL and y is not None:
            # P'^T y >= 1 with P' = P / scales  =>  P^T y >= min(scales).
            result = HullResult(False, functional=y / float(np.min(scales)))
            if verify_hull_certificate(p, result):
                return result
            _LOGGER.debug("Separating functional from %s failed verification", method)
        else:
            _LOGGER.debug("Functional LP status %d with %s; retrying", f_status, method)

    raise LPSolveError(f"hull LP did not converge for P of shape {p.shape}")


def _projections(
    instance: SeparabilityInstance, decoder: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    a, b = instance.matrices()
    return a @ decoder, b @ decoder


def verify_witness(instance: SeparabilityInstance, witness: Witness) -> bool:
    proj_a, proj_b = _projections(instance, np.asarray(witness.decoder, dtype=float))
    return bool(np.all(proj_a >= witness.threshold) and np.all(proj_b < witness.threshold))


def verify_verdict(
    instance: SeparabilityInstance, verdict: "SeparabilityVerdict", tol: float = CERTIFICATE_TOL
) -> bool:
    """Re-check whichever certificate the verdict carries against the instance."""

    if verdict.separable:
        return verdict.witness is not None and verify_witness(instance, verdict.witness)
    if verdict.hull_combination is None:
        return False
    p = homogenize(instance)
    x = np.asarray(verdict.hull_combination, dtype=float)
    return verify_hull_certificate(p, HullResult(True, combination=x), tol)


def separation_margin(instance: SeparabilityInstance) -> float:
    """Largest t with <v_a, D> - c >= t and c - <v_b, D> >= t over ||D||_inf <= 1.

    Positive iff the instance is strictly separable.
    """

    a, b = instance.matrices()
    n = instance.dimension
    # Variables: D (n), c, t; minimize -t.
    cost = np.zeros(n + 2)
    cost[-1] = -1.0
    rows_a = np.hstack([-a, np.ones((a.shape[0], 1)), np.ones((a.shape[0], 1))])
    rows_b = np.hstack([b, -np.ones((b.shape[0], 1)), np.ones((b.shape[0], 1))])
    bounds = [(-1.0, 1.0)] * n + [(None, None), (None, None)]
    res = linprog(
        cost, A_ub=np.vstack([rows_a, rows_b]), b_ub=np.zeros(a.shape[0] + b.shape[0]),
        bounds=bounds, method="highs", options=_HIGHS_OPTIONS,
    )
    if res.status != _LP_OPTIMAL:
        raise LPSolveError(f"margin LP failed with status {res.status}")
    return float(res.x[-1])


def _weakly_separable(p: np.ndarray) -> bool:
    """True iff some y != 0 has P^T y >= 0 with at least one strict entry."""

    d, m = p.shape
    # Variables: y (d), s (m); maximize sum(s) subject to s <= P^T y.
    cost = np.concatenate([np.zeros(d), -np.ones(m)])
    a_ub = np.hstack([-p.T, np.eye(m)])
    bounds = [(-1.0, 1.0)] * d + [(0.0, 1.0)] * m
    res = linprog(
        cost, A_ub=a_ub, b_ub=np.zeros(m), bounds=bounds, method="highs",
        options=_HIGHS_OPTIONS,
    )
    if res.status != _LP_OPTIMAL:
        raise LPSolveError(f"weak separation LP failed with status {res.status}")
    return float(-res.fun) > BOUNDARY_TOL


def is_separable(instance: SeparabilityInstance) -> SeparabilityVerdict:
    """Decide separability and return the matching certificate.

    Origin in the closed hull means "not separable". `boundary` marks the
    numerically ambiguous cases: a separation with margin <= BOUNDARY_TOL,
    or a non-separable instance that is still weakly separable.
    """

    p = homogenize(instance)
    hull = lp_contains_origin(p)

    if hull.contains_origin:
        assert hull.combination is not None
        return SeparabilityVerdict(
            separable=False,
            hull_combination=tuple(float(x) for x in hull.combination),
            boundary=_weakly_separable(p),
        )

    assert hull.functional is not None
    n = instance.dimension
    decoder = hull.functional[:n]
    proj_a, proj_b = _projections(instance, decoder)
    lo, hi = float(np.min(proj_a)), float(np.max(proj_b))
    witness = Witness(tuple(float(x) for x in decoder), 0.5 * (lo + hi))
    if not verify_witness(instance, witness):
        raise CertificateError(
            f"separating witness failed verification (min A {lo!r}, max B {hi!r})"
        )

    norm = float(np.max(np.abs(decoder), initial=0.0))
    boundary = norm == 0.0 or (lo - hi) / (2.0 * norm) <= BOUNDARY_TOL
    if boundary:
        boundary = separation_margin(instance) <= BOUNDARY_TOL
    return SeparabilityVerdict(separable=True, witness=witness, boundary=boundary)


def _grid_values(grid: float, bound: float) -> np.ndarray:
    steps = int(round(2.0 * bound / grid))
    return np.linspace(-bound, bound, steps + 1)


def oracle_separable(
    instance: SeparabilityInstance, grid: float = 0.25, bound: float = 2.0
) -> bool:
    """Brute-force check over decoders on the grid [-bound, bound]^N.

    For each decoder the candidate thresholds are the midpoints of sorted
    projections; only the gap between the lowest A projection and the highest
    B projection can separate, so that midpoint is the one tested.
    """

    n = instance.dimension
    if n > 5 or len(instance.class_a) + len(instance.class_b) > 8:
        raise ValueError("oracle is limited to dimension <= 5 and <= 8 points")
    if grid <= 0 or bound <= 0:
        raise ValueError("grid and bound must be positive")

    a, b = instance.matrices()
    values = _grid_values(grid, bound)
    if n == 1:
        tail = np.zeros((1, 0))
    else:
        rest: Iterable[Tuple[float, ...]] = itertools.product(values, repeat=n - 1)
        tail = np.array(list(rest), dtype=float)

    for first in values:
        decoders = np.hstack([np.full((tail.shape[0], 1), first), tail])
        proj_a = decoders @ a.T
        proj_b = decoders @ b.T
        lo = proj_a.min(axis=1)
        hi = proj_b.max(axis=1)
        thresholds = 0.5 * (lo + hi)
        ok = (lo >= thresholds) & (hi < thresholds)
        if bool(np.any(ok)):
            return True
    return False


def instance_from_vectors(
    class_a: Iterable[Sequence[float]], class_b: Iterable[Sequence[float]]
) -> SeparabilityInstance:
    return SeparabilityInstance(
        tuple(FeatureVector(tuple(float(x) for x in v)) for v in class_a),
        tuple(FeatureVector(tuple(float(x) for x in v)) for v in class_b),
    )


def describe_verdict(verdict: SeparabilityVerdict) -> List[str]:
    lines = ["separable" if verdict.separable else "not separable"]
    if verdict.witness is not None:
        lines.append(
            "witness D = (" + ", ".join(f"{x:.6g}" for x in verdict.witness.decoder)
            + f"), threshold = {verdict.witness.threshold:.6g}"
        )
    if verdict.hull_combination is not None:
        lines.append(
            "hull combination x = (" + ", ".join(f"{x:.6g}" for x in verdict.hull_combination) + ")"
        )
    if verdict.boundary:
        lines.append("boundary case (strict vs weak inequality matters)")
    return lines
