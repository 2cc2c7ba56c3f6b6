"""Catalog of scalar functions with the analytic metadata the inequalities need.

Each entry carries evaluator, first and second derivative, optional inverse,
and flags: convexity on the natural domain, log-convexity, and the direction
of operator monotonicity.  Operator monotonicity is a catalog flag, not a
decision procedure; ``loewner_matrix_diagnostic`` provides a numeric
necessary-condition check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    DomainMismatch,
    DuplicatePoints,
    InvalidInterval,
    MissingSecondDerivative,
    NonpositiveFunction,
)
from .linalg import (
    HermitianOperator,
    OrderVerdict,
    SpectralBounds,
    loewner_compare,
)

CURVATURE_GRID_POINTS = 10_001
LOG_CONVEXITY_SLACK = 1e-10


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function together with the analytic facts the engine consumes.

    ``natural_domain`` is an open interval; evaluation outside it produces a
    domain error downstream.  ``second_derivative_monotone`` (when present)
    reports whether f'' is monotone on a given closed interval, which allows
    exact endpoint curvature bounds.
    """

    name: str
    fn: Callable
    natural_domain: tuple = (-math.inf, math.inf)
    derivative: Optional[Callable] = None
    second_derivative: Optional[Callable] = None
    inverse: Optional[Callable] = None
    convex_on_domain: bool = False
    log_convex_on_domain: bool = False
    operator_monotone: bool = False
    operator_decreasing: bool = False
    parameters: tuple = ()
    second_derivative_monotone: Optional[Callable[[float, float], bool]] = None

    def __call__(self, t):
        return self.fn(t)

    def label(self) -> str:
        if self.parameters:
            params = ",".join(f"{p:g}" for p in self.parameters)
            return f"{self.name}({params})"
        return self.name

    def domain_contains_interval(self, bounds: SpectralBounds) -> bool:
        lo, hi = self.natural_domain
        left_ok = bounds.m > lo if math.isfinite(lo) else True
        right_ok = bounds.M < hi if math.isfinite(hi) else True
        return left_ok and right_ok


@dataclass(frozen=True)
class CurvatureBounds:
    """Real numbers alpha <= f'' <= beta on the working interval."""

    alpha: float
    beta: float
    method: str  # "analytic" | "sampled"

    def __post_init__(self):
        if self.alpha > self.beta:
            raise InvalidInterval(f"alpha={self.alpha} exceeds beta={self.beta}")


# --------------------------------------------------------------------------
# Catalog entries
# --------------------------------------------------------------------------

def _always(_a: float, _b: float) -> bool:
    return True


def _const(value: float) -> Callable:
    return lambda t: np.full_like(np.asarray(t, dtype=float), value) if np.ndim(t) else value


def identity() -> ScalarFunction:
    return ScalarFunction(
        name="id",
        fn=lambda t: t * 1.0,
        derivative=_const(1.0),
        second_derivative=_const(0.0),
        inverse=lambda u: u * 1.0,
        convex_on_domain=True,
        operator_monotone=True,
        second_derivative_monotone=_always,
    )


def square() -> ScalarFunction:
    return ScalarFunction(
        name="square",
        fn=lambda t: np.square(t),
        derivative=lambda t: 2.0 * t,
        second_derivative=_const(2.0),
        inverse=lambda u: np.sqrt(u),
        convex_on_domain=True,
        second_derivative_monotone=_always,
    )


def power(p: float) -> ScalarFunction:
    """t^p on (0, inf); p = 0 is rejected (not strictly monotone)."""
    if p == 0:
        raise InvalidInterval("power exponent must be nonzero")
    return ScalarFunction(
        name="pow",
        fn=lambda t: np.power(t, p),
        natural_domain=(0.0, math.inf),
        derivative=lambda t: p * np.power(t, p - 1.0),
        second_derivative=lambda t: p * (p - 1.0) * np.power(t, p - 2.0),
        inverse=lambda u: np.power(u, 1.0 / p),
        convex_on_domain=(p < 0.0 or p >= 1.0),
        log_convex_on_domain=(p < 0.0),
        operator_monotone=(0.0 < p <= 1.0),
        operator_decreasing=(-1.0 <= p < 0.0),
        parameters=(p,),
        second_derivative_monotone=_always,
    )


def exponential() -> ScalarFunction:
    return ScalarFunction(
        name="exp",
        fn=np.exp,
        derivative=np.exp,
        second_derivative=np.exp,
        inverse=np.log,
        convex_on_domain=True,
        log_convex_on_domain=True,
        second_derivative_monotone=_always,
    )


def logarithm() -> ScalarFunction:
    return ScalarFunction(
        name="log",
        fn=np.log,
        natural_domain=(0.0, math.inf),
        derivative=lambda t: 1.0 / t,
        second_derivative=lambda t: -1.0 / np.square(t),
        inverse=np.exp,
        operator_monotone=True,
        second_derivative_monotone=_always,
    )


def _cosine_keeps_sign(a: float, b: float) -> bool:
    # cos vanishes at pi/2 + k*pi; -sin is monotone on [a, b] iff no zero
    # of cos lies strictly inside.
    k = math.ceil((a - math.pi / 2) / math.pi)
    z = math.pi / 2 + k * math.pi
    return not (a + 1e-12 < z < b - 1e-12)


def sine() -> ScalarFunction:
    return ScalarFunction(
        name="sin",
        fn=np.sin,
        derivative=np.cos,
        second_derivative=lambda t: -np.sin(t),
        second_derivative_monotone=_cosine_keeps_sign,
    )


def xlogx() -> ScalarFunction:
    """t * log t on (0, inf)."""
    return ScalarFunction(
        name="xlogx",
        fn=lambda t: t * np.log(t),
        natural_domain=(0.0, math.inf),
        derivative=lambda t: np.log(t) + 1.0,
        second_derivative=lambda t: 1.0 / t,
        convex_on_domain=True,
        second_derivative_monotone=_always,
    )


def reciprocal() -> ScalarFunction:
    return ScalarFunction(
        name="inv",
        fn=lambda t: 1.0 / t,
        natural_domain=(0.0, math.inf),
        derivative=lambda t: -1.0 / np.square(t),
        second_derivative=lambda t: 2.0 / np.power(t, 3.0),
        inverse=lambda u: 1.0 / u,
        convex_on_domain=True,
        log_convex_on_domain=True,
        operator_decreasing=True,
        second_derivative_monotone=_always,
    )


def square_root() -> ScalarFunction:
    return ScalarFunction(
        name="sqrt",
        fn=np.sqrt,
        natural_domain=(0.0, math.inf),
        derivative=lambda t: 0.5 / np.sqrt(t),
        second_derivative=lambda t: -0.25 * np.power(t, -1.5),
        inverse=lambda u: np.square(u),
        operator_monotone=True,
        second_derivative_monotone=_always,
    )


CATALOG_FACTORIES = {
    "id": identity,
    "square": square,
    "pow": power,
    "exp": exponential,
    "log": logarithm,
    "sin": sine,
    "xlogx": xlogx,
    "inv": reciprocal,
    "sqrt": square_root,
}


def parse_function_spec(spec: str) -> ScalarFunction:
    """Parse a function spec string such as "sin", "exp" or "pow:p=-0.2"."""
    name, _, param_part = spec.partition(":")
    name = name.strip()
    if name not in CATALOG_FACTORIES:
        raise ValueError(f"unknown function {name!r}; choices: {sorted(CATALOG_FACTORIES)}")
    params = {}
    if param_part:
        for item in param_part.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValueError(f"malformed parameter {item!r} in spec {spec!r}")
            params[key.strip()] = float(value)
    if name == "pow":
        if set(params) != {"p"}:
            raise ValueError("pow requires exactly one parameter, e.g. pow:p=-0.2")
        return power(params["p"])
    if params:
        raise ValueError(f"function {name!r} takes no parameters")
    return CATALOG_FACTORIES[name]()


def inverse_entry(f: ScalarFunction) -> Optional[ScalarFunction]:
    """The catalog entry of f^{ -1 }, carrying its own flags, or None."""
    if f.name == "id":
        return identity()
    if f.name == "exp":
        return logarithm()
    if f.name == "log":
        return exponential()
    if f.name == "sqrt":
        return square()
    if f.name == "square":
        return square_root()
    if f.name == "inv":
        return reciprocal()
    if f.name == "pow":
        return power(1.0 / f.parameters[0])
    return None


# --------------------------------------------------------------------------
# Analytic queries
# --------------------------------------------------------------------------

def _interval_grid(bounds: SpectralBounds, n: int) -> np.ndarray:
    return np.linspace(bounds.m, bounds.M, n)


def curvature_bounds(
    f: ScalarFunction,
    bounds: SpectralBounds,
    grid_points: int = CURVATURE_GRID_POINTS,
) -> CurvatureBounds:
    """Bounds alpha <= f'' <= beta on [m, M].

    Exact endpoint evaluation when the entry declares f'' monotone on the
    interval; otherwise min/max over a dense grid, widened by a safety factor
    of 1e-6 * (1 + |value|) so the sampled bounds stay conservative.
    """
    if not f.domain_contains_interval(bounds):
        raise DomainMismatch(
            f"[{bounds.m}, {bounds.M}] not inside the domain of {f.label()} {f.natural_domain}"
        )
    if f.second_derivative is None:
        raise MissingSecondDerivative(f"{f.label()} has no second derivative in the catalog")
    if f.second_derivative_monotone is not None and f.second_derivative_monotone(bounds.m, bounds.M):
        ends = np.asarray(
            [float(f.second_derivative(bounds.m)), float(f.second_derivative(bounds.M))]
        )
        return CurvatureBounds(alpha=float(ends.min()), beta=float(ends.max()), method="analytic")
    grid = _interval_grid(bounds, grid_points)
    values = np.asarray(f.second_derivative(grid), dtype=float)
    lo = float(values.min())
    hi = float(values.max())
    return CurvatureBounds(
        alpha=lo - 1e-6 * (1.0 + abs(lo)),
        beta=hi + 1e-6 * (1.0 + abs(hi)),
        method="sampled",
    )


def _log_second_derivative(f: ScalarFunction, grid: np.ndarray) -> np.ndarray:
    """(log f)'' on the grid, analytic when derivatives exist, else central FD."""
    vals = np.asarray(f(grid), dtype=float)
    if f.derivative is not None and f.second_derivative is not None:
        d1 = np.asarray(f.derivative(grid), dtype=float)
        d2 = np.asarray(f.second_derivative(grid), dtype=float)
        return d2 / vals - np.square(d1 / vals)
    h = 1e-4 * (1.0 + np.abs(grid))
    g = lambda t: np.log(np.asarray(f(t), dtype=float))
    return (g(grid + h) - 2.0 * g(grid) + g(grid - h)) / np.square(h)


def is_log_convex_on(
    f: ScalarFunction,
    bounds: SpectralBounds,
    grid_points: int = CURVATURE_GRID_POINTS,
    use_flag: bool = True,
) -> bool:
    """True when log f is convex on [m, M].

    Requires f > 0 on the interval.  A declared log-convexity flag
    short-circuits the grid check (pass ``use_flag=False`` to force it).
    """
    grid = _interval_grid(bounds, grid_points)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(grid), dtype=float)
    if not np.all(np.isfinite(vals)) or float(vals.min()) <= 0.0:
        raise NonpositiveFunction(
            f"{f.label()} is not strictly positive on [{bounds.m}, {bounds.M}]"
        )
    if use_flag and f.log_convex_on_domain and f.domain_contains_interval(bounds):
        return True
    # Interior grid only: FD stencils and one-sided derivatives misbehave at
    # the endpoints of the natural domain.
    interior = grid[1:-1]
    curv = _log_second_derivative(f, interior)
    return bool(np.min(curv) >= -LOG_CONVEXITY_SLACK)


def loewner_matrix_diagnostic(
    f: ScalarFunction,
    points,
    tol_abs: float | None = None,
) -> OrderVerdict:
    """PSD check of the divided-difference kernel of f at the given nodes.

    K_ij = (f(t_i) - f(t_j)) / (t_i - t_j), K_ii = f'(t_i).  Positive
    semidefiniteness of this kernel is necessary for operator monotonicity;
    the verdict compares K against zero, so LessEqual/Equal means PSD.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.size
    if n != np.unique(pts).size:
        raise DuplicatePoints(f"nodes must be distinct, got {pts.tolist()}")
    lo, hi = f.natural_domain
    if np.any(pts <= lo) or np.any(pts >= hi):
        raise DomainMismatch(f"nodes {pts.tolist()} leave the domain of {f.label()}")
    values = np.asarray(f(pts), dtype=float)
    if f.derivative is not None:
        diag = np.asarray(f.derivative(pts), dtype=float)
    else:
        h = 1e-6 * (1.0 + np.abs(pts))
        diag = (np.asarray(f(pts + h), dtype=float) - np.asarray(f(pts - h), dtype=float)) / (2.0 * h)
    kernel = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                kernel[i, j] = diag[i]
            else:
                kernel[i, j] = (values[i] - values[j]) / (pts[i] - pts[j])
    k_op = HermitianOperator.from_matrix(kernel)
    return loewner_compare(HermitianOperator.zero(n), k_op, tol_abs=tol_abs)


def refined_vs_geometric_gap(t: float, m: float, M: float, p: float) -> float:
    """Gap between the curvature-refined chord bound and the geometric bound
    for the power function t^p with p < 0 on [m, M].

    Positive values mean the geometric bound is tighter at t, negative values
    mean the curvature-refined bound wins; the sign varies with p, so neither
    refinement dominates the other.
    """
    if not (0.0 < m < M):
        raise InvalidInterval(f"need 0 < m < M, got m={m}, M={M}")
    if not (m <= t <= M):
        raise InvalidInterval(f"t={t} outside [{m}, {M}]")
    if not p < 0.0:
        raise InvalidInterval(f"exponent must be negative, got p={p}")
    lam = (t - m) / (M - m)
    chord = (1.0 - lam) * m**p + lam * M**p
    curvature_ceiling = p * (p - 1.0) * M ** (p - 2.0)
    bracket = (M + m) * t - M * m - t * t
    geometric = (m ** (1.0 - lam) * M**lam) ** p
    return chord - 0.5 * curvature_ceiling * bracket - geometric
