"""Quasi-arithmetic operator means of Mercer type and their refinements.

For a strictly monotone generator g on [m, M] the mean of a unital family
and operators A_1..A_n is

    QM_g(A, Phi) = g^{-1}( (g(M) + g(m)) I - sum_i Phi_i(g(A_i)) ).

Two generators are compared through the composite psi o phi^{-1} on the
phi-image interval: convexity of the composite (with an operator-monotone
psi^{-1}) orders the means, curvature bounds of the composite tighten the
ordering through the diamond correction term, and log-convexity of the
composite inserts a geometric interpolant between the means.

Orientation: when a generator is strictly decreasing, its image interval is
re-ordered before any chord or curvature machinery runs; all displayed
formulas are symmetric under swapping the endpoint images, so only interval
orientation needs care.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import (
    HypothesisNotMet,
    InvalidInterval,
    InverseDomainError,
    NonpositiveFunction,
)
from .functions import (
    CurvatureBounds,
    ScalarFunction,
    curvature_bounds,
    inverse_entry,
    is_log_convex_on,
)
from .linalg import (
    HermitianOperator,
    OrderVerdict,
    Relation,
    SpectralBounds,
    apply_scalar_function,
    apply_to_spectrum,
    loewner_compare,
    spectrum_range,
)
from .maps import MapFamily, apply_map, family_sum
from .mercer import InequalityReport

MONOTONICITY_GRID_POINTS = 1000
INVERSE_ROUNDTRIP_TOL = 1e-9

ALPHA_SIDE = "alpha_lower_refined"
BETA_SIDE = "beta_reversed"


def _require_strictly_monotone(g: ScalarFunction, bounds: SpectralBounds, n: int) -> bool:
    """Validate strict monotonicity on a grid; returns True when increasing."""
    if not g.domain_contains_interval(bounds):
        raise InvalidInterval(
            f"[{bounds.m}, {bounds.M}] not inside the domain of {g.label()}"
        )
    grid = np.linspace(bounds.m, bounds.M, n)
    with np.errstate(all="ignore"):
        vals = np.asarray(g(grid), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise InvalidInterval(f"{g.label()} is not finite on [{bounds.m}, {bounds.M}]")
    steps = np.diff(vals)
    if np.all(steps > 0):
        return True
    if np.all(steps < 0):
        return False
    raise InvalidInterval(f"{g.label()} is not strictly monotone on [{bounds.m}, {bounds.M}]")


def _image_interval(g: ScalarFunction, bounds: SpectralBounds) -> SpectralBounds:
    lo = float(g(bounds.m))
    hi = float(g(bounds.M))
    return SpectralBounds(min(lo, hi), max(lo, hi))


def _compose_with_inverse(psi: ScalarFunction, phi: ScalarFunction) -> ScalarFunction:
    """psi o phi^{-1} with derivatives chained analytically.

    (psi o phi^{-1})''(u) = (psi'' phi' - psi' phi'') / phi'^3 at x = phi^{-1}(u).
    The entry is evaluation-guarded rather than domain-bounded, so its
    natural domain is left unbounded.
    """
    if phi.inverse is None or phi.derivative is None or phi.second_derivative is None:
        raise InverseDomainError(f"{phi.label()} has no usable inverse/derivatives")
    if psi.derivative is None or psi.second_derivative is None:
        raise InverseDomainError(f"{psi.label()} has no usable derivatives")
    phi_inv = phi.inverse

    def ev(u):
        return psi.fn(phi_inv(u))

    def d1(u):
        x = phi_inv(u)
        return np.asarray(psi.derivative(x), dtype=float) / np.asarray(
            phi.derivative(x), dtype=float
        )

    def d2(u):
        x = phi_inv(u)
        dp = np.asarray(phi.derivative(x), dtype=float)
        return (
            np.asarray(psi.second_derivative(x), dtype=float) * dp
            - np.asarray(psi.derivative(x), dtype=float)
            * np.asarray(phi.second_derivative(x), dtype=float)
        ) / dp**3

    return ScalarFunction(
        name=f"{psi.name}_after_{phi.name}_inverse",
        fn=ev,
        derivative=d1,
        second_derivative=d2,
        parameters=phi.parameters + psi.parameters,
    )


@dataclass(frozen=True)
class QuasiArithmeticSpec:
    """A resolved generator pair: composite analysis and inverse direction flags."""

    phi: ScalarFunction
    psi: ScalarFunction
    bounds: SpectralBounds
    phi_interval: SpectralBounds
    composite: ScalarFunction
    composite_curvature: CurvatureBounds
    composite_is_convex: bool
    composite_is_concave: bool
    composite_is_log_convex: bool
    psi_inverse: ScalarFunction
    psi_inverse_increasing: bool
    psi_inverse_decreasing: bool

    @property
    def reversal_applied(self) -> bool:
        """True when verdict directions flip because psi^{-1} is operator decreasing."""
        return self.psi_inverse_decreasing


def resolve_spec(
    phi: ScalarFunction,
    psi: ScalarFunction,
    bounds: SpectralBounds,
    grid_points: int = MONOTONICITY_GRID_POINTS,
) -> QuasiArithmeticSpec:
    """Validate a generator pair on [m, M] and precompute composite metadata.

    Checks strict monotonicity of both generators on a dense grid and the
    inverse round trip g^{-1}(g(t)) = t to 1e-9; classifies the composite as
    convex/concave from sampled curvature bounds and tests its log-convexity
    with the flag-free grid check.
    """
    grid = np.linspace(bounds.m, bounds.M, grid_points)
    for g in (phi, psi):
        _require_strictly_monotone(g, bounds, grid_points)
        entry = inverse_entry(g)
        inv = entry.fn if entry is not None else g.inverse
        if inv is None:
            raise InverseDomainError(f"{g.label()} has no inverse evaluator")
        with np.errstate(all="ignore"):
            roundtrip = np.asarray(inv(np.asarray(g(grid), dtype=float)), dtype=float)
        defect = float(np.max(np.abs(roundtrip - grid)))
        if not np.all(np.isfinite(roundtrip)) or defect > INVERSE_ROUNDTRIP_TOL * (
            1.0 + float(np.max(np.abs(grid)))
        ):
            raise InverseDomainError(
                f"inverse round trip of {g.label()} fails on [{bounds.m}, {bounds.M}] "
                f"(defect {defect:.3e})"
            )

    phi_interval = _image_interval(phi, bounds)
    composite = _compose_with_inverse(psi, phi)
    curv = curvature_bounds(composite, phi_interval)
    kappa = 1e-5 * max(1.0, abs(curv.alpha), abs(curv.beta))
    is_convex = curv.alpha >= -kappa
    is_concave = curv.beta <= kappa

    psi_m = float(psi(bounds.m))
    psi_M = float(psi(bounds.M))
    if psi_m > 0.0 and psi_M > 0.0:
        try:
            is_log_convex = is_log_convex_on(composite, phi_interval, use_flag=False)
        except NonpositiveFunction:
            is_log_convex = False
    else:
        is_log_convex = False

    psi_inv = inverse_entry(psi)
    if psi_inv is None:
        raise InverseDomainError(f"{psi.label()} has no catalog inverse")

    return QuasiArithmeticSpec(
        phi=phi,
        psi=psi,
        bounds=bounds,
        phi_interval=phi_interval,
        composite=composite,
        composite_curvature=curv,
        composite_is_convex=is_convex,
        composite_is_concave=is_concave,
        composite_is_log_convex=is_log_convex,
        psi_inverse=psi_inv,
        psi_inverse_increasing=psi_inv.operator_monotone,
        psi_inverse_decreasing=psi_inv.operator_decreasing,
    )


# --------------------------------------------------------------------------
# The mean and its refinements
# --------------------------------------------------------------------------

def _generator_images(
    g: ScalarFunction,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds,
) -> Tuple[HermitianOperator, List[HermitianOperator]]:
    """(sum_i Phi_i(g(A_i)), [g(A_i)...])."""
    images = [apply_scalar_function(g, a, bounds) for a in operators]
    return family_sum(family, images), images


def _apply_inverse(entry: ScalarFunction, operand: HermitianOperator) -> HermitianOperator:
    lo, hi = spectrum_range(operand)
    dlo, dhi = entry.natural_domain
    slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
    if (math.isfinite(dlo) and lo <= dlo + slack) or (math.isfinite(dhi) and hi >= dhi - slack):
        raise InverseDomainError(
            f"operand spectrum [{lo:.12g}, {hi:.12g}] leaves the domain of {entry.label()}"
        )
    return apply_to_spectrum(entry, operand)


def mercer_quasi_mean(
    phi: ScalarFunction,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds,
) -> HermitianOperator:
    """phi^{-1}((phi(M) + phi(m)) I - sum_i Phi_i(phi(A_i))).

    The inner operator has spectrum inside the phi-image interval, so the
    inverse is applied by clamped functional calculus on that interval.
    """
    _require_strictly_monotone(phi, bounds, 256)
    entry = inverse_entry(phi)
    if entry is None and phi.inverse is None:
        raise InverseDomainError(f"{phi.label()} has no inverse evaluator")
    inv_fn = entry.fn if entry is not None else phi.inverse
    total, _ = _generator_images(phi, family, operators, bounds)
    pm = float(phi(bounds.m))
    pM = float(phi(bounds.M))
    arg = (pM + pm) * HermitianOperator.identity(family.dim_out) - total
    return apply_scalar_function(inv_fn, arg, _image_interval(phi, bounds))


def predicted_mean_relation(spec: QuasiArithmeticSpec) -> Relation:
    """Direction of QM_phi vs QM_psi asserted by the convexity case analysis.

    Affinely related generators give Equal; otherwise a convex composite with
    operator-increasing psi^{-1} (or concave with decreasing) gives
    LessEqual, and the two crossed cases give GreaterEqual.  Raises
    ``HypothesisNotMet`` when no case applies.
    """
    if spec.composite_is_convex and spec.composite_is_concave:
        return Relation.EQUAL
    if spec.psi_inverse_increasing:
        if spec.composite_is_convex:
            return Relation.LESS_EQUAL
        if spec.composite_is_concave:
            return Relation.GREATER_EQUAL
    if spec.psi_inverse_decreasing:
        if spec.composite_is_concave:
            return Relation.LESS_EQUAL
        if spec.composite_is_convex:
            return Relation.GREATER_EQUAL
    raise HypothesisNotMet(
        f"no ordering case applies to ({spec.phi.label()}, {spec.psi.label()}): "
        f"composite convex={spec.composite_is_convex} concave={spec.composite_is_concave}, "
        f"psi^-1 increasing={spec.psi_inverse_increasing} decreasing={spec.psi_inverse_decreasing}"
    )


def compare_means(
    spec: QuasiArithmeticSpec,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds | None = None,
    tol_abs: float | None = None,
) -> OrderVerdict:
    """Compute both means and compare them in the Loewner order.

    Raises ``HypothesisNotMet`` when the generator pair matches none of the
    ordering cases; the verdict is then unavailable rather than guessed.
    """
    bounds = bounds or spec.bounds
    predicted_mean_relation(spec)  # gate only; direction checked by callers
    mean_phi = mercer_quasi_mean(spec.phi, family, operators, bounds)
    mean_psi = mercer_quasi_mean(spec.psi, family, operators, bounds)
    return loewner_compare(mean_phi, mean_psi, tol_abs=tol_abs)


def diamond_phi(
    phi: ScalarFunction,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds,
) -> HermitianOperator:
    """The curvature correction in phi-coordinates:

        (phi(M)+phi(m)) T - phi(M)phi(m) I - (T^2 + sum_i Phi_i(phi(A_i)^2)) / 2

    with T = sum_i Phi_i(phi(A_i)); coincides with the plain correction term
    when phi is the identity, and is PSD for the same reason.
    """
    total, images = _generator_images(phi, family, operators, bounds)
    pm = float(phi(bounds.m))
    pM = float(phi(bounds.M))
    squares = [
        apply_map(mp, HermitianOperator(img.entries @ img.entries))
        for mp, img in zip(family.maps, images)
    ]
    sq_total = squares[0]
    for sq in squares[1:]:
        sq_total = sq_total + sq
    t_squared = HermitianOperator(total.entries @ total.entries)
    eye = HermitianOperator.identity(family.dim_out)
    return (pM + pm) * total - (pM * pm) * eye - 0.5 * (t_squared + sq_total)


def _psi_pre_inverse_mean(
    psi: ScalarFunction,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds,
) -> HermitianOperator:
    """(psi(M) + psi(m)) I - sum_i Phi_i(psi(A_i)), i.e. psi(QM_psi) unassembled."""
    total, _ = _generator_images(psi, family, operators, bounds)
    pm = float(psi(bounds.m))
    pM = float(psi(bounds.M))
    return (pM + pm) * HermitianOperator.identity(family.dim_out) - total


def curvature_mean_bound(
    spec: QuasiArithmeticSpec,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds | None = None,
    side: str = ALPHA_SIDE,
    curvature: CurvatureBounds | None = None,
) -> HermitianOperator:
    """psi^{-1}( psi(QM_psi) - c * diamond ) with c the composite curvature bound.

    ``side`` selects c: the alpha side (curvature floor) bounds QM_phi from
    above when psi^{-1} is operator increasing, the beta side reverses the
    inequality.  With an operator-decreasing psi^{-1} both directions flip;
    see :func:`curvature_bound_expected_relation`.
    """
    if side not in (ALPHA_SIDE, BETA_SIDE):
        raise ValueError(f"side must be {ALPHA_SIDE!r} or {BETA_SIDE!r}, got {side!r}")
    if not (spec.psi_inverse_increasing or spec.psi_inverse_decreasing):
        raise HypothesisNotMet(
            f"psi^-1 = {spec.psi_inverse.label()} is not flagged operator monotone"
        )
    bounds = bounds or spec.bounds
    curv = curvature or spec.composite_curvature
    coeff = curv.alpha if side == ALPHA_SIDE else curv.beta
    inner = _psi_pre_inverse_mean(spec.psi, family, operators, bounds)
    correction = diamond_phi(spec.phi, family, operators, bounds)
    return _apply_inverse(spec.psi_inverse, inner - coeff * correction)


def curvature_bound_expected_relation(spec: QuasiArithmeticSpec, side: str) -> Relation:
    """Expected Loewner relation of QM_phi versus the curvature bound.

    The alpha side asserts QM_phi <= bound and the beta side the reverse,
    flipped when psi^{-1} is operator decreasing; the flip is recorded in
    reports via ``spec.reversal_applied``.
    """
    below = side == ALPHA_SIDE
    if spec.psi_inverse_decreasing:
        below = not below
    return Relation.LESS_EQUAL if below else Relation.GREATER_EQUAL


def log_convex_mean_sandwich(
    spec: QuasiArithmeticSpec,
    family: MapFamily,
    operators: Sequence[HermitianOperator],
    bounds: SpectralBounds | None = None,
    tol_abs: float | None = None,
) -> Tuple[HermitianOperator, InequalityReport]:
    """Geometric interpolant between the two means for log-convex composites:

        QM_phi <= psi^{-1}( psi(m)^{(T - phi(m)I)/(phi(M)-phi(m))}
                            psi(M)^{(phi(M)I - T)/(phi(M)-phi(m))} ) <= QM_psi

    with T = sum_i Phi_i(phi(A_i)).  Both exponent operators are functions of
    T and commute, so the middle reduces to one scalar functional calculus.
    Requires psi o phi^{-1} log-convex, psi^{-1} operator increasing, and
    psi positive at the endpoints.
    """
    bounds = bounds or spec.bounds
    psi_m = float(spec.psi(bounds.m))
    psi_M = float(spec.psi(bounds.M))
    if not (psi_m > 0.0 and psi_M > 0.0):
        raise NonpositiveFunction(
            f"psi = {spec.psi.label()} must be positive at the interval endpoints"
        )
    if not spec.composite_is_log_convex:
        raise HypothesisNotMet(
            f"psi o phi^-1 is not log-convex for ({spec.phi.label()}, {spec.psi.label()})"
        )
    if not spec.psi_inverse_increasing:
        raise HypothesisNotMet(
            f"psi^-1 = {spec.psi_inverse.label()} is not flagged operator increasing"
        )
    total, _ = _generator_images(spec.phi, family, operators, bounds)
    pm = float(spec.phi(bounds.m))
    pM = float(spec.phi(bounds.M))
    log_sm = math.log(psi_m)
    log_sM = math.log(psi_M)
    width = pM - pm

    def h(tau):
        return np.exp(((tau - pm) * log_sm + (pM - tau) * log_sM) / width)

    mid_pre = apply_scalar_function(h, total, spec.phi_interval)
    middle = _apply_inverse(spec.psi_inverse, mid_pre)
    mean_phi = mercer_quasi_mean(spec.phi, family, operators, bounds)
    mean_psi = mercer_quasi_mean(spec.psi, family, operators, bounds)
    verdict_low = loewner_compare(mean_phi, middle, tol_abs=tol_abs)
    verdict_high = loewner_compare(middle, mean_psi, tol_abs=tol_abs)
    report = InequalityReport(
        sides=(("mean_phi", mean_phi), ("geometric_middle", middle), ("mean_psi", mean_psi)),
        verdicts=(
            ("mean_phi", "geometric_middle", verdict_low),
            ("geometric_middle", "mean_psi", verdict_high),
        ),
        scalars={"reversal_applied": float(spec.reversal_applied)},
    )
    return middle, report


# --------------------------------------------------------------------------
# Incomparability of the two refinement routes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeRow:
    t: float
    p: float
    gap: float
    sign: int


def incomparability_probe(
    m: float,
    M: float,
    p_values: Sequence[float],
    t_grid: Sequence[float],
) -> List[ProbeRow]:
    """Sign table of the curvature-refined minus geometric bound gap for t^p.

    A sign change across rows demonstrates that neither refinement route
    dominates the other.
    """
    from .functions import refined_vs_geometric_gap

    rows: List[ProbeRow] = []
    for p in p_values:
        for t in t_grid:
            gap = refined_vs_geometric_gap(float(t), float(m), float(M), float(p))
            sign = 0 if abs(gap) <= 1e-12 else (1 if gap > 0 else -1)
            rows.append(ProbeRow(t=float(t), p=float(p), gap=gap, sign=sign))
    return rows
