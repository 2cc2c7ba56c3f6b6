"""Seeded trial execution, reproduction cases, and counterexample search.

Everything here is deterministic: trial i of a run with master seed s uses
the PCG64 stream seeded with s XOR i, trials execute sequentially, and the
JSON report of a run is byte-identical across repetitions.  Wall time is
reported on stderr only, never inside the JSON.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import BudgetExhausted, HypothesisNotMet, InverseDomainError
from .functions import ScalarFunction, curvature_bounds, parse_function_spec
from .linalg import HermitianOperator, Relation, SpectralBounds
from .maps import MapFamily, WeightedTrace, family_to_json
from .mercer import (
    InequalityReport,
    MercerInstance,
    contract_pairs,
    evaluate_chain,
    mercer_lhs,
    mercer_rhs_classic,
    refined_bounds,
)
from .quasimeans import (
    ALPHA_SIDE,
    BETA_SIDE,
    QuasiArithmeticSpec,
    compare_means,
    curvature_bound_expected_relation,
    curvature_mean_bound,
    incomparability_probe,
    log_convex_mean_sandwich,
    mercer_quasi_mean,
    predicted_mean_relation,
    resolve_spec,
)
from .sampling import generator, random_hermitian, random_unital_family, trial_seed

CHAIN_TOKENS = {
    "classic": "classic",
    "chain": "chain",
    "twice-diff": "twice_diff",
    "twice_diff": "twice_diff",
    "log-convex": "log_convex",
    "log_convex": "log_convex",
}

REPRODUCE_CASES = ("example-2.2", "example-3.5")
SEARCH_TARGETS = ("classic-nonconvex", "th3-th4-order")


@dataclass(frozen=True)
class TrialConfig:
    """One verify run: function, chain, dimensions, interval, seed, tolerances."""

    seed: int = 0
    dim_h: int = 4
    dim_k: int = 4
    n_maps: int = 2
    m: float = 1.0
    M: float = 3.0
    function_spec: str = "exp"
    chain: str = "classic"
    tol_abs: Optional[float] = None
    force: bool = False
    mixed: bool = False
    vary_dims: bool = False

    @property
    def bounds(self) -> SpectralBounds:
        return SpectralBounds(self.m, self.M)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "dim_h": self.dim_h,
            "dim_k": self.dim_k,
            "n_maps": self.n_maps,
            "m": self.m,
            "M": self.M,
            "function": self.function_spec,
            "chain": self.chain,
            "tol_abs": self.tol_abs,
            "force": self.force,
            "mixed": self.mixed,
            "vary_dims": self.vary_dims,
        }


@dataclass(frozen=True)
class TrialViolation:
    trial: int
    seed: int
    pair: Tuple[str, str]
    gap: float

    def to_json(self) -> dict:
        return {"trial": self.trial, "seed": self.seed, "pair": list(self.pair), "gap": self.gap}


@dataclass
class RunSummary:
    """Outcome of a verify run; ``rows`` feed the CSV summary."""

    trials: int
    violations: List[TrialViolation]
    min_gap_overall: float
    wall_time: float
    rows: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        # wall_time deliberately omitted: reports must be byte-identical
        # across runs with the same seed.
        return {
            "trials": self.trials,
            "violations": [v.to_json() for v in self.violations],
            "min_gap_overall": None if math.isinf(self.min_gap_overall) else self.min_gap_overall,
        }


def normalize_chain(token: str) -> str:
    if token not in CHAIN_TOKENS:
        raise ValueError(f"unknown chain {token!r}; choices: {sorted(set(CHAIN_TOKENS))}")
    return CHAIN_TOKENS[token]


def _draw_dims(config: TrialConfig, rng: np.random.Generator) -> Tuple[int, int, int]:
    if config.vary_dims:
        dim_h = int(rng.integers(2, 9))
        dim_k = int(rng.integers(1, dim_h + 1))
        n = int(rng.integers(1, 5))
        return dim_h, dim_k, n
    return config.dim_h, config.dim_k, config.n_maps


def build_instance(
    config: TrialConfig, trial_index: int, f: ScalarFunction
) -> Tuple[MercerInstance, int, Tuple[int, int, int]]:
    """Deterministic instance for one trial.

    Every 10th trial forces two eigenvalues of each operator onto the
    interval endpoints, where the equality cases of the bounds live.
    """
    seed_i = trial_seed(config.seed, trial_index)
    rng = generator(seed_i)
    dim_h, dim_k, n = _draw_dims(config, rng)
    family = random_unital_family(n, dim_h, dim_k, rng, include_trace=config.mixed)
    force_endpoints = trial_index % 10 == 0
    operators = tuple(
        random_hermitian(dim_h, config.bounds, rng, force_endpoints=force_endpoints)
        for _ in range(n)
    )
    inst = MercerInstance(f=f, family=family, operators=operators, bounds=config.bounds)
    return inst, seed_i, (dim_h, dim_k, n)


def _pair_gap(report: InequalityReport, left: str, right: str) -> float:
    """min eigenvalue of (right - left), the signed slack of left <= right."""
    verdict = report.verdict_for(left, right)
    if verdict.relation is Relation.GREATER_EQUAL:
        diff = report.side(right) - report.side(left)
        return float(np.linalg.eigvalsh(diff.entries)[0])
    return verdict.gap_min_eigenvalue


def run_suite(config: TrialConfig, n_trials: int) -> RunSummary:
    """Execute n seeded trials of one chain and collect ordering violations.

    Violations are data, not errors: each carries its replay seed and the
    offending pair so the exact instance can be rebuilt.
    """
    f = parse_function_spec(config.function_spec)
    which = normalize_chain(config.chain)
    started = time.perf_counter()
    violations: List[TrialViolation] = []
    rows: List[dict] = []
    min_gap = math.inf
    for i in range(n_trials):
        inst, seed_i, (dim_h, dim_k, n) = build_instance(config, i, f)
        report = evaluate_chain(inst, which, force=config.force, tol_abs=config.tol_abs)
        trial_min = math.inf
        for left, right in contract_pairs(which, alpha=report.scalars.get("alpha")):
            verdict = report.verdict_for(left, right)
            gap = _pair_gap(report, left, right)
            trial_min = min(trial_min, gap)
            if not verdict.is_ordered_below:
                violations.append(
                    TrialViolation(trial=i, seed=seed_i, pair=(left, right), gap=gap)
                )
        min_gap = min(min_gap, trial_min)
        rows.append(
            {
                "seed": seed_i,
                "trial": i,
                "function": f.label(),
                "chain": which,
                "dim_h": dim_h,
                "dim_k": dim_k,
                "n_maps": n,
                "min_gap": trial_min,
            }
        )
    wall = time.perf_counter() - started
    return RunSummary(
        trials=n_trials,
        violations=violations,
        min_gap_overall=min_gap,
        wall_time=wall,
        rows=rows,
    )


def replay_trial(config: TrialConfig, trial_index: int) -> Dict[str, float]:
    """Re-execute one trial and return its contract-pair gaps keyed 'left<=right'."""
    f = parse_function_spec(config.function_spec)
    which = normalize_chain(config.chain)
    inst, _, _ = build_instance(config, trial_index, f)
    report = evaluate_chain(inst, which, force=config.force, tol_abs=config.tol_abs)
    return {
        f"{left}<={right}": _pair_gap(report, left, right)
        for left, right in contract_pairs(which, alpha=report.scalars.get("alpha"))
    }


def verify_report(config: TrialConfig, n_trials: int) -> Tuple[dict, RunSummary]:
    summary = run_suite(config, n_trials)
    report = {
        "command": "verify",
        "config": config.to_json(),
        "trials": n_trials,
        "summary": summary.to_json(),
    }
    return report, summary


# --------------------------------------------------------------------------
# Reproduction cases
# --------------------------------------------------------------------------

def _sine_counterexample_instance(function_override: Optional[str] = None):
    from .functions import sine

    bounds = SpectralBounds(math.pi / 4, math.pi / 2)
    f = parse_function_spec(function_override) if function_override else sine()
    family = MapFamily(maps=(WeightedTrace(0.5, dim_in=2, dim_out=1),))
    a = HermitianOperator.diagonal([bounds.m, bounds.M])
    return MercerInstance(f=f, family=family, operators=(a,), bounds=bounds)


def reproduce(case: str, function_override: Optional[str] = None) -> dict:
    """Fixed showcase computations with no randomness.

    ``example-2.2``: the 2x2 sine instance on [pi/4, pi/2] with the
    half-trace map, where the classic bound fails but the curvature-corrected
    upper bound holds.  ``example-3.5``: the sign flip of the gap between the
    curvature-refined and geometric bounds for t^p at t=2 on [1, 3].
    """
    if case == "example-2.2":
        inst = _sine_counterexample_instance(function_override)
        curv = curvature_bounds(inst.f, inst.bounds)
        lhs = mercer_lhs(inst).scalar()
        rhs = mercer_rhs_classic(inst).scalar()
        lower, upper = refined_bounds(inst, curv)
        return {
            "case": case,
            "function": inst.f.label(),
            "m": inst.bounds.m,
            "M": inst.bounds.M,
            "alpha": curv.alpha,
            "beta": curv.beta,
            "values": {
                "lhs": lhs,
                "rhs_classic": rhs,
                "refined_lower": lower.scalar(),
                "refined_upper": upper.scalar(),
            },
            "classic_gap": rhs - lhs,
        }
    if case == "example-3.5":
        m, M, t = 1.0, 3.0, 2.0
        rows = incomparability_probe(m, M, p_values=[-0.2, -1.0], t_grid=[t])
        return {
            "case": case,
            "m": m,
            "M": M,
            "t": t,
            "gaps": {f"{row.p:g}": row.gap for row in rows},
            "signs": {f"{row.p:g}": row.sign for row in rows},
        }
    raise ValueError(f"unknown case {case!r}; choices: {REPRODUCE_CASES}")


# --------------------------------------------------------------------------
# Counterexample search
# --------------------------------------------------------------------------

NONCONVEX_CANDIDATES = ("sin", "sqrt", "log", "pow:p=0.5")


def _classic_gap_for_instance(inst: MercerInstance, tol_abs: Optional[float]) -> Tuple[float, bool]:
    report = evaluate_chain(inst, "classic", force=True, tol_abs=tol_abs)
    verdict = report.verdict_for("lhs", "rhs_classic")
    return _pair_gap(report, "lhs", "rhs_classic"), not verdict.is_ordered_below


def search_counterexample(
    target: str,
    budget: int,
    function_spec: Optional[str] = None,
    m: float = 1.0,
    M: float = 3.0,
    seed: int = 0,
    tol_abs: Optional[float] = None,
) -> dict:
    """Directed search for the two failure modes the engine can exhibit.

    ``classic-nonconvex`` hunts for instances where the classic bound fails
    for a non-convex function: trial 0 probes the extremal configuration
    (A = diag(m, M) with the scalar half-trace map), the remaining budget
    explores random instances.  ``th3-th4-order`` hunts for both signs of the
    refined-vs-geometric gap over (t, p).  Raises ``BudgetExhausted`` with
    the best candidate when no witness exists within budget.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    bounds = SpectralBounds(m, M)

    if target == "classic-nonconvex":
        candidates = (function_spec,) if function_spec else NONCONVEX_CANDIDATES
        best: Optional[dict] = None
        best_violated = False
        for trial in range(budget):
            rng = generator(trial_seed(seed, trial))
            for spec_str in candidates:
                f = parse_function_spec(spec_str)
                if trial == 0:
                    family = MapFamily(maps=(WeightedTrace(0.5, dim_in=2, dim_out=1),))
                    operators = (HermitianOperator.diagonal([bounds.m, bounds.M]),)
                else:
                    dim_h = int(rng.integers(2, 7))
                    dim_k = int(rng.integers(1, dim_h + 1))
                    n = int(rng.integers(1, 4))
                    family = random_unital_family(n, dim_h, dim_k, rng)
                    operators = tuple(
                        random_hermitian(dim_h, bounds, rng, force_endpoints=(trial % 3 == 1))
                        for _ in range(n)
                    )
                inst = MercerInstance(f=f, family=family, operators=operators, bounds=bounds)
                gap, violated = _classic_gap_for_instance(inst, tol_abs)
                if best is None or gap < best["gap"]:
                    best = {
                        "target": target,
                        "function": spec_str,
                        "trial": trial,
                        "seed": trial_seed(seed, trial),
                        "gap": gap,
                        "m": m,
                        "M": M,
                        "dim_h": family.dim_in,
                        "dim_k": family.dim_out,
                        "n_maps": family.size,
                        "operators": [a.to_json() for a in operators],
                        "maps": family_to_json(family),
                    }
                    best_violated = violated
        assert best is not None
        if best_violated:
            return {"target": target, "status": "found", "witness": best}
        raise BudgetExhausted(
            f"no classic violation found in {budget} trials (best gap {best['gap']:.3e})",
            best=best,
        )

    if target == "th3-th4-order":
        rows = []
        negative = None
        positive = None
        for trial in range(budget):
            if trial == 0:
                p_values = [-0.2, -1.0]
                t_grid = np.linspace(bounds.m, bounds.M, 21)
            else:
                rng = generator(trial_seed(seed, trial))
                p_values = list(rng.uniform(-3.0, -0.05, size=3))
                t_grid = rng.uniform(bounds.m, bounds.M, size=7)
            batch = incomparability_probe(bounds.m, bounds.M, p_values, t_grid)
            rows.extend(batch)
            for row in batch:
                if row.sign < 0 and (negative is None or row.gap < negative["gap"]):
                    negative = {"t": row.t, "p": row.p, "gap": row.gap}
                if row.sign > 0 and (positive is None or row.gap > positive["gap"]):
                    positive = {"t": row.t, "p": row.p, "gap": row.gap}
            if negative and positive:
                break
        table = [
            {"t": row.t, "p": row.p, "gap": row.gap, "sign": row.sign} for row in rows
        ]
        if negative and positive:
            return {
                "target": target,
                "status": "found",
                "negative": negative,
                "positive": positive,
                "rows": table,
            }
        raise BudgetExhausted(
            f"only one sign of the gap found in {budget} trials",
            best={"target": target, "negative": negative, "positive": positive, "rows": table},
        )

    raise ValueError(f"unknown search target {target!r}; choices: {SEARCH_TARGETS}")


# --------------------------------------------------------------------------
# Quasi-arithmetic sweep
# --------------------------------------------------------------------------

@dataclass
class SweepCheck:
    applicable: bool
    expected: Optional[str] = None
    evaluated: int = 0
    domain_skips: int = 0
    min_gap: float = math.inf
    violations: List[dict] = field(default_factory=list)

    def record(self, trial: int, seed_i: int, gap: float, tol: float) -> None:
        self.evaluated += 1
        self.min_gap = min(self.min_gap, gap)
        if gap < -tol:
            self.violations.append({"trial": trial, "seed": seed_i, "gap": gap})

    def to_json(self) -> dict:
        out: dict = {"applicable": self.applicable}
        if self.applicable:
            out.update(
                {
                    "expected": self.expected,
                    "evaluated": self.evaluated,
                    "domain_skips": self.domain_skips,
                    "min_gap": None if math.isinf(self.min_gap) else self.min_gap,
                    "violations": self.violations,
                }
            )
        return out


def _directional_gap(
    left: HermitianOperator, right: HermitianOperator, relation: Relation
) -> float:
    """Signed slack of the predicted relation: min eig of the predicted-PSD side."""
    if relation is Relation.GREATER_EQUAL:
        diff = left - right
    else:
        diff = right - left
    lam = np.linalg.eigvalsh(diff.entries)
    if relation is Relation.EQUAL:
        return -float(max(abs(lam[0]), abs(lam[-1])))
    return float(lam[0])


def run_sweep(
    phi_spec: str,
    psi_spec: str,
    config: TrialConfig,
    n_trials: int,
) -> Tuple[dict, int]:
    """Exercise the quasi-arithmetic mean checks for one generator pair.

    Per trial: the mean ordering against its predicted direction, both sides
    of the curvature bound (beta side skipped per-trial when its operand
    leaves the domain of psi^{-1}), and the geometric sandwich when the
    composite is log-convex.  Returns (json_report, violation_count).
    """
    phi = parse_function_spec(phi_spec)
    psi = parse_function_spec(psi_spec)
    bounds = config.bounds
    spec = resolve_spec(phi, psi, bounds)

    try:
        predicted = predicted_mean_relation(spec)
        compare_check = SweepCheck(applicable=True, expected=predicted.value)
    except HypothesisNotMet:
        predicted = None
        compare_check = SweepCheck(applicable=False)

    monotone_inverse = spec.psi_inverse_increasing or spec.psi_inverse_decreasing
    alpha_rel = curvature_bound_expected_relation(spec, ALPHA_SIDE) if monotone_inverse else None
    beta_rel = curvature_bound_expected_relation(spec, BETA_SIDE) if monotone_inverse else None
    alpha_check = SweepCheck(applicable=monotone_inverse, expected=alpha_rel.value if alpha_rel else None)
    beta_check = SweepCheck(applicable=monotone_inverse, expected=beta_rel.value if beta_rel else None)

    sandwich_applicable = (
        spec.composite_is_log_convex
        and spec.psi_inverse_increasing
        and float(psi(bounds.m)) > 0.0
        and float(psi(bounds.M)) > 0.0
    )
    sandwich_check = SweepCheck(
        applicable=sandwich_applicable, expected=Relation.LESS_EQUAL.value
    )

    for i in range(n_trials):
        seed_i = trial_seed(config.seed, i)
        rng = generator(seed_i)
        dim_h, dim_k, n = _draw_dims(config, rng)
        family = random_unital_family(n, dim_h, dim_k, rng, include_trace=config.mixed)
        operators = tuple(
            random_hermitian(dim_h, bounds, rng, force_endpoints=(i % 10 == 0))
            for _ in range(n)
        )
        tol = config.tol_abs if config.tol_abs is not None else 1e-9 * (
            1.0 + abs(bounds.M) + abs(float(psi(bounds.M))) + abs(float(psi(bounds.m)))
        )

        mean_phi = mercer_quasi_mean(phi, family, operators, bounds)
        mean_psi = mercer_quasi_mean(psi, family, operators, bounds)

        if compare_check.applicable:
            gap = _directional_gap(mean_phi, mean_psi, predicted)
            compare_check.record(i, seed_i, gap, tol)

        if monotone_inverse:
            for side, rel, check in (
                (ALPHA_SIDE, alpha_rel, alpha_check),
                (BETA_SIDE, beta_rel, beta_check),
            ):
                try:
                    bound = curvature_mean_bound(spec, family, operators, bounds, side=side)
                except InverseDomainError:
                    check.domain_skips += 1
                else:
                    check.record(i, seed_i, _directional_gap(mean_phi, bound, rel), tol)

        if sandwich_applicable:
            middle, _report = log_convex_mean_sandwich(spec, family, operators, bounds)
            low = _directional_gap(mean_phi, middle, Relation.LESS_EQUAL)
            high = _directional_gap(middle, mean_psi, Relation.LESS_EQUAL)
            sandwich_check.record(i, seed_i, min(low, high), tol)

    checks = {
        "mean_order": compare_check,
        "curvature_bound_alpha": alpha_check,
        "curvature_bound_beta": beta_check,
        "log_convex_sandwich": sandwich_check,
    }
    n_violations = sum(len(c.violations) for c in checks.values() if c.applicable)
    report = {
        "command": "sweep",
        "phi": phi_spec,
        "psi": psi_spec,
        "config": config.to_json(),
        "trials": n_trials,
        "composite": {
            "alpha": spec.composite_curvature.alpha,
            "beta": spec.composite_curvature.beta,
            "convex": spec.composite_is_convex,
            "concave": spec.composite_is_concave,
            "log_convex": spec.composite_is_log_convex,
        },
        "reversal_applied": spec.reversal_applied,
        "checks": {name: check.to_json() for name, check in checks.items()},
        "violations_total": n_violations,
    }
    return report, n_violations
