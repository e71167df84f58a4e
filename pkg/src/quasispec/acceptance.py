"""Numbered acceptance checks with pinned tolerances.

Each check returns a :class:`CriterionResult`; ``run_all`` runs checks 1 to 10
and the determinism check (11) lives with the ``verify`` command, which needs
two complete runs. Results carry no timings so output files are reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .arithmetic import GOLDEN, liouville_construct, parse_frequency
from .cohomology import (amo_equivalence_check, closed_form_h, conjugated_cocycle, equivalence_sweep,
                         residual_slope, residual_sup, solve_for_model)
from .gordon import approximant_potential_error, cfks_fuzz, cfks_max_norm, gordon_diagnostics
from .lyapunov import CERTIFY_SCHEDULE, SWEEP_SCHEDULE, herman_lower_bound, le_sweep, lyapunov_estimate
from .model import TWO_PI, ModelParams
from .numerics import IntervalUnion, Mat2, hausdorff_distance
from .spectrum import (constant_coupling_reference, duality_bands, edge_weights, rational_bands,
                       truncated_spectrum_oracle)

GOLDEN_OMEGA = TWO_PI * GOLDEN
APPROX = Fraction(55, 89)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: measured {self.measured:.6g} (tolerance {self.tolerance:.6g})"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AcceptanceSettings:
    seed: int = 0
    threads: int | None = None
    grid: int = 256


def c1_zero_energy(s: AcceptanceSettings) -> CriterionResult:
    values = {}
    for t1 in (1.0, 5.0, 100.0):
        p = ModelParams(1.0, (0.0, t1), GOLDEN_OMEGA)
        values[f"T1={t1:g}"] = lyapunov_estimate(p, 0.0, CERTIFY_SCHEDULE, s.grid).value
    worst = max(values.values())
    return CriterionResult(1, "exponent vanishes at E=0 when T(0)=0", worst <= 5e-3, worst, 5e-3, values)


def c2_herman(s: AcceptanceSettings) -> CriterionResult:
    cases = [(6.0, (1.0,)), (2.0, (4.0, 1.0)), (1.0, (2.0, 3.0, 4.0))]
    detail, worst = {}, math.inf
    for lam, T in cases:
        p = ModelParams(lam, T, GOLDEN_OMEGA)
        bound = herman_lower_bound(p)
        B = p.energy_bound
        sweep = le_sweep(p, np.linspace(-B, B, 201), SWEEP_SCHEDULE, s.grid, s.threads)
        margin = min(est.value - bound for _, est in sweep)
        detail[f"lambda={lam:g},T={T}"] = {"herman": bound, "min_margin": margin}
        worst = min(worst, margin)
    return CriterionResult(2, "estimate dominates the Herman bound", worst >= -0.05, worst, -0.05, detail)


def c3_supercritical_exponent(s: AcceptanceSettings) -> CriterionResult:
    approx = ModelParams.from_alpha(6.0, (1.0, -1.0), APPROX)
    bands = rational_bands(approx).bands.intervals
    idx = np.linspace(0, len(bands) - 1, 21).round().astype(int)
    energies = [0.5 * (bands[i][0] + bands[i][1]) for i in idx]
    p = ModelParams(6.0, (1.0, -1.0), GOLDEN_OMEGA)
    sweep = le_sweep(p, energies, SWEEP_SCHEDULE, s.grid, s.threads)
    dev = max(abs(est.value - math.log(3.0)) for _, est in sweep)
    return CriterionResult(3, "exponent equals ln(|lambda|/2) on the spectrum", dev <= 0.05, dev, 0.05,
                           {"energies": energies, "values": [est.value for _, est in sweep]})


def c4_measure(s: AcceptanceSettings) -> CriterionResult:
    sub = rational_bands(ModelParams.from_alpha(1.0, (1.0,), APPROX)).measure
    crit = rational_bands(ModelParams.from_alpha(2.0, (1.0,), APPROX)).measure
    sup = duality_bands(ModelParams.from_alpha(6.0, (1.0,), APPROX)).measure
    ref = constant_coupling_reference(6.0)
    errs = (abs(sub - 2.0), max(0.0, crit - 0.15), abs(sup - ref["measure_duality"]))
    ok = errs[0] <= 0.05 and crit <= 0.15 and errs[2] <= 0.2
    return CriterionResult(4, "spectrum measure at lambda = 1, 2, 6", ok, max(errs[0], errs[2]), 0.05,
                           {"lambda=1": sub, "lambda=2": crit, "lambda=6": sup,
                            "lambda=6 duality value": ref["measure_duality"],
                            "lambda=6 formula 4|1-2/lambda|": ref["measure_formula"]})


def c5_equivalence(s: AcceptanceSettings) -> CriterionResult:
    rng = np.random.default_rng(s.seed)
    lam = 3.0
    B = 2.0 + lam
    diffs = [amo_equivalence_check(lam, GOLDEN_OMEGA, float(rng.uniform(-B, B)), float(rng.uniform(0, TWO_PI)), 10 ** 4)
             for _ in range(16)]
    sweep = equivalence_sweep(lam, GOLDEN_OMEGA, np.linspace(-B, B, 21), SWEEP_SCHEDULE, s.grid, s.threads)
    ok = max(diffs) <= 1e-8 and sweep <= 1e-3
    return CriterionResult(5, "alternating coupling equals the shifted-frequency model", ok, max(diffs), 1e-8,
                           {"max_matrix_difference": max(diffs), "max_exponent_difference": sweep})


def c6_four_norm(s: AcceptanceSettings) -> CriterionResult:
    m = cfks_fuzz(100_000, s.seed)
    exact = cfks_max_norm(Mat2(2.0, 0.0, 0.0, 0.5), (0.0, 1.0))
    ok = m >= 0.5 - 1e-12 and exact == 4.0
    return CriterionResult(6, "four-norm lower bound on random unimodular pairs", ok, m, 0.5 - 1e-12,
                           {"samples": 100_000, "diag(2,1/2) value": exact})


def _liouville_params(lam: float, T: tuple[float, ...]):
    cf, _ = liouville_construct(2)
    return ModelParams.from_alpha(lam, T, cf.exact), cf


def c7_potential_error(s: AcceptanceSettings) -> CriterionResult:
    detail, ok = {}, True
    golden = ModelParams(1.0, (1.0,), GOLDEN_OMEGA)
    gcf = parse_frequency("golden").cf
    cases = [(golden, gcf, i) for i, q in enumerate(gcf.q) if q in (13, 34, 89)]
    lp, lcf = _liouville_params(6.0, (1.0,))
    cases += [(lp, lcf, i) for i in range(1, len(lcf.convergents))]
    worst_ratio = 0.0
    for params, cf, i in cases:
        p, q = cf.convergents[i]
        err = approximant_potential_error(params, p, q, cf=cf)
        entry = {"measured": err.measured, "bound": err.bound}
        ok &= err.within_bound
        if err.bound > 0:
            worst_ratio = max(worst_ratio, err.measured / err.bound)
        for E in (0.0, 0.5, 1.3):
            r = gordon_diagnostics(params, E, 0.1, i, cf=cf)
            within = r.discrepancy_within_bound
            entry[f"E={E:g}"] = {"log_D": r.log_matrix_discrepancy, "log_bound": r.log_telescoping_bound,
                                 "compared": within is not None}
            if within is False:
                ok = False
        detail[f"{'golden' if cf is gcf else 'liouville'} {p}/{q}"] = entry
    return CriterionResult(7, "potential error and block discrepancy within analytic bounds", ok, worst_ratio, 1.0,
                           detail)


def c8_gordon_witness(s: AcceptanceSettings) -> CriterionResult:
    params, cf = _liouville_params(1.0, (3.0, 2.0))
    worst, detail = math.inf, {}
    energies = np.linspace(-params.energy_bound, params.energy_bound, 9)
    for i in range(1, len(cf.convergents)):
        level_min = math.inf
        for E in energies:
            for theta in (0.0, 1.0):
                r = gordon_diagnostics(params, float(E), theta, i, cf=cf)
                level_min = min(level_min, r.witness)
        detail[f"level {i} (q={cf.q[i]})"] = level_min
        worst = min(worst, level_min)
    detail["hypothesis |lambda^2 T0 T1| > 4"] = abs(params.lam ** 2 * params.T[0] * params.T[1]) > 4
    return CriterionResult(8, "non-decay witness at every computable level", worst >= 0.25, worst, 0.25, detail)


def c9_cohomology(s: AcceptanceSettings) -> CriterionResult:
    detail, ok = {}, True
    worst_cf = worst_id = 0.0
    min_slope = math.inf
    for t1 in (1.0, 10.0, 100.0):
        p = ModelParams(1.0, (0.0, t1), GOLDEN_OMEGA)
        sol = solve_for_model(p)
        cf_err = float(np.max(np.abs(sol.h.coeffs - closed_form_h(p).coeffs)))
        b = conjugated_cocycle(p, 0.0, 0.7, sol.h)
        id_err = float(np.max(np.abs(b + np.eye(2))))
        id_err = max(id_err, residual_sup(p, 0.0, sol.h))
        slope = residual_slope(p, sol.h).slope
        worst_cf, worst_id, min_slope = max(worst_cf, cf_err), max(worst_id, id_err), min(min_slope, slope)
        detail[f"T1={t1:g}"] = {"closed_form": cf_err, "minus_identity": id_err, "slope": slope}
    ok = worst_cf <= 1e-12 and worst_id <= 1e-10 and min_slope >= 0.9
    return CriterionResult(9, "cohomological solution and conjugation", ok, min_slope, 0.9, detail)


def c10_oracle(s: AcceptanceSettings) -> CriterionResult:
    detail, worst = {}, 0.0
    for lam in (0.0, 1.0, 2.0):
        p = ModelParams.from_alpha(lam, (1.0,), APPROX)
        bands = rational_bands(p).bands
        ev = truncated_spectrum_oracle(p, 0.0, 2000)
        d = hausdorff_distance(bands, IntervalUnion.from_points(ev))
        w, weight = edge_weights(p, 0.0, 2000)
        bulk = w[weight < 0.5]
        d_bulk = hausdorff_distance(bands, IntervalUnion.from_points(bulk))
        detail[f"lambda={lam:g}"] = {"hausdorff": d, "edge_states": int(np.sum(weight >= 0.5)),
                                     "hausdorff_without_edge_states": d_bulk}
        worst = max(worst, d)
    return CriterionResult(10, "truncated spectrum matches approximant bands", worst <= 0.05, worst, 0.05, detail)


CRITERIA: dict[int, Callable[[AcceptanceSettings], CriterionResult]] = {
    1: c1_zero_energy, 2: c2_herman, 3: c3_supercritical_exponent, 4: c4_measure, 5: c5_equivalence,
    6: c6_four_norm, 7: c7_potential_error, 8: c8_gordon_witness, 9: c9_cohomology, 10: c10_oracle,
}


def run_criterion(number: int, settings: AcceptanceSettings = AcceptanceSettings()) -> CriterionResult:
    return CRITERIA[number](settings)


def run_all(settings: AcceptanceSettings = AcceptanceSettings(), numbers=None,
            on_result: Callable[[CriterionResult, float], None] | None = None) -> list[CriterionResult]:
    out = []
    for n in (numbers or sorted(CRITERIA)):
        t = time.perf_counter()
        r = CRITERIA[n](settings)
        if on_result is not None:
            on_result(r, time.perf_counter() - t)
        out.append(r)
    return out
