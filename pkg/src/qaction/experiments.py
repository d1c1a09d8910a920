"""End-to-end runs of each model: simulate, measure, report.

Every ``run_*`` function returns a :class:`RunResult` holding one flat
output row (plain floats/ints/strings, ready for CSV or JSON), the action
report when the run defines one, and the discrepancy flags raised along
the way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis, models, perturbation
from .errors import NumericalContractError
from .qcore import (
    DEFAULT_DIM_CAP,
    DRIFT_BOUND,
    StepControl,
    basis_state,
    energy_moments,
    evolve_state,
    inner_product,
    peak_time,
    probability_function,
)

HORIZON_FACTOR = 1.2


@dataclass
class RunResult:
    row: dict
    report: analysis.ActionReport | None = None
    flags: list[str] = field(default_factory=list)


def measured_grover_gap(h, variant: str) -> float:
    """Gap of the two eigenvalues that carry the search dynamics."""
    w = h.spectrum
    if variant == "H1":
        return float(w[-1] - w[-2])
    return float(w[-1] - w[0])


def run_grover(
    N: int,
    E: float = 1.0,
    variant: str = "H1",
    target_index: int = 0,
    *,
    full_space: bool = True,
    include_io: bool = True,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> RunResult:
    """Search flip time and action for one Grover Hamiltonian.

    The full-space run locates the first success-probability peak on the
    dense eigendecomposition; ``full_space=False`` uses the exact
    two-dimensional reduction instead (any ``N``).
    """
    model = models.GroverModel(N, E, variant, target_index)
    red = models.grover_reduced(model)
    psi_in, target = model.initial_state(), model.target_state()
    h = models.build_grover(model)
    if full_space:
        gap = measured_grover_gap(h, variant) if N <= dim_cap else red.gap
        gen = probability_function(psi_in, h, target, dim_cap)
        period = math.pi / gap
        t_star, peak = peak_time(gen, (1e-6 * period, 2 * period))
    else:
        gap = red.gap
        t_star, peak = red.flip_time, float(red.probability_curve(red.flip_time))
    _, spread = energy_moments(psi_in, h)
    n_bits = max(1, (N - 1).bit_length())
    stages = [analysis.static_stage("algorithm", psi_in, _SpectrumShim(h, red) if N > dim_cap else h, t_star)]
    if include_io:
        stages.insert(0, analysis.prep_stage("preparation", n_bits, t_star))
        stages.append(analysis.prep_stage("measurement", n_bits, t_star))
    flags = red.discrepancies()
    model_id = f"grover-{variant.lower()}"
    params = {"N": N, "E": E, "variant": variant, "target_index": target_index}
    report = analysis.make_action_report(model_id, params, stages, flags=flags)
    row = {
        "N": N,
        "E": E,
        "variant": variant,
        "t_star": t_star,
        "peak_probability": peak,
        "flip_time_exact": red.flip_time,
        "flip_time_literature": red.literature_flip_time,
        "gap_measured": gap,
        "gap_exact": red.gap,
        "gap_literature": red.literature_gap,
        "spread_in": spread,
        "algorithm_action": spread * t_star,
        "t_c": report.t_c,
        "action": report.action,
        "C": report.classical_complexity,
        "ratio": report.ratio,
    }
    return RunResult(row, report, flags)


class _SpectrumShim:
    """Rank-two operator whose spectrum comes from the reduction.

    Lets reports be built above the dense cap without diagonalizing.
    """

    def __init__(self, h, red: models.ReducedGrover):
        self._h = h
        self.dim = h.dim
        if red.variant == "H1":
            top = [red.E * (1 - 1 / math.sqrt(red.N)), red.E * (1 + 1 / math.sqrt(red.N))]
            self.spectrum = np.array([0.0] + top)
        else:
            self.spectrum = np.array([-red.gap / 2, 0.0, red.gap / 2])

    def apply(self, vec):
        return self._h.apply(vec)


def run_shor_phase(n: int, omega: float = 1.0, alpha: float = math.pi) -> RunResult:
    model = models.ShorPhaseModel(n, omega, alpha)
    sp = models.build_shor_phase(model)
    psi = evolve_state(sp.input, sp.h, sp.t_n)
    fidelity = abs(inner_product(sp.target, psi))
    mean, spread = energy_moments(sp.input, sp.h)
    row = {
        "n": n,
        "omega": omega,
        "alpha": alpha,
        "t_n": sp.t_n,
        "fidelity": fidelity,
        "mean_energy": mean,
        "mean_energy_closed_form": models.shor_average_energy(n, omega),
        "spread": spread,
        "mean_action": mean * sp.t_n,
        "C": 2**n,
        "mean_action_ratio": mean * sp.t_n / 2**n,
    }
    report = None
    if sp.t_n > 0:
        stage = analysis.static_stage("algorithm", sp.input, sp.h, sp.t_n)
        report = analysis.make_action_report("shor-phase", {"n": n, "omega": omega, "alpha": alpha}, [stage])
        row.update(action=report.action, ratio=report.ratio)
    else:
        row.update(action=0.0, ratio=0.0)
    if fidelity < 1 - 1e-10:
        raise NumericalContractError(f"phase-shift fidelity {fidelity!r} below 1 - 1e-10")
    return RunResult(row, report, [])


def run_prep(n: int, t_c: float = 1.0, flip_mask=None) -> RunResult:
    """Write an n-bit register; default mask flips every bit."""
    mask = tuple(range(n)) if flip_mask is None else tuple(flip_mask)
    model = models.PrepModel(n, mask, t_c)
    sched = models.build_prep(model)
    flip = 1.0
    if sched.generators:
        gen = sched.generators[0][1]
        out = evolve_state(basis_state(2, 0, "qubit"), gen, t_c)
        flip = float(out.populations()[1])
    if flip < 1 - 1e-12:
        raise NumericalContractError(f"bit flip incomplete at t_c: p(1) = {flip!r}")
    row = {
        "n": n,
        "t_c": t_c,
        "flipped": len(model.flip_mask),
        "rabi_rate": sched.rabi_rate,
        "per_bit_spread": sched.per_bit_spread,
        "flip_probability": flip,
        "total_product": sched.total_spread_time_product,
    }
    report = None
    if model.flip_mask:
        stage = analysis.prep_stage("preparation", n, t_c, model.flip_mask)
        report = analysis.make_action_report("prep", {"n": n, "t_c": t_c}, [stage])
        row.update(action=report.action, C=report.classical_complexity, ratio=report.ratio)
    else:
        # nothing to write: keep the column set fixed
        row.update(action=0.0, C=analysis.classical_complexity("prep", {"n": n}), ratio=0.0)
    return RunResult(row, report, [])


def _scan_result(model_id, params, driven, scan, psi0, size, extra_row) -> RunResult:
    if scan.discrimination_time is None:
        raise NumericalContractError(
            f"target never dominated competitors by x{scan.dominance_ratio:g} within the horizon"
        )
    stage = analysis.driven_stage("algorithm", psi0, driven, scan.discrimination_time,
                                  valid=scan.max_norm_drift <= DRIFT_BOUND)
    report = analysis.make_action_report(model_id, params, [stage], size=size, flags=scan.warnings)
    row = dict(extra_row)
    row.update(
        discrimination_time=scan.discrimination_time,
        nearest_gap=scan.nearest_gap,
        scaled_time=scan.scaled_time,
        waiting_estimate=perturbation.discrimination_time_estimate(0.0, scan.nearest_gap),
        target_population=float(scan.populations[np.searchsorted(scan.times, scan.discrimination_time), scan.target]),
        dominance_ratio=scan.dominance_ratio,
        max_norm_drift=scan.max_norm_drift,
        t_c=report.t_c,
        E_c=report.E_c,
        action=report.action,
        C=report.classical_complexity,
        ratio=report.ratio,
    )
    return RunResult(row, report, list(report.flags))


def run_directory(
    N: int,
    e_max: float = 1.0,
    epsilon: float = models.DEFAULT_EPSILON,
    seed: int = 0,
    target_index: int | None = None,
    steps_per_period: int = 40,
    horizon: float | None = None,
) -> RunResult:
    model = models.DirectoryModel(N, e_max, epsilon, seed, target_index=target_index)
    driven = models.build_directory(model)
    spacing = e_max / (N - 1)
    horizon = horizon or HORIZON_FACTOR * 2 * math.pi / spacing
    scan = perturbation.run_resonance_scan(
        driven, model.target_index, horizon, StepControl(steps_per_period), basis_tag=model.basis_tag
    )
    params = {"N": N, "e_max": e_max, "epsilon": epsilon, "seed": seed, "target_index": model.target_index}
    extra = {
        "N": N,
        "e_max": e_max,
        "epsilon": epsilon,
        "seed": seed,
        "target_index": model.target_index,
        "drive_frequency": driven.drive_frequency,
        "horizon": horizon,
        "search_time_estimate": perturbation.directory_search_time(N, e_max),
    }
    return _scan_result("directory", params, driven, scan, model.initial_state(), N, extra)


def run_cavity(
    target: int,
    window: tuple[int, int] | None = None,
    omega: float = 1.0,
    seed: int = 0,
    epsilon: float = models.DEFAULT_EPSILON,
    coupling: float | None = None,
    q_max: int | None = None,
    steps_per_period: int = 40,
    horizon: float | None = None,
) -> RunResult:
    window = window or (max(2, target - 5), target + 5)
    model = models.CavityModel(window, omega, q_max, coupling, epsilon, seed, target)
    cw = models.build_cavity_window(model)
    idx = cw.index_of(target)
    gaps = [abs(cw.energies[idx] - e) for k, e in enumerate(cw.energies) if k not in (0, idx)]
    nearest = min(gaps) if gaps else omega
    horizon = horizon or HORIZON_FACTOR * 2 * math.pi / nearest
    scan = perturbation.run_resonance_scan(
        cw.driven, idx, horizon, StepControl(steps_per_period), basis_tag="fock-window"
    )
    params = {"target": target, "window": f"{window[0]}:{window[1]}", "omega": omega, "seed": seed}
    extra = {
        "target": target,
        "window_lo": window[0],
        "window_hi": window[1],
        "omega": omega,
        "seed": seed,
        "coupling": cw.coupling,
        "drive_frequency": cw.driven.drive_frequency,
        "horizon": horizon,
        "selection_time_estimate": target / omega,
    }
    return _scan_result("cavity", params, cw.driven, scan, cw.initial_state(), target, extra)


def run_bound_suite(count: int = 200, max_dim: int = 64, seed: int = 0) -> RunResult:
    checks = analysis.run_bound_suite(count, max_dim, seed)
    reached = [c for _, c in checks if c.t_perp is not None]
    violations = sum(not c.satisfied for _, c in checks)
    tightest = min((c.t_perp / c.bound for c in reached), default=math.nan)
    row = {
        "cases": count,
        "max_dim": max_dim,
        "seed": seed,
        "orthogonal_cases": len(reached),
        "violations": violations,
        "tightest_ratio": tightest,
    }
    if violations:
        raise NumericalContractError(f"{violations} speed-limit violations")
    return RunResult(row, None, [])


STANDARD_SUITE = {
    "prep": {"n": 8, "t_c": 1.0},
    "grover-h1": {"N": 16, "E": 1.0},
    "directory": {"N": 16, "e_max": 1.0, "epsilon": 0.01, "seed": 0},
    "cavity": {"target": 20, "omega": 1.0, "seed": 0},
    "shor-phase": {"n": 4, "omega": 1.0, "alpha": math.pi},
}


def run_standard_suite(seed: int = 0) -> list[RunResult]:
    """One run of each of the five models at desk-scale defaults."""
    s = STANDARD_SUITE
    return [
        run_prep(**s["prep"]),
        run_grover(variant="H1", **s["grover-h1"]),
        run_directory(**{**s["directory"], "seed": seed}),
        run_cavity(**{**s["cavity"], "seed": seed}),
        run_shor_phase(**s["shor-phase"]),
    ]
