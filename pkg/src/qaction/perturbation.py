"""First-order transition formulas and resonance-discrimination scans.

The closed-form estimates here are the textbook-style expressions used to
argue scaling; the scans run the exact driven engine and are what any
quantitative conclusion rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import Driven, StateVector, StepControl, basis_state, evolve_driven

DOMINANCE_RATIO = 10.0
VALIDITY_LIMIT = 0.1


def first_order_probability(v_elem: complex, e_k: float, e_j: float, t: float) -> float:
    """``2 |v|^2 sin^2((e_k - e_j) t / 2) / (e_k - e_j)^2`` with hbar = 1.

    At ``e_k == e_j`` the continuous limit ``|v|^2 t^2 / 2`` is returned.
    This is the printed estimate, kept verbatim; it is only meaningful
    while the result stays small (see :data:`VALIDITY_LIMIT`) and can
    exceed 1 at long times.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    v2 = abs(v_elem) ** 2
    # same expression written as (t^2 / 2) sinc^2, which has no 0/0 point
    x = 0.5 * (e_k - e_j) * t
    return float(v2 * t * t / 2 * np.sinc(x / math.pi) ** 2)


def out_of_validity(p: float) -> bool:
    """True when a first-order estimate is no longer a probability."""
    return p > 1.0


def discrimination_time_estimate(e_j: float, e_k_nearest: float) -> float:
    """Waiting time ``1 / |e_j - e_k|`` to resolve the nearest level."""
    if e_j == e_k_nearest:
        raise ValueError("levels coincide; no finite discrimination time")
    return 1.0 / abs(e_j - e_k_nearest)


def directory_search_time(N: int, e_max: float) -> float:
    """Averaged search time ``N / e_max`` for an equally spaced directory."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if not e_max > 0:
        raise ValueError("e_max must be positive")
    return N / e_max


@dataclass(frozen=True, eq=False)
class ResonanceScan:
    """Populations of a resonantly driven run and the derived timings.

    ``discrimination_time`` is the first probe time at which the target
    population is at least ``dominance_ratio`` times every competitor
    (all states other than the initial one and the target).
    """

    target: int
    drive_frequency: float
    times: np.ndarray
    populations: np.ndarray
    discrimination_time: float | None
    nearest_gap: float | None
    dominance_ratio: float = DOMINANCE_RATIO
    initial: int = 0
    max_norm_drift: float = 0.0
    warnings: tuple[str, ...] = field(default=())

    @property
    def target_population(self) -> np.ndarray:
        return self.populations[:, self.target]

    @property
    def scaled_time(self) -> float | None:
        """``discrimination_time * nearest_gap``; constant when timing tracks the spacing."""
        if self.discrimination_time is None or self.nearest_gap is None:
            return None
        return self.discrimination_time * self.nearest_gap


def find_discrimination_time(
    times: np.ndarray, populations: np.ndarray, target: int, initial: int = 0,
    ratio: float = DOMINANCE_RATIO,
) -> float | None:
    others = [k for k in range(populations.shape[1]) if k not in (target, initial)]
    p_t = populations[:, target]
    if others:
        p_c = populations[:, others].max(axis=1)
        hit = (p_t > 0) & (p_t >= ratio * p_c)
    else:
        hit = p_t > 0
    hit[0] = False
    idx = np.flatnonzero(hit)
    return float(times[idx[0]]) if idx.size else None


def run_resonance_scan(
    driven: Driven,
    target: int,
    horizon: float,
    step_control: StepControl = StepControl(),
    *,
    initial: int = 0,
    basis_tag: str = "computational",
    dominance_ratio: float = DOMINANCE_RATIO,
) -> ResonanceScan:
    """Drive from basis state ``initial`` and record every population.

    ``target`` and ``initial`` are basis indices. A horizon shorter than
    twice the nearest-gap waiting estimate is recorded as a warning.
    """
    if target == initial:
        raise ValueError("target must differ from the initial state")
    energies = np.real(np.diag(driven.static.to_dense()))
    competitors = [k for k in range(driven.dim) if k not in (target, initial)]
    gaps = [abs(energies[target] - energies[k]) for k in competitors]
    nearest = min(gaps) if gaps else None
    warnings = []
    if nearest is not None and nearest > 0:
        estimate = discrimination_time_estimate(energies[target], energies[target] + nearest)
        if horizon < 2 * estimate:
            warnings.append(
                f"horizon {horizon:.6g} shorter than twice the waiting estimate {estimate:.6g}"
            )
    psi0: StateVector = basis_state(driven.dim, initial, basis_tag)
    trace = evolve_driven(psi0, driven, horizon, step_control, record_populations=True)
    if not trace.valid:
        warnings.append(f"norm drift {trace.max_norm_drift:.3e} exceeds bound")
    t_disc = find_discrimination_time(trace.times, trace.populations, target, initial, dominance_ratio)
    return ResonanceScan(
        target=target,
        drive_frequency=driven.drive_frequency,
        times=trace.times,
        populations=trace.populations,
        discrimination_time=t_disc,
        nearest_gap=nearest,
        dominance_ratio=dominance_ratio,
        initial=initial,
        max_norm_drift=trace.max_norm_drift,
        warnings=tuple(warnings),
    )
