"""Energy measures, action parameters and speed-limit checks.

An :class:`ActionReport` multiplies a characteristic energy by the total
computation time and compares the product (hbar = 1) with the classical
step count of the task. Three energy measures are always carried:

* ``spread``: energy standard deviation of each stage's initial state,
* ``mean_excess``: mean energy above the ground level,
* ``max_span``: largest spectral width seen during the run.

Stage values are time-weighted, so ``E * t_c`` equals the sum of the
per-stage products. The headline measure is ``spread``; when it vanishes
(driven models start in an eigenstate of the static part) the report
falls back to ``max_span`` and says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidTraceError, StaticSpecRequiredError, UnknownModelError
from .models import PrepModel, build_prep
from .qcore import (
    DenseHermitian,
    Driven,
    EvolutionTrace,
    StateVector,
    energy_moments,
    evolve_static,
    first_orthogonality_time,
)

MEASURES = ("spread", "mean_excess", "max_span")

UNITS = {"hbar": "1", "log_base": "e", "energy": "model scale (E or omega)", "time": "1/energy scale"}

STRICT_INEQUALITY_NOTE = (
    "'much greater than' is asymptotic and probabilistic; ratios are reported, "
    "not judged, at desk scale"
)


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    name: str
    duration: float
    spread: float
    mean_excess: float
    span: float
    valid: bool = True

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("stage duration must be non-negative")


def static_stage(name: str, psi0: StateVector, h, duration: float, trace: EvolutionTrace | None = None) -> Stage:
    mean, spread = energy_moments(psi0, h)
    spec = h.spectrum
    return Stage(
        name, float(duration), spread,
        mean_excess=max(mean - float(spec[0]), 0.0),
        span=float(spec[-1] - spec[0]),
        valid=True if trace is None else trace.valid,
    )


def driven_stage(name: str, psi0: StateVector, h: Driven, duration: float, valid: bool = True) -> Stage:
    """Stage under ``H0 + V cos(Omega t)``.

    Spread and mean are taken against the static part; the span is the
    widest spectrum of ``H0 +- V``.
    """
    mean, spread = energy_moments(psi0, h.static)
    h0, v = h._dense_parts
    span = 0.0
    for sign in (1.0, -1.0):
        w = np.linalg.eigvalsh(h0 + sign * v)
        span = max(span, float(w[-1] - w[0]))
    ground = float(h.static.spectrum[0])
    return Stage(name, float(duration), spread, max(mean - ground, 0.0), span, valid)


def prep_stage(name: str, n_bits: int, duration: float, flip_mask: Sequence[int] | None = None) -> Stage:
    """Register write (or readout) of ``flip_mask`` bits in ``duration``.

    Single-bit spreads add, as for independent rotations counted bit by
    bit. The default mask is every bit.
    """
    mask = tuple(range(n_bits)) if flip_mask is None else tuple(flip_mask)
    sched = build_prep(PrepModel(n_bits, mask, duration))
    k = len(sched.generators)
    half = 0.5 * sched.rabi_rate
    return Stage(name, float(duration), k * sched.per_bit_spread, k * half, k * sched.rabi_rate)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def classical_complexity(model: str, params: Mapping) -> int:
    """Logical step count the task needs classically.

    prep: n; grover: log2 N (balance-weighing search); directory: N;
    cavity: the target label N; shor-phase: 2**n.
    """
    if model == "prep":
        return int(params["n"])
    if model in ("grover", "grover-h1", "grover-h2"):
        N = int(params["N"])
        return max(1, (N - 1).bit_length())
    if model == "directory":
        return int(params["N"])
    if model == "cavity":
        return int(params["target"])
    if model == "shor-phase":
        return 2 ** int(params["n"])
    raise UnknownModelError(f"no classical complexity for model {model!r}")


@dataclass(frozen=True)
class EnergyMeasures:
    spread: float
    mean_excess: float
    max_span: float

    def as_dict(self) -> dict[str, float]:
        return {m: getattr(self, m) for m in MEASURES}


@dataclass(frozen=True)
class ActionReport:
    model: str
    params: Mapping
    size: int
    t_c: float
    energy: EnergyMeasures
    headline: str
    classical_complexity: int
    stages: tuple[Stage, ...] = ()
    gate_count: int | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.t_c > 0:
            raise ValueError("total time t_c must be positive")
        if any(v < 0 for v in self.energy.as_dict().values()):
            raise ValueError("energy measures must be non-negative")
        if self.headline not in MEASURES:
            raise ValueError(f"unknown headline measure {self.headline!r}")
        if not math.isfinite(self.ratio):
            raise ValueError("action ratio is not finite")

    @property
    def E_c(self) -> float:
        return getattr(self.energy, self.headline)

    @property
    def action(self) -> float:
        return self.E_c * self.t_c

    @property
    def ratio(self) -> float:
        return self.action / self.classical_complexity

    def action_by(self, measure: str) -> float:
        return getattr(self.energy, measure) * self.t_c

    def ratio_by(self, measure: str) -> float:
        return self.action_by(measure) / self.classical_complexity


def make_action_report(
    model: str,
    params: Mapping,
    stages: Sequence[Stage],
    *,
    size: int | None = None,
    gate_count: int | None = None,
    flags: Iterable[str] = (),
    traces: Iterable[EvolutionTrace] = (),
) -> ActionReport:
    """Aggregate stage measures into one report.

    Raises:
        InvalidTraceError: any stage or contributing trace exceeded the
            norm-drift bound.
    """
    for tr in traces:
        if not tr.valid:
            raise InvalidTraceError(f"contributing trace has norm drift {tr.max_norm_drift:.3e}")
    for st in stages:
        if not st.valid:
            raise InvalidTraceError(f"stage {st.name!r} produced an invalid trace")
    t_c = sum(st.duration for st in stages)
    if not t_c > 0:
        raise ValueError("report needs at least one stage of positive duration")
    spread = sum(st.spread * st.duration for st in stages) / t_c
    mean_excess = sum(st.mean_excess * st.duration for st in stages) / t_c
    span = max(st.span for st in stages)
    headline = "spread" if spread > 0 else "max_span"
    flags = list(flags)
    if headline != "spread":
        flags.append("headline-energy: initial-state spread vanishes; using spectral span")
    C = classical_complexity(model, params)
    if size is None:
        size = int(params.get("N", params.get("n", params.get("target", 0))))
    return ActionReport(
        model=model,
        params=dict(params),
        size=size,
        t_c=t_c,
        energy=EnergyMeasures(spread, mean_excess, span),
        headline=headline,
        classical_complexity=C,
        stages=tuple(stages),
        gate_count=gate_count,
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# speed limit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    spread: float
    t_perp: float | None
    bound: float
    satisfied: bool


def check_speed_limit(trace: EvolutionTrace, psi0: StateVector, h) -> BoundCheck:
    """Compare the first orthogonalization time with ``pi / (2 spread)``."""
    if isinstance(h, Driven):
        raise StaticSpecRequiredError("speed-limit check needs a fixed-spread static Hamiltonian")
    _, spread = energy_moments(psi0, h)
    t_perp = first_orthogonality_time(trace)
    bound = math.pi / (2 * spread) if spread > 0 else math.inf
    ok = t_perp is None or t_perp >= bound * (1 - 1e-6)
    return BoundCheck(spread, t_perp, bound, ok)


def _random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_bound_case(rng: np.random.Generator, max_dim: int = 64, kind: str | None = None):
    """One random ``(H, psi0, kind)`` for the speed-limit suite.

    ``kind`` is ``"generic"`` (random spectrum and state, rarely reaching
    orthogonality), ``"pair"`` (equal superposition of two eigenvectors,
    which saturates the bound) or ``"ladder"`` (equal superposition over an
    equally spaced block of eigenvalues).
    """
    kind = kind or rng.choice(["generic", "pair", "ladder"])
    dim = int(rng.integers(2, max_dim + 1))
    u = _random_unitary(dim, rng)
    evals = np.sort(rng.normal(scale=rng.uniform(0.2, 5.0), size=dim))
    coeffs = np.zeros(dim, dtype=complex)
    if kind == "generic":
        coeffs = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    elif kind == "pair":
        i, j = rng.choice(dim, size=2, replace=False)
        coeffs[[i, j]] = np.exp(2j * np.pi * rng.random(2))
    else:
        k = int(rng.integers(2, min(dim, 8) + 1))
        step = rng.uniform(0.1, 3.0)
        start = rng.normal()
        idx = rng.choice(dim, size=k, replace=False)
        evals = evals.copy()
        evals[idx] = start + step * np.arange(k)
        coeffs[idx] = np.exp(2j * np.pi * rng.random(k))
    h = DenseHermitian((u * evals) @ u.conj().T)
    psi = StateVector.normalized(u @ coeffs, "random")
    return h, psi, str(kind)


def run_bound_suite(count: int = 200, max_dim: int = 64, seed: int = 0, grid_points: int = 400) -> list[tuple[str, BoundCheck]]:
    """Speed-limit checks on ``count`` random static problems."""
    rng = np.random.default_rng(seed)
    kinds = ("generic", "pair", "ladder")
    out = []
    for i in range(count):
        h, psi, kind = random_bound_case(rng, max_dim, kinds[i % 3])
        _, spread = energy_moments(psi, h)
        horizon = 4 * math.pi / (2 * spread)
        trace = evolve_static(psi, h, np.linspace(0, horizon, grid_points))
        out.append((kind, check_speed_limit(trace, psi, h)))
    return out


# ---------------------------------------------------------------------------
# tables and fits
# ---------------------------------------------------------------------------

TABLE_COLUMNS = (
    "model", "size", "t_c", "headline", "E_c", "action", "C", "ratio",
    "spread", "mean_excess", "max_span", "ratio_mean_excess", "ratio_max_span",
)


@dataclass(frozen=True)
class HypothesisTable:
    rows: tuple[dict, ...]
    notes: tuple[str, ...] = field(default=(STRICT_INEQUALITY_NOTE,))


def report_row(r: ActionReport) -> dict:
    return {
        "model": r.model,
        "size": r.size,
        "t_c": r.t_c,
        "headline": r.headline,
        "E_c": r.E_c,
        "action": r.action,
        "C": r.classical_complexity,
        "ratio": r.ratio,
        "spread": r.energy.spread,
        "mean_excess": r.energy.mean_excess,
        "max_span": r.energy.max_span,
        "ratio_mean_excess": r.ratio_by("mean_excess"),
        "ratio_max_span": r.ratio_by("max_span"),
    }


def hypothesis_table(reports: Sequence[ActionReport]) -> HypothesisTable:
    """One row per report, ordered by model id then size."""
    ordered = sorted(reports, key=lambda r: (r.model, r.size))
    return HypothesisTable(tuple(report_row(r) for r in ordered))


def fit_through_origin(x, y) -> tuple[float, float]:
    """Least-squares slope of ``y = k x`` and its centered R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = float(x @ y / (x @ x))
    ss_res = float(np.sum((y - k * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return k, r2


def coefficient_of_variation(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.std(v) / np.mean(v))


__all__ = [
    "Stage", "static_stage", "driven_stage", "prep_stage", "classical_complexity",
    "EnergyMeasures", "ActionReport", "make_action_report", "BoundCheck",
    "check_speed_limit", "run_bound_suite", "random_bound_case", "HypothesisTable",
    "hypothesis_table", "report_row", "fit_through_origin", "coefficient_of_variation",
    "UNITS", "MEASURES",
]
