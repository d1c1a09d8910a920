"""State vectors, Hermitian operators and time-evolution engines.

Units: hbar = 1 throughout. Energies are in units of whatever scale the
caller declares (E or omega) and times in the inverse of that scale.

Static evolution is exact to roundoff via the eigendecomposition of the
(dense) Hamiltonian. Driven evolution ``H0 + V cos(Omega t)`` uses the
exponential of the midpoint Hamiltonian on each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import (
    BasisMismatchError,
    DimensionCapError,
    DrivenSpecRequiredError,
    InvalidTraceError,
    NoFlipError,
    NotHermitianError,
    NumericalContractError,
    StaticSpecRequiredError,
    StepResolutionError,
)

DEFAULT_DIM_CAP = 16384
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
DRIFT_BOUND = 1e-8
ORTHOGONALITY_THRESHOLD = 1e-6
PEAK_THRESHOLD = 0.999
MIN_STEPS_PER_PERIOD = 40

_TIME_CHUNK = 64


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over a labeled basis.

    Args:
        amplitudes: complex amplitudes, length ``dim``.
        basis_tag: symbolic basis label, e.g. ``"computational-3"``,
            ``"fock-window"`` or ``"reduced-2d"``. Inner products between
            states with different tags are refused.
    """

    amplitudes: np.ndarray
    basis_tag: str = "computational"

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1:
            raise ValueError("state dimension must be at least 1")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def normalized(cls, amplitudes, basis_tag: str = "computational") -> "StateVector":
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm, basis_tag)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def basis_state(dim: int, index: int, basis_tag: str = "computational") -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps, basis_tag)


def uniform_state(dim: int, basis_tag: str = "computational") -> StateVector:
    """Equal-weight superposition of all basis states."""
    return StateVector(np.full(dim, 1.0 / math.sqrt(dim), dtype=complex), basis_tag)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.dim != b.dim or a.basis_tag != b.basis_tag:
        raise BasisMismatchError(
            f"cannot pair dim={a.dim} ({a.basis_tag}) with dim={b.dim} ({b.basis_tag})"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------


class _StaticSpec:
    """Mixin for time-independent operators.

    Subclasses provide ``dim``, ``to_dense`` and ``apply``; the
    eigensystem is computed once and cached on the instance.
    """

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray | None]:
        """Eigenvalues (ascending) and eigenvector columns.

        ``None`` for the vectors means the computational basis already
        diagonalizes the operator.
        """
        m = self.to_dense()
        # the real symmetric path is several times faster at large dim
        if not np.any(m.imag):
            w, v = np.linalg.eigh(m.real)
            return _readonly(w), _readonly(v.astype(complex))
        phases = _real_gauge(m)
        if phases is None:
            w, v = np.linalg.eigh(m)
            return _readonly(w), _readonly(v)
        w, v = np.linalg.eigh((phases[:, None] * m * phases.conj()[None, :]).real)
        return _readonly(w), _readonly(phases.conj()[:, None] * v)

    @property
    def spectrum(self) -> np.ndarray:
        return self.eigensystem[0]


def _real_gauge(m: np.ndarray) -> np.ndarray | None:
    """Unit phases ``d`` with ``diag(d) m diag(d)^*`` real, or ``None``.

    Phases are fixed along a spanning forest of the nonzero pattern, then
    every entry is checked.
    """
    graph = csr_matrix(m != 0)
    n_comp, labels = connected_components(graph, directed=False)
    d = np.ones(m.shape[0], dtype=complex)
    _, roots = np.unique(labels, return_index=True)
    for root in roots:
        order, pred = breadth_first_order(graph, root, directed=False, return_predecessors=True)
        for j in order[1:]:
            i = pred[j]
            h = m[i, j] if m[i, j] != 0 else np.conj(m[j, i])
            d[j] = d[i] * h / abs(h)
    g = d[:, None] * m * d.conj()[None, :]
    if np.max(np.abs(g.imag)) > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
        return None
    return d


@dataclass(frozen=True, eq=False)
class DenseHermitian(_StaticSpec):
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        # tolerance is 1e-12 per element, scaled for matrices with large entries
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        err = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if err > HERMITIAN_TOL * scale:
            raise NotHermitianError(f"matrix deviates from its adjoint by {err:.3e}")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.matrix

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


@dataclass(frozen=True, eq=False)
class Diagonal(_StaticSpec):
    """``sum_j E_j |j><j|`` in the computational basis."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies)
        if np.iscomplexobj(e):
            if np.any(np.abs(e.imag) > 0):
                raise NotHermitianError("diagonal energies must be real")
            e = e.real
        e = np.array(e, dtype=float).reshape(-1)
        object.__setattr__(self, "energies", _readonly(e))

    @property
    def dim(self) -> int:
        return self.energies.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.energies * vec

    @cached_property
    def eigensystem(self):
        return self.energies, None

    @property
    def spectrum(self) -> np.ndarray:
        return np.sort(self.energies)


@dataclass(frozen=True, eq=False)
class RankTwoProjector(_StaticSpec):
    """Operators built from two unit vectors ``u`` and ``v``.

    ``form="sum"``:         ``scale * (|u><u| + |v><v|)``
    ``form="commutator"``:  ``1j * scale * (|u><v| - |v><u|)``
    """

    u: np.ndarray
    v: np.ndarray
    scale: float
    form: str = "sum"

    def __post_init__(self):
        if self.form not in ("sum", "commutator"):
            raise ValueError(f"unknown rank-two form {self.form!r}")
        u = np.array(self.u, dtype=complex).reshape(-1)
        v = np.array(self.v, dtype=complex).reshape(-1)
        if u.size != v.size:
            raise BasisMismatchError("rank-two vectors differ in length")
        for vec in (u, v):
            if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
                raise ValueError("rank-two vectors must be normalized")
        object.__setattr__(self, "u", _readonly(u))
        object.__setattr__(self, "v", _readonly(v))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def dim(self) -> int:
        return self.u.size

    def to_dense(self) -> np.ndarray:
        u, v, e = self.u, self.v, self.scale
        if self.form == "sum":
            return e * (np.outer(u, u.conj()) + np.outer(v, v.conj()))
        return 1j * e * (np.outer(u, v.conj()) - np.outer(v, u.conj()))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        u, v, e = self.u, self.v, self.scale
        uv, vv = np.vdot(u, vec), np.vdot(v, vec)
        if self.form == "sum":
            return e * (u * uv + v * vv)
        return 1j * e * (u * vv - v * uv)


StaticSpec = Union[DenseHermitian, Diagonal, RankTwoProjector]


@dataclass(frozen=True, eq=False)
class Driven:
    """``static + perturbation * cos(drive_frequency * t)``."""

    static: StaticSpec
    perturbation: StaticSpec
    drive_frequency: float

    def __post_init__(self):
        if isinstance(self.static, Driven) or isinstance(self.perturbation, Driven):
            raise TypeError("driven parts must be static specs")
        if self.static.dim != self.perturbation.dim:
            raise BasisMismatchError("static part and perturbation differ in dimension")
        if not self.drive_frequency >= 0:
            raise ValueError("drive frequency must be non-negative")
        object.__setattr__(self, "drive_frequency", float(self.drive_frequency))

    @property
    def dim(self) -> int:
        return self.static.dim

    @cached_property
    def _dense_parts(self) -> tuple[np.ndarray, np.ndarray]:
        return self.static.to_dense(), self.perturbation.to_dense()

    def matrix_at(self, t: float) -> np.ndarray:
        h0, v = self._dense_parts
        return h0 + v * math.cos(self.drive_frequency * t)

    def fastest_scale(self) -> float:
        """``max(Omega, max |eig(H0 + V)|)``, the rate the step must resolve."""
        h0, v = self._dense_parts
        w = np.linalg.eigvalsh(h0 + v)
        return max(self.drive_frequency, float(np.max(np.abs(w))) if w.size else 0.0)


HamiltonianSpec = Union[DenseHermitian, Diagonal, RankTwoProjector, Driven]


def _require_static(h) -> None:
    if isinstance(h, Driven):
        raise StaticSpecRequiredError(
            "driven Hamiltonian: moments and exact evolution are time dependent; "
            "evaluate a fixed-time matrix instead"
        )


def _check_dims(psi: StateVector, h) -> None:
    if psi.dim != h.dim:
        raise BasisMismatchError(f"state dim {psi.dim} != operator dim {h.dim}")


def energy_moments(psi: StateVector, h: StaticSpec) -> tuple[float, float]:
    """Mean energy and energy spread of ``psi``.

    Returns:
        ``(<H>, sqrt(<H^2> - <H>^2))``.
    """
    _require_static(h)
    _check_dims(psi, h)
    a = psi.amplitudes
    ha = h.apply(a)
    mean_c = complex(np.vdot(a, ha))
    if abs(mean_c.imag) > HERMITIAN_TOL * max(1.0, abs(mean_c.real)):
        raise NotHermitianError(f"<H> has imaginary residue {mean_c.imag:.3e}")
    mean = mean_c.real
    resid = ha - mean * a
    spread = float(np.sqrt(np.vdot(resid, resid).real))
    return mean, spread


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """Time grid with overlaps against a designated target state.

    ``evaluator``, when present, returns the overlap at an arbitrary time
    and is used to refine crossings between grid points.
    """

    times: np.ndarray
    overlaps: np.ndarray
    norm_drift: np.ndarray
    populations: np.ndarray | None = None
    target_is_initial: bool = True
    drift_bound: float = DRIFT_BOUND
    evaluator: Callable[[float], complex] | None = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size == 0 or t[0] != 0.0:
            raise ValueError("trace times must start at 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("trace times must be strictly increasing")
        object.__setattr__(self, "times", _readonly(t))

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(self.norm_drift))

    @property
    def valid(self) -> bool:
        return self.max_norm_drift <= self.drift_bound

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.overlaps) ** 2


def _times_array(times: Sequence[float]) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.size == 0 or t[0] != 0.0:
        t = np.concatenate(([0.0], t))
    return t


def _eigen_coefficients(psi0: StateVector, h: StaticSpec, dim_cap: int):
    _require_static(h)
    _check_dims(psi0, h)
    if h.dim > dim_cap and not isinstance(h, Diagonal):
        raise DimensionCapError(
            f"dimension {h.dim} exceeds the dense cap {dim_cap}; "
            "use the reduced two-dimensional engine (models.grover_reduced)"
        )
    w, v = h.eigensystem
    c = psi0.amplitudes if v is None else v.conj().T @ psi0.amplitudes
    return w, v, c


def overlap_function(
    psi0: StateVector,
    h: StaticSpec,
    target: StateVector | None = None,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> Callable[[float], complex]:
    """Return ``t -> <target|exp(-iHt)|psi0>`` evaluated in the eigenbasis."""
    target = psi0 if target is None else target
    _check_dims(target, h)
    w, v, c = _eigen_coefficients(psi0, h, dim_cap)
    d = target.amplitudes if v is None else v.conj().T @ target.amplitudes
    weights = d.conj() * c

    def overlap(t: float) -> complex:
        return complex(np.sum(weights * np.exp(-1j * w * t)))

    return overlap


def probability_function(psi0, h, target, dim_cap: int = DEFAULT_DIM_CAP) -> Callable[[float], float]:
    """``t -> |<target|psi(t)>|^2`` for static ``h``."""
    f = overlap_function(psi0, h, target, dim_cap)
    return lambda t: abs(f(t)) ** 2


def evolve_state(psi0: StateVector, h: StaticSpec, t: float, dim_cap: int = DEFAULT_DIM_CAP) -> StateVector:
    w, v, c = _eigen_coefficients(psi0, h, dim_cap)
    amps = c * np.exp(-1j * w * t)
    if v is not None:
        amps = v @ amps
    return StateVector.normalized(amps, psi0.basis_tag)


def evolve_static(
    psi0: StateVector,
    h: StaticSpec,
    times: Sequence[float],
    target: StateVector | None = None,
    *,
    record_populations: bool = False,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> EvolutionTrace:
    """Exact evolution ``psi(t) = sum_k exp(-i lambda_k t) P_k psi0``.

    A 0 is prepended to ``times`` when missing. Overlaps are taken with
    ``target`` (default: ``psi0``).

    Raises:
        StaticSpecRequiredError: for a driven spec.
        DimensionCapError: when a dense eigendecomposition would exceed
            ``dim_cap``.
    """
    target_is_initial = target is None
    target = psi0 if target is None else target
    _check_dims(target, h)
    w, v, c = _eigen_coefficients(psi0, h, dim_cap)
    t = _times_array(times)
    tgt = target.amplitudes
    overlaps = np.empty(t.size, dtype=complex)
    drift = np.empty(t.size)
    pops = np.empty((t.size, h.dim)) if record_populations else None
    for lo in range(0, t.size, _TIME_CHUNK):
        tc = t[lo:lo + _TIME_CHUNK]
        coeffs = np.exp(-1j * np.outer(tc, w)) * c
        states = coeffs if v is None else coeffs @ v.T
        overlaps[lo:lo + tc.size] = states @ tgt.conj()
        p = np.abs(states) ** 2
        drift[lo:lo + tc.size] = np.abs(p.sum(axis=1) - 1.0)
        if pops is not None:
            pops[lo:lo + tc.size] = p
    return EvolutionTrace(
        times=t,
        overlaps=overlaps,
        norm_drift=drift,
        populations=pops,
        target_is_initial=target_is_initial,
        evaluator=overlap_function(psi0, h, target, dim_cap),
    )


@dataclass(frozen=True)
class StepControl:
    """Step size for the driven engine.

    Give either ``dt`` or ``steps_per_period``; the period is that of the
    fastest scale of the driven Hamiltonian. ``record_every`` thins the
    recorded grid.
    """

    steps_per_period: int = MIN_STEPS_PER_PERIOD
    dt: float | None = None
    record_every: int = 1


def resolve_steps(h: Driven, horizon: float, control: StepControl) -> tuple[int, float]:
    """Number of steps and step size satisfying the resolution rule."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    scale = h.fastest_scale()
    period = 2 * math.pi / scale if scale > 0 else math.inf
    if control.dt is not None:
        if control.dt <= 0:
            raise StepResolutionError("dt must be positive")
        if control.dt > period / MIN_STEPS_PER_PERIOD * (1 + 1e-12):
            raise StepResolutionError(
                f"dt={control.dt:.6g} exceeds period/{MIN_STEPS_PER_PERIOD} = "
                f"{period / MIN_STEPS_PER_PERIOD:.6g} of the fastest scale {scale:.6g}"
            )
        n = math.ceil(horizon / control.dt - 1e-12)
    else:
        if control.steps_per_period < MIN_STEPS_PER_PERIOD:
            raise StepResolutionError(
                f"steps_per_period={control.steps_per_period} below the minimum {MIN_STEPS_PER_PERIOD}"
            )
        n = math.ceil(horizon / period * control.steps_per_period) if math.isfinite(period) else 1
    n = max(n, 1)
    return n, horizon / n


def evolve_driven(
    psi0: StateVector,
    h: Driven,
    horizon: float,
    step_control: StepControl = StepControl(),
    target: StateVector | None = None,
    *,
    record_populations: bool = False,
) -> EvolutionTrace:
    """Exponential-midpoint propagation of a driven Hamiltonian.

    Each step applies ``exp(-i H(t + dt/2) dt)``. The state is never
    renormalized; the recorded norm drift flags under-resolved runs.
    """
    if not isinstance(h, Driven):
        raise DrivenSpecRequiredError("evolve_driven needs a Driven spec")
    _check_dims(psi0, h)
    target_is_initial = target is None
    target = psi0 if target is None else target
    _check_dims(target, h)
    n, dt = resolve_steps(h, horizon, step_control)
    every = max(1, int(step_control.record_every))
    h0, v = h._dense_parts
    omega = h.drive_frequency
    tgt = target.amplitudes.conj()
    psi = psi0.amplitudes.copy()

    n_rec = n // every + 1 + (1 if n % every else 0)
    times = np.empty(n_rec)
    overlaps = np.empty(n_rec, dtype=complex)
    drift = np.empty(n_rec)
    pops = np.empty((n_rec, h.dim)) if record_populations else None

    def record(slot, t):
        times[slot] = t
        overlaps[slot] = tgt @ psi
        p = np.abs(psi) ** 2
        drift[slot] = abs(p.sum() - 1.0)
        if pops is not None:
            pops[slot] = p

    record(0, 0.0)
    slot = 1
    for k in range(n):
        hm = h0 + v * math.cos(omega * (k + 0.5) * dt)
        w, u = np.linalg.eigh(hm)
        psi = u @ (np.exp(-1j * w * dt) * (u.conj().T @ psi))
        if (k + 1) % every == 0 or k == n - 1:
            record(slot, (k + 1) * dt)
            slot += 1
    return EvolutionTrace(
        times=times[:slot],
        overlaps=overlaps[:slot],
        norm_drift=drift[:slot],
        populations=None if pops is None else pops[:slot],
        target_is_initial=target_is_initial,
    )


# ---------------------------------------------------------------------------
# time-domain analysis
# ---------------------------------------------------------------------------


def _bisect_crossing(f, a: float, b: float, threshold: float, rtol: float = 1e-9) -> float:
    # f(a) > threshold >= f(b)
    while b - a > rtol * abs(b):
        m = 0.5 * (a + b)
        if f(m) <= threshold:
            b = m
        else:
            a = m
    return b


def first_orthogonality_time(trace: EvolutionTrace, threshold: float = ORTHOGONALITY_THRESHOLD) -> float | None:
    """First time ``|<psi0|psi(t)>|`` drops to ``threshold``, or ``None``.

    Crossings are bracketed on the grid and refined by bisection. Zeros
    that fall between grid points are caught by minimizing the overlap
    around each grid-level local minimum, which needs ``trace.evaluator``.
    """
    if not trace.valid:
        raise InvalidTraceError(f"trace norm drift {trace.max_norm_drift:.3e} exceeds {trace.drift_bound:.1e}")
    if not trace.target_is_initial:
        raise ValueError("trace must record the overlap with the initial state")
    t = trace.times
    mags = np.abs(trace.overlaps)
    if mags[0] <= threshold:
        return 0.0
    if trace.evaluator is not None:
        ev = trace.evaluator
        f = lambda s: abs(ev(s))
    else:
        f = lambda s: float(np.interp(s, t, mags))

    for i in range(1, t.size):
        if mags[i] <= threshold:
            return _bisect_crossing(f, t[i - 1], t[i], threshold)
        if trace.evaluator is None or i == t.size - 1:
            continue
        if mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1]:
            a, b = t[i - 1], t[i + 1]
            res = minimize_scalar(
                lambda s: f(s) ** 2, bounds=(a, b), method="bounded",
                options={"xatol": 1e-13 * max(1.0, b)},
            )
            if f(res.x) <= threshold:
                return _bisect_crossing(f, a, float(res.x), threshold)
    return None


_INV_PHI = (math.sqrt(5) - 1) / 2


def _golden_max(f, a: float, b: float, rtol: float) -> tuple[float, float]:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * max(abs(a), abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def peak_time(
    generator: Callable[[float], float],
    window: tuple[float, float],
    *,
    threshold: float = PEAK_THRESHOLD,
    coarse_points: int = 400,
    rtol: float = 1e-8,
    margin: float = 0.05,
) -> tuple[float, float]:
    """Earliest local maximum of ``generator`` above ``threshold``.

    A coarse scan locates grid-level maxima; each one whose coarse value is
    within ``margin`` of the threshold is refined by golden-section search
    on its neighbouring grid cells.

    Raises:
        NoFlipError: no refined maximum exceeds ``threshold``; carries the
            largest value seen.
    """
    lo, hi = map(float, window)
    if not (0 < lo < hi):
        raise ValueError(f"window must satisfy 0 < lo < hi, got {window}")
    ts = np.linspace(lo, hi, max(400, int(coarse_points)))
    vals = np.array([generator(s) for s in ts])
    best = float(np.max(vals))
    last = ts.size - 1
    for i in range(ts.size):
        left = vals[i - 1] if i > 0 else -np.inf
        right = vals[i + 1] if i < last else -np.inf
        if not (vals[i] >= left and vals[i] >= right) or vals[i] < threshold - margin:
            continue
        a, b = ts[max(i - 1, 0)], ts[min(i + 1, last)]
        x, fx = _golden_max(generator, a, b, rtol)
        if vals[i] > fx:
            x, fx = float(ts[i]), float(vals[i])
        best = max(best, fx)
        if fx > threshold:
            return float(x), float(fx)
    raise NoFlipError(best)


__all__ = [
    "StateVector", "basis_state", "uniform_state", "inner_product",
    "DenseHermitian", "Diagonal", "RankTwoProjector", "Driven", "HamiltonianSpec",
    "energy_moments", "EvolutionTrace", "evolve_static", "evolve_state",
    "overlap_function", "probability_function", "StepControl", "resolve_steps",
    "evolve_driven", "first_orthogonality_time", "peak_time",
    "NumericalContractError",
]
