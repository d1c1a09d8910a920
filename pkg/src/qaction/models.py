"""Hamiltonian models of the five computations and their closed forms.

Each model is an immutable dataclass with a ``build_*`` constructor that
returns the operators the engines in :mod:`qaction.qcore` consume. The
Grover models also have an exact reduction to the two-dimensional
subspace spanned by the marked state and the uniform superposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import numtheory
from .errors import DegenerateSpectrumError, QactionError
from .qcore import (
    DEFAULT_DIM_CAP,
    DenseHermitian,
    Diagonal,
    Driven,
    RankTwoProjector,
    StateVector,
    basis_state,
    energy_moments,
    uniform_state,
)

DEFAULT_EPSILON = 0.01
MAX_EPSILON = 0.05
SHOR_MAX_QUBITS = int(math.log2(DEFAULT_DIM_CAP))


class WindowError(QactionError, ValueError):
    """Cavity window contains labels outside the supported prime set."""


# ---------------------------------------------------------------------------
# Grover search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroverModel:
    """Continuous-time search over ``N`` items.

    ``variant="H1"`` is ``E (|x><x| + |in><in|)``; ``variant="H2"`` is
    ``iE (|x><in| - |in><x|)``. ``|in>`` is the uniform superposition.
    """

    N: int
    E: float = 1.0
    variant: str = "H1"
    target_index: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.variant not in ("H1", "H2"):
            raise ValueError(f"variant must be 'H1' or 'H2', got {self.variant!r}")
        if not 0 <= self.target_index < self.N:
            raise ValueError("target_index out of range")
        if not self.E > 0:
            raise ValueError("energy scale E must be positive")

    @property
    def n(self) -> float:
        return math.log2(self.N)

    @property
    def overlap(self) -> float:
        """``<x|in> = N**-0.5``."""
        return 1.0 / math.sqrt(self.N)

    @property
    def basis_tag(self) -> str:
        return f"computational-N{self.N}"

    def initial_state(self) -> StateVector:
        return uniform_state(self.N, self.basis_tag)

    def target_state(self) -> StateVector:
        return basis_state(self.N, self.target_index, self.basis_tag)


@lru_cache(maxsize=16)
def build_grover(model: GroverModel) -> RankTwoProjector:
    """Rank-two operator for either Grover Hamiltonian.

    Cached so repeated full-space runs share one eigendecomposition.
    """
    x = model.target_state().amplitudes
    s = model.initial_state().amplitudes
    form = "sum" if model.variant == "H1" else "commutator"
    return RankTwoProjector(x, s, model.E, form)


@dataclass(frozen=True)
class ReducedGrover:
    """Exact dynamics on ``span{|x>, |in>}``.

    ``literature_gap`` and ``literature_flip_time`` carry the commonly
    quoted constants, which differ from the exact ones by a factor 2 in
    the H1 gap and in the H2 flip time.
    """

    variant: str
    N: int
    E: float
    gap: float
    flip_time: float
    peak_probability: float
    probability_curve: Callable[[float], float] = field(repr=False, compare=False)
    literature_gap: float = 0.0
    literature_flip_time: float = 0.0

    def __iter__(self):
        return iter((self.gap, self.flip_time, self.probability_curve))

    def discrepancies(self) -> list[str]:
        """Constants that disagree with the quoted ones as ``N`` grows.

        Finite-N offsets that vanish in the limit (the H2 gap) are not
        flagged; the row still carries both values.
        """
        flags = []
        gap_limit, flip_limit = _LIMIT_RATIOS[self.variant]
        tag = self.variant.lower()
        if gap_limit != 1:
            flags.append(
                f"{tag}-gap: exact {self.gap:.12g} vs literature {self.literature_gap:.12g}"
                f" (ratio {self.gap / self.literature_gap:.6g}; large-N limit ratio {gap_limit:g})"
            )
        if flip_limit != 1:
            flags.append(
                f"{tag}-flip-time: exact {self.flip_time:.12g} vs literature {self.literature_flip_time:.12g}"
                f" (ratio {self.flip_time / self.literature_flip_time:.6g}; large-N limit ratio {flip_limit:g})"
            )
        return flags


# exact / quoted as N -> infinity: (gap, flip time)
_LIMIT_RATIOS = {"H1": (2, 1), "H2": (1, 2)}


def grover_reduced(model: GroverModel) -> ReducedGrover:
    """Closed-form gap, flip time and success-probability curve.

    With ``a = N**-0.5`` and ``b = sqrt(1 - a**2)``:

    * H1 has eigenvalues ``E(1 +- a)`` on the plane, so the success
      probability is ``a^2 cos^2(E a t) + sin^2(E a t)`` and the first
      flip is at ``pi / (2 E a)``.
    * H2 restricted to the plane is ``-E b sigma_y`` in the basis
      ``(|x>, (|in> - a|x>)/b)``, giving ``sin^2(E b t + arcsin a)``.

    Valid for any integer ``N >= 2``, including far beyond the dense cap.
    """
    N, E = model.N, model.E
    a = 1.0 / math.sqrt(N)
    b = math.sqrt((N - 1) / N)
    if model.variant == "H1":
        rate = E * a

        def curve(t):
            c, s = np.cos(rate * np.asarray(t)), np.sin(rate * np.asarray(t))
            return a * a * c * c + s * s

        return ReducedGrover(
            "H1", N, E,
            gap=2 * E * a,
            flip_time=math.pi / (2 * rate),
            peak_probability=1.0,
            probability_curve=curve,
            literature_gap=E * a,
            literature_flip_time=math.pi * math.sqrt(N) / (2 * E),
        )
    rate = E * b
    phase = math.asin(a)

    def curve(t):
        return np.sin(rate * np.asarray(t) + phase) ** 2

    return ReducedGrover(
        "H2", N, E,
        gap=2 * rate,
        flip_time=(math.pi / 2 - phase) / rate,
        peak_probability=1.0,
        probability_curve=curve,
        literature_gap=2 * E,
        literature_flip_time=math.pi / (4 * E),
    )


# ---------------------------------------------------------------------------
# resonantly driven directory
# ---------------------------------------------------------------------------


def equally_spaced_energies(N: int, e_max: float = 1.0) -> np.ndarray:
    return e_max * np.arange(N) / (N - 1)


@dataclass(frozen=True)
class DirectoryModel:
    """Labels ``E_j`` read out by a weak random drive at ``Omega = E_j``.

    ``energies`` defaults to an equally spaced ladder ``0 .. e_max``.
    ``target_index`` is 0-based (the ground label ``E = 0`` is index 0 and
    is the initial state); it defaults to the middle of the ladder.
    """

    N: int
    e_max: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    energies: tuple[float, ...] | None = None
    target_index: int | None = None
    drive_frequency: float | None = None

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("directory needs N >= 2")
        if self.energies is None:
            e = tuple(equally_spaced_energies(self.N, self.e_max).tolist())
        else:
            e = tuple(float(x) for x in self.energies)
            if len(e) != self.N:
                raise ValueError("energies length must equal N")
            object.__setattr__(self, "e_max", max(e))
        if e[0] != 0.0 or min(e) < 0:
            raise ValueError("energies must be >= 0 with E_1 = 0")
        if len(set(e)) != len(e):
            raise DegenerateSpectrumError("directory energies must be nondegenerate")
        object.__setattr__(self, "energies", e)
        if not 0 <= self.epsilon <= MAX_EPSILON:
            raise ValueError(f"epsilon must lie in [0, {MAX_EPSILON}]")
        if self.target_index is None:
            object.__setattr__(self, "target_index", self.N // 2)
        if not 1 <= self.target_index < self.N:
            raise ValueError("target_index must address an excited label")

    @property
    def omega(self) -> float:
        if self.drive_frequency is not None:
            return float(self.drive_frequency)
        return self.energies[self.target_index]

    @property
    def basis_tag(self) -> str:
        return f"directory-N{self.N}"

    def initial_state(self) -> StateVector:
        return basis_state(self.N, 0, self.basis_tag)


def random_hermitian(dim: int, norm: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian Hermitian matrix rescaled to spectral norm ``norm``."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (g + g.conj().T) / 2
    if norm == 0:
        return np.zeros_like(h)
    return h * (norm / np.linalg.norm(h, 2))


def build_directory(model: DirectoryModel) -> Driven:
    rng = np.random.default_rng(model.seed)
    v = random_hermitian(model.N, model.epsilon * model.e_max, rng)
    return Driven(Diagonal(np.array(model.energies)), DenseHermitian(v), model.omega)


# ---------------------------------------------------------------------------
# prime-log cavity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CavityModel:
    """Truncated Fock sector of a cavity with mode frequencies ``omega log q``.

    The basis is the vacuum (label 1) plus every label in
    ``window = (lo, hi)``. The vacuum couples to each window state with
    magnitude ``coupling`` and a seeded random phase. When ``coupling`` is
    not given it is ``epsilon`` times the smallest level spacing in the
    window, which keeps the drive perturbative at every target.
    """

    window: tuple[int, int]
    omega: float = 1.0
    q_max: int | None = None
    coupling: float | None = None
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    target: int | None = None

    def __post_init__(self):
        lo, hi = (int(w) for w in self.window)
        if lo < 2 or hi < lo:
            raise WindowError(f"window must satisfy 2 <= lo <= hi, got {self.window}")
        object.__setattr__(self, "window", (lo, hi))
        if self.q_max is None:
            object.__setattr__(self, "q_max", hi)
        if self.target is None:
            object.__setattr__(self, "target", (lo + hi) // 2)
        if not lo <= self.target <= hi:
            raise WindowError(f"target {self.target} outside window {self.window}")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not 0 <= self.epsilon <= MAX_EPSILON:
            raise ValueError(f"epsilon must lie in [0, {MAX_EPSILON}]")

    @property
    def labels(self) -> list[int]:
        lo, hi = self.window
        return [1] + list(range(lo, hi + 1))


@dataclass(frozen=True)
class CavityWindow:
    labels: tuple[int, ...]
    energies: np.ndarray
    driven: Driven
    coupling: float

    def index_of(self, label: int) -> int:
        return self.labels.index(label)

    def initial_state(self) -> StateVector:
        return basis_state(len(self.labels), 0, "fock-window")


def build_cavity_window(model: CavityModel) -> CavityWindow:
    labels = model.labels
    for n in labels[1:]:
        q = numtheory.largest_prime_factor(n)
        if q > model.q_max:
            raise WindowError(f"label {n} has prime factor {q} > q_max={model.q_max}")
    # injectivity on exact integers: labels strictly increasing
    if any(b <= a for a, b in zip(labels, labels[1:])):
        raise DegenerateSpectrumError("window labels must be strictly increasing")
    energies = np.array([numtheory.cavity_energy(n, model.omega) for n in labels])
    if model.coupling is None:
        spacing = float(np.min(np.diff(energies[1:]))) if len(labels) > 2 else energies[-1]
        v = model.epsilon * spacing
    else:
        v = float(model.coupling)
    rng = np.random.default_rng(model.seed)
    phases = np.exp(2j * math.pi * rng.random(len(labels) - 1))
    pert = np.zeros((len(labels), len(labels)), dtype=complex)
    pert[0, 1:] = v * phases
    pert[1:, 0] = v * phases.conj()
    driven = Driven(
        Diagonal(energies),
        DenseHermitian(pert),
        model.omega * math.log(model.target),
    )
    return CavityWindow(tuple(labels), energies, driven, v)


# ---------------------------------------------------------------------------
# phase-shift network
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShorPhaseModel:
    n: int
    omega: float = 1.0
    alpha: float = math.pi

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.alpha < 2 * math.pi:
            raise ValueError("alpha must lie in [0, 2 pi)")
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class ShorPhase:
    h: Diagonal
    t_n: float
    input: StateVector
    target: StateVector


def build_shor_phase(model: ShorPhaseModel) -> ShorPhase:
    """Diagonal generator of the controlled-phase powers.

    Bit ``k`` in state ``|1>`` carries energy ``omega * 2**k``, so basis
    index ``j`` has energy ``omega * j``; acting for ``t_n = alpha/omega``
    multiplies ``|j>`` by ``exp(-i alpha j)``.
    """
    n = model.n
    if n > SHOR_MAX_QUBITS:
        raise ValueError(f"n={n} exceeds the full-space cap exponent {SHOR_MAX_QUBITS}")
    dim = 2**n
    idx = np.arange(dim, dtype=float)
    tag = f"computational-{n}"
    psi_in = uniform_state(dim, tag)
    target = StateVector(np.exp(-1j * model.alpha * idx) / math.sqrt(dim), tag)
    return ShorPhase(Diagonal(model.omega * idx), model.alpha / model.omega, psi_in, target)


def shor_average_energy(n: int, omega: float = 1.0) -> float:
    """``<in|H|in> = omega (2**(n-1) - 1/2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return omega * (2 ** (n - 1) - 0.5)


# ---------------------------------------------------------------------------
# input preparation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrepModel:
    """Flip the bits in ``flip_mask`` from |0> to |1> within ``t_c``."""

    n: int
    flip_mask: tuple[int, ...]
    t_c: float = 1.0

    def __post_init__(self):
        mask = tuple(sorted(set(int(b) for b in self.flip_mask)))
        if any(not 0 <= b < self.n for b in mask):
            raise ValueError("flip_mask must be a subset of range(n)")
        object.__setattr__(self, "flip_mask", mask)
        if not self.t_c > 0:
            raise ValueError("time budget t_c must be positive")

    @property
    def rabi_rate(self) -> float:
        return math.pi / self.t_c


@dataclass(frozen=True)
class PrepSchedule:
    generators: tuple[tuple[int, DenseHermitian], ...]
    rabi_rate: float
    per_bit_spread: float
    total_spread_time_product: float


def single_bit_generator(rabi_rate: float) -> DenseHermitian:
    """``(rabi_rate / 2) sigma_x``; takes |0> to |1> in time ``pi / rabi_rate``."""
    return DenseHermitian(0.5 * rabi_rate * np.array([[0, 1], [1, 0]], dtype=complex))


def build_prep(model: PrepModel) -> PrepSchedule:
    gen = single_bit_generator(model.rabi_rate)
    _, spread = energy_moments(basis_state(2, 0, "qubit"), gen)
    return PrepSchedule(
        generators=tuple((b, gen) for b in model.flip_mask),
        rabi_rate=model.rabi_rate,
        per_bit_spread=spread,
        total_spread_time_product=len(model.flip_mask) * spread * model.t_c,
    )


def random_flip_mask(n: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Bits that differ between |0...0> and a uniformly random n-bit target."""
    bits = rng.integers(0, 2, size=n)
    return tuple(int(i) for i in np.flatnonzero(bits))
