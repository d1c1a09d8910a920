import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qaction.errors import (
    BasisMismatchError,
    DimensionCapError,
    DrivenSpecRequiredError,
    InvalidTraceError,
    NoFlipError,
    NotHermitianError,
    StaticSpecRequiredError,
    StepResolutionError,
)
from qaction.models import GroverModel, build_grover
from qaction.qcore import (
    DenseHermitian,
    Diagonal,
    Driven,
    EvolutionTrace,
    RankTwoProjector,
    StateVector,
    StepControl,
    basis_state,
    energy_moments,
    evolve_driven,
    evolve_state,
    evolve_static,
    first_orthogonality_time,
    inner_product,
    peak_time,
    probability_function,
    uniform_state,
)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(v / np.linalg.norm(v))


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=12)


# --- StateVector / inner_product ---------------------------------------------


def test_state_vector_rejects_unnormalized():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))


def test_state_vector_normalized_helper():
    s = StateVector.normalized(np.array([3.0, 4.0j]))
    assert abs(np.sum(np.abs(s.amplitudes) ** 2) - 1) < 1e-12
    assert s.dim == 2


def test_inner_product_self_is_one():
    s = random_state(np.random.default_rng(1), 7)
    assert inner_product(s, s) == pytest.approx(1.0, abs=1e-12)


def test_inner_product_basis_with_uniform():
    assert inner_product(basis_state(4, 0), uniform_state(4)) == pytest.approx(0.5, abs=1e-15)


def test_inner_product_orthogonal_basis_states():
    assert inner_product(basis_state(5, 1), basis_state(5, 3)) == 0


def test_inner_product_conjugate_linear_in_first():
    a = StateVector(np.array([1j, 0.0]))
    b = StateVector(np.array([1.0, 0.0]))
    assert inner_product(a, b) == pytest.approx(-1j)


def test_inner_product_mismatch_errors():
    with pytest.raises(BasisMismatchError):
        inner_product(basis_state(2, 0), basis_state(3, 0))
    with pytest.raises(BasisMismatchError):
        inner_product(basis_state(2, 0, "a"), basis_state(2, 0, "b"))


@given(seed=seeds, dim=dims)
def test_inner_product_bounded(seed, dim):
    rng = np.random.default_rng(seed)
    assert abs(inner_product(random_state(rng, dim), random_state(rng, dim))) <= 1 + 1e-12


# --- Hamiltonian specs -------------------------------------------------------


def test_dense_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        DenseHermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_diagonal_rejects_complex_energies():
    with pytest.raises(ValueError):
        Diagonal(np.array([0, 1j]))


def test_driven_rejects_negative_frequency():
    with pytest.raises(ValueError):
        Driven(Diagonal(np.zeros(2)), Diagonal(np.zeros(2)), -1.0)


@given(seed=seeds, dim=st.integers(min_value=2, max_value=40))
def test_rank_two_apply_matches_dense(seed, dim):
    rng = np.random.default_rng(seed)
    u = random_state(rng, dim).amplitudes
    v = random_state(rng, dim).amplitudes
    for form in ("sum", "commutator"):
        h = RankTwoProjector(u, v, 1.7, form)
        x = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        assert np.allclose(h.apply(x), h.to_dense() @ x, atol=1e-12)


def assert_eigensystem_valid(m, spec):
    w, v = spec.eigensystem
    assert np.allclose(v.conj().T @ v, np.eye(len(w)), atol=1e-10)
    assert np.allclose(m @ v, v * w, atol=1e-9)
    assert np.allclose(w, np.linalg.eigvalsh(m), atol=1e-10)


@given(seed=seeds, dim=st.integers(min_value=1, max_value=20), sparse=st.booleans())
def test_eigensystem_phase_rotated_real_matrix(seed, dim, sparse):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim))
    a = a + a.T
    if sparse:
        a[rng.random(size=(dim, dim)) < 0.6] = 0.0
        a = np.triu(a) + np.triu(a, 1).T
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=dim))
    m = phases[:, None] * a * phases.conj()[None, :]
    assert_eigensystem_valid(m, DenseHermitian(m))


@given(seed=seeds, dim=st.integers(min_value=3, max_value=20))
def test_eigensystem_generic_complex_matrix(seed, dim):
    m = random_hermitian(np.random.default_rng(seed), dim)
    assert_eigensystem_valid(m, DenseHermitian(m))


@pytest.mark.parametrize("N", [2, 5, 64])
def test_eigensystem_grover_h2(N):
    spec = build_grover(GroverModel(N, 1.0, "H2"))
    assert_eigensystem_valid(spec.to_dense(), spec)


# --- energy_moments ----------------------------------------------------------


def test_moments_of_eigenstate():
    mean, spread = energy_moments(basis_state(3, 2), Diagonal(np.array([0.0, 1.0, 3.0])))
    assert mean == pytest.approx(3.0)
    assert spread == pytest.approx(0.0, abs=1e-15)


def test_moments_of_two_level_superposition():
    delta = 0.73
    psi = StateVector(np.array([1, 1]) / math.sqrt(2))
    mean, spread = energy_moments(psi, Diagonal(np.array([0.0, delta])))
    assert mean == pytest.approx(delta / 2, abs=1e-15)
    assert spread == pytest.approx(delta / 2, abs=1e-15)


def test_moments_uniform_state_phase_network():
    n = 3
    mean, _ = energy_moments(uniform_state(2**n), Diagonal(np.arange(2**n, dtype=float)))
    assert mean == pytest.approx(3.5, rel=1e-12)


def test_moments_reject_driven():
    h = Driven(Diagonal(np.array([0.0, 1.0])), Diagonal(np.zeros(2)), 1.0)
    with pytest.raises(StaticSpecRequiredError):
        energy_moments(basis_state(2, 0), h)


@given(seed=seeds, dim=dims)
def test_moments_match_direct_formula(seed, dim):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng, dim)
    psi = random_state(rng, dim)
    x = psi.amplitudes
    mean_ref = np.vdot(x, m @ x).real
    var_ref = np.vdot(x, m @ m @ x).real - mean_ref**2
    mean, spread = energy_moments(psi, DenseHermitian(m))
    assert mean == pytest.approx(mean_ref, abs=1e-10)
    assert spread >= 0
    assert spread == pytest.approx(math.sqrt(max(var_ref, 0.0)), abs=1e-6)


# --- evolve_static -----------------------------------------------------------


def test_zero_hamiltonian_is_identity():
    psi = random_state(np.random.default_rng(2), 5)
    tr = evolve_static(psi, DenseHermitian(np.zeros((5, 5))), [0.0, 1.0, 10.0])
    assert np.allclose(np.abs(tr.overlaps), 1.0, atol=1e-14)


def test_eigenstate_phase():
    tr = evolve_static(basis_state(2, 1), Diagonal(np.array([0.0, 1.0])), [0.0, math.pi])
    assert abs(tr.overlaps[-1]) == pytest.approx(1.0, abs=1e-14)
    assert tr.overlaps[-1] == pytest.approx(np.exp(-1j * math.pi), abs=1e-14)


def test_grover_h1_n4_flips_at_pi():
    model = GroverModel(4, 1.0, "H1")
    tr = evolve_static(model.initial_state(), build_grover(model), [0.0, math.pi], model.target_state())
    assert abs(tr.overlaps[-1]) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_static_over_cap_errors():
    with pytest.raises(DimensionCapError, match="reduced"):
        evolve_static(uniform_state(8), DenseHermitian(np.diag(np.arange(8.0))), [0.0, 1.0], dim_cap=4)


def test_diagonal_needs_no_dense_decomposition():
    tr = evolve_static(uniform_state(8), Diagonal(np.arange(8.0)), [0.0, 1.0], dim_cap=4)
    assert tr.valid


def test_static_rejects_driven():
    h = Driven(Diagonal(np.array([0.0, 1.0])), Diagonal(np.zeros(2)), 1.0)
    with pytest.raises(StaticSpecRequiredError):
        evolve_static(basis_state(2, 0), h, [0.0])


def test_static_grid_is_anchored_at_zero_and_increasing():
    h = Diagonal(np.array([0.0, 1.0]))
    tr = evolve_static(basis_state(2, 0), h, [0.5, 1.0])
    assert list(tr.times) == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        evolve_static(basis_state(2, 0), h, [0.0, 2.0, 1.0])


@settings(max_examples=40)
@given(seed=seeds, dim=dims, t=st.floats(min_value=0.0, max_value=20.0))
def test_static_matches_expm_oracle(seed, dim, t):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng, dim)
    psi = random_state(rng, dim)
    ref = expm(-1j * m * t) @ psi.amplitudes
    out = evolve_state(psi, DenseHermitian(m), t)
    assert np.allclose(out.amplitudes, ref, atol=1e-9)


@settings(max_examples=40)
@given(seed=seeds, dim=dims)
def test_static_unitarity(seed, dim):
    rng = np.random.default_rng(seed)
    tr = evolve_static(random_state(rng, dim), DenseHermitian(random_hermitian(rng, dim)),
                       np.linspace(0, 30, 50))
    assert tr.max_norm_drift <= 1e-12
    assert tr.valid


@settings(max_examples=40)
@given(seed=seeds, dim=dims, t1=st.floats(0, 10), t2=st.floats(0, 10))
def test_time_composition(seed, dim, t1, t2):
    rng = np.random.default_rng(seed)
    h = DenseHermitian(random_hermitian(rng, dim))
    psi = random_state(rng, dim)
    two_step = evolve_state(evolve_state(psi, h, t1), h, t2)
    one_step = evolve_state(psi, h, t1 + t2)
    assert np.allclose(two_step.amplitudes, one_step.amplitudes, atol=1e-10)


# --- evolve_driven -----------------------------------------------------------


def test_driven_requires_driven_spec():
    with pytest.raises(DrivenSpecRequiredError):
        evolve_driven(basis_state(2, 0), Diagonal(np.array([0.0, 1.0])), 1.0)


def test_driven_step_resolution_rule():
    h = Driven(Diagonal(np.array([0.0, 1.0])), Diagonal(np.zeros(2)), 1.0)
    with pytest.raises(StepResolutionError):
        evolve_driven(basis_state(2, 0), h, 10.0, StepControl(steps_per_period=10))
    with pytest.raises(StepResolutionError):
        evolve_driven(basis_state(2, 0), h, 10.0, StepControl(dt=1.0))


@settings(max_examples=15, deadline=None)
@given(seed=seeds, dim=st.integers(2, 6))
def test_driven_with_zero_perturbation_matches_static(seed, dim):
    rng = np.random.default_rng(seed)
    h0 = DenseHermitian(random_hermitian(rng, dim))
    psi = random_state(rng, dim)
    driven = Driven(h0, DenseHermitian(np.zeros((dim, dim))), 1.3)
    tr = evolve_driven(psi, driven, 5.0)
    ref = evolve_static(psi, h0, tr.times)
    assert np.allclose(np.abs(tr.overlaps), np.abs(ref.overlaps), atol=1e-10)


@settings(max_examples=10, deadline=None)
@given(seed=seeds, dim=st.integers(2, 6))
def test_driven_norm_drift_bounded(seed, dim):
    rng = np.random.default_rng(seed)
    h0 = DenseHermitian(random_hermitian(rng, dim))
    v = DenseHermitian(0.3 * random_hermitian(rng, dim))
    tr = evolve_driven(random_state(rng, dim), Driven(h0, v, 0.9), 20.0)
    assert tr.max_norm_drift <= 1e-8
    assert tr.valid


def _two_level(delta, coupling, drive):
    v = np.array([[0, coupling], [coupling, 0]], dtype=complex)
    return Driven(Diagonal(np.array([0.0, delta])), DenseHermitian(v), drive)


def test_resonant_early_growth_is_quadratic():
    delta, coupling = 1.0, 1e-3
    h = _two_level(delta, coupling, delta)
    horizon = 400.0
    tr = evolve_driven(basis_state(2, 0), h, horizon, StepControl(40), record_populations=True)
    p = tr.populations[:, 1]
    # one decade of slow envelope growth, sampled at drive-period multiples to skip the micromotion
    period = 2 * math.pi / delta
    probes = np.array([k * period for k in range(6, 61, 6)])
    idx = np.searchsorted(tr.times, probes)
    slope = np.polyfit(np.log(tr.times[idx]), np.log(p[idx]), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.05)


def test_detuned_envelope_returns_near_zero():
    delta, detuning, coupling = 1.0, 0.05, 2e-4
    h = _two_level(delta, coupling, delta + detuning)
    expected = 2 * math.pi / detuning
    tr = evolve_driven(basis_state(2, 0), h, 1.3 * expected, StepControl(40), record_populations=True)
    p = tr.populations[:, 1]
    # envelope minimum after its first maximum
    first_peak = int(np.argmax(p[tr.times < expected * 0.75]))
    window = (tr.times > tr.times[first_peak]) & (tr.times < 1.3 * expected)
    t_min = tr.times[window][np.argmin(p[window])]
    assert t_min == pytest.approx(expected, rel=0.10)
    assert p[window].min() < 0.05 * p[first_peak]


# --- first_orthogonality_time ------------------------------------------------


def test_orthogonality_absent_for_eigenstate():
    tr = evolve_static(basis_state(3, 1), Diagonal(np.array([0.0, 1.0, 2.0])), np.linspace(0, 50, 200))
    assert first_orthogonality_time(tr) is None


def test_orthogonality_two_level():
    delta = 1.7
    psi = StateVector(np.array([1, 1]) / math.sqrt(2))
    tr = evolve_static(psi, Diagonal(np.array([0.0, delta])), np.linspace(0, 4 * math.pi / delta, 97))
    t = first_orthogonality_time(tr)
    assert t == pytest.approx(math.pi / delta, rel=1e-6)


def test_orthogonality_grover_h1_never_reached():
    # |in> sits on the two plane eigenvectors with weights (1 +- a)/2, so
    # |<in|psi(t)>| = |cos(E a t) - i a sin(E a t)| never drops below a
    model = GroverModel(4, 1.0, "H1")
    h = build_grover(model)
    psi = model.initial_state()
    a = 0.5
    reduced = np.array([[1 + a * a, a * math.sqrt(1 - a * a)], [a * math.sqrt(1 - a * a), 1 - a * a]])
    grid = np.linspace(0, 4 * math.pi, 801)
    oracle = np.array([abs(expm(-1j * reduced * s)[0, 0]) for s in grid])
    assert oracle.min() == pytest.approx(a, abs=1e-4)
    tr = evolve_static(psi, h, grid)
    assert np.allclose(np.abs(tr.overlaps), oracle, atol=1e-12)
    assert first_orthogonality_time(tr) is None


def test_orthogonality_rejects_invalid_trace():
    tr = EvolutionTrace(np.array([0.0, 1.0]), np.array([1.0, 0.0]), np.array([0.0, 1e-3]))
    assert not tr.valid
    with pytest.raises(InvalidTraceError):
        first_orthogonality_time(tr)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 10))
def test_speed_limit_property(seed, dim):
    rng = np.random.default_rng(seed)
    h = DenseHermitian(random_hermitian(rng, dim))
    psi = random_state(rng, dim)
    _, spread = energy_moments(psi, h)
    tr = evolve_static(psi, h, np.linspace(0, 8 * math.pi / (2 * spread), 400))
    t = first_orthogonality_time(tr)
    if t is not None:
        assert t >= math.pi / (2 * spread) * (1 - 1e-6)


# --- peak_time ---------------------------------------------------------------


def test_peak_h1_n16():
    model = GroverModel(16, 1.0, "H1")
    gen = probability_function(model.initial_state(), build_grover(model), model.target_state())
    t, val = peak_time(gen, (1e-3, 4 * math.pi))
    assert t == pytest.approx(2 * math.pi, rel=5e-3)
    assert val >= 0.999


def test_peak_h2_n4_matches_closed_form():
    model = GroverModel(4, 1.0, "H2")
    gen = probability_function(model.initial_state(), build_grover(model), model.target_state())
    t, val = peak_time(gen, (1e-3, 4.0))
    ref = (math.pi / 2 - math.asin(0.5)) / math.sqrt(0.75)
    assert t == pytest.approx(ref, abs=1e-6)
    assert val >= 0.999


def test_peak_no_flip():
    with pytest.raises(NoFlipError) as info:
        peak_time(lambda t: 0.5, (0.1, 1.0))
    assert info.value.observed_max == pytest.approx(0.5)


def test_peak_earliest_of_several():
    gen = lambda t: math.sin(t) ** 2  # noqa: E731
    t, _ = peak_time(gen, (0.1, 10.0))
    assert t == pytest.approx(math.pi / 2, rel=1e-8)


def test_peak_rejects_bad_window():
    with pytest.raises(ValueError):
        peak_time(lambda t: 1.0, (0.0, 1.0))
    with pytest.raises(ValueError):
        peak_time(lambda t: 1.0, (2.0, 1.0))
