"""Truncated-space primitives: states, operators, tensor algebra."""

import math

import numpy as np
import pytest

import noisy_amp.fock as fock
from noisy_amp import (
    DensityOperator,
    DimensionMismatch,
    FockOperator,
    HilbertSpec,
    InvalidInput,
    Ket,
    TruncationError,
    ZeroTrace,
    annihilation,
    coherent_ket,
    creation,
    displacement_operator,
    expectation,
    grow_dim,
    initial_dim,
    normalize,
    number_operator,
    partial_trace,
    tensor,
    thermal_density,
)
from helpers import coherent_amplitudes, expm_displacement, thermal_diag, tmsv_amplitudes


# ---------------------------------------------------------------------------
# HilbertSpec and value-object validation
# ---------------------------------------------------------------------------


def test_hilbert_spec_validation():
    spec = HilbertSpec(8)
    assert spec.dim == 8
    assert spec.trunc_tol == 1e-10
    assert spec.num_tol == 1e-9
    assert spec.doubled().dim == 16
    assert spec.doubled().trunc_tol == spec.trunc_tol
    with pytest.raises(InvalidInput):
        HilbertSpec(1)
    with pytest.raises(InvalidInput):
        HilbertSpec(2.5)  # type: ignore[arg-type]
    with pytest.raises(InvalidInput):
        HilbertSpec(10, trunc_tol=-1e-10)


def test_arrays_are_read_only():
    spec = HilbertSpec(6)
    ket = coherent_ket(0.2, spec)
    with pytest.raises(ValueError):
        ket.amplitudes[0] = 0.0
    rho = ket.to_density()
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 2.0
    op = annihilation(spec)
    with pytest.raises(ValueError):
        op.matrix[0, 1] = 0.0


def test_ket_validation():
    spec = HilbertSpec(4)
    with pytest.raises(InvalidInput):
        Ket(np.array([1.1, 0, 0, 0]), spec)  # norm^2 > 1 + num_tol
    with pytest.raises(InvalidInput):
        Ket(np.array([np.nan, 0, 0, 0]), spec)
    with pytest.raises(DimensionMismatch):
        Ket(np.array([1.0, 0, 0]), spec)
    with pytest.raises(DimensionMismatch):
        Ket(np.zeros(4), spec, mode_dims=(3, 2))


def test_density_validation():
    spec = HilbertSpec(3)
    bad_herm = np.array([[1.0, 0.5, 0], [0, 0, 0], [0, 0, 0]], dtype=complex)
    with pytest.raises(InvalidInput):
        DensityOperator(bad_herm, spec)
    with pytest.raises(InvalidInput):
        DensityOperator(-np.eye(3), spec)  # negative trace
    # Subnormalized and mildly super-normalized weights are allowed.
    half = DensityOperator(0.5 * np.diag([1.0, 0, 0]).astype(complex), spec)
    assert half.weight == pytest.approx(0.5, abs=1e-15)
    boosted = DensityOperator(2.0 * np.diag([1.0, 0, 0]).astype(complex), spec)
    assert boosted.weight == pytest.approx(2.0, abs=1e-15)


def test_debug_psd_scan_flags_negative_eigenvalue():
    spec = HilbertSpec(3)
    dented = np.diag([1.0, -1e-3, 0.0]).astype(complex)
    # Negative eigenvalues pass silently in fast mode (trace is still fine)...
    DensityOperator(dented, spec)
    # ...and are caught by the eigenvalue scan in debug mode.
    old = fock.DEBUG_CHECKS
    fock.DEBUG_CHECKS = True
    try:
        with pytest.raises(InvalidInput):
            DensityOperator(dented, spec)
        DensityOperator(np.diag([0.6, 0.4, 0.0]).astype(complex), spec)
    finally:
        fock.DEBUG_CHECKS = old


# ---------------------------------------------------------------------------
# State constructors against analytic amplitudes
# ---------------------------------------------------------------------------


def test_coherent_state_amplitudes():
    spec = HilbertSpec(30)
    ket = coherent_ket(0.2, spec)
    assert ket.amplitudes[0].real == pytest.approx(math.exp(-0.02), abs=1e-15)
    assert ket.amplitudes[1].real == pytest.approx(0.2 * math.exp(-0.02), abs=1e-15)
    assert ket.norm2 == pytest.approx(1.0, abs=1e-12)
    for alpha in (0.7, 0.4 - 0.3j, 1.2j):
        ket = coherent_ket(alpha, spec)
        ref = coherent_amplitudes(alpha, 30)
        assert np.max(np.abs(ket.amplitudes - ref)) < 1e-14
    vac = coherent_ket(0.0, spec)
    assert vac.amplitudes[0] == 1.0 and np.all(vac.amplitudes[1:] == 0)


def test_coherent_state_truncation_error():
    with pytest.raises(TruncationError):
        coherent_ket(3.0, HilbertSpec(4))


def test_thermal_state_populations():
    spec = HilbertSpec(60)
    rho = thermal_density(0.2, spec)
    ref = thermal_diag(0.2, 60)
    assert np.max(np.abs(rho.diag_populations() - ref)) < 1e-15
    assert rho.weight == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(rho.matrix - np.diag(rho.matrix.diagonal()))) == 0.0
    mean = expectation(rho, number_operator(spec)).real
    assert mean == pytest.approx(0.2, abs=1e-9)
    vac = thermal_density(0.0, spec)
    assert vac.matrix[0, 0] == 1.0
    with pytest.raises(InvalidInput):
        thermal_density(-0.1, spec)
    with pytest.raises(TruncationError):
        thermal_density(5.0, HilbertSpec(4))


# ---------------------------------------------------------------------------
# Displacement operator: action, unitarity, composition, expm cross-check
# ---------------------------------------------------------------------------


def test_displacement_generates_coherent_states():
    spec = HilbertSpec(40)
    for beta in (0.2, 0.7 - 0.3j, 1.1 + 0.4j):
        column = displacement_operator(beta, spec).matrix[:, 0]
        ref = coherent_ket(beta, spec).amplitudes
        assert np.max(np.abs(column - ref)) < 1e-12


def test_displacement_matches_matrix_exponential():
    dim = 40
    beta = 0.4 + 0.2j
    lib = displacement_operator(beta, HilbertSpec(dim)).matrix
    ref = expm_displacement(beta, dim)
    # Compare well inside the cutoff, where both constructions are exact.
    assert np.max(np.abs(lib[:20, :20] - ref[:20, :20])) < 1e-12


def test_displacement_composition_phase():
    # D(beta) D(gamma) = exp(i Im(beta conj(gamma))) D(beta + gamma) on the
    # low-photon block (within 10 * trunc_tol).  Columns near the cutoff
    # legitimately lose amplitude through truncated intermediate states, so
    # the identity is asserted on the interior block.
    spec = HilbertSpec(60)
    for beta, gamma in ((0.3 + 0.1j, -0.2 + 0.25j), (0.8, 0.5j)):
        d1 = displacement_operator(beta, spec).matrix
        d2 = displacement_operator(gamma, spec).matrix
        d12 = displacement_operator(beta + gamma, spec).matrix
        phase = np.exp(1j * np.imag(beta * np.conj(gamma)))
        diff = np.abs(d1 @ d2 - phase * d12)
        assert diff[:, :30].max() < 10 * spec.trunc_tol


def test_displacement_round_trip_and_unitarity():
    spec = HilbertSpec(50)
    beta = 0.6 - 0.2j
    d = displacement_operator(beta, spec).matrix
    d_inv = displacement_operator(-beta, spec).matrix
    eye = np.eye(50)
    assert np.max(np.abs((d @ d_inv - eye)[:, :25])) < 1e-12
    assert np.max(np.abs((d.conj().T @ d - eye)[:, :25])) < 1e-12


# ---------------------------------------------------------------------------
# Ladder operators
# ---------------------------------------------------------------------------


def test_ladder_operators():
    spec = HilbertSpec(6)
    a = annihilation(spec)
    adag = creation(spec)
    num = number_operator(spec)
    assert np.max(np.abs(adag.matrix - a.matrix.conj().T)) == 0.0
    assert np.max(np.abs(a.dagger().matrix - adag.matrix)) == 0.0
    for n in range(1, 6):
        assert a.matrix[n - 1, n] == pytest.approx(math.sqrt(n), abs=1e-15)
    assert np.max(np.abs(num.matrix - np.diag(np.arange(6.0)))) < 1e-15
    # [a, a†] = 1 away from the truncation edge.
    comm = a.matrix @ adag.matrix - adag.matrix @ a.matrix
    assert np.max(np.abs(comm[:5, :5] - np.eye(5))) < 1e-15


# ---------------------------------------------------------------------------
# Tensor product and partial trace
# ---------------------------------------------------------------------------


def test_tensor_partial_trace_round_trip():
    spec1, spec2 = HilbertSpec(14), HilbertSpec(24)
    rho = coherent_ket(0.3, spec1).to_density()
    sigma = thermal_density(0.4, spec2)
    joint = tensor(rho, sigma)
    assert joint.mode_dims == (14, 24)
    assert joint.weight == pytest.approx(rho.weight * sigma.weight, abs=1e-12)
    back0 = partial_trace(joint, 0)
    back1 = partial_trace(joint, 1)
    assert np.max(np.abs(back0.matrix - sigma.weight * rho.matrix)) < 1e-12
    assert np.max(np.abs(back1.matrix - rho.weight * sigma.matrix)) < 1e-12
    assert back0.weight == pytest.approx(joint.weight, abs=1e-12)


def test_partial_trace_validation():
    spec = HilbertSpec(14)
    rho = thermal_density(0.1, spec)
    with pytest.raises(DimensionMismatch):
        partial_trace(rho, 0)  # single mode
    joint = tensor(rho, rho)
    with pytest.raises(InvalidInput):
        partial_trace(joint, 2)


def test_tensor_rejects_mixed_types_and_tolerances():
    k = coherent_ket(0.1, HilbertSpec(12))
    rho = thermal_density(0.1, HilbertSpec(12))
    with pytest.raises(DimensionMismatch):
        tensor(k, rho)
    loose = thermal_density(0.1, HilbertSpec(12, num_tol=1e-6))
    with pytest.raises(DimensionMismatch):
        tensor(rho, loose)


def test_two_mode_squeezed_vacuum_traces_to_thermal():
    # Tracing one arm of a two-mode squeezed vacuum leaves a thermal state
    # with nbar = sinh^2(xi): an independent closed form for partial_trace.
    xi, d = 0.3, 20
    amps = tmsv_amplitudes(xi, d, d)
    joint = Ket(amps, HilbertSpec(d * d), mode_dims=(d, d)).to_density()
    reduced = partial_trace(joint, 0)
    ref = thermal_density(math.sinh(xi) ** 2, HilbertSpec(d))
    assert np.max(np.abs(reduced.matrix - ref.matrix)) < 1e-8


# ---------------------------------------------------------------------------
# normalize / expectation
# ---------------------------------------------------------------------------


def test_normalize_returns_prior_weight():
    spec = HilbertSpec(4)
    half = DensityOperator(0.5 * np.diag([1.0, 0, 0, 0]).astype(complex), spec)
    unit, weight = normalize(half)
    assert weight == pytest.approx(0.5, abs=1e-15)
    assert unit.weight == pytest.approx(1.0, abs=1e-15)
    ket = Ket(np.array([0.5, 0, 0, 0], dtype=complex), spec)
    unit_ket, w2 = normalize(ket)
    assert w2 == pytest.approx(0.25, abs=1e-15)
    assert unit_ket.norm2 == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ZeroTrace):
        normalize(DensityOperator(np.zeros((4, 4), dtype=complex), spec))
    with pytest.raises(ZeroTrace):
        normalize(Ket(np.zeros(4, dtype=complex), spec))


def test_expectation_values():
    spec = HilbertSpec(35)
    alpha = 0.4 + 0.1j
    rho = coherent_ket(alpha, spec).to_density()
    assert expectation(rho, annihilation(spec)) == pytest.approx(alpha, abs=1e-10)
    nbar = expectation(rho, number_operator(spec)).real
    assert nbar == pytest.approx(abs(alpha) ** 2, abs=1e-10)
    # Weight-independence: scaling the state leaves expectations unchanged.
    scaled = DensityOperator(0.3 * rho.matrix, spec)
    assert expectation(scaled, annihilation(spec)) == pytest.approx(alpha, abs=1e-10)
    with pytest.raises(ZeroTrace):
        expectation(DensityOperator(np.zeros((35, 35), dtype=complex), spec), annihilation(spec))


# ---------------------------------------------------------------------------
# Adaptive truncation selection
# ---------------------------------------------------------------------------


def test_initial_dim_floor_and_growth():
    assert initial_dim(0.0, 1.0) == 20
    assert initial_dim(0.2, 1.2) >= 20
    assert initial_dim(1.0, 2.5, 2) > initial_dim(1.0, 2.5, 0)
    with pytest.raises(InvalidInput):
        initial_dim(0.2, 0.5)


def test_grow_dim_doubles_until_success():
    tried = []

    def build(dim):
        tried.append(dim)
        if dim < 128:
            raise TruncationError("still too small")
        return dim

    assert grow_dim(build, 20) == 160
    assert tried == [20, 40, 80, 160]

    def always_fails(dim):
        raise TruncationError("never fits")

    with pytest.raises(TruncationError):
        grow_dim(always_fails, 20, max_dim=100)


def test_fock_operator_shape_validation():
    spec = HilbertSpec(4)
    with pytest.raises(DimensionMismatch):
        FockOperator(np.zeros((3, 4)), spec)
