"""Scissor amplifier: diagonal filter model versus explicit circuit."""

import math

import numpy as np
import pytest

from noisy_amp import (
    HilbertSpec,
    InvalidInput,
    Ket,
    ScissorConfig,
    ZeroTrace,
    circuit_oracle,
    coherent_ket,
    pattern_multiplicity,
    scissor_amplify,
    scissor_filter,
)


def test_filter_diagonal_closed_form():
    spec = HilbertSpec(8)
    config = ScissorConfig(2, 1.3, spec)
    diag = scissor_filter(config).matrix.diagonal()
    # g^n N! / (N^n (N-n)!) for n <= N, zero above.
    assert diag[0] == pytest.approx(1.0, abs=1e-15)
    assert diag[1] == pytest.approx(1.3, abs=1e-15)
    assert diag[2] == pytest.approx(1.3**2 / 2.0, abs=1e-15)
    assert np.all(diag[3:] == 0.0)
    assert pattern_multiplicity(config) == 4


def test_output_support_is_truncated_at_n():
    spec = HilbertSpec(20)
    psi = coherent_ket(0.5, spec)
    state, _ = scissor_amplify(psi, ScissorConfig(2, 1.2, spec))
    populations = state.diag_populations()
    assert np.all(populations[3:] == 0.0)
    assert state.weight == pytest.approx(1.0, abs=1e-12)


def test_single_scissor_small_seed_limit():
    # As alpha -> 0 with g = 1 the success probability approaches 1/2 and
    # the output approaches (|0> + g alpha |1>)/norm.
    spec = HilbertSpec(20)
    alpha = 0.01
    psi = coherent_ket(alpha, spec)
    state, p_s = scissor_amplify(psi, ScissorConfig(1, 1.0, spec))
    assert p_s == pytest.approx(0.5, abs=1e-4)
    assert state.matrix[1, 0] / state.matrix[0, 0] == pytest.approx(alpha, rel=1e-6)


def test_qubit_block_gain_action():
    spec = HilbertSpec(12)
    g = 1.7
    psi = coherent_ket(0.3 + 0.2j, spec)
    state, _ = scissor_amplify(psi, ScissorConfig(1, g, spec))
    ratio_in = psi.amplitudes[1] / psi.amplitudes[0]
    ratio_out = state.matrix[1, 0] / state.matrix[0, 0]
    assert ratio_out == pytest.approx(g * ratio_in, rel=1e-12)


def test_filter_matches_circuit():
    spec = HilbertSpec(12)
    alpha = 0.25 * np.exp(0.4j)
    psi = coherent_ket(alpha, spec)
    for n in (1, 2, 3):
        config = ScissorConfig(n, 1.4, spec)
        fast, p_s = scissor_amplify(psi, config)
        slow, p_canonical = circuit_oracle(psi, config)
        assert np.max(np.abs(fast.matrix - slow.matrix)) < 1e-8
        # The filter convention counts all 2^n heralding patterns; the
        # circuit's canonical pattern carries exactly a 2^-n share.
        assert p_s / p_canonical == pytest.approx(2.0**n, rel=1e-10)


def test_success_probability_decreases_with_scissor_count():
    spec = HilbertSpec(16)
    psi = coherent_ket(0.5, spec)
    probs = [scissor_amplify(psi, ScissorConfig(n, 1.3, spec))[1] for n in (1, 2, 3, 4)]
    assert all(a > b for a, b in zip(probs, probs[1:]))
    assert all(0 < p <= 1 for p in probs)


def test_scissor_validation_and_zero_trace():
    spec = HilbertSpec(10)
    with pytest.raises(InvalidInput):
        ScissorConfig(0, 1.2, spec)
    with pytest.raises(InvalidInput):
        ScissorConfig(1, 0.0, spec)
    with pytest.raises(InvalidInput):
        ScissorConfig(12, 1.2, spec)  # needs dim >= n + 1
    with pytest.raises(InvalidInput):
        circuit_oracle(coherent_ket(0.2, spec), ScissorConfig(4, 1.2, spec))
    two = np.zeros(10, dtype=complex)
    two[2] = 1.0
    with pytest.raises(ZeroTrace):
        scissor_amplify(Ket(two, spec), ScissorConfig(1, 1.2, spec))
