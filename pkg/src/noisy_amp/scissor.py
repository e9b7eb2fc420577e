"""N-fold quantum-scissor amplification of weak coherent states.

A single scissor teleports the {|0>, |1>} component of its input onto an
ancilla photon split on an asymmetric (gain) beam splitter, heralded by one
click between two detectors.  Running N scissors in parallel between an
N-port splitter and its inverse truncates the input to N photons while
applying amplitude gain g per photon.  On a normalized input ket the heralded
output is

    M_N |psi>  with  M_N = diag( g^n N! / (N^n (N-n)!) ),  n = 0..N,

and the success probability summed over all 2^N one-click detector patterns is

    P_s = ||M_N psi||^2 / (1 + g^2)^N.

``scissor_amplify`` evaluates that closed form.  ``circuit_oracle`` is an
independent check: it simulates the full interferometer as a multimode
statevector — split chain, per-arm ancilla and detection, inverse recombination
— post-selecting one fixed (canonical) detector pattern per scissor.  Each of
the 2^N patterns succeeds with equal probability and yields the same state up
to a known sign flip, so the oracle's success probability is exactly
P_s / 2^N; ``pattern_multiplicity`` exposes that factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .channels import beam_splitter_unitary
from .errors import DimensionMismatch, InvalidInput, ZeroTrace
from .fock import DensityOperator, FockOperator, HilbertSpec, Ket

__all__ = [
    "ScissorConfig",
    "scissor_filter",
    "scissor_amplify",
    "circuit_oracle",
    "pattern_multiplicity",
]

# circuit_oracle state-vector size guard (N+2 modes of dim ~ spec.dim each).
_ORACLE_MAX_AMPLITUDES = 5_000_000


@dataclass(frozen=True)
class ScissorConfig:
    """Scissor count ``n``, per-photon amplitude gain ``g``, and working space."""

    n: int
    g: float
    spec: HilbertSpec

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidInput(f"scissor count must be an integer >= 1, got {self.n!r}")
        if not math.isfinite(self.g) or self.g <= 0:
            raise InvalidInput(f"amplitude gain must be finite and > 0, got {self.g!r}")
        if self.spec.dim < self.n + 1:
            raise InvalidInput(
                f"spec.dim={self.spec.dim} cannot hold the {self.n}-photon output"
            )


def scissor_filter(config: ScissorConfig) -> FockOperator:
    """Diagonal heralded-map operator M_N on the working space."""
    d = config.spec.dim
    n_sc, g = config.n, config.g
    diag = np.zeros(d, dtype=complex)
    lg = gammaln(np.arange(n_sc + 2))
    for n in range(n_sc + 1):
        diag[n] = math.exp(
            n * math.log(g) + lg[n_sc + 1] - n * math.log(n_sc) - lg[n_sc - n + 1]
        )
    return FockOperator(np.diag(diag), config.spec)


def pattern_multiplicity(config: ScissorConfig) -> int:
    """Number of equivalent one-click detector patterns behind P_s."""
    return 2**config.n


def scissor_amplify(psi: Ket, config: ScissorConfig) -> tuple[DensityOperator, float]:
    """Heralded output state and success probability (all detector patterns).

    The input ket must be normalized on the same space as the config.
    """
    if psi.spec.dim != config.spec.dim:
        raise DimensionMismatch(
            f"input dim {psi.spec.dim} != scissor space dim {config.spec.dim}"
        )
    filt = scissor_filter(config)
    vec = filt.matrix @ psi.amplitudes
    norm2 = float(np.vdot(vec, vec).real)
    p_s = norm2 / (1.0 + config.g**2) ** config.n / psi.norm2
    if norm2 <= config.spec.num_tol * config.spec.num_tol:
        raise ZeroTrace(f"scissor output weight {norm2:.3e} vanishes")
    state = DensityOperator(np.outer(vec, vec.conj()) / norm2, config.spec)
    return state, p_s


def _tensor_apply(u: np.ndarray, psi: np.ndarray, modes: list[int], dims: list[int]) -> np.ndarray:
    """Apply a two-mode matrix to the selected axes of a statevector tensor."""
    k = len(dims)
    perm = list(modes) + [i for i in range(k) if i not in modes]
    moved = np.transpose(psi, perm)
    sel = [dims[i] for i in modes]
    rest = moved.reshape(int(np.prod(sel)), -1)
    out = (u @ rest).reshape([dims[i] for i in perm])
    return np.transpose(out, np.argsort(perm))


def circuit_oracle(psi: Ket, config: ScissorConfig) -> tuple[DensityOperator, float]:
    """Full interferometric simulation, canonical detector pattern only.

    Supported for n <= 3 (the statevector grows as dim^(n+1)).  Returns the
    normalized output and the canonical-pattern success probability, equal to
    the closed form's P_s divided by ``pattern_multiplicity``.
    """
    if config.n > 3:
        raise InvalidInput("circuit_oracle supports n <= 3")
    if psi.spec.dim != config.spec.dim:
        raise DimensionMismatch(
            f"input dim {psi.spec.dim} != scissor space dim {config.spec.dim}"
        )
    n_sc, g = config.n, config.g
    d_in = psi.spec.dim
    if d_in ** n_sc * (d_in + 1) * 2 > _ORACLE_MAX_AMPLITUDES:
        raise InvalidInput(
            f"oracle statevector too large for dim={d_in}, n={n_sc}; use a smaller space"
        )

    state = psi.amplitudes.astype(complex)
    dims = [d_in]
    for _ in range(1, n_sc):
        vac = np.zeros(d_in)
        vac[0] = 1.0
        state = np.tensordot(state, vac, axes=0)
        dims.append(d_in)
    # Split chain: peel 1/N, 1/(N-1), ... off the input mode.
    for i in range(1, n_sc):
        t_i = (n_sc - i) / (n_sc - i + 1)
        b = beam_splitter_unitary(math.sqrt(t_i), math.sqrt(1.0 - t_i), d_in, d_in)
        state = _tensor_apply(b, state, [0, i], dims)

    # One scissor per arm: ancilla photon on a gain beam splitter, 50:50 with
    # the arm, herald (arm -> 1 click, gain-BS port -> 0 clicks).
    r_g = 1.0 / math.sqrt(1.0 + g * g)
    t_g = g * r_g
    for arm in range(n_sc):
        d_arm = dims[arm]
        d_port = d_arm + 1
        vac = np.zeros(d_port)
        vac[0] = 1.0
        photon = np.zeros(2)
        photon[1] = 1.0
        state = np.tensordot(np.tensordot(state, vac, axes=0), photon, axes=0)
        dims = dims + [d_port, 2]
        k = len(dims)
        b_gain = beam_splitter_unitary(t_g, r_g, d_port, 2)
        state = _tensor_apply(b_gain, state, [k - 2, k - 1], dims)
        b_half = beam_splitter_unitary(math.sqrt(0.5), math.sqrt(0.5), d_arm, d_port)
        state = _tensor_apply(b_half, state, [arm, k - 2], dims)
        state = np.take(state, 1, axis=arm)  # <1| at the arm detector
        state = np.take(state, 0, axis=k - 3)  # <0| at the gain-BS port
        state = np.moveaxis(state, -1, arm)  # surviving qubit replaces the arm
        dims = dims[:arm] + [2] + dims[arm + 1 : -2]

    # Recombine through the inverse split chain; the collector mode needs
    # n_sc + 1 levels to hold the constructively summed photons.
    d_out = n_sc + 1
    pad = [(0, 0)] * state.ndim
    pad[0] = (0, d_out - 2)
    state = np.pad(state, pad)
    dims[0] = d_out
    for i in range(n_sc - 1, 0, -1):
        t_i = (n_sc - i) / (n_sc - i + 1)
        b = beam_splitter_unitary(math.sqrt(t_i), math.sqrt(1.0 - t_i), d_out, 2)
        state = _tensor_apply(b.conj().T, state, [0, i], dims)
    for i in range(n_sc - 1, 0, -1):
        state = np.take(state, 0, axis=i)  # <0| on the emptied arms
    vec = state.reshape(d_out)

    p_canonical = float(np.vdot(vec, vec).real) / psi.norm2
    if p_canonical <= config.spec.num_tol * config.spec.num_tol:
        raise ZeroTrace(f"canonical-pattern weight {p_canonical:.3e} vanishes")
    full = np.zeros(d_in, dtype=complex)
    full[:d_out] = vec / math.sqrt(float(np.vdot(vec, vec).real))
    return DensityOperator(np.outer(full, full.conj()), config.spec), p_canonical
