"""The quantum-limited amplifier channel and conditional photonic operations.

The amplifier is phase-insensitive with intensity gain G >= 1: a coherent
input |alpha> becomes a displaced thermal state D(sqrt(G) alpha) rho_th(G-1)
D†(sqrt(G) alpha).  For an arbitrary input the channel is evaluated through
its Kraus decomposition {A_k}: embedding the mode with a vacuum idler,
applying the two-mode squeezer that realizes the gain, and tracing the idler
gives

    A_k[n+k, n] = sqrt(C(n+k, k)) * ((G-1)/G)^(k/2) * G^(-(n+1)/2),

evaluated in log space.  Each A_k is a single lower diagonal, so
A_k rho A_k† is an outer-product-scaled shift of rho — the full update runs
in O(dim^3) without materializing any two-mode object.

Conditional corrections come in two flavors:

* **Ideal ladder operations** (`Subtract`, `Add`, `Coherent`) applied as bare
  operators O rho O† with heralding weight Tr[O rho O†] — the limiting case of
  the physical circuits below.
* **Physical circuits**: `bs_subtraction` (high-transmittance beam splitter
  plus a detector on the tapped arm) and `ndpa_addition` (amplifier idler
  heralded on m photons).  Both return a normalized state together with its
  success probability.

The beam-splitter convention is B a† B† = t a† + r b†, B b† B† = -r a† + t b†,
equal to exp(theta (a b† - a† b)) with theta = atan2(r, t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, InvalidInput, ZeroTrace
from .fock import (
    DensityOperator,
    FockOperator,
    HilbertSpec,
    TruncationError,
    annihilation,
    coherent_ket,
    displacement_operator,
    thermal_density,
)

__all__ = [
    "Subtract",
    "Add",
    "Coherent",
    "OnOff",
    "FockProjection",
    "pila_coherent",
    "pila_channel",
    "build_operator",
    "apply_operation",
    "beam_splitter_unitary",
    "bs_subtraction",
    "ndpa_addition",
    "op_label",
    "photon_order",
]

# Ancilla cutoffs for the physical circuits.  An on/off detector on the tapped
# arm distinguishes click counts up to the ancilla cutoff; with T ~ 0.99 the
# weight of >7 simultaneous clicks is far below trunc_tol.
ONOFF_ANCILLA_DIM = 8
FOCK_ANCILLA_MARGIN = 6


@dataclass(frozen=True)
class Subtract:
    """Ideal m-fold photon subtraction a^m."""

    m: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidInput(f"Subtract order must be an integer >= 1, got {self.m!r}")


@dataclass(frozen=True)
class Add:
    """Ideal m-fold photon addition (a†)^m."""

    m: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidInput(f"Add order must be an integer >= 1, got {self.m!r}")


@dataclass(frozen=True)
class Coherent:
    """Coherent superposition t a + r a† with t^2 + r^2 = 1."""

    t: float
    r: float

    def __post_init__(self) -> None:
        for name, v in (("t", self.t), ("r", self.r)):
            if not math.isfinite(v):
                raise InvalidInput(f"Coherent.{name} must be finite, got {v!r}")
        if abs(self.t**2 + self.r**2 - 1.0) > 1e-9:
            raise InvalidInput(
                f"Coherent requires t^2 + r^2 = 1, got {self.t**2 + self.r**2!r}"
            )


PhotonicOp = Subtract | Add | Coherent


@dataclass(frozen=True)
class OnOff:
    """Ideal on/off detector: herald on >= 1 click (no efficiency, no dark counts)."""


@dataclass(frozen=True)
class FockProjection:
    """Ideal photon-number-resolving detector heralding exactly m clicks."""

    m: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidInput(f"FockProjection order must be >= 1, got {self.m!r}")


def op_label(op: PhotonicOp) -> str:
    if isinstance(op, Subtract):
        return f"sub{op.m}"
    if isinstance(op, Add):
        return f"add{op.m}"
    if isinstance(op, Coherent):
        return f"coh(t={op.t:.6g},r={op.r:.6g})"
    raise InvalidInput(f"not a photonic operation: {op!r}")


def photon_order(op: PhotonicOp) -> int:
    """Ladder reach of the operation (how many extra Fock levels it needs)."""
    if isinstance(op, (Subtract, Add)):
        return op.m
    if isinstance(op, Coherent):
        return 1
    raise InvalidInput(f"not a photonic operation: {op!r}")


def pila_coherent(alpha: complex, gain: float, spec: HilbertSpec) -> DensityOperator:
    """Amplifier output for a coherent input: D(sqrt(G) alpha) rho_th(G-1) D†."""
    if not math.isfinite(gain) or gain < 1:
        raise InvalidInput(f"gain must be >= 1, got {gain!r}")
    if gain == 1.0:
        return coherent_ket(alpha, spec).to_density()
    disp = displacement_operator(math.sqrt(gain) * complex(alpha), spec)
    th = thermal_density(gain - 1.0, spec)
    mat = disp.matrix @ th.matrix @ disp.matrix.conj().T
    mat = (mat + mat.conj().T) / 2.0
    deficit = 1.0 - float(np.trace(mat).real)
    if deficit > spec.trunc_tol:
        raise TruncationError(
            f"amplified coherent state loses {deficit:.3e} past dim={spec.dim}"
        )
    return DensityOperator(mat, spec)


def _amp_kraus_band(gain: float, k: int, dim: int) -> np.ndarray:
    """Band a_k[n] = A_k[n+k, n] of the amplifier Kraus operator, n < dim-k."""
    n = np.arange(dim - k)
    logc = (
        0.5 * (gammaln(n + k + 1) - gammaln(k + 1) - gammaln(n + 1))
        + 0.5 * k * math.log((gain - 1.0) / gain)
        - 0.5 * (n + 1) * math.log(gain)
    )
    return np.exp(logc)


def _embed(rho: DensityOperator, spec: HilbertSpec) -> DensityOperator:
    if spec.dim == rho.spec.dim:
        return rho
    if spec.dim < rho.spec.dim:
        raise DimensionMismatch(
            f"cannot shrink a state from dim {rho.spec.dim} to {spec.dim}"
        )
    mat = np.zeros((spec.dim, spec.dim), dtype=complex)
    mat[: rho.spec.dim, : rho.spec.dim] = rho.matrix
    return DensityOperator(mat, spec)


def pila_channel(
    rho: DensityOperator, gain: float, spec: HilbertSpec | None = None
) -> DensityOperator:
    """Amplifier channel on an arbitrary state via the Kraus sum.

    G = 1 returns the input unchanged.  Raises TruncationError when the
    output leaks more than ``trunc_tol`` of the input weight past the cutoff
    (the Kraus sum only ever loses mass upward).
    """
    if not math.isfinite(gain) or gain < 1:
        raise InvalidInput(f"gain must be >= 1, got {gain!r}")
    if spec is not None:
        rho = _embed(rho, spec)
    if gain == 1.0:
        return rho
    d = rho.spec.dim
    out = np.zeros((d, d), dtype=complex)
    for k in range(d):
        band = _amp_kraus_band(gain, k, d)
        out[k:, k:] += (band[:, None] * band[None, :]) * rho.matrix[: d - k, : d - k]
    deficit = rho.weight - float(np.trace(out).real)
    if deficit > rho.spec.trunc_tol:
        raise TruncationError(
            f"amplifier output loses {deficit:.3e} of weight past dim={d}"
        )
    out = (out + out.conj().T) / 2.0
    return DensityOperator(out, rho.spec, rho.mode_dims)


def build_operator(op: PhotonicOp, spec: HilbertSpec) -> FockOperator:
    """Matrix of the ideal operation on the given space."""
    a = annihilation(spec).matrix
    if isinstance(op, Subtract):
        return FockOperator(np.linalg.matrix_power(a, op.m), spec)
    if isinstance(op, Add):
        return FockOperator(np.linalg.matrix_power(a.conj().T, op.m), spec)
    if isinstance(op, Coherent):
        return FockOperator(op.t * a + op.r * a.conj().T, spec)
    raise InvalidInput(f"not a photonic operation: {op!r}")


def apply_operation(rho: DensityOperator, op: FockOperator) -> DensityOperator:
    """O rho O†, unnormalized; its weight is the relative heralding weight."""
    if rho.spec.dim != op.spec.dim:
        raise DimensionMismatch(
            f"state dim {rho.spec.dim} != operator dim {op.spec.dim}"
        )
    mat = op.matrix @ rho.matrix @ op.matrix.conj().T
    mat = (mat + mat.conj().T) / 2.0
    if float(np.trace(mat).real) <= rho.spec.num_tol:
        raise ZeroTrace("operation annihilates the state (weight below num_tol)")
    return DensityOperator(mat, rho.spec, rho.mode_dims)


def beam_splitter_unitary(t: float, r: float, dim1: int, dim2: int) -> np.ndarray:
    """Two-mode beam-splitter matrix on C^dim1 (x) C^dim2, index m1*dim2 + m2.

    Closed form: B|n1, n2> = (t a† + r b†)^n1 (-r a† + t b†)^n2 |0,0> /
    sqrt(n1! n2!); each column is a binomial convolution.  Exactly unitary on
    every photon-number block that fits below both cutoffs.
    """
    if not (0.0 <= t <= 1.0 and 0.0 <= r <= 1.0) or abs(t * t + r * r - 1.0) > 1e-9:
        raise InvalidInput(f"need t, r >= 0 with t^2 + r^2 = 1, got t={t!r} r={r!r}")
    if dim1 < 1 or dim2 < 1:
        raise InvalidInput("beam splitter dimensions must be >= 1")
    lg = gammaln(np.arange(dim1 + dim2 + 2))
    u = np.zeros((dim1 * dim2, dim1 * dim2), dtype=complex)
    for n1 in range(dim1):
        j = np.arange(n1 + 1)
        p1 = np.exp(lg[n1 + 1] - lg[j + 1] - lg[n1 - j + 1]) * t**j * r ** (n1 - j)
        for n2 in range(dim2):
            l = np.arange(n2 + 1)
            p2 = (
                np.exp(lg[n2 + 1] - lg[l + 1] - lg[n2 - l + 1])
                * t ** (n2 - l)
                * (-r) ** l
            )
            conv = np.convolve(p1, p2)
            s = n1 + n2
            m1 = np.arange(max(0, s - dim2 + 1), min(s, dim1 - 1) + 1)
            pref = np.exp(
                0.5 * (lg[m1 + 1] + lg[s - m1 + 1] - lg[n1 + 1] - lg[n2 + 1])
            )
            u[m1 * dim2 + (s - m1), n1 * dim2 + n2] = conv[m1] * pref
    return u


Detector = OnOff | FockProjection

# Kraus stacks K_k = U[(m1, k), (n1, 0)] are reused heavily during gain
# calibration; keep the few most recent (transmittance, dims) combinations.
_KRAUS_CACHE: dict[tuple[float, int, int], np.ndarray] = {}
_KRAUS_CACHE_LIMIT = 6


def _tap_kraus_stack(transmittance: float, dim: int, d_anc: int) -> np.ndarray:
    key = (transmittance, dim, d_anc)
    hit = _KRAUS_CACHE.get(key)
    if hit is not None:
        return hit
    t = math.sqrt(transmittance)
    r = math.sqrt(1.0 - transmittance)
    u4 = beam_splitter_unitary(t, r, dim, d_anc).reshape(dim, d_anc, dim, d_anc)
    stack = np.ascontiguousarray(u4[:, :, :, 0].transpose(1, 0, 2))
    while len(_KRAUS_CACHE) >= _KRAUS_CACHE_LIMIT:
        _KRAUS_CACHE.pop(next(iter(_KRAUS_CACHE)))
    _KRAUS_CACHE[key] = stack
    return stack


def bs_subtraction(
    rho: DensityOperator,
    transmittance: float,
    detector: Detector = OnOff(),
    spec: HilbertSpec | None = None,
) -> tuple[DensityOperator, float]:
    """Physical photon subtraction: tap beam splitter + detector on the tap.

    The signal meets a vacuum ancilla on a beam splitter of transmittance T;
    the conditional maps K_k (k photons reaching the detector) are the
    unitary's columns against ancilla vacuum.  Heralding on the detector gives
    the normalized output state and the success probability.
    """
    if not (0.0 < transmittance < 1.0):
        raise InvalidInput(f"transmittance must be in (0, 1), got {transmittance!r}")
    if spec is not None:
        rho = _embed(rho, spec)
    d = rho.spec.dim
    if isinstance(detector, OnOff):
        d_anc = ONOFF_ANCILLA_DIM
        clicks = range(1, d_anc)
    elif isinstance(detector, FockProjection):
        d_anc = detector.m + FOCK_ANCILLA_MARGIN
        clicks = (detector.m,)
    else:
        raise InvalidInput(f"unknown detector model: {detector!r}")
    stack = _tap_kraus_stack(transmittance, d, d_anc)
    cond = np.zeros((d, d), dtype=complex)
    for k in clicks:
        kraus = stack[k]
        cond += kraus @ rho.matrix @ kraus.conj().T
    p_s = float(np.trace(cond).real) / rho.weight
    if p_s <= rho.spec.num_tol:
        raise ZeroTrace(f"heralding probability {p_s:.3e} below num_tol")
    cond = (cond + cond.conj().T) / (2.0 * p_s * rho.weight)
    return DensityOperator(cond, rho.spec), p_s


def ndpa_addition(
    rho: DensityOperator,
    gain_ndpa: float,
    m: int = 1,
    spec: HilbertSpec | None = None,
) -> tuple[DensityOperator, float]:
    """Physical m-photon addition: weak amplifier heralded on m idler photons.

    The conditional map is the single Kraus operator A_m of the amplifier at
    gain ``gain_ndpa``; the ideal (a†)^m is recovered as gain_ndpa -> 1.
    """
    if not math.isfinite(gain_ndpa) or gain_ndpa <= 1.0:
        raise InvalidInput(f"NDPA gain must be > 1, got {gain_ndpa!r}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidInput(f"herald count must be an integer >= 1, got {m!r}")
    if spec is not None:
        rho = _embed(rho, spec)
    d = rho.spec.dim
    if m >= d:
        raise DimensionMismatch(f"herald count {m} needs dim > {m}")
    band = _amp_kraus_band(gain_ndpa, m, d)
    cond = np.zeros((d, d), dtype=complex)
    cond[m:, m:] = (band[:, None] * band[None, :]) * rho.matrix[: d - m, : d - m]
    p_s = float(np.trace(cond).real) / rho.weight
    if p_s <= rho.spec.num_tol:
        raise ZeroTrace(f"heralding probability {p_s:.3e} below num_tol")
    cond = (cond + cond.conj().T) / (2.0 * p_s * rho.weight)
    return DensityOperator(cond, rho.spec), p_s
