"""Truncated Fock-basis linear algebra: states, operators, and helpers.

Everything in the package lives in the number basis ``|0> .. |dim-1>`` of a
single bosonic mode (or a tensor product of a few of them).  A
:class:`HilbertSpec` fixes the cutoff and the two tolerances used throughout:

* ``trunc_tol`` — probability mass allowed beyond the cutoff.  Constructors
  that can detect leakage past ``dim`` raise :class:`~noisy_amp.errors.TruncationError`
  when the deficit exceeds it.
* ``num_tol`` — slack for floating-point checks (Hermiticity, trace, norms).

Dense complex matrices are used throughout; the dimensions of interest here
(tens to a few hundred) make that the simple and fast choice.  All value types
are immutable: arrays are copied in and marked read-only, so states can be
shared freely between pipeline stages.

The displacement operator is built from a stable three-term recurrence for
normalized associated Laguerre polynomials rather than ``expm``; the matrix
exponential of a truncated generator loses accuracy well before the recurrence
does, and the recurrence is O(dim^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, TypeVar, Union

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, InvalidInput, TruncationError, ZeroTrace

__all__ = [
    "HilbertSpec",
    "Ket",
    "DensityOperator",
    "FockOperator",
    "coherent_ket",
    "thermal_density",
    "displacement_operator",
    "annihilation",
    "creation",
    "number_operator",
    "tensor",
    "partial_trace",
    "normalize",
    "expectation",
    "initial_dim",
    "grow_dim",
]

# Module-level switch for the expensive positive-semidefiniteness eigenvalue
# scan on every DensityOperator construction.  Off by default; the test suite
# turns it on.
DEBUG_CHECKS = False

DEFAULT_TRUNC_TOL = 1e-10
DEFAULT_NUM_TOL = 1e-9

T = TypeVar("T")


@dataclass(frozen=True)
class HilbertSpec:
    """Cutoff dimension and tolerances of a truncated Fock space."""

    dim: int
    trunc_tol: float = DEFAULT_TRUNC_TOL
    num_tol: float = DEFAULT_NUM_TOL

    def __post_init__(self) -> None:
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 2:
            raise InvalidInput(f"dim must be an integer >= 2, got {self.dim!r}")
        if not (0 < self.trunc_tol < 1):
            raise InvalidInput(f"trunc_tol must be in (0, 1), got {self.trunc_tol!r}")
        if not (0 < self.num_tol < 1):
            raise InvalidInput(f"num_tol must be in (0, 1), got {self.num_tol!r}")

    def doubled(self) -> "HilbertSpec":
        return HilbertSpec(2 * self.dim, self.trunc_tol, self.num_tol)


def _require_same_tols(a: HilbertSpec, b: HilbertSpec) -> None:
    if a.trunc_tol != b.trunc_tol or a.num_tol != b.num_tol:
        raise DimensionMismatch("cannot combine spaces with different tolerances")


def _frozen_array(data, shape) -> np.ndarray:
    arr = np.array(data, dtype=complex, order="C")
    if arr.shape != shape:
        raise DimensionMismatch(f"expected array of shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise InvalidInput("array contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """Pure state (or unnormalized branch vector) in the number basis."""

    amplitudes: np.ndarray
    spec: HilbertSpec
    mode_dims: tuple = ()

    def __post_init__(self) -> None:
        arr = _frozen_array(self.amplitudes, (self.spec.dim,))
        object.__setattr__(self, "amplitudes", arr)
        dims = tuple(self.mode_dims) if self.mode_dims else (self.spec.dim,)
        if math.prod(dims) != self.spec.dim:
            raise DimensionMismatch(f"mode_dims {dims} do not factor dim {self.spec.dim}")
        object.__setattr__(self, "mode_dims", dims)
        n2 = float(np.vdot(arr, arr).real)
        if n2 > 1.0 + self.spec.num_tol:
            raise InvalidInput(f"ket norm^2 = {n2} exceeds 1 + num_tol")
        object.__setattr__(self, "norm2", n2)

    norm2: float = field(init=False)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def to_density(self) -> "DensityOperator":
        mat = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(mat, self.spec, self.mode_dims)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive-semidefinite operator; trace = heralding weight.

    ``weight`` is the (real) trace at construction time.  Normalized states
    have weight 1; conditional branches carry their success weight here.
    The ideal (non-unitary) photonic operations can push the weight above 1,
    so only non-negativity is enforced.
    """

    matrix: np.ndarray
    spec: HilbertSpec
    mode_dims: tuple = ()

    def __post_init__(self) -> None:
        d = self.spec.dim
        mat = _frozen_array(self.matrix, (d, d))
        object.__setattr__(self, "matrix", mat)
        dims = tuple(self.mode_dims) if self.mode_dims else (d,)
        if math.prod(dims) != d:
            raise DimensionMismatch(f"mode_dims {dims} do not factor dim {d}")
        object.__setattr__(self, "mode_dims", dims)
        tol = self.spec.num_tol
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > tol:
            raise InvalidInput(f"matrix is not Hermitian (max deviation {herm:.3e})")
        tr = complex(np.trace(mat))
        if abs(tr.imag) > tol:
            raise InvalidInput(f"trace has imaginary part {tr.imag:.3e}")
        if tr.real < -tol:
            raise InvalidInput(f"trace {tr.real} is negative beyond num_tol")
        object.__setattr__(self, "weight", tr.real)
        if DEBUG_CHECKS:
            evals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
            if evals.min() < -tol:
                raise InvalidInput(f"matrix has eigenvalue {evals.min():.3e} < -num_tol")

    weight: float = field(init=False)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def diag_populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()


@dataclass(frozen=True, eq=False)
class FockOperator:
    """General (not necessarily Hermitian) operator on a truncated space."""

    matrix: np.ndarray
    spec: HilbertSpec
    mode_dims: tuple = ()

    def __post_init__(self) -> None:
        d = self.spec.dim
        mat = _frozen_array(self.matrix, (d, d))
        object.__setattr__(self, "matrix", mat)
        dims = tuple(self.mode_dims) if self.mode_dims else (d,)
        if math.prod(dims) != d:
            raise DimensionMismatch(f"mode_dims {dims} do not factor dim {d}")
        object.__setattr__(self, "mode_dims", dims)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def dagger(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, self.spec, self.mode_dims)


def coherent_ket(alpha: complex, spec: HilbertSpec) -> Ket:
    """|alpha> truncated to ``spec.dim`` levels.

    Amplitudes are computed in log space, so large |alpha| cannot overflow
    the factorials.  Raises TruncationError if the lost tail exceeds
    ``trunc_tol``.
    """
    alpha = complex(alpha)
    n = np.arange(spec.dim)
    if alpha == 0:
        amps = np.zeros(spec.dim, dtype=complex)
        amps[0] = 1.0
        return Ket(amps, spec)
    a2 = abs(alpha) ** 2
    log_mag = -0.5 * a2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    phase = np.exp(1j * n * math.atan2(alpha.imag, alpha.real))
    amps = np.exp(log_mag) * phase
    deficit = 1.0 - float(np.vdot(amps, amps).real)
    if deficit > spec.trunc_tol:
        raise TruncationError(
            f"coherent state |alpha|={abs(alpha):.4g} loses {deficit:.3e} "
            f"past dim={spec.dim} (trunc_tol={spec.trunc_tol:g})"
        )
    return Ket(amps, spec)


def thermal_density(nbar: float, spec: HilbertSpec) -> DensityOperator:
    """Thermal state with mean photon number ``nbar`` (>= 0)."""
    if nbar < 0 or not math.isfinite(nbar):
        raise InvalidInput(f"nbar must be finite and >= 0, got {nbar!r}")
    if nbar == 0:
        mat = np.zeros((spec.dim, spec.dim), dtype=complex)
        mat[0, 0] = 1.0
        return DensityOperator(mat, spec)
    ratio = nbar / (1.0 + nbar)
    # Deficit of the truncated geometric series is exactly ratio**dim.
    deficit = ratio**spec.dim
    if deficit > spec.trunc_tol:
        raise TruncationError(
            f"thermal state nbar={nbar:.4g} loses {deficit:.3e} past dim={spec.dim}"
        )
    n = np.arange(spec.dim)
    diag = np.exp(n * math.log(ratio) - math.log1p(nbar))
    return DensityOperator(np.diag(diag.astype(complex)), spec)


def _laguerre_table(k: int, x: np.ndarray, count: int) -> np.ndarray:
    """Rows n = 0..count-1 of B_{k,n}(x) = sqrt(n!/(n+k)!) L_n^k(x).

    Normalized associated Laguerre values via a forward recurrence that is
    stable for these arguments (all values bounded by ~e^{x/2}).
    """
    out = np.empty((count, len(x)))
    b_prev = np.full(len(x), math.exp(-0.5 * gammaln(k + 1)))
    out[0] = b_prev
    if count == 1:
        return out
    b_cur = (1.0 + k - x) / math.sqrt(k + 1) * b_prev
    out[1] = b_cur
    for n in range(1, count - 1):
        c1 = (2 * n + 1 + k - x) / math.sqrt((n + 1) * (n + 1 + k))
        c2 = math.sqrt(n * (n + k) / ((n + 1) * (n + 1 + k)))
        b_next = c1 * b_cur - c2 * b_prev
        b_prev, b_cur = b_cur, b_next
        out[n + 1] = b_cur
    return out


def displacement_operator(beta: complex, spec: HilbertSpec) -> FockOperator:
    """Matrix elements of D(beta) = exp(beta a† - beta* a), truncated.

    Uses <n+k|D|n> = sqrt(n!/(n+k)!) beta^k e^{-|beta|^2/2} L_n^k(|beta|^2)
    with the normalized-Laguerre recurrence; exact per matrix element, so the
    only truncation effect is the missing rows/columns past the cutoff.
    """
    beta = complex(beta)
    d = spec.dim
    mat = np.zeros((d, d), dtype=complex)
    x = np.array([abs(beta) ** 2])
    pref = math.exp(-0.5 * abs(beta) ** 2)
    for k in range(d):
        count = d - k
        table = _laguerre_table(k, x, count)[:, 0]
        lower = table * (beta**k) * pref
        n = np.arange(count)
        mat[n + k, n] = lower
        if k > 0:
            upper = table * ((-beta.conjugate()) ** k) * pref
            mat[n, n + k] = upper
    return FockOperator(mat, spec)


def annihilation(spec: HilbertSpec) -> FockOperator:
    n = np.arange(1, spec.dim)
    mat = np.zeros((spec.dim, spec.dim), dtype=complex)
    mat[n - 1, n] = np.sqrt(n)
    return FockOperator(mat, spec)


def creation(spec: HilbertSpec) -> FockOperator:
    return annihilation(spec).dagger()


def number_operator(spec: HilbertSpec) -> FockOperator:
    return FockOperator(np.diag(np.arange(spec.dim).astype(complex)), spec)


_TensorArg = Union[Ket, DensityOperator, FockOperator]


def tensor(a: _TensorArg, b: _TensorArg) -> _TensorArg:
    """Kronecker product; the result remembers its factor dimensions."""
    if type(a) is not type(b):
        raise DimensionMismatch(
            f"cannot tensor {type(a).__name__} with {type(b).__name__}"
        )
    _require_same_tols(a.spec, b.spec)
    spec = HilbertSpec(a.spec.dim * b.spec.dim, a.spec.trunc_tol, a.spec.num_tol)
    dims = a.mode_dims + b.mode_dims
    if isinstance(a, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes), spec, dims)
    cls = type(a)
    return cls(np.kron(a.matrix, b.matrix), spec, dims)


def partial_trace(rho: DensityOperator, keep: int) -> DensityOperator:
    """Trace out one factor of a two-mode density operator.

    ``keep`` is 0 (keep the first mode) or 1 (keep the second); the factor
    dimensions come from ``rho.mode_dims`` as recorded by :func:`tensor`.
    """
    dims = rho.mode_dims
    if len(dims) != 2:
        raise DimensionMismatch(
            f"partial_trace needs a two-mode operator, got mode_dims={dims}"
        )
    if keep not in (0, 1):
        raise InvalidInput(f"keep must be 0 or 1, got {keep!r}")
    d0, d1 = dims
    four = rho.matrix.reshape(d0, d1, d0, d1)
    if keep == 0:
        mat = np.einsum("ikjk->ij", four)
        d = d0
    else:
        mat = np.einsum("kikj->ij", four)
        d = d1
    out_spec = HilbertSpec(d, rho.spec.trunc_tol, rho.spec.num_tol)
    mat = (mat + mat.conj().T) / 2.0
    return DensityOperator(mat, out_spec)


def normalize(state):
    """Scale to unit weight; returns ``(normalized_state, prior_weight)``.

    Works on DensityOperator (weight = trace) and Ket (weight = norm^2).
    Raises ZeroTrace when the weight is at or below ``num_tol``.
    """
    if isinstance(state, DensityOperator):
        w = state.weight
        if w <= state.spec.num_tol:
            raise ZeroTrace(f"trace {w:.3e} is not positive beyond num_tol")
        return DensityOperator(state.matrix / w, state.spec, state.mode_dims), w
    if isinstance(state, Ket):
        w = state.norm2
        if w <= state.spec.num_tol:
            raise ZeroTrace(f"norm^2 {w:.3e} is not positive beyond num_tol")
        return Ket(state.amplitudes / math.sqrt(w), state.spec, state.mode_dims), w
    raise InvalidInput(f"cannot normalize object of type {type(state).__name__}")


def expectation(rho: DensityOperator, op: FockOperator) -> complex:
    """Tr(op rho) / Tr(rho); weight-independent."""
    if rho.spec.dim != op.spec.dim:
        raise DimensionMismatch(
            f"state dim {rho.spec.dim} != operator dim {op.spec.dim}"
        )
    if rho.weight <= rho.spec.num_tol:
        raise ZeroTrace("expectation of a zero-weight state")
    val = np.einsum("ij,ji->", op.matrix, rho.matrix)
    return complex(val) / rho.weight


def initial_dim(alpha_mod: float, gain: float, m: int = 0) -> int:
    """Starting cutoff for an amplified coherent state with an m-photon op.

    Chosen so the support of D(sqrt(G) alpha) on a thermal background plus m
    extra ladder steps sits well inside the basis; callers still verify via
    trace-deficit checks and grow on failure.
    """
    if gain < 1 or alpha_mod < 0:
        raise InvalidInput("need gain >= 1 and alpha_mod >= 0")
    reach = math.sqrt(gain) * alpha_mod + math.sqrt(max(gain - 1.0, 0.0)) + m + 2.0
    return max(20, math.ceil(4.0 * reach * reach))


def grow_dim(build: Callable[[int], T], start_dim: int, max_dim: int = 8192) -> T:
    """Run ``build(dim)``, doubling ``dim`` on TruncationError up to ``max_dim``."""
    dim = max(2, int(start_dim))
    while True:
        try:
            return build(dim)
        except TruncationError:
            if dim >= max_dim:
                raise
            dim = min(2 * dim, max_dim)
