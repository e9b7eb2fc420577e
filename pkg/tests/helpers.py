"""Independent oracles shared by the test suite.

Everything in this module is built from first principles with numpy/scipy
only — none of it calls into the package under test — so tests that use these
helpers compare two genuinely independent computations of the same quantity.
The slow-but-obviously-correct constructions (matrix exponentials, direct
series) live here; the package's fast closed forms are checked against them.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln


def lowering(dim: int) -> np.ndarray:
    """Annihilation matrix on a ``dim``-level truncation."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def expm_displacement(beta: complex, dim: int) -> np.ndarray:
    """D(beta) = exp(beta a† − beta* a) via a dense matrix exponential."""
    a = lowering(dim)
    return expm(beta * a.conj().T - np.conj(beta) * a)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Analytic <n|alpha> amplitudes, evaluated in log space."""
    alpha = complex(alpha)
    vec = np.zeros(dim, dtype=complex)
    if alpha == 0:
        vec[0] = 1.0
        return vec
    n = np.arange(dim, dtype=float)
    mod = abs(alpha)
    log_mag = n * np.log(mod) - 0.5 * gammaln(n + 1.0) - 0.5 * mod * mod
    vec[:] = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    return vec


def thermal_diag(nbar: float, dim: int) -> np.ndarray:
    """Number-basis populations of a thermal state with mean photon nbar."""
    if nbar == 0.0:
        out = np.zeros(dim)
        out[0] = 1.0
        return out
    n = np.arange(dim, dtype=float)
    ratio = nbar / (1.0 + nbar)
    return np.exp(n * np.log(ratio) - np.log(1.0 + nbar))


def displaced_thermal(alpha: complex, gain: float, dim: int) -> np.ndarray:
    """Amplifier output D(sqrt(G) alpha) ρ_th(G−1) D†, the slow way."""
    disp = expm_displacement(np.sqrt(gain) * complex(alpha), dim)
    th = np.diag(thermal_diag(gain - 1.0, dim)).astype(complex)
    return disp @ th @ disp.conj().T


def parity_wigner(rho: np.ndarray, beta: complex) -> float:
    """W(beta) from the displaced-parity formula with expm displacement."""
    dim = rho.shape[0]
    disp = expm_displacement(-beta, dim)
    parity = ((-1.0) ** np.arange(dim)).astype(complex)
    shifted = disp @ rho @ disp.conj().T
    return float((2.0 / np.pi) * np.sum(shifted.diagonal() * parity).real)


def holevo_series(alpha_mod: float, terms: int = 200) -> float:
    """Holevo variance of |alpha> from the analytic sharpness series."""
    n = np.arange(terms, dtype=float)
    amps = np.exp(n * np.log(alpha_mod) - 0.5 * gammaln(n + 1.0) - 0.5 * alpha_mod**2)
    mu = float(np.sum(amps[1:] * amps[:-1]))
    return 1.0 / (mu * mu) - 1.0


def bs_generator_unitary(t: float, r: float, dim1: int, dim2: int) -> np.ndarray:
    """Beam splitter exp(θ(a b† − a† b)) with θ = atan2(r, t), via expm.

    Valid for comparisons only on photon-number blocks that fit completely
    inside both truncations (n1 + n2 below both cutoffs), where the truncated
    generator acts exactly like the infinite-dimensional one.
    """
    theta = np.arctan2(r, t)
    a = np.kron(lowering(dim1), np.eye(dim2))
    b = np.kron(np.eye(dim1), lowering(dim2))
    return expm(theta * (a @ b.conj().T - a.conj().T @ b))


def tmsv_amplitudes(xi: float, dim1: int, dim2: int) -> np.ndarray:
    """Two-mode squeezed vacuum Σ tanh^n ξ |n,n> / cosh ξ (mode 0 slow)."""
    amps = np.zeros(dim1 * dim2, dtype=complex)
    for n in range(min(dim1, dim2)):
        amps[n * dim2 + n] = np.tanh(xi) ** n / np.cosh(xi)
    return amps
