"""Single-excitation eigenstructure and the emission spectrum.

The (n+2) x (n+2) non-Hermitian coupling matrix generates the amplitude
equations dp/dt = -i M p with p = (<c_L>, <c_R>, <sm_1>, ...).  Its
eigenvalues carry the polariton energies and decays; purely real
eigenvalues are atom-photon bound states.  The emission spectrum follows
from the same susceptibilities as the spectral density, through the
frequency-dependent Lamb shift and local coupling strength.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CooperativityUndefinedError, NoBicError
from .ldos import SpectrumSeries, chi_dp, chi_ep, transparency_detuning
from .numerics import local_maxima, quadratic_extremum
from .params import ModelParams

DEFECT_EIGVAL_TOL = 1e-6   # relative eigenvalue gap treated as coalescent
DEFECT_OVERLAP_TOL = 1e-6  # 1 - |<v_i|v_j>| below this marks vector coalescence


@dataclass(frozen=True)
class EigenMode:
    """One eigenmode: energy, right eigenvector, Hopfield weights, label."""

    value: complex
    vector: np.ndarray
    hopfield: np.ndarray
    label: int
    degenerate: bool = False

    @property
    def cavity_weight(self) -> float:
        """Summed Hopfield weight of the two cavity modes."""
        return float(self.hopfield[0] + self.hopfield[1])

    @property
    def qubit_weight(self) -> float:
        """Summed Hopfield weight of the qubit components."""
        return float(self.hopfield[2:].sum())


def coupling_matrix(params: ModelParams, n_qubits: int | None = None) -> np.ndarray:
    """Non-Hermitian matrix of the single-excitation amplitude equations.

    Component order (c_L, c_R, sm_1 .. sm_n); the only asymmetric entry is
    the unidirectional feed (c_R <- c_L) = -i kappa |r| e^{i phi_prop}.
    """
    n = n_qubits if n_qubits is not None else params.n_qubits
    omega0 = params.omega0_list(n)
    phi = params.phi_azim_list(n)
    m = np.zeros((n + 2, n + 2), dtype=complex)
    m[0, 0] = params.omega_c - 0.5j * params.kappa
    m[1, 1] = params.omega_c - 0.5j * params.kappa
    m[1, 0] = -1j * params.kappa * params.r_abs * np.exp(1j * params.phi_prop)
    for i in range(n):
        q = 2 + i
        m[q, q] = omega0[i] - 0.5j * params.gamma
        m[0, q] = params.g * np.exp(-1j * phi[i])
        m[1, q] = params.g * np.exp(1j * phi[i])
        m[q, 0] = params.g * np.exp(1j * phi[i])
        m[q, 1] = params.g * np.exp(-1j * phi[i])
    return m


def _match_to_previous(vecs: np.ndarray, previous: list[EigenMode]) -> list[int]:
    """Greedy max-|overlap| assignment of new columns to previous modes."""
    overlaps = np.abs(np.array([m.vector for m in previous]).conj() @ vecs)
    order = [-1] * len(previous)
    taken: set[int] = set()
    for prev_i in np.argsort(-overlaps.max(axis=1)):
        for cand in np.argsort(-overlaps[prev_i]):
            if cand not in taken:
                order[prev_i] = int(cand)
                taken.add(int(cand))
                break
    return order


def eigenmodes(m: np.ndarray, previous: list[EigenMode] | None = None) -> list[EigenMode]:
    """Eigendecomposition with continuity labels and EP (defectiveness) flags.

    Labels follow ascending real part on the first call and maximal
    eigenvector overlap with `previous` afterwards.  A coalescent pair
    (eigenvalues and eigenvectors both merged to tolerance) is flagged
    degenerate and its second vector replaced by a generalized eigenvector.
    """
    m = np.asarray(m, dtype=complex)
    vals, vecs = np.linalg.eig(m)
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    n = len(vals)

    degenerate = [False] * n
    scale = max(1.0, np.abs(vals).max())
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(vals[i] - vals[j])
            if gap > max(1e-10, DEFECT_EIGVAL_TOL * scale):
                continue
            if 1.0 - abs(np.vdot(vecs[:, i], vecs[:, j])) > DEFECT_OVERLAP_TOL:
                continue  # degenerate but diagonalizable (e.g. two uncoupled modes)
            degenerate[i] = degenerate[j] = True
            lam = 0.5 * (vals[i] + vals[j])
            gen, *_ = np.linalg.lstsq(m - lam * np.eye(n), vecs[:, i], rcond=None)
            norm = np.linalg.norm(gen)
            if norm > 0:
                vecs[:, j] = gen / norm

    if previous is None:
        order = list(np.argsort(vals.real))
        labels = list(range(n))
    else:
        order = _match_to_previous(vecs, previous)
        labels = [mode.label for mode in previous]

    modes = []
    for lab, col in zip(labels, order):
        v = vecs[:, col]
        hop = np.abs(v) ** 2
        hop = hop / hop.sum()
        modes.append(EigenMode(value=complex(vals[col]), vector=v, hopfield=hop,
                               label=lab, degenerate=degenerate[col]))
    return modes


def eigenmode_sweep(matrices) -> list[list[EigenMode]]:
    """Label-continuous eigenmodes along a parameter sweep."""
    out: list[list[EigenMode]] = []
    prev = None
    for m in matrices:
        prev = eigenmodes(m, previous=prev)
        out.append(prev)
    return out


def approx_eigenvalues(params: ModelParams) -> tuple[complex, complex, complex]:
    """Second-order eigenvalue expansions (resonant case, relative to omega_c).

    w_{1,2} = +-sqrt(2) g + (kappa/4) sin(dphi) - i[(cos(dphi)+1) kappa + gamma]/4
    w_3     = (kappa/2) sin(dphi) [cos(dphi)/C - 1] - i (kappa/2)[cos(dphi) - 1]

    with C = 8 g^2 / (kappa gamma); implemented verbatim, validity limits
    included (no resummation).
    """
    if params.g <= 0:
        raise ValueError("approximate eigenvalues need g > 0")
    if params.gamma <= 0:
        raise CooperativityUndefinedError(
            "cooperativity in w_3 undefined for gamma = 0")
    dphi = params.delta_phi
    kappa, gamma, g = params.kappa, params.gamma, params.g
    coop = 8.0 * g * g / (kappa * gamma)
    split = np.sqrt(2.0) * g
    shift = (kappa / 4.0) * np.sin(dphi)
    decay = -0.25j * ((np.cos(dphi) + 1.0) * kappa + gamma)
    w1 = -split + shift + decay
    w2 = split + shift + decay
    w3 = ((kappa / 2.0) * np.sin(dphi) * (np.cos(dphi) / coop - 1.0)
          - 0.5j * kappa * (np.cos(dphi) - 1.0))
    return complex(w1), complex(w2), complex(w3)


# ---------------------------------------------------------------------------
# emission spectrum
# ---------------------------------------------------------------------------

def lamb_shift(omega, params: ModelParams):
    """Photonic Lamb shift: real part of the emitter self-energy.

    Sigma(omega) = pi g^2 (chi_dp + chi_ep); the pi restores the golden-rule
    normalization Gamma(omega_c) = C gamma (Purcell factor C + 1) and places
    the Rabi doublet at +-sqrt(2) g, consistent with the exact eigenvalues.
    """
    return np.pi * params.g**2 * np.real(chi_dp(omega, params) + chi_ep(omega, params))


def local_coupling(omega, params: ModelParams):
    """Local coupling strength -2 Im[Sigma(omega)] = 2 pi J(omega)."""
    return (-2.0 * np.pi * params.g**2
            * np.imag(chi_dp(omega, params) + chi_ep(omega, params)))


def se_spectrum(omega_grid, params: ModelParams) -> SpectrumSeries:
    """Emission spectrum of an initially excited emitter."""
    if params.gamma < 0:
        raise ValueError("gamma must be >= 0")
    w = np.asarray(omega_grid, dtype=float)
    gamma_w = params.gamma + local_coupling(w, params)
    shift = lamb_shift(w, params)
    omega0 = params.omega0_list()[0]
    s = (1.0 / np.pi) * gamma_w / ((w - omega0 - shift) ** 2 + (gamma_w / 2.0) ** 2)
    return SpectrumSeries(w, s)


def spectrum_peaks(series: SpectrumSeries, n_peaks: int | None = None):
    """Local maxima (quadratically refined), strongest first."""
    idx = local_maxima(series.value)
    peaks = [quadratic_extremum(series.omega, series.value, i) for i in idx]
    peaks.sort(key=lambda p: -p[1])
    return peaks if n_peaks is None else peaks[:n_peaks]


# ---------------------------------------------------------------------------
# bound-state conditions
# ---------------------------------------------------------------------------

def delta_phi_bic(g: float, kappa: float) -> float:
    """Phase difference of the interference bound state: 2 arccos(kappa/(2 sqrt2 g))."""
    arg = kappa / (2.0 * np.sqrt(2.0) * g)
    if arg > 1.0:
        raise NoBicError(f"no bound state: need 2 sqrt(2) g >= kappa (got ratio {arg:.3f})")
    return float(2.0 * np.arccos(arg))


def delta_omega_bic(g: float, kappa: float, delta_phi: float) -> float:
    """Optimal emitter-cavity detuning (2 g^2/kappa) sin(dphi) + transparency point."""
    return (2.0 * g * g / kappa) * np.sin(delta_phi) + transparency_detuning(delta_phi, kappa)


def min_decay(params: ModelParams, delta_phi: float) -> float:
    """Minimum eigenmode decay min_i(-Im w_i) at the bound-state detuning."""
    d0c = delta_omega_bic(params.g, params.kappa, delta_phi)
    p = params.replace(phi_prop=float(delta_phi), phi_azim=0.0,
                       omega0=params.omega_c + d0c)
    vals = np.linalg.eigvals(coupling_matrix(p, n_qubits=1))
    return float(np.min(-vals.imag))
