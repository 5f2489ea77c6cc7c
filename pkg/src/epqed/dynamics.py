"""Single-excitation amplitude dynamics, population trapping, concurrence.

Everything here lives in the one-excitation sector: the state is the
amplitude vector p = (<c_L>, <c_R>, <sm_1>, ...), evolved as dp/dt = -i M p
in the frame rotating at omega_c, with the leaked population split into the
waveguide channel (kappa) and the free-space channel (gamma) by explicit
quadrature alongside the amplitudes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RateUndefinedError
from .numerics import local_maxima, log_slope, quadratic_extremum, rk4
from .params import ModelParams
from .spectra import coupling_matrix

PLATEAU_WINDOW = 0.1
PLATEAU_VAR_TOL = 1e-4


def excited_qubit_state(n_qubits: int, index: int = 0) -> np.ndarray:
    """Amplitude vector with qubit `index` excited, all else empty."""
    p = np.zeros(n_qubits + 2, dtype=complex)
    p[2 + index] = 1.0
    return p


@dataclass(frozen=True)
class PopulationSeries:
    """Amplitude trajectories plus per-channel leaked population."""

    times: np.ndarray
    amplitudes: np.ndarray      # shape (T, n+2), order (c_L, c_R, qubits...)
    leaked_kappa: np.ndarray
    leaked_gamma: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def cavity_L(self) -> np.ndarray:
        return self.populations[:, 0]

    @property
    def cavity_R(self) -> np.ndarray:
        return self.populations[:, 1]

    def qubit(self, i: int = 0) -> np.ndarray:
        return self.populations[:, 2 + i]

    @property
    def total(self) -> np.ndarray:
        """Bookkeeping sum: populations + both leaked channels."""
        return self.populations.sum(axis=1) + self.leaked_kappa + self.leaked_gamma


def amplitude_evolve(params: ModelParams, p0: np.ndarray, t_grid,
                     n_qubits: int | None = None,
                     step: float | None = None) -> PopulationSeries:
    """RK4-integrate dp/dt = -i M p (rotating frame at omega_c)."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    p0 = np.asarray(p0, dtype=complex)
    n = n_qubits if n_qubits is not None else p0.size - 2
    if p0.size != n + 2:
        raise ValueError(f"amplitude vector has {p0.size} entries, expected {n + 2}")
    m_rot = coupling_matrix(params, n) - params.omega_c * np.eye(n + 2)
    a = -1j * m_rot
    kappa, gamma = params.kappa, params.gamma
    # waveguide output of the cascade: the two emission paths interfere at
    # the mirror port, adding 2 kappa |r| Re[e^{i phi} p_L p_R*] to the
    # bare kappa (n_L + n_R) loss (this is what -i(M - M^dag) integrates to)
    chiral = kappa * params.r_abs * np.exp(1j * params.phi_prop)
    if step is None:
        scales = [params.g, kappa, gamma, 1.0,
                  max(abs(w - params.omega_c) for w in params.omega0_list(n))]
        step = 0.005 / max(scales)

    def f(_t, y):
        dy = np.empty_like(y)
        dy[:-2] = a @ y[:-2]
        dy[-2] = (kappa * (abs(y[0]) ** 2 + abs(y[1]) ** 2)
                  + 2.0 * np.real(chiral * y[0] * np.conj(y[1])))
        dy[-1] = gamma * np.sum(np.abs(y[2:-2]) ** 2)
        return dy

    y0 = np.concatenate([p0, [0.0, 0.0]])
    out = rk4(f, y0, t_grid, step)
    return PopulationSeries(times=t_grid, amplitudes=out[:, :-2],
                            leaked_kappa=out[:, -2].real,
                            leaked_gamma=out[:, -1].real)


def steady_populations_analytic(g: float, kappa: float) -> tuple[float, float, float]:
    """Trapped-state populations at delta_phi = 0, gamma = 0, resonance:
    (P_e, P_c, P_kappa) = (k^4/(8g^2+k^2)^2, 8g^2k^2/(8g^2+k^2)^2, 8g^2/(8g^2+k^2))."""
    if g <= 0 or kappa <= 0:
        raise ValueError("g and kappa must be positive")
    denom = 8.0 * g * g + kappa * kappa
    p_e = kappa**4 / denom**2
    p_c = 8.0 * g * g * kappa * kappa / denom**2
    p_k = 8.0 * g * g / denom
    return p_e, p_c, p_k


@dataclass(frozen=True)
class PlateauResult:
    """Late-time plateau per component (c_L, c_R, qubits...) and its quality."""

    components: np.ndarray
    converged: bool
    variance: float

    @property
    def cavity(self) -> float:
        return float(self.components[0] + self.components[1])

    @property
    def qubit(self) -> float:
        return float(self.components[2:].sum())


def trapped_population(params: ModelParams, t_final: float | None = None,
                       n_qubits: int = 1, n_samples: int = 2001,
                       step: float | None = None) -> PlateauResult:
    """Long-time trapped populations for an initially excited emitter (gamma = 0).

    Evolves to t_final = 50/min(g, kappa) and averages the last 10% of the
    window; a window variance above 1e-4 marks the plateau as not trapped.
    """
    if params.gamma != 0:
        raise ValueError("population trapping requires gamma = 0")
    if t_final is None:
        t_final = 50.0 / min(params.g, params.kappa)
    t_grid = np.linspace(0.0, t_final, n_samples)
    series = amplitude_evolve(params, excited_qubit_state(n_qubits), t_grid,
                              n_qubits=n_qubits, step=step)
    i0 = int(np.floor((1.0 - PLATEAU_WINDOW) * n_samples))
    window = series.populations[i0:]
    variance = float(window.var(axis=0).max())
    return PlateauResult(components=window.mean(axis=0),
                         converged=variance <= PLATEAU_VAR_TOL,
                         variance=variance)


# ---------------------------------------------------------------------------
# two-qubit entanglement
# ---------------------------------------------------------------------------

def concurrence_series(params: ModelParams, t_grid,
                       step: float | None = None) -> np.ndarray:
    """C(t) = 2 |C_eg(t) C_ge*(t)| for qubit 1 initially excited.

    The parameters must describe two qubits (scalar omega0/phi_azim are
    broadcast; distinct azimuthal phases are honored).
    """
    if params.n_qubits > 2:
        raise ValueError("concurrence is implemented for exactly two qubits")
    series = amplitude_evolve(params, excited_qubit_state(2), t_grid,
                              n_qubits=2, step=step)
    c_eg = series.amplitudes[:, 2]
    c_ge = series.amplitudes[:, 3]
    return 2.0 * np.abs(c_eg) * np.abs(np.conj(c_ge))


def max_concurrence(params: ModelParams, t_grid, step: float | None = None) -> float:
    """max_t C(t), refined by quadratic interpolation around the discrete peak."""
    t_grid = np.asarray(t_grid, dtype=float)
    c = concurrence_series(params, t_grid, step=step)
    i = int(np.argmax(c))
    return quadratic_extremum(t_grid, c, i)[1]


def concurrence_phase_scan(params: ModelParams, t_grid, relative_phases,
                           step: float | None = None) -> np.ndarray:
    """max_t C(t) as the second qubit's azimuthal phase offset is varied."""
    phi1 = params.phi_azim_list(2)[0]
    out = []
    for dphi2 in relative_phases:
        p = params.replace(phi_azim=(phi1, phi1 + float(dphi2)))
        out.append(max_concurrence(p, t_grid, step=step))
    return np.array(out)


def late_decay_rate(times, values, window: tuple[float, float]) -> float:
    """Negated least-squares slope of log(values) on the time window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    if mask.sum() < 2:
        raise RateUndefinedError(f"window [{lo}, {hi}] contains fewer than 2 samples")
    if np.any(values[mask] <= 0):
        raise RateUndefinedError("series must be strictly positive on the window")
    return -log_slope(times[mask], values[mask])


def rabi_peak_envelope(times, values, window: tuple[float, float]):
    """(t, value) of local maxima inside the window (oscillation envelope)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    idx = [i for i in local_maxima(values)
           if window[0] <= times[i] <= window[1]]
    return times[idx], values[idx]
