"""Liouvillian of the extended cascaded master equation and its solvers.

The equation of motion contains the usual Jaynes-Cummings pieces (qubit(s)
coupled to both CCW modes with position phases e^{-+i phi_i}), independent
decay channels gamma L[sm_i], kappa L[c_L], kappa L[c_R], and the
unidirectional mirror-mediated term

    kappa |r| ( e^{i phi} [c_L rho, c_R^dag] + e^{-i phi} [c_R, rho c_L^dag] )

which feeds the left mode's output into the right mode without backaction.

Vectorization is column-stacking throughout: vec(A rho B) = (B^T kron A) vec(rho).
Undriven problems are generated in the frame rotating at omega_c; driven ones
in the frame rotating at the drive frequency, so the superoperator is always
time independent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import AccuracyError, BuildError, DegenerateSteadyStateError
from .hilbert import SpaceLayout
from .params import DriveSpec, ModelParams

TRACE_TOL = 1e-10
HERM_TOL = 1e-12
EIG_TOL = 1e-10
TRACE_DRIFT_LIMIT = 1e-8


# ---------------------------------------------------------------------------
# vectorization helpers (column stacking)
# ---------------------------------------------------------------------------

def vectorize(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def spre(a: np.ndarray) -> np.ndarray:
    """Superoperator of left multiplication: vec(a rho)."""
    return np.kron(np.eye(a.shape[0], dtype=complex), a)


def spost(b: np.ndarray) -> np.ndarray:
    """Superoperator of right multiplication: vec(rho b)."""
    return np.kron(b.T, np.eye(b.shape[0], dtype=complex))


def lindblad_dissipator(op: np.ndarray) -> np.ndarray:
    """L[O]rho = O rho O^dag - {O^dag O, rho}/2 as a superoperator."""
    od = op.conj().T
    odo = od @ op
    return spre(op) @ spost(od) - 0.5 * (spre(odo) + spost(odo))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state (validated)."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        herm = np.abs(m - m.conj().T).max()
        if herm > HERM_TOL:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {tr!r}")
        lo = np.linalg.eigvalsh(m).min()
        if lo < -EIG_TOL:
            raise ValueError(f"negative eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def expect(self, op: np.ndarray) -> complex:
        return hilbert.expect(op, self.entries)

    @classmethod
    def from_ket(cls, ket: np.ndarray) -> "DensityMatrix":
        k = np.asarray(ket, dtype=complex)
        k = k / np.linalg.norm(k)
        return cls(np.outer(k, k.conj()))


def vacuum_state(layout: SpaceLayout) -> DensityMatrix:
    return DensityMatrix.from_ket(hilbert.product_ket(layout, (0,) * layout.n_qubits))


def _clean(raw: np.ndarray) -> DensityMatrix:
    m = 0.5 * (raw + raw.conj().T)
    return DensityMatrix(m / np.trace(m).real)


# ---------------------------------------------------------------------------
# Liouvillian construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Liouvillian:
    """Built superoperator with its provenance and a recommended RK4 step."""

    matrix: np.ndarray
    layout: SpaceLayout
    params: ModelParams
    drive: DriveSpec | None
    frame: float
    step: float

    @property
    def dim(self) -> int:
        return self.layout.dim


def default_step(params: ModelParams, drive: DriveSpec | None = None,
                 frame: float | None = None) -> float:
    """Fixed RK4 step 0.005 / (largest rate or detuning in the generator)."""
    if frame is None:
        frame = drive.omega_drive if drive is not None else params.omega_c
    scales = [params.g, params.kappa, params.gamma, 1.0,
              abs(params.omega_c - frame)]
    scales += [abs(w0 - frame) for w0 in params.omega0_list()]
    if drive is not None:
        scales.append(drive.amplitude)
    return 0.005 / max(scales)


def build_liouvillian(params: ModelParams, layout: SpaceLayout,
                      drive: DriveSpec | None = None,
                      frame: float | None = None) -> Liouvillian:
    """Assemble L with vec(drho/dt) = L vec(rho).

    frame overrides the rotation frequency (None = omega_drive when driven,
    else omega_c; pass 0.0 for the lab frame).
    """
    n = layout.n_qubits
    if n > 0 and params.n_qubits not in (1, n):
        raise BuildError(
            f"params describe {params.n_qubits} qubits but layout has {n}")
    if frame is None:
        frame = drive.omega_drive if drive is not None else params.omega_c

    c_l, c_r = hilbert.cavity_ops(layout)
    n_l = c_l.conj().T @ c_l
    n_r = c_r.conj().T @ c_r

    h = (params.omega_c - frame) * (n_l + n_r)
    lmat = np.zeros((layout.dim**2, layout.dim**2), dtype=complex)
    if n > 0:
        omega0 = params.omega0_list(n)
        phi = params.phi_azim_list(n)
        for i in range(n):
            sm = hilbert.qubit_lowering(layout, i)
            sp = sm.conj().T
            h = h + (omega0[i] - frame) * (sp @ sm)
            h = h + params.g * (np.exp(-1j * phi[i]) * (c_l.conj().T @ sm)
                                + np.exp(1j * phi[i]) * (sp @ c_l))
            h = h + params.g * (np.exp(1j * phi[i]) * (c_r.conj().T @ sm)
                                + np.exp(-1j * phi[i]) * (sp @ c_r))
            lmat += params.gamma * lindblad_dissipator(sm)
    if drive is not None:
        c_d = c_l if drive.target == "cavity_L" else c_r
        h = h + drive.amplitude * (c_d + c_d.conj().T)

    lmat += -1j * (spre(h) - spost(h))
    lmat += params.kappa * (lindblad_dissipator(c_l) + lindblad_dissipator(c_r))

    if params.r_abs > 0.0 and params.kappa > 0.0:
        ph = np.exp(1j * params.phi_prop)
        k_r = params.kappa * params.r_abs
        lmat += k_r * ph * (spre(c_l) @ spost(c_r.conj().T) - spre(c_r.conj().T @ c_l))
        lmat += k_r * np.conj(ph) * (spre(c_r) @ spost(c_l.conj().T) - spost(c_l.conj().T @ c_r))

    return Liouvillian(matrix=lmat, layout=layout, params=params, drive=drive,
                       frame=frame, step=default_step(params, drive, frame))


def _as_matrix_and_step(lv, step: float | None, t_grid) -> tuple[np.ndarray, float]:
    if isinstance(lv, Liouvillian):
        return lv.matrix, (step if step is not None else lv.step)
    m = np.asarray(lv, dtype=complex)
    if step is None:
        dt = np.diff(np.asarray(t_grid, dtype=float))
        fallback = 0.05 / max(1.0, np.abs(m).max())
        step = min(fallback, dt.min()) if len(dt) else fallback
    return m, step


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

def _rk4_samples(lmat: np.ndarray, x0: np.ndarray, t_grid: np.ndarray,
                 step: float) -> np.ndarray:
    """Integrate dx/dt = L x with fixed substeps, sampling at t_grid."""
    out = np.empty((len(t_grid), x0.size), dtype=complex)
    x = x0.astype(complex).copy()
    t = t_grid[0]
    out[0] = x
    for k in range(1, len(t_grid)):
        span = t_grid[k] - t
        nsub = max(1, int(np.ceil(span / step - 1e-12)))
        h = span / nsub
        for _ in range(nsub):
            k1 = lmat @ x
            k2 = lmat @ (x + 0.5 * h * k1)
            k3 = lmat @ (x + 0.5 * h * k2)
            k4 = lmat @ (x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t_grid[k]
        out[k] = x
    return out


@dataclass
class EvolutionResult:
    """Sequence of states plus raw-integration drift diagnostics."""

    times: np.ndarray
    states: list[DensityMatrix]
    max_trace_drift: float
    max_hermiticity_defect: float

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)

    def expect(self, op: np.ndarray) -> np.ndarray:
        return np.array([s.expect(op) for s in self.states])


def evolve(lv, rho0, t_grid, step: float | None = None) -> EvolutionResult:
    """RK4-integrate vec(drho/dt) = L vec(rho) over an ascending time grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be ascending and start at t >= 0")
    lmat, step = _as_matrix_and_step(lv, step, t_grid)
    rho0 = rho0.entries if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    raw = _rk4_samples(lmat, vectorize(rho0), t_grid, step)

    mats = raw.reshape(len(t_grid), dim, dim).transpose(0, 2, 1)  # order="F" unvec
    traces = np.einsum("kii->k", mats).real
    drift = np.abs(traces - 1.0).max()
    if drift > TRACE_DRIFT_LIMIT:
        raise AccuracyError(
            f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_LIMIT:g}; "
            f"retry with step {step / 2:g}", suggested_step=step / 2)
    herm = max(np.abs(m - m.conj().T).max() for m in mats)
    states = [_clean(m) for m in mats]
    return EvolutionResult(times=t_grid, states=states, max_trace_drift=float(drift),
                           max_hermiticity_defect=float(herm))


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------

def steady_state(lv, kernel_tol: float = 1e-8) -> DensityMatrix:
    """Solve L vec(rho) = 0 with Tr(rho) = 1 by a rank-completed dense solve.

    Raises DegenerateSteadyStateError when the kernel is more than
    one-dimensional within kernel_tol (relative singular-value threshold),
    e.g. for gamma = 0 undriven configurations supporting bound states.
    """
    lmat = lv.matrix if isinstance(lv, Liouvillian) else np.asarray(lv, dtype=complex)
    n2 = lmat.shape[0]
    dim = int(round(np.sqrt(n2)))
    a = lmat.copy()
    trace_row = np.zeros(n2, dtype=complex)
    trace_row[:: dim + 1] = 1.0
    a[0, :] = trace_row
    b = np.zeros(n2, dtype=complex)
    b[0] = 1.0
    try:
        v = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        v = None
    residual = np.inf
    if v is not None and np.all(np.isfinite(v)):
        residual = float(np.linalg.norm(lmat @ v))
    if residual > 1e-10:
        # slow path: classify the failure via the kernel dimension
        svals = np.linalg.svd(lmat, compute_uv=False)
        null_dim = int(np.sum(svals < kernel_tol * svals[0]))
        if null_dim > 1:
            raise DegenerateSteadyStateError(
                f"Liouvillian kernel is {null_dim}-dimensional; steady state not unique "
                "(bound states conserve population; use time evolution instead)")
        raise AccuracyError(f"steady-state residual {residual:.3e} exceeds 1e-10")
    return _clean(unvectorize(v, dim))


# ---------------------------------------------------------------------------
# two-time correlations (quantum regression theorem)
# ---------------------------------------------------------------------------

def two_time_correlation(lv, rho, a_op: np.ndarray, b_op: np.ndarray,
                         tau_grid, step: float | None = None) -> np.ndarray:
    """<A(0) B(tau)> = Tr{ B exp(L tau)[rho A] } on the given tau grid."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    lmat, step = _as_matrix_and_step(lv, step, tau_grid)
    rho = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    x0 = vectorize(rho @ a_op)
    raw = _rk4_samples(lmat, x0, tau_grid, step)
    xs = raw.reshape(len(tau_grid), dim, dim).transpose(0, 2, 1)
    return np.einsum("ij,kji->k", np.asarray(b_op, dtype=complex), xs)


# ---------------------------------------------------------------------------
# Fock-cutoff convergence
# ---------------------------------------------------------------------------

def convergence_check(params: ModelParams, layout: SpaceLayout, observable,
                      t_grid, drive: DriveSpec | None = None,
                      initial_state=None, tol: float = 1e-6,
                      step: float | None = None) -> tuple[bool, float]:
    """Repeat an expectation-value trajectory at cutoff N and N+1.

    observable and initial_state are callables of the layout (the operator
    and state must be rebuilt for each cutoff); initial_state defaults to
    the vacuum.  Returns (converged, max absolute deviation).
    """
    if initial_state is None:
        initial_state = vacuum_state
    series = []
    for cutoff in (layout.fock_cutoff, layout.fock_cutoff + 1):
        lay = SpaceLayout(layout.n_qubits, cutoff)
        lv = build_liouvillian(params, lay, drive=drive)
        result = evolve(lv, initial_state(lay), t_grid, step=step)
        series.append(result.expect(observable(lay)).real)
    deviation = float(np.abs(series[0] - series[1]).max())
    return deviation <= tol, deviation
