"""Driven steady-state photon statistics: g2(0) and mode population.

The right CCW mode is driven coherently (the left one receives the
mirror-mediated feed), the left mode's statistics are read out; both
choices are configurable.  All quantities come from the dense steady state
of the driven rotating-frame generator.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import master
from .errors import StatisticsUndefinedError
from .hilbert import SpaceLayout, cavity_ops, qubit_lowering
from .params import DriveSpec, ModelParams

MIN_FOCK_CUTOFF = 4


@dataclass(frozen=True)
class BlockadeResult:
    """Second-order correlation and population at one drive detuning."""

    detuning: float   # omega_drive - omega_c
    g2: float
    n_L: float


@dataclass
class BlockadeSweep:
    """Per-detuning results plus interpolated extrema of the scan."""

    results: list[BlockadeResult]
    min_g2: float
    min_g2_detuning: float
    max_n_L: float
    max_n_L_detuning: float
    errors: list[tuple[float, str]] = field(default_factory=list)


def _measure_ops(layout: SpaceLayout, measure: str):
    c_l, c_r = cavity_ops(layout)
    return c_l if measure == "cavity_L" else c_r


def _check_preconditions(params: ModelParams, drive: DriveSpec, layout: SpaceLayout):
    if layout.fock_cutoff < MIN_FOCK_CUTOFF:
        raise ValueError(f"photon statistics need fock_cutoff >= {MIN_FOCK_CUTOFF}")
    if params.kappa > 0 and drive.amplitude > 0.1 * params.kappa:
        warnings.warn(
            f"drive amplitude {drive.amplitude:g} exceeds 0.1*kappa; weak-drive "
            "assumptions and the Fock truncation may fail", stacklevel=3)


def _statistics(rho: master.DensityMatrix, c_m: np.ndarray,
                detuning: float) -> BlockadeResult:
    n_op = c_m.conj().T @ c_m
    n_val = rho.expect(n_op).real
    if n_val < 1e-12:
        raise StatisticsUndefinedError(
            f"measured-mode population {n_val:.3e} too small for g2")
    g2_num = rho.expect(c_m.conj().T @ c_m.conj().T @ c_m @ c_m).real
    return BlockadeResult(detuning=float(detuning), g2=float(g2_num / n_val**2),
                          n_L=float(n_val))


def g2_zero(params: ModelParams, drive: DriveSpec, layout: SpaceLayout,
            measure: str = "cavity_L") -> BlockadeResult:
    """Steady-state g2(0) = <c+c+cc>/<c+c>^2 of the measured mode."""
    _check_preconditions(params, drive, layout)
    lv = master.build_liouvillian(params, layout, drive=drive)
    rho = master.steady_state(lv)
    return _statistics(rho, _measure_ops(layout, measure),
                       drive.omega_drive - params.omega_c)


def g2_sweep(params: ModelParams, drive: DriveSpec, detuning_grid,
             layout: SpaceLayout, measure: str = "cavity_L") -> BlockadeSweep:
    """g2(0) and n_L over a grid of drive detunings omega_d - omega_c.

    The generator is affine in the drive frequency (the frame rotation
    shifts every excitation-number term), so the sweep reuses one build.
    Per-point failures are collected and the sweep continues.
    """
    detuning_grid = np.asarray(detuning_grid, dtype=float)
    _check_preconditions(params, drive, layout)
    base_drive = DriveSpec(omega_drive=params.omega_c + detuning_grid[0],
                           amplitude=drive.amplitude, target=drive.target)
    lv0 = master.build_liouvillian(params, layout, drive=base_drive)

    # d L / d omega_d = +i (spre(N_exc) - spost(N_exc))
    c_l, c_r = cavity_ops(layout)
    n_exc = c_l.conj().T @ c_l + c_r.conj().T @ c_r
    for i in range(layout.n_qubits):
        sm = qubit_lowering(layout, i)
        n_exc = n_exc + sm.conj().T @ sm
    k_shift = 1j * (master.spre(n_exc) - master.spost(n_exc))

    c_m = _measure_ops(layout, measure)
    results: list[BlockadeResult] = []
    errors: list[tuple[float, str]] = []
    for det in detuning_grid:
        lmat = lv0.matrix + (det - detuning_grid[0]) * k_shift
        try:
            rho = master.steady_state(lmat)
            results.append(_statistics(rho, c_m, det))
        except Exception as exc:  # collect, keep sweeping
            errors.append((float(det), f"{type(exc).__name__}: {exc}"))
            results.append(BlockadeResult(detuning=float(det), g2=np.nan, n_L=np.nan))

    g2_vals = np.array([r.g2 for r in results])
    nl_vals = np.array([r.n_L for r in results])
    min_det, min_g2 = _interp_extremum(detuning_grid, g2_vals, kind="min")
    max_det, max_nl = _interp_extremum(detuning_grid, nl_vals, kind="max")
    return BlockadeSweep(results=results, min_g2=min_g2, min_g2_detuning=min_det,
                         max_n_L=max_nl, max_n_L_detuning=max_det, errors=errors)


def _interp_extremum(x: np.ndarray, y: np.ndarray, kind: str) -> tuple[float, float]:
    from .numerics import quadratic_extremum

    finite = np.isfinite(y)
    if not finite.any():
        return np.nan, np.nan
    yy = np.where(finite, y, np.inf if kind == "min" else -np.inf)
    i = int(np.argmin(yy) if kind == "min" else np.argmax(yy))
    if 0 < i < len(x) - 1 and finite[i - 1] and finite[i + 1]:
        return quadratic_extremum(x, y, i)
    return float(x[i]), float(y[i])


def critical_coupling(kappa: float, gamma: float) -> float:
    """Strong-coupling threshold sqrt(kappa^2 + gamma^2)/4 of the reference cavity."""
    if kappa < 0 or gamma < 0:
        raise ValueError("rates must be nonnegative")
    return float(np.sqrt(kappa**2 + gamma**2) / 4.0)
