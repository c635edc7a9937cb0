"""Fisher-information machinery for bath-temperature estimation.

The central object is the symmetric logarithmic derivative L, obtained by
sandwiching the state derivative between the eigenvectors of the state and
dividing by eigenvalue-pair sums on the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import operators as op
from .channel import (
    BathSpec,
    channel_params,
    d_evolve_dbeta,
    evolve_ensemble,
    evolve_ensemble_lindblad,
    kraus_dbeta,
    kraus_ops,
)
from .errors import ContractError, DomainError
from .states import StateSpec, build_state, thermal_population_product

# Relative eigenvalue-pair cutoff below which SLD components are dropped.
SLD_CUTOFF_REL = 1e-12
# Derivative weight outside the state's support above this flags an unreliable QFI.
SUPPORT_WARN_TOL = 1e-8
# A time peak counts as a genuine transient only this far above the asymptote.
PEAK_EXCESS_REL = 1e-6


@dataclass(frozen=True)
class SldResult:
    operator: np.ndarray
    qfi: float
    support_rank: int
    residual: float
    support_warning: bool


def sld(rho: op.DensityMatrix, drho: np.ndarray, cutoff: float | None = None) -> SldResult:
    """Solve 0.5 {rho, L} = drho on the support of rho and evaluate the QFI."""
    drho = np.asarray(drho, dtype=complex)
    if drho.shape != rho.mat.shape:
        raise DomainError(f"shape mismatch: {drho.shape} vs {rho.mat.shape}")
    if np.max(np.abs(drho - drho.conj().T)) > 1e-8:
        raise ContractError("state derivative must be Hermitian")
    if abs(drho.trace()) > 1e-8:
        raise ContractError("state derivative must be traceless")

    vals, vecs = op.herm_eig(rho.mat)
    if vals[0] < -op.PSD_TOL:
        raise ContractError(f"state has eigenvalue {vals[0]:.3e} below the PSD tolerance")
    vals = np.clip(vals, 0.0, None)
    cut = SLD_CUTOFF_REL * vals[-1] if cutoff is None else cutoff

    d_eig = vecs.conj().T @ drho @ vecs
    denom = vals[:, None] + vals[None, :]
    keep = denom > cut
    l_eig = np.zeros_like(d_eig)
    l_eig[keep] = 2.0 * d_eig[keep] / denom[keep]
    qfi = float(np.sum(2.0 * np.abs(d_eig[keep]) ** 2 / denom[keep]))
    operator = vecs @ l_eig @ vecs.conj().T

    resid_mat = drho - 0.5 * (rho.mat @ operator + operator @ rho.mat)
    resid_eig = vecs.conj().T @ resid_mat @ vecs
    residual = float(np.max(np.abs(resid_eig[keep]))) if keep.any() else 0.0
    dropped = np.abs(d_eig)[~keep]
    warning = bool(dropped.size and dropped.max() > SUPPORT_WARN_TOL)
    rank = int(np.count_nonzero(vals > cut))
    return SldResult(operator, qfi, rank, residual, warning)


def qfi_of_state(
    rho_in: op.DensityMatrix, bath: BathSpec, t: float, lab_frame: bool = False
) -> float:
    """QFI for bath inverse temperature after evolving a fixed input for time t."""
    if t == 0.0:
        return 0.0
    evolve = evolve_ensemble_lindblad if lab_frame else evolve_ensemble
    rho_out = evolve(rho_in, bath, t)
    drho = d_evolve_dbeta(rho_in, bath, t, lab_frame=lab_frame)
    return sld(rho_out, drho).qfi


def qfi_at(spec: StateSpec, bath: BathSpec, t: float) -> float:
    return qfi_of_state(build_state(spec), bath, t)


def thermal_asymptote(bath: BathSpec, n_qubits: int) -> float:
    """Long-time QFI limit: N times the energy variance of the local thermal state."""
    return n_qubits * thermal_population_product(bath.beta)


def cramer_rao(qfi: float, nu: int = 1) -> float:
    """Best attainable standard deviation of the estimate after nu repetitions."""
    if nu < 1:
        raise DomainError(f"repetition count must be >= 1, got {nu}")
    if qfi < 0:
        raise DomainError(f"QFI must be nonnegative, got {qfi}")
    if qfi == 0:
        return math.inf
    return 1.0 / math.sqrt(nu * qfi)


@dataclass(frozen=True)
class BoundReport:
    """Channel-information matrices at the canonical Kraus representation."""

    beta: float
    gamma: float
    t: float
    m1: np.ndarray
    m2: np.ndarray
    m1_norm: float
    m2_norm: float

    def bound_value(self, n_qubits: int) -> float:
        return 4.0 * (n_qubits * self.m1_norm + n_qubits * (n_qubits - 1) * self.m2_norm**2)


def m1_m2(bath: BathSpec, t: float) -> BoundReport:
    """First- and second-moment matrices of the Kraus derivatives; their norms
    bound the QFI of any input state evolved for time t."""
    ks = kraus_ops(channel_params(bath, t))
    dks = kraus_dbeta(bath, t)
    m1 = sum(dk.conj().T @ dk for dk in dks)
    m2 = 1j * sum(dk.conj().T @ k for dk, k in zip(dks, ks))
    return BoundReport(
        beta=bath.beta,
        gamma=bath.gamma,
        t=t,
        m1=m1,
        m2=m2,
        m1_norm=op.op_norm(m1),
        m2_norm=op.op_norm(m2),
    )


@dataclass(frozen=True)
class TimePeak:
    t_peak: float
    peak_value: float
    asymptote: float
    has_transient_peak: bool


def _parabolic_vertex(ts, vs, i):
    t0, t1, t2 = ts[i - 1], ts[i], ts[i + 1]
    v0, v1, v2 = vs[i - 1], vs[i], vs[i + 1]
    denom = (t1 - t0) * (v1 - v2) - (t1 - t2) * (v1 - v0)
    if abs(denom) < 1e-300:
        return None
    num = (t1 - t0) ** 2 * (v1 - v2) - (t1 - t2) ** 2 * (v1 - v0)
    tv = t1 - 0.5 * num / denom
    if not (t0 <= tv <= t2):
        return None
    return tv


def max_qfi_over_time(state, bath: BathSpec, time_grid) -> TimePeak:
    """Grid argmax of the QFI with one parabolic refinement around the peak."""
    rho_in = build_state(state) if isinstance(state, StateSpec) else state
    ts = np.asarray(time_grid, dtype=float)
    if ts.size == 0:
        raise DomainError("time grid must be nonempty")
    vs = np.array([qfi_of_state(rho_in, bath, t) for t in ts])
    i = int(np.argmax(vs))
    t_peak, peak = float(ts[i]), float(vs[i])
    if 0 < i < ts.size - 1:
        tv = _parabolic_vertex(ts, vs, i)
        if tv is not None:
            qv = qfi_of_state(rho_in, bath, float(tv))
            if qv > peak:
                t_peak, peak = float(tv), qv
    asym = thermal_asymptote(bath, rho_in.n_qubits)
    return TimePeak(t_peak, peak, asym, peak > asym * (1.0 + PEAK_EXCESS_REL))


@dataclass(frozen=True)
class VQuantifier:
    param: str
    lo: float
    hi: float
    v_max: float
    v_min: float
    v: float


def v_quantifier(
    spec: StateSpec, param: str, lo: float, hi: float, bath: BathSpec, time_grid
) -> VQuantifier:
    """Relative change of the time-maximal QFI between the endpoints of one
    state parameter, all other parameters held fixed."""
    peak_hi = max_qfi_over_time(replace(spec, **{param: hi}), bath, time_grid).peak_value
    peak_lo = max_qfi_over_time(replace(spec, **{param: lo}), bath, time_grid).peak_value
    if peak_hi == 0.0:
        raise DomainError("quantifier undefined: the QFI maximum at the upper endpoint is 0")
    return VQuantifier(param, lo, hi, peak_hi, peak_lo, (peak_hi - peak_lo) / peak_hi)
