"""Local thermalization channel for qubit probes coupled to a heat bath.

The single-qubit map drives populations toward the bath's thermal occupation
with rate |lambda| while coherences decay at half that rate.  The production
path uses the rotating-frame (Kraus) form; the lab-frame form carries an extra
bath-independent oscillation on the coherences and is kept as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as op
from .errors import DomainError, NumericError
from .states import thermal_population_product, thermal_populations


@dataclass(frozen=True)
class BathSpec:
    """Bath inverse temperature and single-probe coupling rate."""

    beta: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be finite and > 0, got {self.beta}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be finite and > 0, got {self.gamma}")

    @property
    def lam(self) -> float:
        """Population relaxation exponent; always negative."""
        return -self.gamma / math.tanh(self.beta / 2.0)


@dataclass(frozen=True)
class ChannelParams:
    """Instantaneous channel parameters: mixing p, fixed-point ground weight q."""

    p: float
    q: float
    lam: float
    t: float


@dataclass(frozen=True)
class LindbladRates:
    decay: float  # qubit relaxation |1> -> |0>
    excitation: float  # thermal excitation |0> -> |1>
    n_thermal: float


def lindblad_rates(bath: BathSpec) -> LindbladRates:
    n = 1.0 / math.expm1(bath.beta)
    return LindbladRates(decay=bath.gamma * (n + 1.0), excitation=bath.gamma * n, n_thermal=n)


def channel_params(bath: BathSpec, t: float) -> ChannelParams:
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"time must be finite and >= 0, got {t}")
    q, _ = thermal_populations(bath.beta)
    lam = bath.lam
    p = -math.expm1(lam * t)
    return ChannelParams(p=p, q=q, lam=lam, t=t)


def _survival(params: ChannelParams) -> tuple[float, float]:
    """(1 - p, sqrt(1 - p)); 1 - p cancels catastrophically when p -> 1, so use
    exp(lam t) whenever the stored (p, lam, t) triple is self-consistent."""
    e_pop = math.exp(params.lam * params.t)
    if abs((1.0 - params.p) - e_pop) <= 1e-12:
        return e_pop, math.exp(params.lam * params.t / 2.0)
    rest = max(1.0 - params.p, 0.0)
    return rest, math.sqrt(rest)


def kraus_ops(params: ChannelParams) -> list[np.ndarray]:
    p, q = params.p, params.q
    _, s1p = _survival(params)
    sp = math.sqrt(p)
    sq, s1q = math.sqrt(q), math.sqrt(1.0 - q)
    return [
        sq * np.array([[1.0, 0.0], [0.0, s1p]], dtype=complex),
        sq * np.array([[0.0, sp], [0.0, 0.0]], dtype=complex),
        s1q * np.array([[s1p, 0.0], [0.0, 1.0]], dtype=complex),
        s1q * np.array([[0.0, 0.0], [sp, 0.0]], dtype=complex),
    ]


def kraus_dbeta(bath: BathSpec, t: float) -> list[np.ndarray]:
    """Entrywise d/d(beta) of the four Kraus operators (chain rule through p, q).

    Singular where p hits 0 or 1 exactly; use the superoperator derivative
    (d_evolve_dbeta) for state evolution instead.
    """
    params = channel_params(bath, t)
    p, q = params.p, params.q
    if p <= 0.0 or p >= 1.0:
        raise NumericError(f"Kraus derivative is singular at p={p} (need 0 < p < 1)")
    dq = thermal_population_product(bath.beta)
    dlam = dlambda_dbeta(bath)
    dp = -t * math.exp(params.lam * t) * dlam
    sp, s1p = math.sqrt(p), math.sqrt(1.0 - p)
    sq, s1q = math.sqrt(q), math.sqrt(1.0 - q)
    x1 = dq / (2.0 * sq)
    y = dp / (2.0 * s1p)
    z = dp / (2.0 * sp)
    w = dq / (2.0 * s1q)
    return [
        np.array([[x1, 0.0], [0.0, s1p * x1 - sq * y]], dtype=complex),
        np.array([[0.0, sp * x1 + sq * z], [0.0, 0.0]], dtype=complex),
        np.array([[-s1p * w - s1q * y, 0.0], [0.0, -w]], dtype=complex),
        np.array([[0.0, 0.0], [s1q * z - sp * w, 0.0]], dtype=complex),
    ]


def dlambda_dbeta(bath: BathSpec) -> float:
    if bath.beta < 1e-6:
        raise DomainError(f"beta={bath.beta} too close to 0 for the rate derivative")
    return bath.gamma / (2.0 * math.sinh(bath.beta / 2.0) ** 2)


def _map_blocks(mat: np.ndarray, qubit: int, n: int, fn) -> np.ndarray:
    """Apply a linear map to the 2x2 fiber of one qubit of a raw 2^N x 2^N matrix."""
    t = mat.reshape((2,) * (2 * n))
    t = np.moveaxis(t, (qubit, n + qubit), (0, 1))
    o00, o01, o10, o11 = fn(t[0, 0], t[0, 1], t[1, 0], t[1, 1])
    out = np.stack([np.stack([o00, o01]), np.stack([o10, o11])])
    out = np.moveaxis(out, (0, 1), (qubit, n + qubit))
    return np.ascontiguousarray(out).reshape(mat.shape)


def _channel_fn(e_pop: float, q: float, coh: complex):
    """Superoperator blocks: populations relax with weight e_pop = exp(lam t),
    coherences scale by coh (sqrt(e_pop), times a phase in the lab frame)."""

    def fn(b00, b01, b10, b11):
        tr = b00 + b11
        return (
            e_pop * b00 + q * (1.0 - e_pop) * tr,
            coh * b01,
            np.conj(coh) * b10,
            e_pop * b11 + (1.0 - q) * (1.0 - e_pop) * tr,
        )

    return fn


def _dchannel_fn(e_pop: float, q: float, de: float, dq: float, dcoh: complex):
    def fn(b00, b01, b10, b11):
        tr = b00 + b11
        return (
            de * (b00 - q * tr) + dq * (1.0 - e_pop) * tr,
            dcoh * b01,
            np.conj(dcoh) * b10,
            de * (b11 - (1.0 - q) * tr) - dq * (1.0 - e_pop) * tr,
        )

    return fn


def _coeffs(bath: BathSpec, t: float, lab_frame: bool):
    q, _ = thermal_populations(bath.beta)
    lam = bath.lam
    e_pop = math.exp(lam * t)
    coh = math.sqrt(e_pop) * (np.exp(-1j * t) if lab_frame else 1.0)
    return q, e_pop, coh


def evolve_single_closed(rho1: op.DensityMatrix, params: ChannelParams) -> op.DensityMatrix:
    """Closed-form single-qubit channel action for given (p, q)."""
    if rho1.n_qubits != 1:
        raise DomainError("expected a single-qubit state")
    e_pop, s1p = _survival(params)
    fn = _channel_fn(e_pop, params.q, s1p)
    return op.DensityMatrix(_map_blocks(rho1.mat, 0, 1, fn), 1)


def evolve_single_lindblad(rho1: op.DensityMatrix, bath: BathSpec, t: float) -> op.DensityMatrix:
    """Master-equation solution including the coherent phase on the coherences."""
    if rho1.n_qubits != 1:
        raise DomainError("expected a single-qubit state")
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"time must be finite and >= 0, got {t}")
    q, e_pop, coh = _coeffs(bath, t, lab_frame=True)
    return op.DensityMatrix(_map_blocks(rho1.mat, 0, 1, _channel_fn(e_pop, q, coh)), 1)


def evolve_ensemble(rho: op.DensityMatrix, bath: BathSpec, t: float) -> op.DensityMatrix:
    """Apply the local channel independently to every qubit (Kraus form)."""
    ks = kraus_ops(channel_params(bath, t))
    out = rho
    for qubit in range(rho.n_qubits):
        out = op.apply_local_kraus(out, ks, qubit)
    return out


def evolve_ensemble_lindblad(rho: op.DensityMatrix, bath: BathSpec, t: float) -> op.DensityMatrix:
    """Lab-frame variant of evolve_ensemble; differs only by coherence phases."""
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"time must be finite and >= 0, got {t}")
    q, e_pop, coh = _coeffs(bath, t, lab_frame=True)
    fn = _channel_fn(e_pop, q, coh)
    mat = rho.mat
    for qubit in range(rho.n_qubits):
        mat = _map_blocks(mat, qubit, rho.n_qubits, fn)
    return op.DensityMatrix(mat, rho.n_qubits)


def d_evolve_dbeta(
    rho_in: op.DensityMatrix,
    bath: BathSpec,
    t: float,
    method: str = "analytic",
    lab_frame: bool = False,
    fd_step: float = 1e-6,
) -> np.ndarray:
    """d/d(beta) of the evolved ensemble state, for a beta-independent input.

    The analytic route applies the product rule across the N local channels,
    differentiating one local map at a time.  The finite-difference route is a
    central difference in beta and exists as a cross-check oracle.
    """
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"time must be finite and >= 0, got {t}")
    n = rho_in.n_qubits
    if method == "finite_difference":
        if bath.beta <= fd_step:
            raise DomainError(f"beta={bath.beta} must exceed the step {fd_step}")
        evolve = evolve_ensemble_lindblad if lab_frame else evolve_ensemble
        hi = evolve(rho_in, BathSpec(bath.beta + fd_step, bath.gamma), t)
        lo = evolve(rho_in, BathSpec(bath.beta - fd_step, bath.gamma), t)
        return (hi.mat - lo.mat) / (2.0 * fd_step)
    if method != "analytic":
        raise DomainError(f"unknown derivative method {method!r}")

    q, e_pop, coh = _coeffs(bath, t, lab_frame)
    dq = thermal_population_product(bath.beta)
    dlam = dlambda_dbeta(bath)
    de = t * e_pop * dlam
    dcoh = 0.5 * t * math.sqrt(e_pop) * dlam * (np.exp(-1j * t) if lab_frame else 1.0)
    chan = _channel_fn(e_pop, q, coh)
    dchan = _dchannel_fn(e_pop, q, de, dq, dcoh)

    total = np.zeros_like(rho_in.mat)
    for i in range(n):
        term = rho_in.mat
        for j in range(n):
            term = _map_blocks(term, j, n, dchan if j == i else chan)
        total = total + term
    return total
