"""State diagnostics tracked alongside the QFI during scans."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as op
from .errors import DomainError

# Partial-transpose eigenvalues above this (negative) threshold count as zero.
NEGATIVITY_EIG_TOL = -1e-12


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    purity: float
    negativity: float
    local_temperature: float
    local_coherence: float


def negativity(rho: op.DensityMatrix, qubit: int = 0) -> float:
    """Entanglement negativity across the cut (qubit | rest)."""
    pt = op.partial_transpose(rho, qubit)
    vals = np.linalg.eigvalsh(pt)
    return float(abs(vals[vals <= NEGATIVITY_EIG_TOL].sum()))


def purity(rho: op.DensityMatrix) -> float:
    return float(np.trace(rho.mat @ rho.mat).real)


def local_temperature(rho1: op.DensityMatrix) -> float:
    """Effective temperature read off a single qubit's populations.

    Sentinels: +inf for equal populations, 0.0 for the ground state, -0.0 for
    full population inversion (zero temperature approached from below).
    """
    if rho1.n_qubits != 1:
        raise DomainError("local temperature is defined for a single-qubit state")
    excited = float(rho1.mat[1, 1].real)
    if excited <= 0.0:
        return 0.0
    if excited >= 1.0:
        return -0.0
    d = math.log((1.0 - excited) / excited)
    if d == 0.0:
        return math.inf
    return 1.0 / d


def local_coherence(rho1: op.DensityMatrix) -> float:
    if rho1.n_qubits != 1:
        raise DomainError("local coherence is defined for a single-qubit state")
    return float(abs(rho1.mat[0, 1]))


def probe(rho: op.DensityMatrix, t: float, qubit: int = 0) -> DiagnosticsRow:
    """All diagnostics of one evolved state; negativity is 0 for a lone qubit."""
    reduced = op.partial_trace(rho, {qubit}) if rho.n_qubits > 1 else rho
    neg = negativity(rho, qubit) if rho.n_qubits > 1 else 0.0
    return DiagnosticsRow(
        t=t,
        purity=purity(rho),
        negativity=neg,
        local_temperature=local_temperature(reduced),
        local_coherence=local_coherence(reduced),
    )
