"""Shared fixtures and independent brute-force oracles used across the suite."""

from __future__ import annotations

import numpy as np
import pytest

from qthermo.channel import BathSpec
from qthermo.operators import DensityMatrix
from qthermo.states import StateSpec

# Representative member of every state family at N=2.
FAMILY_SPECS = [
    StateSpec("product", 2, a=0.3, r=0.8, phi=0.7),
    StateSpec("ghz", 2),
    StateSpec("identity_mixture", 2, eta=0.7),
    StateSpec("thermal_mixture", 2, eta=0.5, mu=1.0),
    StateSpec("k_superposition", 2, alpha=0.9, k="+"),
    StateSpec("k_superposition", 2, alpha=1.2, k="r"),
    StateSpec("squeezed", 2, chi=0.9, theta=0.4),
    StateSpec("maximally_mixed", 2),
    StateSpec("ground", 2),
]

BETAS = (0.3, 0.5, 1.0)


@pytest.fixture(params=FAMILY_SPECS, ids=lambda s: s.family + ("" if s.k == "+" else "_" + s.k))
def family_spec(request) -> StateSpec:
    return request.param


@pytest.fixture
def bath() -> BathSpec:
    return BathSpec(0.5, 1.0)


def random_density(n_qubits: int, seed: int) -> DensityMatrix:
    """Full-rank random state from a seeded complex Wishart draw."""
    rng = np.random.default_rng(seed)
    dim = 2**n_qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = g @ g.conj().T
    return DensityMatrix(mat / mat.trace(), n_qubits)


# ---------------------------------------------------------------------------
# brute-force oracles (index arithmetic only; independent of qthermo internals)


def _qubit_bit(index: int, qubit: int, n: int) -> int:
    return (index >> (n - 1 - qubit)) & 1


def brute_partial_trace(mat: np.ndarray, n: int, keep) -> np.ndarray:
    keep = sorted(keep)
    traced = [q for q in range(n) if q not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for i in range(dk):
        for j in range(dk):
            for m in range(2 ** len(traced)):
                row = col = 0
                for pos, q in enumerate(keep):
                    row |= _qubit_bit(i, pos, len(keep)) << (n - 1 - q)
                    col |= _qubit_bit(j, pos, len(keep)) << (n - 1 - q)
                for pos, q in enumerate(traced):
                    bit = _qubit_bit(m, pos, len(traced))
                    row |= bit << (n - 1 - q)
                    col |= bit << (n - 1 - q)
                out[i, j] += mat[row, col]
    return out


def brute_partial_transpose(mat: np.ndarray, n: int, qubit: int) -> np.ndarray:
    dim = 2**n
    out = np.zeros_like(mat)
    shift = n - 1 - qubit
    for i in range(dim):
        for j in range(dim):
            ib = (i >> shift) & 1
            jb = (j >> shift) & 1
            i2 = (i & ~(1 << shift)) | (jb << shift)
            j2 = (j & ~(1 << shift)) | (ib << shift)
            out[i2, j2] = mat[i, j]
    return out


def brute_full_kraus_sum(mat: np.ndarray, kraus, n: int) -> np.ndarray:
    """Explicit 4^N-term tensor-product Kraus sum."""
    import itertools

    out = np.zeros_like(mat)
    for combo in itertools.product(kraus, repeat=n):
        big = combo[0]
        for k in combo[1:]:
            big = np.kron(big, k)
        out += big @ mat @ big.conj().T
    return out


def brute_negative_eigvals_sum(pt_mat: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(pt_mat)
    return float(abs(vals[vals < 0].sum()))
