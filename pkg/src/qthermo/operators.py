"""Dense operator algebra for multi-qubit density matrices.

Convention used everywhere in this package: qubit 0 is the leftmost tensor
factor, so computational-basis index i enumerates bitstrings with qubit 0 as
the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ContractError, DomainError

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


def _as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated N-qubit density matrix (Hermitian, unit trace, PSD)."""

    mat: np.ndarray
    n_qubits: int

    def __post_init__(self):
        mat = _as_complex(self.mat)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        dim = 2**self.n_qubits
        if mat.shape != (dim, dim):
            raise ContractError(
                f"expected shape {(dim, dim)} for {self.n_qubits} qubits, got {mat.shape}"
            )
        herm = np.max(np.abs(mat - mat.conj().T))
        if herm > HERM_TOL:
            raise ContractError(f"matrix is not Hermitian: max |A - A^H| = {herm:.3e}")
        tr = mat.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractError(f"trace must be 1, got {tr}")
        lo = np.linalg.eigvalsh(mat).min()
        if lo < -PSD_TOL:
            raise ContractError(f"matrix is not PSD: min eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns


def from_matrix(mat) -> DensityMatrix:
    """Wrap a raw matrix, inferring the qubit count from its dimension."""
    mat = _as_complex(mat)
    n = int(round(np.log2(mat.shape[0])))
    if 2**n != mat.shape[0]:
        raise DomainError(f"dimension {mat.shape[0]} is not a power of two")
    return DensityMatrix(mat, n)


def from_vector(psi) -> DensityMatrix:
    """Density matrix of a pure state; the vector is normalized first."""
    psi = _as_complex(psi).ravel()
    norm = np.linalg.norm(psi)
    if norm < 1e-14:
        raise DomainError("cannot normalize the zero vector")
    psi = psi / norm
    return from_matrix(np.outer(psi, psi.conj()))


def kron(a, b) -> np.ndarray:
    return np.kron(_as_complex(a), _as_complex(b))


def tensor_power(a, n: int) -> np.ndarray:
    if n < 1:
        raise DomainError("tensor power requires n >= 1")
    out = _as_complex(a)
    for _ in range(n - 1):
        out = np.kron(out, a)
    return out


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every qubit not listed in `keep` (order of kept qubits preserved)."""
    keep = sorted(set(keep))
    n = rho.n_qubits
    if not keep:
        raise DomainError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise DomainError(f"keep indices {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    t = rho.mat.reshape((2,) * (2 * n))
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=t.ndim // 2 + q)
    dim = 2 ** len(keep)
    return DensityMatrix(t.reshape(dim, dim), len(keep))


def partial_transpose(rho, qubit: int) -> np.ndarray:
    """Transpose the row/column indices of one qubit; output stays Hermitian.

    Accepts a DensityMatrix or a raw square matrix (the output is generally
    not PSD, so applying the map twice goes through the raw form).
    """
    if isinstance(rho, DensityMatrix):
        mat, n = rho.mat, rho.n_qubits
    else:
        mat = _as_complex(rho)
        n = int(round(np.log2(mat.shape[0])))
        if 2**n != mat.shape[0]:
            raise DomainError(f"dimension {mat.shape[0]} is not a power of two")
    if not 0 <= qubit < n:
        raise DomainError(f"qubit {qubit} out of range for {n} qubits")
    t = mat.reshape((2,) * (2 * n))
    t = np.swapaxes(t, qubit, n + qubit)
    return t.reshape(mat.shape)


def herm_eig(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = _as_complex(h)
    dev = np.max(np.abs(h - h.conj().T))
    if dev > 1e-8:
        raise ContractError(f"herm_eig requires a Hermitian input: max |A - A^H| = {dev:.3e}")
    vals, vecs = np.linalg.eigh(h)
    return EigenDecomposition(vals, vecs)


def op_norm(a) -> float:
    """Operator norm (largest singular value), via the spectrum of A^H A."""
    a = _as_complex(a)
    gram = a.conj().T @ a
    vals = np.linalg.eigvalsh(gram)
    return float(np.sqrt(max(vals[-1], 0.0)))


def _check_kraus_complete(kraus: Sequence[np.ndarray], tol: float = 1e-10) -> None:
    acc = np.zeros((2, 2), dtype=complex)
    for k in kraus:
        k = _as_complex(k)
        if k.shape != (2, 2):
            raise DomainError("local Kraus operators must be 2x2")
        acc += k.conj().T @ k
    dev = np.max(np.abs(acc - np.eye(2)))
    if dev > tol:
        raise ContractError(f"Kraus set is not trace-preserving: max |sum K^H K - I| = {dev:.3e}")


def _apply_kraus_raw(mat: np.ndarray, kraus: Sequence[np.ndarray], qubit: int, n: int) -> np.ndarray:
    """sum_a K_a rho K_a^H with each 2x2 K acting on one qubit of a raw matrix."""
    t = mat.reshape((2,) * (2 * n))
    out = np.zeros_like(t)
    for k in kraus:
        k = _as_complex(k)
        a = np.moveaxis(np.tensordot(k, t, axes=([1], [qubit])), 0, qubit)
        b = np.moveaxis(np.tensordot(a, k.conj(), axes=([n + qubit], [1])), -1, n + qubit)
        out += b
    return out.reshape(mat.shape)


def apply_local_kraus(rho: DensityMatrix, kraus: Sequence[np.ndarray], qubit: int) -> DensityMatrix:
    """Apply a single-qubit Kraus channel to one qubit of an N-qubit state."""
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise DomainError(f"qubit {qubit} out of range for {n} qubits")
    _check_kraus_complete(kraus)
    return DensityMatrix(_apply_kraus_raw(rho.mat, kraus, qubit, n), n)
