"""Factories for the initial probe-state families and collective-spin helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import operators as op
from .errors import DegenerateStateError, DomainError, NumericError

# Local inverse temperatures at or above this are treated as the zero-temperature
# limit; the neglected excited population is below 2e-22.
MU_GROUND_CAP = 50.0

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    "r": np.array([1, 1j], dtype=complex) / math.sqrt(2),
    "l": np.array([1, -1j], dtype=complex) / math.sqrt(2),
}

FAMILIES = (
    "product",
    "ghz",
    "identity_mixture",
    "thermal_mixture",
    "k_superposition",
    "squeezed",
    "maximally_mixed",
    "ground",
)


def thermal_populations(mu: float) -> tuple[float, float]:
    """Ground/excited occupation of a qubit with unit level splitting at inverse
    temperature mu (overflow-safe for any mu >= 0)."""
    if not math.isfinite(mu) or mu < 0:
        raise DomainError(f"inverse temperature must be finite and >= 0, got {mu}")
    p0 = 1.0 / (1.0 + math.exp(-mu))
    p1 = 1.0 / (1.0 + math.exp(min(mu, 709.0)))
    return p0, p1


def thermal_population_product(mu: float) -> float:
    """pi0 * pi1 in a form that stays accurate deep in the low-temperature tail."""
    if not math.isfinite(mu) or mu < 0:
        raise DomainError(f"inverse temperature must be finite and >= 0, got {mu}")
    e = math.exp(-mu)
    return e / (1.0 + e) ** 2


def thermal_qubit(mu: float) -> op.DensityMatrix:
    """Diagonal thermal single-qubit state diag(pi0, pi1)."""
    if mu >= MU_GROUND_CAP:
        return op.DensityMatrix(np.diag([1.0, 0.0]).astype(complex), 1)
    p0, p1 = thermal_populations(mu)
    return op.DensityMatrix(np.diag([p0, p1]).astype(complex), 1)


def product_state(a: float, r: float, phi: float = 0.0, n_qubits: int = 1) -> op.DensityMatrix:
    """N-fold tensor power of the generic single-qubit state with excited
    population a, coherence fraction r and coherence phase phi."""
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"population parameter a must lie in [0, 1], got {a}")
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"coherence parameter r must lie in [0, 1], got {r}")
    if not math.isfinite(phi):
        raise DomainError(f"phase must be finite, got {phi}")
    c = math.sqrt(a * (1.0 - a)) * r * np.exp(1j * phi)
    one = np.array([[1.0 - a, c], [np.conj(c), a]], dtype=complex)
    return op.DensityMatrix(op.tensor_power(one, n_qubits), n_qubits)


def ghz_vector(n_qubits: int) -> np.ndarray:
    if n_qubits < 2:
        raise DomainError(f"GHZ state needs at least 2 qubits, got {n_qubits}")
    v = np.zeros(2**n_qubits, dtype=complex)
    v[0] = v[-1] = 1.0 / math.sqrt(2.0)
    return v


def ghz(n_qubits: int) -> op.DensityMatrix:
    return op.from_vector(ghz_vector(n_qubits))


def maximally_mixed(n_qubits: int) -> op.DensityMatrix:
    dim = 2**n_qubits
    return op.DensityMatrix(np.eye(dim, dtype=complex) / dim, n_qubits)


def ground_state(n_qubits: int) -> op.DensityMatrix:
    v = np.zeros(2**n_qubits, dtype=complex)
    v[0] = 1.0
    return op.from_vector(v)


def identity_mixture(eta: float, n_qubits: int) -> op.DensityMatrix:
    """eta-weighted mixture of the GHZ projector with the maximally mixed state."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"mixing weight eta must lie in [0, 1], got {eta}")
    mat = eta * ghz(n_qubits).mat + (1.0 - eta) * maximally_mixed(n_qubits).mat
    return op.DensityMatrix(mat, n_qubits)


def thermal_mixture(eta: float, mu: float, n_qubits: int) -> op.DensityMatrix:
    """Mixture of a thermally weighted GHZ-like superposition with the product
    of local thermal states; every single-qubit reduction is thermal at mu."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"mixing weight eta must lie in [0, 1], got {eta}")
    th = thermal_qubit(mu)
    p0 = float(th.mat[0, 0].real)
    p1 = float(th.mat[1, 1].real)
    v = np.zeros(2**n_qubits, dtype=complex)
    v[0] = math.sqrt(p0)
    v[-1] = math.sqrt(p1)
    pure = np.outer(v, v.conj())
    mat = eta * pure + (1.0 - eta) * op.tensor_power(th.mat, n_qubits)
    return op.DensityMatrix(mat, n_qubits)


def _ghz_overlap(k: str, n_qubits: int) -> complex:
    """<GHZ_N | k>^(tensor N), evaluated in closed form per basis choice."""
    c0, c1 = KET[k]
    return (c0**n_qubits + c1**n_qubits) / math.sqrt(2.0)


def k_superposition(alpha: float, k: str, n_qubits: int) -> op.DensityMatrix:
    """Normalized superposition sin(alpha)|GHZ> + cos(alpha)|k>^N as a projector."""
    k = {"ℓ": "l"}.get(k, k)
    if k not in KET:
        raise DomainError(f"k must be one of {sorted(KET)}, got {k!r}")
    gv = ghz_vector(n_qubits)
    kv = KET[k]
    prod = kv.copy()
    for _ in range(n_qubits - 1):
        prod = np.kron(prod, kv)
    overlap = _ghz_overlap(k, n_qubits)
    direct = complex(np.vdot(gv, prod))
    if abs(overlap - direct) > 1e-12:
        raise NumericError(f"overlap cross-check failed: {overlap} vs {direct}")
    c_sq = 1.0 + 2.0 * math.sin(alpha) * math.cos(alpha) * overlap.real
    if c_sq < 1e-12:
        raise DegenerateStateError(
            f"superposition cancels (norm^2 = {c_sq:.3e}) at alpha={alpha}, k={k!r}"
        )
    v = (math.sin(alpha) * gv + math.cos(alpha) * prod) / math.sqrt(c_sq)
    return op.from_vector(v)


def collective_spin(axis: str, n_qubits: int) -> np.ndarray:
    """Collective operator sum_i sigma_axis^(i) / 2 as a dense 2^N x 2^N matrix."""
    sigma = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}[axis]
    dim = 2**n_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for i in range(n_qubits):
        term = np.eye(1, dtype=complex)
        for j in range(n_qubits):
            term = np.kron(term, sigma if j == i else np.eye(2, dtype=complex))
        total += term / 2.0
    return total


@lru_cache(maxsize=16)
def _jy_eig(n_qubits: int) -> op.EigenDecomposition:
    return op.herm_eig(collective_spin("y", n_qubits))


@lru_cache(maxsize=16)
def _jz_diag(n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    return np.array([(n_qubits - 2 * bin(x).count("1")) / 2.0 for x in range(dim)])


def squeezed_vector(chi: float, theta: float, n_qubits: int) -> np.ndarray:
    """One-axis-twisted coherent state exp(-i theta Jy) exp(-i chi Jz^2) |+>^N."""
    if n_qubits < 1:
        raise DomainError(f"need at least 1 qubit, got {n_qubits}")
    dim = 2**n_qubits
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    psi = np.exp(-1j * chi * _jz_diag(n_qubits) ** 2) * psi
    if theta != 0.0:
        vals, vecs = _jy_eig(n_qubits)
        psi = vecs @ (np.exp(-1j * theta * vals) * (vecs.conj().T @ psi))
    return psi


def squeezed(chi: float, theta: float = 0.0, n_qubits: int = 2) -> op.DensityMatrix:
    return op.from_vector(squeezed_vector(chi, theta, n_qubits))


def reduced_squeezed_closed_form(chi: float, theta: float, n_qubits: int) -> op.DensityMatrix:
    """Closed-form single-qubit reduction of the rotated one-axis-twisted state."""
    if n_qubits < 1:
        raise DomainError(f"need at least 1 qubit, got {n_qubits}")
    c = math.cos(chi) ** (n_qubits - 1)
    mat = 0.5 * np.array(
        [
            [1.0 - c * math.sin(theta), c * math.cos(theta)],
            [c * math.cos(theta), 1.0 + c * math.sin(theta)],
        ],
        dtype=complex,
    )
    return op.DensityMatrix(mat, 1)


def productized(rho: op.DensityMatrix) -> op.DensityMatrix:
    """Tensor product of every single-qubit reduction; strips all correlations
    while preserving each probe's local state."""
    if rho.n_qubits == 1:
        return rho
    parts = [op.partial_trace(rho, {i}).mat for i in range(rho.n_qubits)]
    out = parts[0]
    for piece in parts[1:]:
        out = np.kron(out, piece)
    return op.DensityMatrix(out, rho.n_qubits)


@dataclass(frozen=True)
class StateSpec:
    """Tagged description of an initial-state family and its parameters."""

    family: str
    n_qubits: int = 2
    a: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    eta: float = 1.0
    mu: float = 0.0
    alpha: float = 0.0
    k: str = "+"
    chi: float = 0.0
    theta: float = 0.0

    # which parameters each family actually consumes
    _RELEVANT = {
        "product": ("a", "r", "phi"),
        "ghz": (),
        "identity_mixture": ("eta",),
        "thermal_mixture": ("eta", "mu"),
        "k_superposition": ("alpha", "k"),
        "squeezed": ("chi", "theta"),
        "maximally_mixed": (),
        "ground": (),
    }

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown state family {self.family!r}; expected one of {FAMILIES}")
        if self.n_qubits < 1:
            raise DomainError(f"n_qubits must be >= 1, got {self.n_qubits}")
        rel = self._RELEVANT[self.family]
        checks = {
            "a": (0.0, 1.0, True),
            "r": (0.0, 1.0, True),
            "phi": (0.0, 2.0 * math.pi, False),
            "eta": (0.0, 1.0, True),
            "alpha": (0.0, 2.0 * math.pi, False),
            "chi": (0.0, 2.0 * math.pi, False),
            "theta": (0.0, 2.0 * math.pi, False),
        }
        for name in rel:
            if name == "k":
                if {"ℓ": "l"}.get(self.k, self.k) not in KET:
                    raise DomainError(f"k must be one of {sorted(KET)}, got {self.k!r}")
                continue
            if name == "mu":
                if not math.isfinite(self.mu) or self.mu < 0:
                    raise DomainError(f"mu must be finite and >= 0, got {self.mu}")
                continue
            lo, hi, closed = checks[name]
            val = getattr(self, name)
            ok = lo <= val <= hi if closed else lo <= val < hi
            if not ok:
                kind = "[{}, {}]".format(lo, hi) if closed else "[{}, {})".format(lo, hi)
                raise DomainError(f"{name} must lie in {kind}, got {val}")

    def relevant_params(self) -> dict:
        return {name: getattr(self, name) for name in self._RELEVANT[self.family]}


def min_qubits(family: str) -> int:
    """Smallest ensemble size on which a family is defined."""
    return 2 if family in ("ghz", "identity_mixture", "k_superposition") else 1


def build_state(spec: StateSpec) -> op.DensityMatrix:
    n = spec.n_qubits
    if n < min_qubits(spec.family):
        raise DomainError(f"family {spec.family!r} needs at least {min_qubits(spec.family)} qubits")
    if spec.family == "product":
        return product_state(spec.a, spec.r, spec.phi, n)
    if spec.family == "ghz":
        return ghz(n)
    if spec.family == "identity_mixture":
        return identity_mixture(spec.eta, n)
    if spec.family == "thermal_mixture":
        return thermal_mixture(spec.eta, spec.mu, n)
    if spec.family == "k_superposition":
        return k_superposition(spec.alpha, spec.k, n)
    if spec.family == "squeezed":
        return squeezed(spec.chi, spec.theta, n)
    if spec.family == "maximally_mixed":
        return maximally_mixed(n)
    return ground_state(n)
