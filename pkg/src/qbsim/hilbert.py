"""Composite Hilbert space: cavity mode x donor x acceptor.

The basis is |n, alpha_D, alpha_A> with Fock levels n = 0..n_max, a
two-level donor (S0, S1) and a three-level acceptor (S0, T1, S1).
Flattened index convention:

    index(n, d, a) = n * 6 + d * 3 + a

so the global ground state |0, S0, S0> is index 0.  All operators are
dense complex numpy arrays built for one fixed cutoff; arrays from
different cutoffs do not compose (shape mismatch raises).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, DomainError, InvalidCutoffError, InvalidLevelError

DONOR_LEVELS = ("S0", "S1")
ACCEPTOR_LEVELS = ("S0", "T1", "S1")

# Invariant tolerances for physical states.
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-9
POSITIVITY_ATOL = 1e-9


@dataclass(frozen=True)
class CompositeBasis:
    """Fixed-cutoff product basis with the flattened index convention above."""

    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise InvalidCutoffError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return (self.n_max + 1) * len(DONOR_LEVELS) * len(ACCEPTOR_LEVELS)

    def _donor_index(self, level) -> int:
        if isinstance(level, str):
            if level not in DONOR_LEVELS:
                raise InvalidLevelError(f"donor has levels {DONOR_LEVELS}, got {level!r}")
            return DONOR_LEVELS.index(level)
        if level not in range(len(DONOR_LEVELS)):
            raise InvalidLevelError(f"donor level index out of range: {level!r}")
        return int(level)

    def _acceptor_index(self, level) -> int:
        if isinstance(level, str):
            if level not in ACCEPTOR_LEVELS:
                raise InvalidLevelError(f"acceptor has levels {ACCEPTOR_LEVELS}, got {level!r}")
            return ACCEPTOR_LEVELS.index(level)
        if level not in range(len(ACCEPTOR_LEVELS)):
            raise InvalidLevelError(f"acceptor level index out of range: {level!r}")
        return int(level)

    def index(self, n: int, donor, acceptor) -> int:
        """Flattened index of |n, donor, acceptor>.  Levels by label or index."""
        if not 0 <= n <= self.n_max:
            raise InvalidLevelError(f"photon number {n} outside 0..{self.n_max}")
        d = self._donor_index(donor)
        a = self._acceptor_index(acceptor)
        return n * 6 + d * 3 + a

    def unindex(self, i: int) -> tuple[int, str, str]:
        """Inverse of index(); returns (n, donor_label, acceptor_label)."""
        if not 0 <= i < self.dim:
            raise InvalidLevelError(f"basis index {i} outside 0..{self.dim - 1}")
        n, rest = divmod(i, 6)
        d, a = divmod(rest, 3)
        return n, DONOR_LEVELS[d], ACCEPTOR_LEVELS[a]


def photon_annihilation(basis: CompositeBasis) -> np.ndarray:
    """Cavity annihilation operator a (x) 1 (x) 1 at the basis cutoff."""
    nph = basis.n_max + 1
    a_fock = np.zeros((nph, nph), dtype=complex)
    for n in range(1, nph):
        a_fock[n - 1, n] = np.sqrt(n)
    return np.kron(a_fock, np.eye(6, dtype=complex))


def photon_number(basis: CompositeBasis) -> np.ndarray:
    """Number operator a^dag a, diagonal in the product basis."""
    a = photon_annihilation(basis)
    return a.conj().T @ a


def transition(basis: CompositeBasis, site: str, from_level, to_level) -> np.ndarray:
    """Electronic transition |to><from| on one site, identity elsewhere.

    Partial isometry: T^dag T is the projector onto the source level.
    """
    if site == "donor":
        nlev = len(DONOR_LEVELS)
        src = basis._donor_index(from_level)
        dst = basis._donor_index(to_level)
        local = np.zeros((nlev, nlev), dtype=complex)
        local[dst, src] = 1.0
        site_op = np.kron(local, np.eye(len(ACCEPTOR_LEVELS), dtype=complex))
    elif site == "acceptor":
        nlev = len(ACCEPTOR_LEVELS)
        src = basis._acceptor_index(from_level)
        dst = basis._acceptor_index(to_level)
        local = np.zeros((nlev, nlev), dtype=complex)
        local[dst, src] = 1.0
        site_op = np.kron(np.eye(len(DONOR_LEVELS), dtype=complex), local)
    else:
        raise InvalidLevelError(f"site must be 'donor' or 'acceptor', got {site!r}")
    return np.kron(np.eye(basis.n_max + 1, dtype=complex), site_op)


def level_projector(basis: CompositeBasis, site: str, level) -> np.ndarray:
    """Projector onto one electronic level of one site."""
    return transition(basis, site, level, level)


def excitation_number(basis: CompositeBasis) -> np.ndarray:
    """Total excitation operator N = a^dag a + P_D(S1) + P_A(S1) + P_A(T1).

    Commutes with the rotating-wave Hamiltonian; <G|N|G> = 0.
    """
    return (
        photon_number(basis)
        + level_projector(basis, "donor", "S1")
        + level_projector(basis, "acceptor", "S1")
        + level_projector(basis, "acceptor", "T1")
    )


@dataclass
class DensityMatrix:
    """System state as a dense complex matrix with physicality invariants.

    validate() enforces hermiticity (1e-10 elementwise), unit trace (1e-9)
    and positivity (min eigenvalue >= -1e-9).
    """

    matrix: np.ndarray
    basis: CompositeBasis | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def ground_state(cls, basis: CompositeBasis) -> "DensityMatrix":
        rho = np.zeros((basis.dim, basis.dim), dtype=complex)
        rho[0, 0] = 1.0
        return cls(rho, basis)

    @classmethod
    def pure(cls, basis: CompositeBasis, state) -> "DensityMatrix":
        """Pure state from a basis index or a normalized amplitude vector."""
        if isinstance(state, (int, np.integer)):
            vec = np.zeros(basis.dim, dtype=complex)
            vec[int(state)] = 1.0
        else:
            vec = np.asarray(state, dtype=complex)
            if vec.shape != (basis.dim,):
                raise DimensionMismatchError(
                    f"state vector has shape {vec.shape}, basis dim is {basis.dim}"
                )
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise DomainError("cannot normalize the zero vector")
            vec = vec / norm
        return cls(np.outer(vec, vec.conj()), basis)

    def validate(self) -> "DensityMatrix":
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITICITY_ATOL:
            raise DomainError(f"state not hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise DomainError(f"state trace {tr!r} deviates from 1 beyond {TRACE_ATOL}")
        evals = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if evals.min() < -POSITIVITY_ATOL:
            raise DomainError(f"state not positive: min eigenvalue = {evals.min():.3e}")
        return self

    def expectation(self, operator: np.ndarray) -> float:
        """Real part of Tr[rho O]; raises on cutoff mismatch."""
        if operator.shape != self.matrix.shape:
            raise DimensionMismatchError(
                f"operator shape {operator.shape} does not match state dim {self.dim}"
            )
        return float(np.trace(self.matrix @ operator).real)
