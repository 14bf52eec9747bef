"""Lindblad generator assembly, propagation and steady states.

The master equation

    d rho / dt = -(i/hbar) [H, rho]
                 + sum_k gamma_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho})

is vectorized by column stacking, vec(A X B) = (B^T kron A) vec(X).  The
stored generator is in energy units: every rate enters as hbar * gamma (eV),
so the matrix has entries of order of the Hamiltonian and the kernel /
spectrum computations stay at machine precision.  Propagation applies the
single factor of hbar: rho(t) = exp(G t / hbar) rho(0).

Default propagation is spectral (one diagonalization, exact in t, stable
for spans from 1e-3 to 1e9 ns); a scaling-and-squaring fallback engages
when the eigenbasis is ill-conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    DomainError,
    NonUniqueSteadyStateError,
    NumericalFailureError,
    PreconditionViolationError,
)
from .hilbert import CompositeBasis, DensityMatrix, photon_annihilation, transition
from .model import HBAR_EV_NS, RateParams

EIGENBASIS_COND_LIMIT = 1e12
STEADY_RESIDUAL_TOL = 1e-9  # on the energy-unit generator
_EXPM_DOUBLING_RTOL = 1e-8

# Ordered dissipative channels: (label, rate attribute, jump operator builder).
_CHANNELS = (
    ("pump", "gamma_p", lambda b: photon_annihilation(b).conj().T),
    ("cavity_loss", "gamma_c", photon_annihilation),
    ("donor_decay", "gamma_d", lambda b: transition(b, "donor", "S1", "S0")),
    ("acceptor_decay", "gamma_a", lambda b: transition(b, "acceptor", "S1", "S0")),
    ("internal_conversion", "gamma_ic", lambda b: transition(b, "acceptor", "T1", "S0")),
    ("intersystem_crossing", "gamma_isc", lambda b: transition(b, "acceptor", "S1", "T1")),
)


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacked vector of a matrix."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vec, dtype=complex).reshape((dim, dim), order="F")


@dataclass
class Liouvillian:
    """Vectorized Lindblad generator in energy units (eV)."""

    dim: int
    matrix: np.ndarray
    channels: tuple[tuple[str, float], ...]  # (label, rate in GHz), fixed order
    basis: CompositeBasis | None = field(default=None, repr=False)
    _spectral_cache: tuple | None = field(default=None, repr=False, compare=False)

    def spectral(self):
        """Eigendecomposition (evals, V, LU of V, cond(V)); cached."""
        if self._spectral_cache is None:
            evals, vecs = np.linalg.eig(self.matrix)
            cond = np.linalg.cond(vecs)
            lu = None
            if np.isfinite(cond) and cond <= EIGENBASIS_COND_LIMIT:
                lu = scipy.linalg.lu_factor(vecs)
            self._spectral_cache = (evals, vecs, lu, cond)
        return self._spectral_cache

    def rate(self, label: str) -> float:
        for name, value in self.channels:
            if name == label:
                return value
        raise KeyError(label)


@dataclass
class Trajectory:
    """Propagated states on a strictly increasing time grid (ns)."""

    times: np.ndarray
    states: list[DensityMatrix]
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def phase_labels(self) -> list[str]:
        return self.metadata.get("phase_labels", ["" for _ in self.times])


def _dissipator_block(jump: np.ndarray, dim: int) -> np.ndarray:
    ident = np.eye(dim, dtype=complex)
    ldl = jump.conj().T @ jump
    block = np.kron(jump.conj(), jump)
    block -= 0.5 * np.kron(ident, ldl)
    block -= 0.5 * np.kron(ldl.T, ident)
    return block


def build_liouvillian(
    hamiltonian: np.ndarray,
    rates: RateParams,
    basis: CompositeBasis,
) -> Liouvillian:
    """Assemble the generator for the six standard channels.

    The Hamiltonian must be hermitian and match the basis dimension.  Rates
    (GHz) are converted once to energies via hbar, so the returned matrix is
    in eV; see the module docstring.
    """
    dim = basis.dim
    h = np.asarray(hamiltonian, dtype=complex)
    if h.shape != (dim, dim):
        raise DimensionMismatchError(
            f"Hamiltonian shape {h.shape} does not match basis dim {dim}"
        )
    herm = np.max(np.abs(h - h.conj().T))
    if herm > 1e-10 * max(1.0, np.max(np.abs(h))):
        raise DomainError(f"Hamiltonian not hermitian: max asymmetry {herm:.3e}")

    ident = np.eye(dim, dtype=complex)
    gen = -1j * (np.kron(ident, h) - np.kron(h.T, ident))
    channel_list = []
    for label, attr, builder in _CHANNELS:
        gamma = getattr(rates, attr)
        channel_list.append((label, gamma))
        if gamma > 0.0:
            gen += (HBAR_EV_NS * gamma) * _dissipator_block(builder(basis), dim)
    return Liouvillian(dim=dim, matrix=gen, channels=tuple(channel_list), basis=basis)


def _check_times(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1 or t.size == 0:
        raise DomainError("times must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(t)) or t[0] < 0:
        raise DomainError("times must be finite and >= 0")
    if t.size > 1 and not np.all(np.diff(t) > 0):
        raise DomainError("times must be strictly increasing")
    return t


def _finalize_state(raw: np.ndarray, basis, context: str) -> DensityMatrix:
    # The flow preserves hermiticity exactly; symmetrizing only removes
    # eigensolver roundoff, never physics.
    rho = 0.5 * (raw + raw.conj().T)
    state = DensityMatrix(rho, basis)
    try:
        state.validate()
    except DomainError as exc:
        raise NumericalFailureError(f"{context}: propagated state invalid ({exc})") from exc
    return state


def _cleaned_spectrum(liou: Liouvillian, evals: np.ndarray) -> np.ndarray:
    # A Lindblad generator's spectrum lies in the closed left half-plane and
    # contains an exact zero (the steady state).  Eigensolver noise of order
    # eps*||G|| on those exact values decays or rotates the conserved
    # component catastrophically once multiplied by t/hbar ~ 1e15, so clamp:
    # positive real parts to zero, and eigenvalues within the rank-detection
    # tolerance of zero to exactly zero.  Physical slow modes (~hbar*gamma_ic)
    # sit orders of magnitude above that tolerance.
    smax = np.max(np.abs(evals)) if evals.size else 0.0
    zero_tol = liou.dim ** 2 * np.finfo(float).eps * max(smax, 1e-300)
    lam = np.minimum(evals.real, 0.0) + 1j * evals.imag
    lam[np.abs(evals) <= zero_tol] = 0.0
    return lam


def _propagate_spectral(liou: Liouvillian, v0: np.ndarray, times: np.ndarray):
    evals, vecs, lu, cond = liou.spectral()
    if lu is None:
        raise NumericalFailureError(
            f"eigenbasis condition number {cond:.3e} exceeds {EIGENBASIS_COND_LIMIT:.0e}"
        )
    lam = _cleaned_spectrum(liou, evals)
    coeff = scipy.linalg.lu_solve(lu, v0)
    trace_row = vectorize(np.eye(liou.dim)).conj()
    out = []
    for t in times:
        phases = np.exp(lam * (t / HBAR_EV_NS))
        v = vecs @ (phases * coeff)
        # The flow conserves the trace exactly; the reconstruction does not
        # quite, and the residue grows with exp(lambda t) cancellations.
        # Project it back, refusing steps where it stops being a polish.
        tr = trace_row @ v
        if abs(tr - 1.0) > 1e-6:
            raise NumericalFailureError(f"spectral trace drift {abs(tr - 1.0):.3e} at t={t:g} ns")
        out.append(v / tr)
    return out


def _propagate_expm(liou: Liouvillian, v0: np.ndarray, times: np.ndarray):
    trace_row = vectorize(np.eye(liou.dim)).conj()
    out = []
    v = v0
    t_prev = 0.0
    for t in times:
        dt = (t - t_prev) / HBAR_EV_NS
        if dt > 0:
            full = scipy.linalg.expm(liou.matrix * dt) @ v
            half_prop = scipy.linalg.expm(liou.matrix * (dt / 2))
            doubled = half_prop @ (half_prop @ v)
            err = np.linalg.norm(full - doubled)
            if err > _EXPM_DOUBLING_RTOL * max(1.0, np.linalg.norm(doubled)):
                raise NumericalFailureError(
                    f"expm step-doubling mismatch {err:.3e} at t={t:g} ns"
                )
            v = doubled
            # Scaling-and-squaring drifts the exactly-conserved trace by a
            # scalar factor at huge ||G dt||; project it back and refuse the
            # step when the correction is no longer a small perturbation.
            tr = trace_row @ v
            if abs(tr - 1.0) > 1e-6:
                raise NumericalFailureError(
                    f"expm trace drift {abs(tr - 1.0):.3e} at t={t:g} ns"
                )
            v = v / tr
        out.append(v)
        t_prev = t
    return out


def propagate(
    liou: Liouvillian,
    rho0: DensityMatrix,
    times,
    method: str | None = None,
) -> Trajectory:
    """Evolve rho0 to each requested time (ns, strictly increasing, >= 0).

    method: None for automatic (spectral with expm fallback), or force
    "spectral" / "expm".  Every returned state is validated against the
    density-matrix invariants; irrecoverable violations raise
    NumericalFailureError with diagnostics.
    """
    if rho0.matrix.shape != (liou.dim, liou.dim):
        raise DimensionMismatchError(
            f"state dim {rho0.matrix.shape[0]} does not match generator dim {liou.dim}"
        )
    rho0.validate()
    t = _check_times(times)
    v0 = vectorize(rho0.matrix)

    attempts = []
    if method in (None, "spectral"):
        attempts.append(("spectral", _propagate_spectral))
    if method in (None, "expm"):
        attempts.append(("expm", _propagate_expm))
    if not attempts:
        raise DomainError(f"unknown propagation method {method!r}")

    last_error: Exception | None = None
    for name, runner in attempts:
        try:
            raws = runner(liou, v0, t)
            states = [
                _finalize_state(unvectorize(v, liou.dim), rho0.basis, f"{name} t={ti:g} ns")
                for v, ti in zip(raws, t)
            ]
            return Trajectory(times=t, states=states, metadata={"method": name})
        except NumericalFailureError as exc:
            last_error = exc
            continue
    raise NumericalFailureError(f"all propagation methods failed: {last_error}")


def steady_state(liou: Liouvillian) -> DensityMatrix:
    """Trace-one kernel state of the generator.

    Requires a one-dimensional kernel and a bounded photon number
    (pump weaker than cavity loss); residual ||G vec(rho)|| <= 1e-9 in the
    generator's energy units.
    """
    rates = dict(liou.channels)
    if rates.get("pump", 0.0) > 0.0 and rates["pump"] >= rates.get("cavity_loss", 0.0):
        raise PreconditionViolationError(
            f"pump rate {rates['pump']} GHz >= cavity loss {rates.get('cavity_loss', 0.0)} GHz: "
            "photon number is unbounded in the untruncated model"
        )

    d2 = liou.dim ** 2
    svals = scipy.linalg.svdvals(liou.matrix)
    smax = svals[0] if svals[0] > 0 else 1.0
    rank_tol = d2 * np.finfo(float).eps * smax
    kernel_dim = int(np.sum(svals <= rank_tol))
    if kernel_dim != 1:
        raise NonUniqueSteadyStateError(kernel_dim)

    # Constrained least squares: minimize ||G x|| subject (softly) to tr x = 1.
    # The kernel is the only direction with tiny ||G x||, so the trace row
    # just pins the scale; solved once more after normalization for polish.
    trace_row = vectorize(np.eye(liou.dim)).reshape(1, -1)
    stacked = np.vstack([liou.matrix, smax * trace_row])
    rhs = np.zeros(d2 + 1, dtype=complex)
    rhs[-1] = smax
    x, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)

    rho = unvectorize(x, liou.dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = rho.trace()
    if abs(tr) < 1e-6:
        raise NumericalFailureError("kernel vector is numerically traceless")
    rho = rho / tr

    residual = np.linalg.norm(liou.matrix @ vectorize(rho))
    if residual > STEADY_RESIDUAL_TOL:
        raise NumericalFailureError(
            f"steady-state residual {residual:.3e} exceeds {STEADY_RESIDUAL_TOL:g}"
        )
    state = DensityMatrix(rho, liou.basis)
    state.validate()
    return state


def dump_generator_csv(liou: Liouvillian, path) -> None:
    """Debug dump: row-major CSV with alternating re,im columns."""
    with open(path, "w", newline="") as fh:
        for row in liou.matrix:
            cells = []
            for z in row:
                cells.append(f"{z.real:.9g}")
                cells.append(f"{z.imag:.9g}")
            fh.write(",".join(cells) + "\n")
