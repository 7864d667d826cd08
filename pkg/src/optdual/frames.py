"""Finite frames, their duals and the null-space projector.

A dictionary is stored as an ``n x d`` matrix whose columns are the atoms.
Every dual frame ``Dt`` is stored through its analysis operator
``Dt^* (d x n)`` so that ``Dt^* f`` gives frame coefficients of ``f`` and
``D (Dt^* f) = f``.
"""
from __future__ import annotations

import logging
from functools import cached_property

import numpy as np
import scipy.linalg as sla

__all__ = [
    "NotAFrameError",
    "DegenerateSignalError",
    "Dictionary",
    "DualFrame",
    "Projector",
    "as_dictionary",
    "build_gabor_dictionary",
    "build_spike_fourier_dictionary",
    "coherence",
    "frame_bounds",
    "canonical_dual",
    "null_space_projector",
    "general_dual",
    "optimal_dual_from_solution",
]

log = logging.getLogger(__name__)

DUAL_TOL = 1e-10
MAX_GRAM_CONDITION = 1e12


class NotAFrameError(ValueError):
    """The atoms do not span the signal space (or do so too poorly)."""


class DegenerateSignalError(ValueError):
    """Raised when the optimal dual is requested at a (numerically) zero signal."""


class Dictionary:
    """A frame for C^n given by the columns of an ``n x d`` matrix.

    Parameters
    ----------
    atoms : array_like, shape (n, d)
        Frame vectors as columns. Real or complex.
    kind : str
        Free-form tag used by the serializers (``"gabor"``, ``"spike_fourier"``,
        ``"custom"``, ...).
    params : dict, optional
        Construction parameters (lattice, window width, ...).
    blocks : tuple of int, optional
        Column block sizes for concatenated dictionaries; must sum to ``d``.

    The Gram matrix ``D D^*`` is factorized on first use and cached. The
    instance is immutable: ``atoms`` is a read-only view.
    """

    def __init__(self, atoms, kind="custom", params=None, blocks=None):
        atoms = np.array(atoms, copy=True)
        if atoms.ndim != 2:
            raise ValueError(f"atoms must be a 2-d array, got shape {atoms.shape}")
        if not np.issubdtype(atoms.dtype, np.complexfloating):
            atoms = atoms.astype(np.float64)
        else:
            atoms = atoms.astype(np.complex128)
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms contain non-finite entries")
        n, d = atoms.shape
        if d < n:
            raise NotAFrameError(f"not a frame: d={d} atoms cannot span dimension n={n}")
        if blocks is None:
            blocks = (d,)
        blocks = tuple(int(b) for b in blocks)
        if sum(blocks) != d or min(blocks) < 1:
            raise ValueError(f"blocks {blocks} do not partition {d} columns")
        atoms.setflags(write=False)
        self.atoms = atoms
        self.kind = str(kind)
        self.params = dict(params or {})
        self.blocks = blocks

    @property
    def n(self) -> int:
        return self.atoms.shape[0]

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    @property
    def dtype(self):
        return self.atoms.dtype

    def __repr__(self):
        return f"Dictionary(kind={self.kind!r}, n={self.n}, d={self.d})"

    @cached_property
    def gram(self) -> np.ndarray:
        """Frame operator ``D D^*`` (n x n)."""
        G = self.atoms @ self.atoms.conj().T
        G = 0.5 * (G + G.conj().T)
        G.setflags(write=False)
        return G

    @cached_property
    def gram_eigenvalues(self) -> np.ndarray:
        return sla.eigvalsh(self.gram)

    @cached_property
    def gram_condition(self) -> float:
        lo, hi = self.gram_eigenvalues[0], self.gram_eigenvalues[-1]
        if lo <= 0:
            return np.inf
        return float(hi / lo)

    @cached_property
    def _gram_factor(self):
        cond = self.gram_condition
        log.debug("Gram condition number for %r: %.3e", self, cond)
        if not cond < MAX_GRAM_CONDITION:
            raise NotAFrameError(
                f"not a frame: Gram matrix condition number {cond:.3e} exceeds "
                f"{MAX_GRAM_CONDITION:.0e}"
            )
        return sla.cho_factor(self.gram, lower=True)

    def solve_gram(self, rhs) -> np.ndarray:
        """Apply ``(D D^*)^{-1}`` to a vector or to the columns of a matrix."""
        return sla.cho_solve(self._gram_factor, rhs)

    @cached_property
    def canonical_dual_matrix(self) -> np.ndarray:
        """``(D D^*)^{-1} D`` as an ``n x d`` matrix."""
        Db = self.solve_gram(self.atoms)
        Db.setflags(write=False)
        return Db

    def synthesize(self, x) -> np.ndarray:
        return self.atoms @ x

    def project_null(self, v) -> np.ndarray:
        """Orthogonal projection of ``v`` onto the null space of ``D``.

        Applied matrix-free as ``v - Dbar^* (D v)``; accepts a vector or a
        ``d x k`` matrix.
        """
        v = np.asarray(v)
        return v - self.canonical_dual_matrix.conj().T @ (self.atoms @ v)


def as_dictionary(D) -> Dictionary:
    if isinstance(D, Dictionary):
        return D
    return Dictionary(D)


class DualFrame:
    """A dual frame of ``parent``, stored by its analysis operator.

    ``rows`` is the ``d x n`` matrix ``Dt^*``. Construction checks
    ``max |D Dt^* - I| < tol`` and raises ``ValueError`` otherwise.
    """

    def __init__(self, rows, parent: Dictionary, label="dual", tol=DUAL_TOL):
        rows = np.array(rows, copy=True)
        if rows.shape != (parent.d, parent.n):
            raise ValueError(
                f"dual rows must have shape {(parent.d, parent.n)}, got {rows.shape}"
            )
        rows.setflags(write=False)
        self.rows = rows
        self.parent = parent
        self.label = label
        err = self.reconstruction_error()
        if not err < tol:
            raise ValueError(f"{label}: max|D Dt^* - I| = {err:.3e} exceeds {tol:.0e}")

    @property
    def matrix(self) -> np.ndarray:
        """The dual atoms as columns (``n x d``)."""
        return self.rows.conj().T

    def analyze(self, f) -> np.ndarray:
        return self.rows @ f

    def reconstruction_error(self) -> float:
        E = self.parent.atoms @ self.rows - np.eye(self.parent.n)
        return float(np.max(np.abs(E)))

    def __repr__(self):
        return f"DualFrame(label={self.label!r}, parent={self.parent!r})"


class Projector:
    """Explicit ``d x d`` orthogonal projector onto ``null(D)``."""

    def __init__(self, P, parent: Dictionary):
        P = np.array(P, copy=True)
        P.setflags(write=False)
        self.P = P
        self.parent = parent

    def __matmul__(self, other):
        return self.P @ other

    def idempotence_error(self) -> float:
        return float(np.max(np.abs(self.P @ self.P - self.P)))

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.P - self.P.conj().T)))

    def annihilation_error(self) -> float:
        return float(np.max(np.abs(self.parent.atoms @ self.P)))


def _periodic_gaussian(n, center, std):
    t = np.arange(n)
    if np.isinf(std):
        return np.ones(n)
    wraps = int(np.ceil(8.0 * std / n)) + 1
    w = np.zeros(n)
    for r in range(-wraps, wraps + 1):
        w += np.exp(-0.5 * ((t - center + r * n) / std) ** 2)
    return w


def build_gabor_dictionary(n, oversampling, window_std=8.0, time_shifts=None) -> Dictionary:
    """Gabor dictionary with circularly wrapped Gaussian windows.

    Atoms are ``g(t - k*step) * exp(2j*pi*l*t/L)`` for ``k < K`` time shifts
    and ``l < L`` frequencies, ordered time-major (all frequencies of shift 0
    first), each normalized to unit l2 norm.

    Parameters
    ----------
    n : int
        Signal length, a power of two.
    oversampling : int
        Redundancy ``d / n``.
    window_std : float
        Gaussian window standard deviation in samples; ``np.inf`` gives a
        flat window.
    time_shifts : int, optional
        Number of time shifts ``K``. Defaults to ``n // 2`` (a step of two
        samples). ``K`` must divide both ``n`` and ``oversampling * n``, and
        ``L = oversampling * n / K``.
    """
    n = int(n)
    oversampling = int(oversampling)
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    if oversampling < 1:
        raise ValueError(f"oversampling must be a positive integer, got {oversampling}")
    if not window_std > 0:
        raise ValueError(f"window_std must be positive, got {window_std}")
    K = n // 2 if time_shifts is None else int(time_shifts)
    d = oversampling * n
    if K < 1 or n % K or d % K:
        raise ValueError(
            f"lattice does not factor: {K} time shifts for n={n}, oversampling={oversampling}"
        )
    L = d // K
    step = n // K
    t = np.arange(n)
    modulations = np.exp(2j * np.pi * np.outer(np.arange(L), t) / L)  # (L, n)
    atoms = np.empty((n, d), dtype=np.complex128)
    for k in range(K):
        w = _periodic_gaussian(n, k * step, window_std)
        block = modulations * w
        block /= np.linalg.norm(block, axis=1, keepdims=True)
        atoms[:, k * L:(k + 1) * L] = block.T
    params = dict(oversampling=oversampling, window_std=float(window_std),
                  time_shifts=K, frequencies=L, step=step)
    return Dictionary(atoms, kind="gabor", params=params)


def build_spike_fourier_dictionary(n) -> Dictionary:
    """Concatenation ``[I, F] / sqrt(2)`` of the coordinate and unitary DFT bases.

    The ``1/sqrt(2)`` factor makes the frame Parseval (``D D^* = I``), so the
    columns have norm ``1/sqrt(2)`` rather than one.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    t = np.arange(n)
    F = np.exp(2j * np.pi * np.outer(t, t) / n) / np.sqrt(n)
    atoms = np.hstack([np.eye(n), F]) / np.sqrt(2.0)
    return Dictionary(atoms, kind="spike_fourier", params={}, blocks=(n, n))


def coherence(D, block=512) -> float:
    """Largest normalized inner product between two distinct atoms.

    Computed exactly over all pairs, ``block`` columns of the Gram matrix at
    a time.
    """
    A = D.atoms if isinstance(D, Dictionary) else np.asarray(D)
    if A.ndim != 2 or A.shape[1] < 2:
        raise ValueError("coherence needs at least two atoms")
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise ValueError("coherence undefined for a zero atom")
    U = A / norms
    d = U.shape[1]
    best = 0.0
    for start in range(0, d, block):
        stop = min(start + block, d)
        C = np.abs(U.conj().T @ U[:, start:stop])
        C[np.arange(start, stop), np.arange(stop - start)] = 0.0
        best = max(best, float(C.max()))
    return min(best, 1.0)


def frame_bounds(D) -> tuple[float, float]:
    """Optimal lower and upper frame bounds, the extreme eigenvalues of ``D D^*``."""
    D = as_dictionary(D)
    ev = D.gram_eigenvalues
    A, B = float(ev[0]), float(ev[-1])
    if not A > B * 1e-14:
        raise NotAFrameError(f"not a frame: lower frame bound {A:.3e} is not positive")
    return A, B


def canonical_dual(D) -> DualFrame:
    D = as_dictionary(D)
    return DualFrame(D.canonical_dual_matrix.conj().T, D, label="canonical")


def null_space_projector(D) -> Projector:
    """``P = I_d - D^* (D D^*)^{-1} D`` as an explicit matrix."""
    D = as_dictionary(D)
    P = np.eye(D.d) - D.atoms.conj().T @ D.canonical_dual_matrix
    P = 0.5 * (P + P.conj().T)
    return Projector(P, D)


def general_dual(D, W) -> DualFrame:
    """The dual whose analysis operator is ``Dbar^* + P W`` for a ``d x n`` matrix ``W``.

    Every dual frame of ``D`` arises this way.
    """
    D = as_dictionary(D)
    W = np.asarray(W)
    if W.shape != (D.d, D.n):
        raise ValueError(f"W must have shape {(D.d, D.n)}, got {W.shape}")
    rows = D.canonical_dual_matrix.conj().T + D.project_null(W)
    return DualFrame(rows, D, label="general")


def optimal_dual_from_solution(D, f_hat, p_g, range_tol=1e-6) -> DualFrame:
    """Optimal dual built from a solver output ``(f_hat, Pg)``.

    Uses the least-squares choice of ``W``, which turns the analysis operator
    into the rank-one update ``Dbar^* + (Pg) f_hat^* / ||f_hat||^2``. By
    construction ``Dt_o^* f_hat = Dbar^* f_hat + Pg``.
    """
    D = as_dictionary(D)
    f_hat = np.asarray(f_hat).reshape(-1)
    p_g = np.asarray(p_g).reshape(-1)
    if f_hat.shape != (D.n,) or p_g.shape != (D.d,):
        raise ValueError(
            f"expected f_hat of length {D.n} and Pg of length {D.d}, "
            f"got {f_hat.shape} and {p_g.shape}"
        )
    fnorm2 = float(np.vdot(f_hat, f_hat).real)
    if np.sqrt(fnorm2) < 1e-12 * np.sqrt(D.n):
        raise DegenerateSignalError("optimal dual undefined at zero signal")
    pnorm = np.linalg.norm(p_g)
    drift = np.linalg.norm(p_g - D.project_null(p_g))
    if drift > range_tol * max(pnorm, 1.0):
        raise ValueError(f"Pg is not in the null space of D (off-range part {drift:.3e})")
    rows = D.canonical_dual_matrix.conj().T + np.outer(p_g, f_hat.conj()) / fnorm2
    return DualFrame(rows, D, label="optimal")
