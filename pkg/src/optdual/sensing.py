"""Sensing matrices, measurements, sparse ground truths and D-RIP estimates."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .frames import Dictionary, as_dictionary
from .rng import make_rng

__all__ = [
    "SensingEnsemble",
    "GroundTruth",
    "DRIPEstimate",
    "gaussian_sensing_matrix",
    "measure",
    "synthesize_sparse_signal",
    "drip_estimate",
    "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 100_000


@dataclass(frozen=True)
class SensingEnsemble:
    """An ``m x n`` sensing matrix and how it was drawn."""

    phi: np.ndarray
    seed: int | None = None
    scale: float | None = None

    def __post_init__(self):
        phi = np.array(self.phi, dtype=np.float64 if np.isrealobj(self.phi) else np.complex128)
        if phi.ndim != 2:
            raise ValueError(f"phi must be 2-d, got shape {phi.shape}")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phi contains non-finite entries")
        if phi.shape[0] > phi.shape[1]:
            raise ValueError(f"expected m <= n, got phi of shape {phi.shape}")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """A signal ``f = D x`` with an exactly ``s``-sparse coefficient vector."""

    f: np.ndarray
    x: np.ndarray
    support: np.ndarray
    seed: int | None = None

    @property
    def s(self) -> int:
        return int(self.support.size)


@dataclass(frozen=True)
class DRIPEstimate:
    """Monte Carlo lower bound on the D-RIP constant ``delta_s``.

    ``per_trial`` holds the deviation of every sampled support, in draw
    order, so ``delta_hat == per_trial.max()``.
    """

    s: int
    delta_hat: float
    trials: int
    seed: int | None
    per_trial: np.ndarray = field(repr=False)
    exhaustive: bool = False


def _phi_matrix(phi):
    return phi.phi if isinstance(phi, SensingEnsemble) else np.asarray(phi)


def gaussian_sensing_matrix(m, n, seed, variance=None) -> SensingEnsemble:
    """I.i.d. Gaussian ``m x n`` matrix.

    ``variance`` defaults to ``1/m`` so that ``E ||Phi v||^2 = ||v||^2``.
    """
    m, n = int(m), int(n)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if variance is None:
        variance = 1.0 / m
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    scale = float(np.sqrt(variance))
    rng = make_rng(seed)
    phi = rng.standard_normal((m, n)) * scale
    return SensingEnsemble(phi, seed=seed if isinstance(seed, int) else None, scale=scale)


def measure(phi, f, eps=0.0, seed=None):
    """Return ``(y, eps)`` with ``y = Phi f + z`` and ``||z||_2 <= eps``.

    ``z`` is uniform on the ``eps``-ball (of ``C^m`` when ``Phi f`` is
    complex). For ``eps = 0`` no randomness is drawn and ``seed`` may be None.
    """
    Phi = _phi_matrix(phi)
    f = np.asarray(f)
    if f.shape != (Phi.shape[1],):
        raise ValueError(f"signal length {f.shape} does not match phi {Phi.shape}")
    if eps < 0:
        raise ValueError(f"noise bound must be non-negative, got {eps}")
    y = Phi @ f
    if eps == 0:
        return y, 0.0
    rng = make_rng(seed)
    m = y.size
    if np.iscomplexobj(y):
        g = rng.standard_normal((2, m))
        direction = g[0] + 1j * g[1]
        dim = 2 * m
    else:
        direction = rng.standard_normal(m)
        dim = m
    direction /= np.linalg.norm(direction)
    radius = eps * rng.random() ** (1.0 / dim)
    return y + radius * direction, float(eps)


def synthesize_sparse_signal(D, s, seed, per_block=None) -> GroundTruth:
    """Draw a random ``s``-sparse coefficient vector and its signal ``f = D x``.

    The support is uniform without replacement and nonzero values are
    standard normal. With ``per_block`` (one count per ``D.blocks`` entry),
    each block gets exactly that many nonzeros; ``s`` must equal their sum.
    """
    D = as_dictionary(D)
    s = int(s)
    if not 1 <= s <= D.d:
        raise ValueError(f"sparsity must satisfy 1 <= s <= d={D.d}, got {s}")
    rng = make_rng(seed)
    if per_block is None:
        support = rng.choice(D.d, size=s, replace=False)
    else:
        per_block = [int(k) for k in per_block]
        if len(per_block) != len(D.blocks):
            raise ValueError(f"{len(per_block)} block counts for {len(D.blocks)} blocks")
        if sum(per_block) != s:
            raise ValueError(f"block counts {per_block} do not sum to s={s}")
        parts, offset = [], 0
        for size, k in zip(D.blocks, per_block):
            if not 0 <= k <= size:
                raise ValueError(f"cannot place {k} nonzeros in a block of {size}")
            parts.append(offset + rng.choice(size, size=k, replace=False))
            offset += size
        support = np.concatenate(parts)
    support = np.sort(support)
    x = np.zeros(D.d, dtype=D.dtype)
    x[support] = rng.standard_normal(s)
    f = D.synthesize(x)
    return GroundTruth(f=f, x=x, support=support, seed=seed if isinstance(seed, int) else None)


def _subspace_deviation(Phi, cols, rank_tol=1e-10):
    if not np.any(cols):
        raise ValueError("selected atoms are all zero")
    U, sv, _ = np.linalg.svd(cols, full_matrices=False)
    Q = U[:, sv > rank_tol * sv[0]]
    sigma = np.linalg.svd(Phi @ Q, compute_uv=False)
    return max(sigma[0] ** 2 - 1.0, 1.0 - sigma[-1] ** 2, 0.0)


def drip_estimate(phi, D, s, trials=100, seed=0, exhaustive=False) -> DRIPEstimate:
    """Lower-bound the D-RIP constant of ``Phi`` by sampling ``s``-atom subspaces.

    For each sampled support ``T`` the span of ``D[:, T]`` is orthonormalized
    to ``Q`` and the worst of ``sigma_max(Phi Q)^2 - 1`` and
    ``1 - sigma_min(Phi Q)^2`` is recorded. Each value is exact for its
    subspace, so the maximum never exceeds the true ``delta_s``; it is a
    lower bound unless ``exhaustive=True`` enumerates every support, which is
    allowed when ``comb(d, s) <= EXHAUSTIVE_LIMIT``.

    Trial ``t`` draws from its own stream ``(seed, t)``, so the first ``T1``
    trials of a longer run coincide with a run of ``T1`` trials.
    """
    Phi = _phi_matrix(phi)
    D = as_dictionary(D)
    s, trials = int(s), int(trials)
    if not 1 <= s <= D.d:
        raise ValueError(f"sparsity must satisfy 1 <= s <= d={D.d}, got {s}")
    if Phi.shape[1] != D.n:
        raise ValueError(f"phi has {Phi.shape[1]} columns but D has n={D.n}")
    if exhaustive:
        total = comb(D.d, s)
        if total > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive enumeration of {total} supports exceeds the limit")
        supports = combinations(range(D.d), s)
    else:
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        supports = (
            make_rng(seed, t).choice(D.d, size=s, replace=False) for t in range(trials)
        )
    values = np.array([_subspace_deviation(Phi, D.atoms[:, list(T)]) for T in supports])
    return DRIPEstimate(
        s=s,
        delta_hat=float(values.max()),
        trials=int(values.size),
        seed=None if exhaustive else seed,
        per_trial=values,
        exhaustive=bool(exhaustive),
    )
