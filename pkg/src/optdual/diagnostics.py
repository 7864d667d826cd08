"""Error metrics, best s-term tails and the recovery-guarantee checks.

The error bound ``||f_hat - f|| <= C0*eps + C1*tail_s(Dt^* f)/sqrt(s)``
holds with constants the theory leaves unspecified. Here ``C0`` and ``C1``
are user inputs defaulting to 1, so :func:`bound_rhs` is a relative
diagnostic (compare duals, compare signals), not a certificate.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from math import ceil, sqrt

import numpy as np

__all__ = [
    "DecayProfile",
    "BoundReport",
    "ConditionReport",
    "relative_error",
    "s_term_tail",
    "decay_profile",
    "bound_rhs",
    "check_sufficient_condition",
    "lifted_delta",
    "scan_sufficient_condition",
]


@dataclass(frozen=True)
class DecayProfile:
    magnitudes: np.ndarray
    source: str = ""

    @property
    def k(self) -> int:
        return int(self.magnitudes.size)

    def to_dict(self) -> dict:
        return {"source": self.source, "k": self.k,
                "magnitudes": [float(v) for v in self.magnitudes]}


@dataclass(frozen=True)
class BoundReport:
    epsilon: float
    s: int
    tail: float
    rhs: float
    c0: float
    c1: float
    lhs: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConditionReport:
    """Literal evaluation of the sufficient D-RIP condition.

    ``margin`` is LHS minus RHS, so the condition holds iff ``margin < 0``.
    """

    s: int
    a: int
    b: int
    rho: float
    B: float
    B_tilde: float
    delta_s_plus_a: float
    delta_b: float
    lhs: float
    rhs: float
    margin: float
    satisfied: bool

    def to_dict(self) -> dict:
        return asdict(self)


def relative_error(estimate, truth) -> float:
    truth = np.asarray(truth)
    norm = np.linalg.norm(truth)
    if norm == 0:
        raise ValueError("relative error undefined for a zero reference")
    return float(np.linalg.norm(np.asarray(estimate) - truth) / norm)


def _top_order(v):
    # stable sort on -|v| keeps the lowest index first among ties
    return np.argsort(-np.abs(v), kind="stable")


def s_term_tail(v, s) -> float:
    """l1 mass of ``v`` outside its ``s`` largest-magnitude entries."""
    v = np.asarray(v).reshape(-1)
    s = int(s)
    if not 0 <= s <= v.size:
        raise ValueError(f"s must lie in [0, {v.size}], got {s}")
    order = _top_order(v)
    return float(np.abs(v[order[s:]]).sum())


def decay_profile(v, k, source="") -> DecayProfile:
    v = np.asarray(v).reshape(-1)
    k = int(k)
    if not 1 <= k <= v.size:
        raise ValueError(f"k must lie in [1, {v.size}], got {k}")
    mags = np.abs(v[_top_order(v)[:k]])
    return DecayProfile(magnitudes=mags, source=source)


def bound_rhs(eps, v, s, c0=1.0, c1=1.0, lhs=None) -> BoundReport:
    """Right-hand side ``c0*eps + c1*tail_s(v)/sqrt(s)`` of the error bound.

    ``v`` is the analysis coefficient vector ``Dt^* f`` of the true signal.
    Pass the measured error as ``lhs`` to keep both sides together.
    """
    s = int(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    if eps < 0 or c0 < 0 or c1 < 0:
        raise ValueError("eps, c0 and c1 must be non-negative")
    tail = s_term_tail(v, s)
    rhs = c0 * eps + c1 * tail / sqrt(s)
    return BoundReport(epsilon=float(eps), s=s, tail=tail, rhs=float(rhs),
                       c0=float(c0), c1=float(c1),
                       lhs=None if lhs is None else float(lhs))


def check_sufficient_condition(s, a, b, B, B_tilde, delta_s_plus_a, delta_b) -> ConditionReport:
    """Evaluate ``(1-sqrt(r))^2 d_{s+a} + r d_b < 1 - 2 sqrt(r)``, ``r = rho*B*B_tilde``.

    ``rho = s/b`` and the integers must satisfy ``0 < b - a <= 3a``.

    Monte Carlo D-RIP values are lower bounds, so with estimated deltas a
    ``satisfied=True`` answer is advisory only; ``satisfied=False`` with
    lower bounds is conclusive for those ``(a, b)``.
    """
    s, a, b = int(s), int(a), int(b)
    if s < 1 or a < 1 or b < 1:
        raise ValueError("s, a and b must be positive integers")
    if not 0 < b - a <= 3 * a:
        raise ValueError(f"need 0 < b - a <= 3a, got a={a}, b={b}")
    if not (B > 0 and B_tilde > 0):
        raise ValueError("frame bounds must be positive")
    for name, val in (("delta_s_plus_a", delta_s_plus_a), ("delta_b", delta_b)):
        if not 0 <= val < 1:
            raise ValueError(f"{name} must lie in [0, 1), got {val}")
    rho = s / b
    r = rho * B * B_tilde
    lhs = (1 - sqrt(r)) ** 2 * delta_s_plus_a + r * delta_b
    rhs = 1 - 2 * sqrt(r)
    return ConditionReport(s=s, a=a, b=b, rho=rho, B=float(B), B_tilde=float(B_tilde),
                           delta_s_plus_a=float(delta_s_plus_a), delta_b=float(delta_b),
                           lhs=float(lhs), rhs=float(rhs), margin=float(lhs - rhs),
                           satisfied=bool(lhs < rhs))


def lifted_delta(delta_2s, s):
    """Upper bounds ``delta_k <= ceil(k / 2s) * delta_2s`` from a single ``delta_2s``.

    Splitting a ``k``-sparse support into ``ceil(k/2s)`` pieces of size at
    most ``2s`` gives this bound; it is the usual way to trade higher-order
    restricted isometry constants for ``delta_2s``.
    """
    def delta(k):
        return ceil(k / (2 * s)) * delta_2s
    return delta


def scan_sufficient_condition(s, B, B_tilde, delta, a_max=None) -> list[ConditionReport]:
    """Check the sufficient condition over every admissible ``(a, b)``.

    ``delta`` maps an order ``k`` to a D-RIP constant; a float is read as
    ``delta_2s`` and lifted with :func:`lifted_delta`. Both orders in the
    condition are bounded by ``delta(max(s + a, b))``, which keeps the scan
    valid for any non-decreasing ``delta``. Pairs whose delta reaches 1 are
    skipped. ``a`` runs over ``1..a_max`` (default ``8 s``) and ``b`` over
    ``a+1..4a``.
    """
    s = int(s)
    if not callable(delta):
        delta = lifted_delta(float(delta), s)
    a_max = 8 * s if a_max is None else int(a_max)
    reports = []
    for a in range(1, a_max + 1):
        for b in range(a + 1, 4 * a + 1):
            dk = delta(max(s + a, b))
            if not 0 <= dk < 1:
                continue
            reports.append(check_sufficient_condition(s, a, b, B, B_tilde, dk, dk))
    return reports
