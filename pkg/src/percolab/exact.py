"""Exhaustive enumeration over configurations of small graphs.

Everything here reduces an event to its truth table over the edges it
depends on, then evaluates probabilities, derivatives, pivotal sums and
covariance sums from integer count tables.  With a float p the results
are double precision; with a fractions.Fraction p they are bit exact.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EnumerationCapError, MonotonicityError
from .lattice import connected, connected_to_boundary

ENUMERATION_CAP = 24

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _popcount(configs):
    b = np.ascontiguousarray(configs.astype(np.uint32)).view(np.uint8)
    return _POPCOUNT8[b].reshape(-1, 4).sum(axis=1)


class Event:
    """A predicate over configurations, with an optional declared support.

    The predicate receives a full-length boolean edge vector.  If `support`
    is declared, the predicate must ignore every edge outside it; this is
    what makes enumeration over the support alone valid.
    """

    def __init__(self, predicate, n_edges, support=None, name=""):
        self.predicate = predicate
        self.n_edges = int(n_edges)
        self.support = (
            list(range(n_edges)) if support is None else [int(i) for i in support]
        )
        self.name = name

    def __call__(self, bits):
        return bool(self.predicate(bits))

    def complement(self, name=None):
        return Event(
            lambda bits: not self.predicate(bits),
            self.n_edges,
            support=self.support,
            name=name or f"not({self.name})",
        )

    # subclasses may override to build truth tables without a Python loop
    def _table_hook(self, configs):
        return None


class CylinderUnionEvent(Event):
    """Union of cylinders {all edges in S open}; increasing by construction."""

    def __init__(self, cylinders, n_edges, name="cylinder-union"):
        self.cylinders = [sorted(int(i) for i in c) for c in cylinders]
        support = sorted({i for c in self.cylinders for i in c})
        super().__init__(self._predicate, n_edges, support=support, name=name)

    def _predicate(self, bits):
        return any(all(bits[i] for i in c) for c in self.cylinders)

    def _table_hook(self, configs):
        pos = {e: j for j, e in enumerate(self.support)}
        table = np.zeros(configs.shape, dtype=bool)
        for c in self.cylinders:
            mask = 0
            for e in c:
                mask |= 1 << pos[e]
            table |= (configs & mask) == mask
        return table


def edge_open_event(i, n_edges):
    return Event(lambda bits: bool(bits[i]), n_edges, support=[i], name=f"edge{i}-open")


def origin_to_boundary_event(g):
    return Event(
        lambda bits: connected_to_boundary(bits, g),
        g.n_edges,
        name="origin-to-boundary",
    )


def connection_event(g, x, y):
    return Event(lambda bits: connected(bits, g, x, y), g.n_edges,
                 name=f"connect({x},{y})")


def random_increasing_event(n_edges, rng, n_cylinders=3, max_width=3):
    """A random increasing event: a union of 'edges in S all open' cylinders."""
    cyls = []
    for _ in range(n_cylinders):
        width = int(rng.integers(1, max_width + 1))
        cyls.append(rng.choice(n_edges, size=min(width, n_edges), replace=False))
    return CylinderUnionEvent(cyls, n_edges, name="random-increasing")


def compile_event(A, cap=ENUMERATION_CAP):
    """Truth table of A over its support: (support, table of length 2^s).

    Tables are memoized on the event, which must therefore be immutable.
    """
    cached = getattr(A, "_compiled", None)
    if cached is not None:
        return cached
    support = A.support
    s = len(support)
    if s > cap:
        raise EnumerationCapError(f"support of {s} edges exceeds cap {cap}")
    configs = np.arange(1 << s, dtype=np.int64)
    table = A._table_hook(configs)
    if table is None:
        table = np.zeros(1 << s, dtype=bool)
        bits = np.zeros(A.n_edges, dtype=bool)
        for w in range(1 << s):
            for j, e in enumerate(support):
                bits[e] = bool((w >> j) & 1)
            table[w] = A(bits)
    A._compiled = (support, np.asarray(table, dtype=bool))
    return A._compiled


def verify_support(A, cap=ENUMERATION_CAP):
    """Exhaustively check that A never reads an edge outside its support."""
    m = A.n_edges
    if m > cap:
        raise EnumerationCapError(f"{m} edges exceeds cap {cap}")
    outside = [e for e in range(m) if e not in set(A.support)]
    bits = np.zeros(m, dtype=bool)
    support = A.support
    for w in range(1 << len(support)):
        for j, e in enumerate(support):
            bits[e] = bool((w >> j) & 1)
        for e in outside:
            bits[e] = False
        base = A(bits)
        for e in outside:
            bits[e] = True
            if A(bits) != base:
                return False
            bits[e] = False
    return True


def _count_by_weight(table, counts_k, s):
    """Number of configurations in `table` for each open-edge count."""
    return np.bincount(counts_k[table], minlength=s + 1)


def _poly_eval(counts, p, s):
    """Evaluate sum_k counts[k] p^k (1-p)^(s-k), exactly for Fraction p."""
    if isinstance(p, Fraction):
        q = 1 - p
        return sum(Fraction(int(c)) * p**k * q**(s - k) for k, c in enumerate(counts))
    p = float(p)
    q = 1.0 - p
    return float(sum(c * p**k * q**(s - k) for k, c in enumerate(counts)))


def _poly_deriv(counts, p, s):
    """Evaluate d/dp of the same polynomial."""
    if isinstance(p, Fraction):
        q = 1 - p
        total = Fraction(0)
        for k, c in enumerate(counts):
            if c == 0:
                continue
            term = Fraction(0)
            if k > 0:
                term += k * p**(k - 1) * q**(s - k)
            if s - k > 0:
                term -= (s - k) * p**k * q**(s - k - 1)
            total += Fraction(int(c)) * term
        return total
    p = float(p)
    q = 1.0 - p
    total = 0.0
    for k, c in enumerate(counts):
        if c == 0:
            continue
        term = 0.0
        if k > 0:
            term += k * p**(k - 1) * q**(s - k)
        if s - k > 0:
            term -= (s - k) * p**k * q**(s - k - 1)
        total += c * term
    return total


def enumerate_probability(A, p, cap=ENUMERATION_CAP):
    """Exact P_p[A] by full enumeration over the support of A."""
    support, table = compile_event(A, cap)
    s = len(support)
    k = _popcount(np.arange(1 << s, dtype=np.int64))
    return _poly_eval(_count_by_weight(table, k, s), p, s)


def is_increasing(A, cap=ENUMERATION_CAP):
    """True iff no single 0->1 edge flip can take a configuration out of A."""
    _, table = compile_event(A, cap)
    s = int(np.log2(len(table)))
    configs = np.arange(len(table), dtype=np.int64)
    for j in range(s):
        low = configs[(configs >> j) & 1 == 0]
        if np.any(table[low] & ~table[low | (1 << j)]):
            return False
    return True


def is_decreasing(A, cap=ENUMERATION_CAP):
    return is_increasing(A.complement(), cap)


def derivative_exact(A, p, cap=ENUMERATION_CAP):
    """Exact d/dp P_p[A] via term-by-term differentiation."""
    support, table = compile_event(A, cap)
    s = len(support)
    k = _popcount(np.arange(1 << s, dtype=np.int64))
    return _poly_deriv(_count_by_weight(table, k, s), p, s)


def _disagreement_counts(table, s):
    """For each support position j, count table of configs where flipping j
    changes membership, grouped by open-edge count."""
    configs = np.arange(len(table), dtype=np.int64)
    k = _popcount(configs)
    out = []
    for j in range(s):
        dis = table != table[configs ^ (1 << j)]
        out.append(np.bincount(k[dis], minlength=s + 1))
    return out


def pivotal_probabilities(A, p, cap=ENUMERATION_CAP):
    """P_p[e pivotal for A] for every edge, as a full-length array.

    Pivotality is the symmetric disagreement event: the configuration and
    its single-edge flip disagree on A.
    """
    support, table = compile_event(A, cap)
    s = len(support)
    dis = _disagreement_counts(table, s)
    zero = Fraction(0) if isinstance(p, Fraction) else 0.0
    piv = [zero] * A.n_edges
    for j, e in enumerate(support):
        piv[e] = _poly_eval(dis[j], p, s)
    return piv


def pivotal_sum(A, p, cap=ENUMERATION_CAP):
    """Sum over edges of the pivotal probability (requires A increasing)."""
    if not is_increasing(A, cap):
        raise MonotonicityError("pivotal_sum requires an increasing event")
    return sum(pivotal_probabilities(A, p, cap))


def covariances(A, p, cap=ENUMERATION_CAP):
    """Cov_p(omega_e, 1_A) for every edge, as a full-length array."""
    support, table = compile_event(A, cap)
    s = len(support)
    configs = np.arange(len(table), dtype=np.int64)
    k = _popcount(configs)
    prob = _poly_eval(_count_by_weight(table, k, s), p, s)
    zero = Fraction(0) if isinstance(p, Fraction) else 0.0
    cov = [zero] * A.n_edges
    for j, e in enumerate(support):
        with_e = table & ((configs >> j) & 1 == 1)
        joint = _poly_eval(np.bincount(k[with_e], minlength=s + 1), p, s)
        cov[e] = joint - p * prob
    return cov


def covariance_sum(A, p, cap=ENUMERATION_CAP):
    """(1 / p(1-p)) * sum_e Cov_p(omega_e, 1_A); valid for any event."""
    denom = p * (1 - p)
    return sum(covariances(A, p, cap)) / denom


@dataclass
class ExactReport:
    probability: float
    derivative: float
    pivotal_sum: float
    covariance_sum: float
    residual_pivotal: float
    residual_covariance: float
    increasing: bool
    passed: bool


def verify_russo(A, p, tol=1e-10, cap=ENUMERATION_CAP):
    """Check both derivative formulas against term-by-term differentiation.

    The pivotal form is asserted only for increasing events; the covariance
    form is asserted unconditionally.
    """
    inc = is_increasing(A, cap)
    prob = enumerate_probability(A, p, cap)
    deriv = derivative_exact(A, p, cap)
    cov = covariance_sum(A, p, cap)
    piv = sum(pivotal_probabilities(A, p, cap)) if inc else float("nan")
    res_piv = abs(deriv - piv) if inc else 0.0
    res_cov = abs(deriv - cov)
    passed = bool(res_cov <= tol and (not inc or res_piv <= tol))
    return ExactReport(
        probability=float(prob),
        derivative=float(deriv),
        pivotal_sum=float(piv) if inc else float("nan"),
        covariance_sum=float(cov),
        residual_pivotal=float(res_piv),
        residual_covariance=float(res_cov),
        increasing=inc,
        passed=passed,
    )


def verify_fkg(A, B, p, cap=ENUMERATION_CAP):
    """P[A and B] - P[A] P[B] for two increasing events (must be >= 0)."""
    for ev in (A, B):
        if not is_increasing(ev, cap):
            raise MonotonicityError(f"event {ev.name!r} is not increasing")
    return fkg_slack(A, B, p, cap)


def fkg_slack(A, B, p, cap=ENUMERATION_CAP):
    """P[A and B] - P[A] P[B] without any monotonicity check."""
    both = Event(
        lambda bits: A.predicate(bits) and B.predicate(bits),
        A.n_edges,
        support=sorted(set(A.support) | set(B.support)),
        name=f"({A.name})and({B.name})",
    )
    pa = enumerate_probability(A, p, cap)
    pb = enumerate_probability(B, p, cap)
    pab = enumerate_probability(both, p, cap)
    return pab - pa * pb
