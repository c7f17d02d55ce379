"""Query algorithms, revealments, influences, and the OSSS inequalities.

A query algorithm reveals edges one at a time; its revealment profile
weights the influence (or covariance) sum that bounds the variance of a
Boolean function.  The sphere-seeded exploration family T_k is the
algorithm the variance bound is applied to in the sharpness argument.
"""

from dataclasses import dataclass

import numpy as np

from .bernoulli import Estimate, TAG_THETA
from .errors import PercolabError
from .exact import (
    compile_event,
    covariances,
    enumerate_probability,
    is_increasing,
    origin_to_boundary_event,
    pivotal_probabilities,
)
from .lattice import UnionFind, build_box_graph
from .streams import replica_blocks, substream

TAG_OSSS = 3


class QueryAlgorithm:
    """A decision rule: history of (index, bit) pairs -> next index or None."""

    def __init__(self, rule, name=""):
        self.rule = rule
        self.name = name


@dataclass(frozen=True)
class RunTrace:
    indices: tuple
    bits: tuple
    output: bool


def run_algorithm(T, cfg, f):
    """Drive T on a configuration until it stops; output is f of the full cfg."""
    m = len(cfg)
    history = []
    revealed = set()
    while True:
        nxt = T.rule(tuple(history))
        if nxt is None:
            break
        if not (isinstance(nxt, (int, np.integer)) and 0 <= nxt < m):
            raise PercolabError(f"rule returned invalid index {nxt!r}")
        if nxt in revealed:
            raise PercolabError(f"rule re-queried index {nxt}")
        revealed.add(int(nxt))
        history.append((int(nxt), bool(cfg[nxt])))
        if len(history) > m:  # unreachable given the re-query guard
            raise PercolabError("rule failed to terminate")
    return RunTrace(
        indices=tuple(i for i, _ in history),
        bits=tuple(b for _, b in history),
        output=bool(f(cfg)),
    )


def is_determined(f, assignment):
    """True iff every completion of the partial assignment agrees on f."""
    support, table = compile_event(f)
    configs = np.arange(len(table), dtype=np.int64)
    sel = np.ones(len(table), dtype=bool)
    for j, e in enumerate(support):
        if e in assignment:
            sel &= ((configs >> j) & 1) == (1 if assignment[e] else 0)
    vals = table[sel]
    return bool(vals.all() or not vals.any())


def verify_determination(trace, f):
    """Soundness check: the revealed bits alone already determine f."""
    assignment = dict(zip(trace.indices, trace.bits))
    if not is_determined(f, assignment):
        return False
    # the determined value must match the actual output
    support, table = compile_event(f)
    configs = np.arange(len(table), dtype=np.int64)
    sel = np.ones(len(table), dtype=bool)
    for j, e in enumerate(support):
        if e in assignment:
            sel &= ((configs >> j) & 1) == (1 if assignment[e] else 0)
    vals = table[sel]
    determined_value = bool(vals[0]) if len(vals) else trace.output
    return determined_value == trace.output


def make_sequential_algorithm(f, order=None, name="sequential"):
    """Scan indices in a fixed order, stopping as soon as f is determined."""
    idx_order = list(range(f.n_edges)) if order is None else [int(i) for i in order]

    def rule(history):
        assignment = dict(history)
        if is_determined(f, assignment):
            return None
        for i in idx_order:
            if i not in assignment:
                return i
        return None

    return QueryAlgorithm(rule, name=name)


def make_exhaustive_algorithm(n_edges, name="reveal-everything"):
    def rule(history):
        nxt = len(history)
        return nxt if nxt < n_edges else None

    return QueryAlgorithm(rule, name=name)


def _sphere_vertices(g, k):
    """Vertex indices at sup-norm distance exactly k from the origin."""
    if k == 0:
        return np.array([g.origin], dtype=np.int64)
    return np.flatnonzero(np.abs(g.vertices).max(axis=1) == k).astype(np.int64)


def sphere_run(g, k, cfg):
    """Run the exploration T_k on a configuration (fast path).

    Starting from the sphere of radius k, repeatedly reveal the first
    unqueried edge touching the explored open cluster of the sphere; stop
    when {origin joined to boundary} is certified either way.
    Returns (revealed mask, function value).
    """
    m = g.n_edges
    nv = g.n_vertices
    edges = g.edges
    # cluster growth bookkeeping: marked roots are clusters meeting the sphere
    uf = UnionFind(nv)
    marked = bytearray(nv)
    for v in _sphere_vertices(g, k):
        marked[int(v)] = 1
    # second structure with a terminal glued to the box boundary certifies
    # the positive outcome without contaminating cluster membership
    ufb = UnionFind(nv + 1)
    for b in g.boundary:
        ufb.union(int(b), nv)
    revealed = np.zeros(m, dtype=bool)
    while True:
        if ufb.connected(g.origin, nv):
            return revealed, True
        nxt = -1
        for e in range(m):
            if revealed[e]:
                continue
            a, b = int(edges[e, 0]), int(edges[e, 1])
            if marked[uf.find(a)] or marked[uf.find(b)]:
                nxt = e
                break
        if nxt < 0:
            return revealed, False
        revealed[nxt] = True
        if cfg[nxt]:
            a, b = int(edges[nxt, 0]), int(edges[nxt, 1])
            ra, rb = uf.find(a), uf.find(b)
            mark = marked[ra] or marked[rb]
            r = uf.union(a, b)
            marked[r] = 1 if mark else marked[r]
            ufb.union(a, b)


def make_sphere_algorithm(g, k):
    """The exploration T_k as a QueryAlgorithm (decision-rule form)."""
    if not 1 <= k <= g.radius:
        raise ValueError("seed radius k must satisfy 1 <= k <= n")
    m = g.n_edges
    edges = g.edges
    nv = g.n_vertices
    sphere = [int(v) for v in _sphere_vertices(g, k)]
    boundary = [int(b) for b in g.boundary]

    def rule(history):
        known = dict(history)
        uf = UnionFind(nv)
        marked = bytearray(nv)
        for v in sphere:
            marked[v] = 1
        ufb = UnionFind(nv + 1)
        for b in boundary:
            ufb.union(b, nv)
        revealed = set()
        while True:
            if ufb.connected(g.origin, nv):
                return None
            nxt = -1
            for e in range(m):
                if e in revealed:
                    continue
                a, b = int(edges[e, 0]), int(edges[e, 1])
                if marked[uf.find(a)] or marked[uf.find(b)]:
                    nxt = e
                    break
            if nxt < 0:
                return None
            if nxt not in known:
                return nxt
            revealed.add(nxt)
            if known[nxt]:
                a, b = int(edges[nxt, 0]), int(edges[nxt, 1])
                ra, rb = uf.find(a), uf.find(b)
                mark = marked[ra] or marked[rb]
                r = uf.union(a, b)
                marked[r] = 1 if mark else marked[r]
                ufb.union(a, b)

    return QueryAlgorithm(rule, name=f"T_{k}")


def _weights(p, counts_k, s):
    return p ** counts_k * (1.0 - p) ** (s - counts_k)


def revealment_exact(g, p, T, f):
    """delta_i = P_p[T reveals i], by running T on every configuration."""
    m = g.n_edges
    if m > 24:
        raise PercolabError("exact revealment requires edge count <= 24")
    delta = np.zeros(m, dtype=float)
    bits = np.zeros(m, dtype=bool)
    for w in range(1 << m):
        k = 0
        for j in range(m):
            b = bool((w >> j) & 1)
            bits[j] = b
            k += b
        weight = p**k * (1.0 - p) ** (m - k)
        trace = run_algorithm(T, bits, f)
        for i in trace.indices:
            delta[i] += weight
    return delta


def revealment_exact_sphere(g, k, p, f=None):
    """delta_i for T_k using the fast simulator (same result as the rule form)."""
    m = g.n_edges
    if m > 24:
        raise PercolabError("exact revealment requires edge count <= 24")
    delta = np.zeros(m, dtype=float)
    bits = np.zeros(m, dtype=bool)
    for w in range(1 << m):
        c = 0
        for j in range(m):
            b = bool((w >> j) & 1)
            bits[j] = b
            c += b
        weight = p**c * (1.0 - p) ** (m - c)
        revealed, _ = sphere_run(g, k, bits)
        delta += weight * revealed
    return delta


def revealment_mc_sphere(g, k, p, replicas, seed):
    """MC revealments of T_k: per-edge reveal frequencies and stderr."""
    m = g.n_edges
    counts = np.zeros(m, dtype=np.int64)
    for block, size in replica_blocks(replicas):
        rng = substream(seed, TAG_OSSS, g.dim, g.radius, k, block)
        u = rng.random((size, m))
        for r in range(size):
            revealed, _ = sphere_run(g, k, u[r] < p)
            counts += revealed
    delta = counts / replicas
    stderr = np.sqrt(delta * (1.0 - delta) / replicas)
    return delta, stderr


def influence_exact(g, p, f):
    """Resampling influences: Inf_i = 2 p(1-p) P[i is a disagreement edge]."""
    piv = pivotal_probabilities(f, p)
    return np.array([2.0 * p * (1.0 - p) * float(v) for v in piv])


@dataclass
class OsssReport:
    variance: float
    revealments: np.ndarray
    influences: np.ndarray
    covariances: np.ndarray
    slack_v1: float
    slack_v2: float
    increasing: bool
    passed: bool


def verify_osss(g, p, T, f, tol=1e-12):
    """Exact check of both OSSS bounds for (T, f) at parameter p.

    slack_v1 = sum delta_i Inf_i - Var(f) (must be >= -tol always);
    slack_v2 = 2 sum delta_i Cov_i - Var(f) (asserted for non-decreasing f).
    """
    prob = enumerate_probability(f, p)
    var = prob * (1.0 - prob)
    delta = revealment_exact(g, p, T, f)
    inf = influence_exact(g, p, f)
    cov = np.array([float(c) for c in covariances(f, p)])
    slack_v1 = float(np.dot(delta, inf) - var)
    slack_v2 = float(2.0 * np.dot(delta, cov) - var)
    inc = is_increasing(f)
    passed = slack_v1 >= -tol and (not inc or slack_v2 >= -tol)
    return OsssReport(
        variance=float(var),
        revealments=delta,
        influences=inf,
        covariances=cov,
        slack_v1=slack_v1,
        slack_v2=slack_v2,
        increasing=inc,
        passed=passed,
    )


@dataclass
class RevealmentBoundReport:
    edge_sums: np.ndarray        # sum over k of delta_e(T_k)
    sigma_n: float               # sum_{k=0}^{n-1} theta_k
    max_ratio: float             # max_e edge_sum / (4 sigma_n)
    verdict: str                 # PASS | FAIL | INCONCLUSIVE
    mode: str


def _theta_exact(d, k, p):
    if k == 0:
        return 1.0
    g = build_box_graph(d, k)
    return float(enumerate_probability(origin_to_boundary_event(g), p))


def revealment_sum_bound_check(d, n, p, mode="exact", replicas=10_000, seed=0,
                               tol=1e-12):
    """Check sum_{k=1}^n delta_e(T_k) <= 4 Sigma_n for every edge."""
    g = build_box_graph(d, n)
    m = g.n_edges
    if mode == "exact":
        sums = np.zeros(m, dtype=float)
        for k in range(1, n + 1):
            sums += revealment_exact_sphere(g, k, p)
        sigma_n = sum(_theta_exact(d, k, p) for k in range(n))
        max_ratio = float(sums.max() / (4.0 * sigma_n))
        verdict = "PASS" if max_ratio <= 1.0 + tol else "FAIL"
        return RevealmentBoundReport(edge_sums=sums, sigma_n=float(sigma_n),
                                     max_ratio=max_ratio, verdict=verdict,
                                     mode=mode)
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    from .bernoulli import estimate_theta_n

    sums = np.zeros(m, dtype=float)
    var_sum = np.zeros(m, dtype=float)
    for k in range(1, n + 1):
        delta, se = revealment_mc_sphere(g, k, p, replicas, seed)
        sums += delta
        var_sum += se**2
    thetas = [1.0] + [
        estimate_theta_n(d, k, p, replicas, seed).value for k in range(1, n)
    ]
    sigma_n = float(sum(thetas))
    ratios = sums / (4.0 * sigma_n)
    max_ratio = float(ratios.max())
    se_ratio = float(np.sqrt(var_sum.max()) / (4.0 * sigma_n))
    if max_ratio <= 1.0:
        verdict = "PASS"
    elif max_ratio <= 1.0 + 4.0 * se_ratio:
        verdict = "INCONCLUSIVE"
    else:
        verdict = "FAIL"
    return RevealmentBoundReport(edge_sums=sums, sigma_n=sigma_n,
                                 max_ratio=max_ratio, verdict=verdict, mode=mode)


@dataclass
class DifferentialReport:
    theta: Estimate
    sigma_n: float
    sigma_n_stderr: float
    theta_prime: Estimate
    lhs: float                   # n theta (1 - theta)
    rhs: float                   # 2 Sigma_n theta'
    chain_mid: float             # 8 p(1-p) Sigma_n theta'
    slack: float
    slack_stderr: float
    verdict: str


def osss_differential_check(d, n, p, replicas, seed, h=0.01):
    """MC check of n theta_n (1 - theta_n) <= 2 Sigma_n theta_n'."""
    from .bernoulli import estimate_theta_derivative, estimate_theta_n

    theta = estimate_theta_n(d, n, p, replicas, seed)
    thetas = [Estimate(1.0, 0.0, replicas, seed)] + [
        estimate_theta_n(d, k, p, replicas, seed) for k in range(1, n)
    ]
    sigma = float(sum(t.value for t in thetas))
    sigma_se = float(np.sqrt(sum(t.stderr**2 for t in thetas)))
    prime = estimate_theta_derivative(d, n, p, replicas, seed, h=h)

    lhs = n * theta.value * (1.0 - theta.value)
    rhs = 2.0 * sigma * prime.value
    chain_mid = 8.0 * p * (1.0 - p) * sigma * prime.value
    slack = rhs - lhs
    se_lhs = abs(n * (1.0 - 2.0 * theta.value)) * theta.stderr
    se_rhs = 2.0 * float(
        np.sqrt((sigma * prime.stderr) ** 2 + (prime.value * sigma_se) ** 2)
    )
    slack_se = float(np.sqrt(se_lhs**2 + se_rhs**2))
    if slack >= 0.0:
        verdict = "PASS"
    elif slack + 4.0 * slack_se >= 0.0:
        verdict = "INCONCLUSIVE"
    else:
        verdict = "FAIL"
    return DifferentialReport(
        theta=theta, sigma_n=sigma, sigma_n_stderr=sigma_se, theta_prime=prime,
        lhs=lhs, rhs=rhs, chain_mid=chain_mid, slack=slack,
        slack_stderr=slack_se, verdict=verdict,
    )
