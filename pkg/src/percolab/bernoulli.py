"""Monte Carlo estimation for Bernoulli bond percolation.

All estimators share one sampling convention: an edge is open iff its
uniform variate is below p.  Because the uniforms depend only on
(seed, box, replica) and not on p, estimates at different p are coupled
and exactly monotone in p, and derivative estimates by centered
differences have Bernoulli-difference error bars.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PercolabError
from .lattice import build_box_graph
from .mc_kernel import augment_with_terminal, batch_connected
from .streams import replica_blocks, substream

# domain-separation tags for random substreams
TAG_THETA = 1
TAG_CROSSING = 2

#: cap on uniforms materialized at once (~128 MB of float64)
_MAX_FLOATS = 2**24


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    replicas: int
    seed: int


@dataclass(frozen=True)
class ThetaRow:
    p: float
    n: int
    estimate: float
    stderr: float
    replicas: int
    seed: int


@dataclass(frozen=True)
class ThetaCurve:
    rows: tuple  # ThetaRow, sorted by (n, p)
    coupled: bool = True


def _binomial(successes, replicas, seed):
    est = successes / replicas
    stderr = float(np.sqrt(est * (1.0 - est) / replicas))
    return Estimate(value=float(est), stderr=stderr, replicas=replicas, seed=seed)


def _uniform_slabs(rng, block_size, n_edges):
    """Yield row-slabs of the (block_size, n_edges) uniform matrix.

    Slabbing does not change the values: the generator fills row-major.
    """
    rows_per = max(1, _MAX_FLOATS // max(1, n_edges))
    done = 0
    while done < block_size:
        rows = min(rows_per, block_size - done)
        yield rng.random((rows, n_edges))
        done += rows


def _count_theta(g, p_values, replicas, seed):
    """Per-p success counts of {origin joined to boundary}, coupled across p."""
    edges_aug, nv, virt = augment_with_terminal(g.edges, g.n_vertices, g.boundary)
    counts = np.zeros(len(p_values), dtype=np.int64)
    for block, size in replica_blocks(replicas):
        rng = substream(seed, TAG_THETA, g.dim, g.radius, block)
        for u in _uniform_slabs(rng, size, g.n_edges):
            for j, p in enumerate(p_values):
                hit = batch_connected(edges_aug, u < p, nv, g.origin, virt)
                counts[j] += int(hit.sum())
    return counts


def estimate_theta_n(d, n, p, replicas, seed):
    """MC estimate of theta_n(p) = P[origin joined to the box boundary]."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    g = build_box_graph(d, n)
    count = _count_theta(g, [p], replicas, seed)[0]
    return _binomial(count, replicas, seed)


def theta_curve(d, n_list, p_grid, replicas, seed):
    """Theta estimates over an (n, p) grid, coupled across p at each n."""
    if len(n_list) == 0 or len(p_grid) == 0:
        raise ValueError("grids must be non-empty")
    rows = []
    for n in sorted(set(int(n) for n in n_list)):
        g = build_box_graph(d, n)
        ps = sorted(float(p) for p in p_grid)
        counts = _count_theta(g, ps, replicas, seed)
        for p, c in zip(ps, counts):
            est = _binomial(int(c), replicas, seed)
            rows.append(ThetaRow(p=p, n=n, estimate=est.value, stderr=est.stderr,
                                 replicas=replicas, seed=seed))
    return ThetaCurve(rows=tuple(rows), coupled=True)


def estimate_theta_derivative(d, n, p, replicas, seed, h=0.01):
    """Centered-difference estimate of d theta_n / dp with coupled sampling.

    Under the shared-uniform coupling the two indicators are ordered, so the
    difference is Bernoulli and the standard error is exact binomial.
    """
    if not (0.0 < p - h and p + h < 1.0):
        raise ValueError("p +- h must lie inside (0, 1)")
    g = build_box_graph(d, n)
    edges_aug, nv, virt = augment_with_terminal(g.edges, g.n_vertices, g.boundary)
    diff = 0
    for block, size in replica_blocks(replicas):
        rng = substream(seed, TAG_THETA, d, n, block)
        for u in _uniform_slabs(rng, size, g.n_edges):
            hi = batch_connected(edges_aug, u < p + h, nv, g.origin, virt)
            lo = batch_connected(edges_aug, u < p - h, nv, g.origin, virt)
            diff += int((hi & ~lo).sum())
    q = diff / replicas
    deriv = q / (2.0 * h)
    stderr = float(np.sqrt(q * (1.0 - q) / replicas)) / (2.0 * h)
    return Estimate(value=float(deriv), stderr=stderr, replicas=replicas, seed=seed)


def _build_crossing_graph(n):
    """Grid graph on [0,n]^2 with virtual left/right terminals appended."""
    side = n + 1
    nv = side * side
    edge_list = []
    for x in range(side):
        for y in range(side):
            v = x * side + y
            if x < n:
                edge_list.append((v, v + side))
            if y < n:
                edge_list.append((v, v + 1))
    edges = np.array(edge_list, dtype=np.int64)
    left = np.arange(side, dtype=np.int64)            # x = 0 face
    right = np.arange(n * side, nv, dtype=np.int64)   # x = n face
    edges_aug, nv, src = augment_with_terminal(edges, nv, left)
    edges_aug, nv, dst = augment_with_terminal(edges_aug, nv, right)
    return edges_aug, nv, src, dst, edges.shape[0]


def crossing_probability(n, p, replicas, seed):
    """MC estimate of the left-right open crossing of the [0,n]^2 grid."""
    edges_aug, nv, src, dst, n_edges = _build_crossing_graph(n)
    count = 0
    for block, size in replica_blocks(replicas):
        rng = substream(seed, TAG_CROSSING, n, block)
        for u in _uniform_slabs(rng, size, n_edges):
            count += int(batch_connected(edges_aug, u < p, nv, src, dst).sum())
    return _binomial(count, replicas, seed)


def estimate_pc_crossing(d, n, replicas, seed, resolution=1.0 / 512):
    """Locate the 1/2-crossing of the crossing probability by bisection.

    Uniforms are shared across all p evaluated, so the empirical crossing
    curve is exactly non-decreasing and bisection is well-defined.
    """
    if d != 2:
        raise ValueError("crossing-based p_c estimation is implemented for d=2")
    lo, hi = 0.0, 1.0
    f_lo = crossing_probability(n, lo, replicas, seed).value
    f_hi = crossing_probability(n, hi, replicas, seed).value
    if not (f_lo < 0.5 <= f_hi):
        raise PercolabError(
            "crossing probability does not bracket 1/2 on [0,1]; "
            "this signals an implementation fault"
        )
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if crossing_probability(n, mid, replicas, seed).value < 0.5:
            lo = mid
        else:
            hi = mid
    return Estimate(value=0.5 * (lo + hi), stderr=resolution,
                    replicas=replicas, seed=seed)
