"""Compiled batch connectivity kernel.

A single union-find pass answers "is src joined to dst?" for a whole block
of configurations at once.  Events like {origin connects to the boundary}
or {left face connects to right face} are encoded by appending a virtual
terminal vertex wired to the relevant vertex set with always-open
pseudo-edges, so every question becomes two-terminal connectivity.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True, parallel=True)
def batch_connected(edges, open_mask, n_vertices, src, dst):
    """Two-terminal connectivity for a block of configurations.

    edges: (E_total, 2) int64; entries beyond open_mask's width are
    pseudo-edges treated as always open.  open_mask: (R, E_real) bool.
    Returns a (R,) bool array: src joined to dst per replica.
    """
    n_rep = open_mask.shape[0]
    n_real = open_mask.shape[1]
    n_total = edges.shape[0]
    out = np.zeros(n_rep, dtype=np.bool_)
    for r in prange(n_rep):
        parent = np.arange(n_vertices)
        size = np.ones(n_vertices, dtype=np.int64)
        for e in range(n_total):
            if e < n_real and not open_mask[r, e]:
                continue
            ra = _find(parent, edges[e, 0])
            rb = _find(parent, edges[e, 1])
            if ra != rb:
                if size[ra] < size[rb]:
                    ra, rb = rb, ra
                parent[rb] = ra
                size[ra] += size[rb]
        out[r] = _find(parent, src) == _find(parent, dst)
    return out


def augment_with_terminal(edges, n_vertices, terminal_vertices):
    """Append a virtual vertex wired to `terminal_vertices` by pseudo-edges.

    Returns (edges_total, n_vertices + 1, index of the virtual vertex).
    """
    term = np.asarray(terminal_vertices, dtype=np.int64)
    virt = n_vertices
    pseudo = np.column_stack([term, np.full(term.shape, virt, dtype=np.int64)])
    return np.vstack([edges, pseudo]), n_vertices + 1, virt
