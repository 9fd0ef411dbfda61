"""Candidate bag sets built from edge covers and connectivity components.

A level-0 candidate bag is a nonempty set of the form
``union(lambda1) & union(component)`` where ``lambda1`` is a set of at
most ``k`` edges and the component is one of the edge components left
by removing the vertices of another set ``lambda2`` of at most ``k``
edges (``lambda2`` may be empty, in which case the components are the
connected components of the hypergraph).

Higher levels replace the ``lambda1`` pool with sub-edges: pairwise
intersections of the previous pool with the previous level's bags.
``lambda2`` always ranges over the original edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .hypergraph import Hypergraph, ids_of, popcount

DEFAULT_MAX_BAGS = 1_000_000
DEFAULT_MAX_STEPS = 10_000_000

_NUMPY_THRESHOLD = 20_000  # pair-count beyond which the vectorized path is used


class ResourceBudgetError(RuntimeError):
    """Raised when bag enumeration exceeds its configured budget."""


@dataclass(frozen=True)
class SubEdge:
    """A (sub)set of an original edge, usable in covers.

    ``origin`` is the id of the edge it is a subset of; level 0
    sub-edges are the edges themselves.
    """

    vertices: int
    origin: int
    level: int


@dataclass(frozen=True)
class CandidateBag:
    """A candidate bag with the first witness found for it.

    ``lambda1`` holds pool indices (into the owning set's ``pool``),
    ``lambda2`` original edge ids, and ``component`` the vertex union
    of the witnessing component.
    """

    vertices: int
    lambda1: tuple
    lambda2: tuple
    component: int
    level: int


@dataclass
class CandidateBagSet:
    """All candidate bags of one level, plus the cover pool that made them."""

    hypergraph: Hypergraph
    k: int
    level: int
    pool: list  # list[SubEdge]
    bags: dict = field(default_factory=dict)  # vertices mask -> CandidateBag
    fixpoint: bool = False

    def masks(self):
        return list(self.bags)

    def __len__(self):
        return len(self.bags)

    def serialize(self):
        h = self.hypergraph
        lines = []
        for m, bag in sorted(self.bags.items(), key=lambda kv: ids_of(kv[0])):
            vs = ",".join(h.vertex_names[v] for v in ids_of(m))
            l1 = ",".join(h.edge_names[self.pool[i].origin] for i in bag.lambda1)
            l2 = ",".join(h.edge_names[i] for i in bag.lambda2)
            comp = ",".join(h.vertex_names[v] for v in ids_of(bag.component))
            lines.append(
                f"bag {vs} | lambda1 {l1} | lambda2 {l2} | comp {comp} | level {bag.level}"
            )
        return "\n".join(lines) + "\n"


def pairwise_intersections(sets_a, sets_b):
    """All nonempty pairwise intersections of two families of masks."""
    out = []
    seen = set()
    for a in sets_a:
        for b in sets_b:
            r = a & b
            if r and r not in seen:
                seen.add(r)
                out.append(r)
    return out


def _separator_unions(h, k, max_steps):
    """Distinct ``union(lambda2)`` masks with their first witness combos.

    Returns a list of ``(sep_mask, edge_id_tuple)`` in enumeration
    order (combination sizes 0..k, each in sorted edge-id order).
    """
    masks = h.edge_masks
    out = []
    seen = set()
    steps = 0
    for size in range(k + 1):
        for combo in combinations(range(h.n_edges), size):
            steps += 1
            if steps > max_steps:
                raise ResourceBudgetError("separator enumeration exceeded step budget")
            m = 0
            for i in combo:
                m |= masks[i]
            if m not in seen:
                seen.add(m)
                out.append((m, combo))
    return out


def _cover_unions(pool, k, max_steps):
    """Distinct ``union(lambda1)`` masks over pool index combos of size 1..k.

    First-witness order: combination sizes ascending, each size in
    lexicographic index order.  Falls back from the vectorized path when
    masks do not fit 64 bits.
    """
    n = len(pool)
    total = sum(_ncombs(n, size) for size in range(1, k + 1))
    if total > max_steps:
        raise ResourceBudgetError("cover enumeration exceeded step budget")
    masks = [s.vertices for s in pool]
    if (
        total > _NUMPY_THRESHOLD
        and k <= 3
        and (not masks or max(masks) < 1 << 63)
    ):
        arr = np.array(masks, dtype=np.uint64)
        out = []
        seen = set()
        for size in range(1, min(k, n) + 1):
            if size == 1:
                idx = np.arange(n, dtype=np.int64)[:, None]
                unions = arr
            elif size == 2:
                a, b = np.triu_indices(n, 1)
                idx = np.column_stack([a, b])
                unions = arr[a] | arr[b]
            else:
                a, b = np.triu_indices(n, 1)
                blocks = []
                pair_unions = arr[a] | arr[b]
                for i in range(n - 2):
                    sel = a > i
                    blocks.append(
                        (
                            np.column_stack(
                                [np.full(int(sel.sum()), i, dtype=np.int64),
                                 a[sel], b[sel]]
                            ),
                            np.uint64(masks[i]) | pair_unions[sel],
                        )
                    )
                idx = np.concatenate([x for x, _ in blocks])
                unions = np.concatenate([u for _, u in blocks])
            uniq, first = np.unique(unions, return_index=True)
            order = np.argsort(first)
            for m, row in zip(uniq[order].tolist(), first[order].tolist()):
                if m not in seen:
                    seen.add(m)
                    out.append((m, tuple(idx[row].tolist())))
        return out
    out = []
    seen = set()
    for size in range(1, k + 1):
        for combo in combinations(range(n), size):
            m = 0
            for i in combo:
                m |= masks[i]
            if m not in seen:
                seen.add(m)
                out.append((m, combo))
    return out


def _ncombs(n, size):
    import math

    return math.comb(n, size)


@lru_cache(maxsize=32)
def _component_entries(h, k, max_steps):
    """Distinct component unions over all separators, first-witness order.

    Cached because the separator side of the enumeration depends only on
    the hypergraph and ``k``, not on the sub-edge pool, so iterated
    levels can reuse it.
    """
    seps = _separator_unions(h, k, max_steps)
    comp_entries = []  # (component union mask, lambda2 edge ids)
    comp_seen = set()
    for sep, combo in seps:
        for union in h.component_unions(sep):
            if union not in comp_seen:
                comp_seen.add(union)
                comp_entries.append((union, combo))
    return tuple(comp_entries)


def _enumerate_bags(h, k, pool, level, max_bags, max_steps):
    covers = _cover_unions(pool, k, max_steps)
    comp_entries = _component_entries(h, k, max_steps)

    bags = {}
    n_pairs = len(covers) * len(comp_entries)
    if n_pairs > max_steps:
        raise ResourceBudgetError("bag enumeration exceeded step budget")

    use_numpy = n_pairs > _NUMPY_THRESHOLD and h.n_vertices <= 64
    if use_numpy:
        cover_arr = np.array([c for c, _ in covers], dtype=np.uint64)
        for cm, l2 in comp_entries:
            inter = cover_arr & np.uint64(cm)
            uniq, first = np.unique(inter, return_index=True)
            for m, idx in zip(uniq.tolist(), first.tolist()):
                if m and m not in bags:
                    bags[m] = CandidateBag(m, covers[idx][1], l2, cm, level)
                    if len(bags) > max_bags:
                        raise ResourceBudgetError("bag count exceeded budget")
    else:
        for cm, l2 in comp_entries:
            for um, l1 in covers:
                m = um & cm
                if m and m not in bags:
                    bags[m] = CandidateBag(m, l1, l2, cm, level)
                    if len(bags) > max_bags:
                        raise ResourceBudgetError("bag count exceeded budget")
    return bags


def soft_bags(h, k, max_bags=DEFAULT_MAX_BAGS, max_steps=DEFAULT_MAX_STEPS):
    """The level-0 candidate bag set for width parameter ``k``."""
    pool = [SubEdge(m, i, 0) for i, m in enumerate(h.edge_masks)]
    bags = _enumerate_bags(h, k, pool, 0, max_bags, max_steps)
    return CandidateBagSet(h, k, 0, pool, bags)


def iterate_level(prev, max_bags=DEFAULT_MAX_BAGS, max_steps=DEFAULT_MAX_STEPS):
    """Build the next level's bag set from ``prev``.

    The new cover pool is the old pool plus all nonempty intersections
    of old pool members with old bags, deduplicated by vertex set; the
    separator side is unchanged.  Returns ``prev`` itself (with
    ``fixpoint`` set) when neither the pool nor the bags grow.
    """
    h = prev.hypergraph
    pool = list(prev.pool)
    seen = {s.vertices for s in pool}
    bag_arr = None
    if len(prev.bags) * len(prev.pool) > _NUMPY_THRESHOLD and h.n_vertices <= 64:
        bag_arr = np.fromiter(prev.bags, dtype=np.uint64, count=len(prev.bags))
    for sub in prev.pool:
        if bag_arr is not None:
            for m in np.unique(bag_arr & np.uint64(sub.vertices)).tolist():
                if m and m not in seen:
                    seen.add(m)
                    pool.append(SubEdge(m, sub.origin, prev.level + 1))
        else:
            for bm in prev.bags:
                m = sub.vertices & bm
                if m and m not in seen:
                    seen.add(m)
                    pool.append(SubEdge(m, sub.origin, prev.level + 1))

    bags = _enumerate_bags(h, prev.k, pool, prev.level + 1, max_bags, max_steps)
    if len(pool) == len(prev.pool) and bags.keys() == prev.bags.keys():
        prev.fixpoint = True
        return prev
    return CandidateBagSet(h, prev.k, prev.level + 1, pool, bags)


def trimmed_next_pool(prev, min_size=2):
    """A compact next-level cover pool for upper-bound probes.

    Keeps the previous pool plus, per origin edge, the inclusion-maximal
    proper sub-edges (with at least ``min_size`` vertices) obtainable by
    intersecting with the previous bags.  Any solve accepting over bags
    built from this pool is sound, since the pool is a subset of the
    full next-level pool.
    """
    h = prev.hypergraph
    by_origin = {}
    bag_arr = None
    if len(prev.bags) > 1_000 and h.n_vertices <= 64:
        bag_arr = np.fromiter(prev.bags, dtype=np.uint64, count=len(prev.bags))
    for sub in prev.pool:
        if bag_arr is not None:
            inters = np.unique(bag_arr & np.uint64(sub.vertices)).tolist()
        else:
            inters = {sub.vertices & bm for bm in prev.bags}
        for m in inters:
            if m and m != sub.vertices and popcount(m) >= min_size:
                by_origin.setdefault(sub.origin, set()).add(m)
    pool = list(prev.pool)
    seen = {s.vertices for s in pool}
    for orig in sorted(by_origin):
        cands = by_origin[orig]
        for m in sorted(cands, key=ids_of):
            if m in seen:
                continue
            if any(o != m and not m & ~o for o in cands):
                continue  # not inclusion-maximal
            seen.add(m)
            pool.append(SubEdge(m, orig, prev.level + 1))
    return pool


def cover_union_masks(pool, k, max_steps=DEFAULT_MAX_STEPS):
    """Distinct unions of at most ``k`` pool members."""
    return [m for m, _ in _cover_unions(pool, k, max_steps)]


def edge_cover_bags(h, k, connected=False, max_steps=DEFAULT_MAX_STEPS):
    """Distinct unions of at most ``k`` edges, usable as decomposition nodes.

    A union that is a strict subset of a single edge is dropped: a node
    with such a bag is always subsumed by a node carrying the whole edge.
    With ``connected=True``, only bags with some exact connected cover
    are kept, i.e. a set of at most ``k`` edges whose union equals the
    bag and that forms a connected subhypergraph.

    Returns a dict mapping each bag mask to its first (or first
    connected) witness tuple of edge ids.
    """
    masks = h.edge_masks
    witnesses = {}
    steps = 0
    for size in range(1, k + 1):
        for combo in combinations(range(h.n_edges), size):
            steps += 1
            if steps > max_steps:
                raise ResourceBudgetError("cover enumeration exceeded step budget")
            m = 0
            for i in combo:
                m |= masks[i]
            if m in witnesses:
                continue
            if connected and not _cover_is_connected([masks[i] for i in combo]):
                continue
            witnesses[m] = combo
    out = {}
    for m in sorted(witnesses, key=ids_of):
        if any(m != em and not m & ~em for em in masks):
            continue
        out[m] = witnesses[m]
    return out


def _cover_is_connected(cover_masks):
    """Whether a set of edge masks forms a connected subhypergraph."""
    if not cover_masks:
        return False
    reach = cover_masks[0]
    pending = list(cover_masks[1:])
    progress = True
    while pending and progress:
        progress = False
        for m in list(pending):
            if m & reach:
                reach |= m
                pending.remove(m)
                progress = True
    return not pending


def soft_bags_level(h, k, level, max_bags=DEFAULT_MAX_BAGS, max_steps=DEFAULT_MAX_STEPS):
    """The level-``i`` candidate bag set, short-circuiting at a fixpoint."""
    cur = soft_bags(h, k, max_bags, max_steps)
    for _ in range(level):
        nxt = iterate_level(cur, max_bags, max_steps)
        if nxt is cur:
            break
        cur = nxt
    return cur
