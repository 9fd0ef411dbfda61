"""Cardinality-based cost model for decomposition trees.

A :class:`StatsCatalog` carries relation cardinalities, known bag join
cardinalities, and per-relation primary keys.  :func:`subtree_cost`
evaluates a rooted decomposition bottom-up: each bag pays for scanning
its cover relations and materializing its join, each parent pays a scan
for its semi-joins, and each child contributes a reduced-size term
modelling how much the up-phase semi-join still has to move.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .hypergraph import ids_of, mask_of, popcount


class MissingStatisticError(KeyError):
    """A required cardinality is absent and the fallback is disabled."""


def _xlog(x):
    """x * log2(x), flattened to 0 at and below 1."""
    return x * math.log2(x) if x > 1 else 0.0


@dataclass
class StatsCatalog:
    """Cardinality statistics over a hypergraph's relations and bags.

    ``relation_card`` maps edge id to |R|, ``bag_join_card`` maps a bag
    vertex mask to the cardinality of the join projected onto it, and
    ``primary_key`` maps edge id to the vertex mask of that relation's
    key (empty when unknown).  ``cap`` bounds the Cartesian fallback.
    """

    hypergraph: object
    relation_card: dict
    bag_join_card: dict = field(default_factory=dict)
    primary_key: dict = field(default_factory=dict)
    cap: int = 10**6

    def __post_init__(self):
        for e in range(self.hypergraph.n_edges):
            if e not in self.relation_card:
                raise MissingStatisticError(
                    f"no cardinality for relation {self.hypergraph.edge_names[e]!r}"
                )

    @classmethod
    def from_json(cls, h, text):
        """Load the JSON stats format (relations / bags / cap)."""
        data = json.loads(text) if isinstance(text, str) else text
        name_to_id = {n: i for i, n in enumerate(h.edge_names)}
        vname_to_id = {n: i for i, n in enumerate(h.vertex_names)}
        rel = {}
        keys = {}
        for name, entry in data.get("relations", {}).items():
            if name not in name_to_id:
                raise MissingStatisticError(f"unknown relation {name!r}")
            e = name_to_id[name]
            rel[e] = int(entry["card"])
            keys[e] = mask_of(vname_to_id[v] for v in entry.get("key", []))
        bags = {}
        for entry in data.get("bags", []):
            m = mask_of(vname_to_id[v] for v in entry["vars"])
            bags[m] = int(entry["card"])
        return cls(h, rel, bags, keys, int(data.get("cap", 10**6)))

    def join_card(self, bag, cover, allow_fallback=True):
        """|J| for a bag, falling back to a crude bound when unknown.

        Returns ``(value, fell_back)``.
        """
        if bag in self.bag_join_card:
            return self.bag_join_card[bag], False
        masks = self.hypergraph.edge_masks
        if len(cover) == 1 and masks[cover[0]] == bag:
            return self.relation_card[cover[0]], False
        if not allow_fallback:
            names = ",".join(self.hypergraph.vertex_names[v] for v in ids_of(bag))
            raise MissingStatisticError(f"no join cardinality for bag {{{names}}}")
        return fallback_join_card(bag, cover, self), True


def fallback_join_card(bag, cover, stats):
    """Crude join-size bound used when a bag cardinality is missing.

    A bag inside a single cover edge is bounded by the smallest such
    relation; otherwise the product of the cover's cardinalities,
    capped at ``stats.cap``.
    """
    if not cover:
        raise ValueError("empty cover")
    masks = stats.hypergraph.edge_masks
    inside = [stats.relation_card[e] for e in cover if not bag & ~masks[e]]
    if inside:
        return min(inside)
    prod = 1
    for e in cover:
        prod *= stats.relation_card[e]
        if prod >= stats.cap:
            return stats.cap
    return prod


def bag_cost(bag, cover, stats, allow_fallback=True):
    """Cost of materializing one bag: scan every cover relation, then
    write the join result.  A single-relation bag is free."""
    if not cover:
        raise ValueError("empty cover")
    if len(cover) == 1:
        return 0.0
    j, _ = stats.join_card(bag, cover, allow_fallback)
    return float(j) + sum(_xlog(stats.relation_card[e]) for e in cover)


def reduce_attrs(node, td, stats):
    """Vertices of a node's bag that its descendants can shrink.

    A vertex qualifies when it appears in some strict-descendant bag
    through a cover relation where it is not (part of) that relation's
    primary key.  Leaves map to the empty set.
    """
    if td.covers is None:
        raise ValueError("no covers attached")
    bag = td.bags[node]
    out = 0
    for d in td.subtree(node):
        if d == node:
            continue
        for e in td.covers[d]:
            em = td.hypergraph.edge_masks[e]
            key = stats.primary_key.get(e, 0)
            out |= bag & td.bags[d] & em & ~key
    return out


@dataclass
class CostReport:
    """Per-node cost pieces plus the recursive total."""

    node_bag_cost: list
    node_reduced_size: list
    node_scan_cost: list
    node_subtree_cost: list
    total: float
    fallback_nodes: tuple = ()


def subtree_cost(td, stats, allow_fallback=True):
    """Evaluate the full cost recursion over a rooted decomposition.

    Bottom-up: ReducedSz(u) is 0 when any child's is 0 (an empty child
    empties the semi-join chain), else |J_u| scaled down once per
    reducible attribute the bag shares with its parent; ScanCost(u) is
    charged only when u actually scans itself against nonempty
    children; a child contributes ReducedSz·log(ReducedSz) for the
    semi-join into its parent.
    """
    if td.covers is None:
        raise ValueError("no covers attached")
    n = len(td)
    order = sorted(range(n), key=td.depth, reverse=True)
    bagc = [0.0] * n
    reduced = [0.0] * n
    scan = [0.0] * n
    total = [0.0] * n
    fellback = []
    for u in order:
        kids = td.children(u)
        j, fb = stats.join_card(td.bags[u], td.covers[u], allow_fallback)
        if fb:
            fellback.append(u)
        bagc[u] = bag_cost(td.bags[u], td.covers[u], stats, allow_fallback)
        if any(reduced[c] == 0 for c in kids):
            reduced[u] = 0.0
        else:
            p = td.parents[u]
            ra = reduce_attrs(p, td, stats) & td.bags[u] if p >= 0 else reduce_attrs(u, td, stats)
            reduced[u] = j / (1 + popcount(ra))
        if kids and all(reduced[c] > 0 for c in kids):
            scan[u] = _xlog(j)
        total[u] = bagc[u] + scan[u] + sum(total[c] + _xlog(reduced[c]) for c in kids)
    grand = sum(total[r] for r in td.roots())
    return CostReport(bagc, reduced, scan, total, grand, tuple(fellback))


@dataclass
class EstimateCatalog:
    """Pre-exported engine estimates: per-bag plan costs and optional
    semi-join costs, replayed offline.

    The subtree recursion charges each child its estimated semi-join
    cost net of the two scans the estimate already includes, floored
    at 1.
    """

    hypergraph: object
    bag_costs: dict
    semijoin_costs: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, h, text):
        data = json.loads(text) if isinstance(text, str) else text
        vname_to_id = {n: i for i, n in enumerate(h.vertex_names)}
        bags = {}
        for entry in data.get("bags", []):
            m = mask_of(vname_to_id[v] for v in entry["vars"])
            bags[m] = float(entry["cost"])
        sjs = {}
        for entry in data.get("semijoins", []):
            a = mask_of(vname_to_id[v] for v in entry["parent"])
            b = mask_of(vname_to_id[v] for v in entry["child"])
            sjs[(a, b)] = float(entry["cost"])
        return cls(h, bags, sjs)

    def node_cost(self, bag, cover):
        if len(cover) == 1:
            return 0.0
        if bag not in self.bag_costs:
            raise MissingStatisticError("no estimate for bag")
        return self.bag_costs[bag]

    def total(self, td):
        if td.covers is None:
            raise ValueError("no covers attached")
        out = 0.0
        for u in range(len(td)):
            cu = self.node_cost(td.bags[u], td.covers[u])
            out += cu
            p = td.parents[u]
            if p >= 0:
                sj = self.semijoin_costs.get((td.bags[p], td.bags[u]))
                if sj is not None:
                    cp = self.node_cost(td.bags[p], td.covers[p])
                    out += max(sj - cp - cu, 1.0)
        return out
