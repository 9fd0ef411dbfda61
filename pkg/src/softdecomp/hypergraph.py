"""Hypergraphs with vertex-set connectivity primitives.

Vertices are referred to by integer ids (assigned in order of first
appearance) and vertex sets are manipulated as integer bitmasks.  All
structures are immutable once constructed, which lets connectivity
queries be cached safely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property


_IDENT = r"[A-Za-z0-9_']+"
_STMT_RE = re.compile(rf"({_IDENT})\s*\(([^()]*)\)")
_IDENT_RE = re.compile(rf"^{_IDENT}$")


class HypergraphError(ValueError):
    """Raised for malformed hypergraphs or parse failures."""


def mask_of(ids):
    """Build a bitmask from an iterable of vertex ids."""
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def ids_of(mask):
    """Return the sorted tuple of vertex ids set in ``mask``."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask):
    return mask.bit_count()


@dataclass(frozen=True)
class EdgeComponent:
    """A maximal set of pairwise [S]-connected edges.

    ``edge_ids`` are the member edges (sorted) and ``vertices`` is the
    bitmask of the union of their vertex sets (which may include
    vertices of the separator itself).
    """

    edge_ids: tuple
    vertices: int


@dataclass(frozen=True)
class Hypergraph:
    """An immutable hypergraph with named vertices and named edges.

    Edges keep their declaration order; duplicate vertex sets are
    allowed (the duplicates are recorded in ``duplicate_scheme_ids``)
    but every vertex must occur in at least one edge.
    """

    vertex_names: tuple
    edge_names: tuple
    edge_vertex_ids: tuple  # tuple of sorted tuples of vertex ids

    def __post_init__(self):
        if len(self.edge_names) != len(self.edge_vertex_ids):
            raise HypergraphError("edge name/vertex list length mismatch")
        n = len(self.vertex_names)
        seen = 0
        for name, vs in zip(self.edge_names, self.edge_vertex_ids):
            if not vs:
                raise HypergraphError(f"edge {name!r} is empty")
            if list(vs) != sorted(set(vs)):
                raise HypergraphError(f"edge {name!r} vertex ids not sorted/unique")
            for v in vs:
                if not 0 <= v < n:
                    raise HypergraphError(f"edge {name!r} uses unknown vertex id {v}")
                seen |= 1 << v
        if seen != (1 << n) - 1 and n > 0:
            missing = [self.vertex_names[v] for v in range(n) if not seen >> v & 1]
            raise HypergraphError(f"isolated vertices: {', '.join(missing)}")
        if len(set(self.vertex_names)) != n:
            raise HypergraphError("duplicate vertex names")
        if len(set(self.edge_names)) != len(self.edge_names):
            raise HypergraphError("duplicate edge names")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_named_edges(edges, allow_isolated=False, extra_vertices=()):
        """Build a hypergraph from ``(edge_name, [vertex names])`` pairs.

        Vertex ids follow first appearance.  ``extra_vertices`` adds
        vertices not covered by any edge; with ``allow_isolated`` these
        are wrapped in fresh unary edges, otherwise they are an error.
        """
        order = {}
        for _, vs in edges:
            for v in vs:
                order.setdefault(v, len(order))
        wrapped = list(edges)
        for v in extra_vertices:
            if v in order:
                continue
            if not allow_isolated:
                raise HypergraphError(f"isolated vertex {v!r}")
            order.setdefault(v, len(order))
            wrapped.append((_fresh_name("iso_" + v, {e for e, _ in wrapped}), [v]))
        names = tuple(order)
        edge_names = tuple(e for e, _ in wrapped)
        edge_ids = tuple(tuple(sorted({order[v] for v in vs})) for _, vs in wrapped)
        return Hypergraph(names, edge_names, edge_ids)

    # -- cached geometry -----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertex_names)

    @property
    def n_edges(self):
        return len(self.edge_names)

    @cached_property
    def all_vertices_mask(self):
        return (1 << self.n_vertices) - 1

    @cached_property
    def edge_masks(self):
        return tuple(mask_of(vs) for vs in self.edge_vertex_ids)

    @cached_property
    def adjacency(self):
        """For each vertex, the union mask of all edges containing it."""
        adj = [0] * self.n_vertices
        for m in self.edge_masks:
            vs = ids_of(m)
            for v in vs:
                adj[v] |= m
        return tuple(adj)

    @cached_property
    def duplicate_scheme_ids(self):
        """Edge ids whose vertex set repeats an earlier edge."""
        seen = {}
        dups = []
        for i, m in enumerate(self.edge_masks):
            if m in seen:
                dups.append(i)
            else:
                seen[m] = i
        return tuple(dups)

    @cached_property
    def is_connected(self):
        if self.n_vertices == 0:
            return True
        return len(self.vertex_components(0)) == 1

    def edge_id(self, name):
        try:
            return self.edge_names.index(name)
        except ValueError:
            raise HypergraphError(f"no edge named {name!r}") from None

    def vertex_id(self, name):
        try:
            return self.vertex_names.index(name)
        except ValueError:
            raise HypergraphError(f"no vertex named {name!r}") from None

    # -- connectivity --------------------------------------------------------

    def closure(self, seed, sep):
        """Vertices [sep]-reachable from ``seed & ~sep`` (a bitmask)."""
        free = ~sep
        comp = seed & free
        frontier = comp
        adj = self.adjacency
        while frontier:
            grown = 0
            m = frontier
            while m:
                v = (m & -m).bit_length() - 1
                grown |= adj[v]
                m &= m - 1
            frontier = grown & free & ~comp
            comp |= frontier
        return comp

    def vertex_components(self, sep):
        """Maximal [sep]-connected vertex sets, as bitmasks.

        The result is ordered by smallest member vertex id.
        """
        rest = self.all_vertices_mask & ~sep
        comps = []
        while rest:
            v = rest & -rest
            comp = self.closure(v, sep)
            comps.append(comp)
            rest &= ~comp
        return comps

    def edge_components(self, sep):
        """Maximal sets of pairwise [sep]-connected edges.

        Returns a list of :class:`EdgeComponent` in order of smallest
        member vertex.  Edges fully contained in ``sep`` belong to no
        component.
        """
        comps = self.vertex_components(sep)
        out = []
        masks = self.edge_masks
        for comp in comps:
            edge_ids = tuple(i for i, m in enumerate(masks) if m & comp)
            if edge_ids:
                union = 0
                for i in edge_ids:
                    union |= masks[i]
                out.append(EdgeComponent(edge_ids, union))
        return out

    def component_unions(self, sep):
        """Vertex unions of the [sep]-components, skipping edge ids.

        Equivalent to ``[c.vertices for c in self.edge_components(sep)]``
        but much faster on edge-heavy hypergraphs.
        """
        adj = self.adjacency
        out = []
        for comp in self.vertex_components(sep):
            union = 0
            m = comp
            while m:
                union |= adj[(m & -m).bit_length() - 1]
                m &= m - 1
            out.append(union)
        return out

    def lambda_components(self, edge_ids):
        """[lambda]-components for a set of edges used as separator."""
        sep = 0
        for i in edge_ids:
            sep |= self.edge_masks[i]
        return self.edge_components(sep)

    # -- derived hypergraphs ---------------------------------------------

    def induced(self, vertex_mask):
        """The subhypergraph induced on ``vertex_mask``.

        Edges become their (nonempty) intersections with the mask;
        intersections with equal vertex sets are merged, keeping the
        first edge's name.
        """
        seen = {}
        edges = []
        for name, m in zip(self.edge_names, self.edge_masks):
            r = m & vertex_mask
            if r and r not in seen:
                seen[r] = name
                edges.append((name, [self.vertex_names[v] for v in ids_of(r)]))
        return Hypergraph.from_named_edges(edges)

    # -- text format ---------------------------------------------------------

    def serialize(self):
        lines = []
        for name, vs in zip(self.edge_names, self.edge_vertex_ids):
            lines.append(f"{name}({','.join(self.vertex_names[v] for v in vs)})")
        return ",\n".join(lines) + "\n"


def _fresh_name(base, taken):
    name = base
    i = 1
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    return name


def parse_hypergraph(text, allow_isolated=False):
    """Parse the ``name(v1,v2,...)`` statement format.

    Statements are separated by commas and/or newlines; ``%`` starts a
    comment running to end of line.  Vertex ids are assigned by first
    appearance.  ``allow_isolated`` has no effect on well-formed input
    (every parsed vertex occurs in an edge) but is accepted for
    symmetry with programmatic construction.
    """
    stripped = []
    for line in text.splitlines():
        cut = line.find("%")
        stripped.append(line if cut < 0 else line[:cut])
    body = "\n".join(stripped)

    edges = []
    pos = 0
    leftover = []
    for m in _STMT_RE.finditer(body):
        leftover.append(body[pos:m.start()])
        pos = m.end()
        name, inner = m.group(1), m.group(2)
        vs = [p.strip() for p in inner.split(",")] if inner.strip() else []
        if not vs or any(not _IDENT_RE.match(v) for v in vs):
            raise HypergraphError(f"bad vertex list in edge {name!r}: ({inner})")
        edges.append((name, vs))
    leftover.append(body[pos:])
    junk = "".join(leftover).replace(",", "").split()
    if junk:
        raise HypergraphError(f"unexpected input near {junk[0]!r}")
    if not edges:
        raise HypergraphError("no edges found")
    names = [e for e, _ in edges]
    if len(set(names)) != len(names):
        dup = next(n for i, n in enumerate(names) if n in names[:i])
        raise HypergraphError(f"duplicate edge name {dup!r}")
    return Hypergraph.from_named_edges(edges, allow_isolated=allow_isolated)
