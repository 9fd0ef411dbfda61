"""Independent checkers: decomposition validation, exact width probes,
and exhaustive enumeration of decompositions over a candidate bag set.

These are deliberately simple and separate from the solver so they can
serve as ground truth in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .hypergraph import Hypergraph, ids_of, popcount
from .solver import TreeDecomposition, minimum_cover

DEFAULT_SUBSET_VERTEX_CAP = 14
DEFAULT_EDGE_CAP = 12


class OracleBudgetError(RuntimeError):
    """Raised when an exact check would exceed its configured size cap."""


@dataclass
class ValidationReport:
    """Outcome of validating a decomposition; ``ok`` iff no failures."""

    failures: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def record(self, name, ok, detail=""):
        self.checks.append(name)
        if not ok:
            self.failures.append(f"{name}: {detail}" if detail else name)


def validate_td(h, td, bag_masks=None, k=None, check_compnf=True, check_special=False):
    """Validate ``td`` against the decomposition conditions.

    Checks edge coverage, connectedness, optional membership of every
    bag in ``bag_masks``, optional cover width ``k``, the
    component-normal-form condition, and (for hypertree
    decompositions, with covers attached) the descendant condition
    that a cover vertex reappearing below must be in the bag.
    """
    rep = ValidationReport()
    n = len(td.bags)

    for e, m in zip(h.edge_names, h.edge_masks):
        if not any(m & ~bag == 0 for bag in td.bags):
            rep.record("edge-coverage", False, f"edge {e} in no bag")
    if "edge-coverage" not in rep.checks:
        rep.record("edge-coverage", True)

    ok = True
    for v in range(h.n_vertices):
        nodes = {i for i, bag in enumerate(td.bags) if bag >> v & 1}
        if not nodes:
            continue
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in [td.parents[u], *td.children(u)]:
                if w >= 0 and w in nodes and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != nodes:
            ok = False
            rep.record("connectedness", False, f"vertex {h.vertex_names[v]} not contiguous")
    if ok:
        rep.record("connectedness", True)

    if bag_masks is not None:
        allowed = set(bag_masks)
        bad = [i for i, bag in enumerate(td.bags) if bag not in allowed]
        rep.record("bag-membership", not bad, f"nodes {bad} use foreign bags")

    if k is not None:
        for i, bag in enumerate(td.bags):
            cover = td.covers[i] if td.covers is not None else minimum_cover(h, bag, max_size=k)
            if cover is None or len(cover) > k:
                rep.record("cover-width", False, f"node {i} not coverable by {k} edges")
        if "cover-width" not in rep.checks:
            rep.record("cover-width", True)

    if check_compnf:
        ok = True
        subtree_union = _subtree_unions(td)
        for c in range(n):
            u = td.parents[c]
            if u < 0:
                continue
            comps = h.edge_components(td.bags[u])
            want = subtree_union[c]
            matches = [
                comp for comp in comps
                if comp.vertices | (td.bags[u] & td.bags[c]) == want
            ]
            if len(matches) != 1:
                ok = False
                rep.record(
                    "component-normal-form", False,
                    f"child {c} of {u} matches {len(matches)} components",
                )
        if ok:
            rep.record("component-normal-form", True)

    if check_special:
        if td.covers is None:
            rep.record("cover-descent", False, "no covers attached")
        else:
            ok = True
            subtree_union = _subtree_unions(td)
            for i in range(n):
                lam = 0
                for e in td.covers[i]:
                    lam |= h.edge_masks[e]
                if subtree_union[i] & lam & ~td.bags[i]:
                    ok = False
                    rep.record("cover-descent", False, f"node {i} leaks cover vertices below")
            if ok:
                rep.record("cover-descent", True)

    return rep


def _subtree_unions(td):
    out = [0] * len(td.bags)
    for i in reversed(range(len(td.bags))):  # children are created after parents
        out[i] |= td.bags[i]
        p = td.parents[i]
        if p >= 0:
            out[p] |= out[i]
    return out


# -- exact hypertree width ----------------------------------------------------


def hw_leq(h, k, max_edges=DEFAULT_EDGE_CAP, max_steps=20_000_000):
    """A width-``k`` hypertree decomposition of ``h``, or None.

    Exhaustive search over cover-driven separators with memoization;
    intended for small inputs (raise ``max_edges`` explicitly for
    larger ones).  The returned decomposition has covers attached and
    satisfies the descendant condition by construction.
    """
    if h.n_edges > max_edges:
        raise OracleBudgetError(
            f"hypertree width check capped at {max_edges} edges; pass max_edges to raise"
        )
    searcher = _HwSearch(h, k, max_steps)
    nodes = []
    for comp in h.edge_components(0):
        tree = searcher.decompose(frozenset(comp.edge_ids), 0)
        if tree is None:
            return None
        nodes.append(tree)
    bags, parents, covers = [], [], []

    def emit(node, parent):
        chi, lam, children = node
        i = len(bags)
        bags.append(chi)
        parents.append(parent)
        covers.append(lam)
        for ch in children:
            emit(ch, i)
        return i

    first = None
    for node in nodes:
        r = emit(node, -1 if first is None else first)
        if first is None:
            first = r
    td = TreeDecomposition(h, bags, parents, covers)
    return td


class _HwSearch:
    def __init__(self, h, k, max_steps):
        self.h = h
        self.k = k
        self.max_steps = max_steps
        self.steps = 0
        self.memo = {}

    def decompose(self, comp, conn):
        """A decomposition node ``(bag, cover, children)`` for the edge
        component ``comp`` whose interface to the parent is ``conn``."""
        key = (comp, conn)
        if key in self.memo:
            return self.memo[key]
        h = self.h
        vc = 0
        for e in comp:
            vc |= h.edge_masks[e]
        region = vc | conn
        candidates = [e for e in range(h.n_edges) if h.edge_masks[e] & region]
        # Order large edges first: they cover interfaces faster.
        candidates.sort(key=lambda e: (-popcount(h.edge_masks[e] & region), e))
        result = None
        for lam in self._lambdas(candidates, conn, vc):
            self.steps += 1
            if self.steps > self.max_steps:
                raise OracleBudgetError("hypertree width search exceeded step budget")
            lam_mask = 0
            for e in lam:
                lam_mask |= h.edge_masks[e]
            chi = lam_mask & region
            if not chi & vc & ~conn:  # bag must make progress into the component
                continue
            children = []
            done = True
            for sub_edges, sub_vc in _local_components(h, comp, chi):
                child = self.decompose(sub_edges, sub_vc & chi)
                if child is None:
                    done = False
                    break
                children.append(child)
            if done:
                result = (chi, tuple(sorted(lam)), tuple(children))
                break
        self.memo[key] = result
        return result

    def _lambdas(self, candidates, conn, vc):
        """Yield all candidate subsets of size <= k that cover ``conn``."""
        k = self.k
        masks = self.h.edge_masks
        n = len(candidates)
        suffix = [0] * (n + 1)
        for j in reversed(range(n)):
            suffix[j] = suffix[j + 1] | masks[candidates[j]]

        def rec(idx, chosen, uncovered):
            if not uncovered:
                yield tuple(sorted(chosen))
            if len(chosen) == k or idx == n:
                return
            if uncovered & ~suffix[idx]:
                return  # interface leftovers no remaining candidate can cover
            for j in range(idx, n):
                if uncovered & ~suffix[j]:
                    return
                e = candidates[j]
                chosen.append(e)
                yield from rec(j + 1, chosen, uncovered & ~masks[e])
                chosen.pop()

        yield from rec(0, [], conn)


def _local_components(h, comp, sep):
    """Components of the edge set ``comp`` when connectivity may only use
    vertices outside ``sep`` and edges inside ``comp``."""
    remaining = {e for e in comp if h.edge_masks[e] & ~sep}
    out = []
    while remaining:
        seed = next(iter(remaining))
        group = {seed}
        grow = h.edge_masks[seed] & ~sep
        changed = True
        while changed:
            changed = False
            for e in list(remaining - group):
                if h.edge_masks[e] & grow:
                    group.add(e)
                    grow |= h.edge_masks[e] & ~sep
                    changed = True
        remaining -= group
        vc = 0
        for e in group:
            vc |= h.edge_masks[e]
        out.append((frozenset(group), vc))
    out.sort(key=lambda t: min(t[0]))
    return out


# -- exact generalized hypertree width ----------------------------------------


def ghw_leq(h, k, max_vertices=DEFAULT_SUBSET_VERTEX_CAP, max_steps=20_000_000,
            method="auto"):
    """A width-``k`` generalized hypertree decomposition, or None.

    ``method="subsets"`` is exact: it searches over all vertex sets
    coverable by at most ``k`` edges (every decomposition can be
    brought into component normal form with bags shrunk, so this
    family is complete); it is capped at ``max_vertices`` vertices.
    ``method="probe"`` only attempts to certify the upper bound, by
    solving over candidate bags built from sub-edge covers; a negative
    probe raises instead of answering.  ``"auto"`` picks subsets when
    they fit and the probe otherwise.
    """
    from .solver import attach_covers, solve

    if method == "auto":
        method = "subsets" if h.n_vertices <= max_vertices else "probe"
    if method == "subsets":
        if h.n_vertices > max_vertices:
            raise OracleBudgetError(
                f"generalized width check capped at {max_vertices} vertices"
            )
        family = []
        for m in range(1, 1 << h.n_vertices):
            if minimum_cover(h, m, max_size=k) is not None:
                family.append(m)
        res = solve(h, family, max_evals=max_steps)
        if not res.accepted:
            return None
        return attach_covers(res.decomposition, max_size=k)
    if method == "probe":
        return _ghw_probe(h, k, max_steps)
    raise ValueError(f"unknown method {method!r}")


def _ghw_probe(h, k, max_steps):
    """Certify ghw <= k by solving over sub-edge-derived candidate bags.

    Sound for acceptance (every bag is covered by at most ``k``
    original edges); raises when no certificate is found, since the
    candidate set is not exhaustive at this size.
    """
    from . import bags as bagmod
    from .solver import attach_covers, solve

    level0 = bagmod.soft_bags(h, k, max_bags=2_000_000, max_steps=max_steps)
    res = solve(h, level0)
    if not res.accepted:
        pool = bagmod.trimmed_next_pool(level0)
        masks = set(level0.bags)
        masks.update(bagmod.cover_union_masks(pool, k, max_steps))
        res = solve(h, sorted(masks))
        if not res.accepted:
            raise OracleBudgetError("upper-bound probe found no certificate")
        cover_pool = [s.vertices for s in pool]
        origin = [s.origin for s in pool]
    else:
        cover_pool = list(h.edge_masks)
        origin = list(range(h.n_edges))
    td = res.decomposition
    attach_covers(td, pool_masks=cover_pool, max_size=k)
    td.covers = [tuple(sorted({origin[i] for i in c})) for c in td.covers]
    rep = validate_td(h, td, k=k, check_compnf=False)
    if not rep.ok:
        raise OracleBudgetError("probe produced an invalid decomposition")
    return td


# -- exhaustive decomposition enumeration -------------------------------------


def iter_all_ctds(h, bags, max_steps=2_000_000):
    """Yield decompositions over the candidate bags, up to isomorphism.

    Enumerates lazily by recursive block decomposition, exploring every
    basis; trees are produced in a canonical rooted form (children
    sorted by their encodings), and distinct yields encode distinct
    trees.  Block repeats along a recursion path are pruned, which
    drops only redundant (collapsible) trees.  Memory stays
    proportional to the recursion depth, so taking only the first few
    trees is cheap even when the full count is astronomical.
    """
    masks = sorted({m for m in (bags.bags if hasattr(bags, "bags") else bags)})
    state = {"steps": 0}

    def options(block, path):
        s, c = block
        sc = s | c
        for x in masks:
            if x == s or x & ~sc:
                continue
            state["steps"] += 1
            if state["steps"] > max_steps:
                raise OracleBudgetError("decomposition enumeration exceeded step budget")
            ys = [y for y in h.vertex_components(x) if not y & ~c]
            cover = x
            for y in ys:
                cover |= y
            if c & ~cover:
                continue
            if any(e & c and e & ~cover for e in h.edge_masks):
                continue
            subs = [(x, y) for y in ys]
            if any(sub in path for sub in subs):
                continue
            deeper = path | {block}

            def rec(i, acc, x=x, subs=subs, deeper=deeper):
                if i == len(subs):
                    yield (x, tuple(sorted(acc)))
                    return
                for t in options(subs[i], deeper):
                    yield from rec(i + 1, acc + (t,))

            yield from rec(0, ())

    comps = h.vertex_components(0)

    def roots(i, acc):
        if i == len(comps):
            yield acc
            return
        for t in options((0, comps[i]), frozenset()):
            yield from roots(i + 1, acc + (t,))

    for combo in roots(0, ()):
        bags_out, parents = [], []

        def emit(node, parent):
            i = len(bags_out)
            bags_out.append(node[0])
            parents.append(parent)
            for ch in node[1]:
                emit(ch, i)
            return i

        first = None
        for node in combo:
            r = emit(node, -1 if first is None else first)
            if first is None:
                first = r
        yield TreeDecomposition(h, list(bags_out), list(parents))


def enumerate_all_ctds(h, bags, max_trees=20_000, max_steps=2_000_000):
    """All decompositions over the candidate bags, up to isomorphism.

    Materializes ``iter_all_ctds``; raises once more than ``max_trees``
    complete trees have been produced, so the budget error itself
    certifies that at least one decomposition exists.
    """
    trees = []
    for td in iter_all_ctds(h, bags, max_steps=max_steps):
        trees.append(td)
        if len(trees) > max_trees:
            raise OracleBudgetError("too many decompositions to enumerate")
    return trees
