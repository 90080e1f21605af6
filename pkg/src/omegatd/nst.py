"""Normal spanning trees and the two decompositions they induce.

The construction is the classic recursion: put the root down, split the
rest into components, descend into each component at its minimum-priority
neighbour of the current vertex.  Every edge of the graph then joins
tree-comparable vertices.  Priority is deterministic: base vertices first
(by name), then tail copies by level, then fan copies by index, so builds
and certificates are reproducible byte for byte.

On presentations the same recursion runs on a deep truncation; the spine
of each tail is certified periodic once two full periods repeat, and the
infinitely many sibling branches of a fan are certified from their common
pattern.  If no certificate emerges within the window, BudgetExceeded is
raised rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .decomposition import (DownClosureRay, FanHub, NodeId, PeriodicRay,
                            RootedDecomposition, contract)
from .graph import FiniteGraph, components
from .ids import Base, FanCopy, TailCopy, VertexId, shift_vertex
from .omega import OmegaPresentation, truncate
from .separations import BudgetExceeded


def _priority(v: VertexId):
    if isinstance(v, Base):
        return (0, v.name, 0, "")
    if isinstance(v, TailCopy):
        return (1, v.tail, v.level, v.local)
    return (2, v.fan, v.index, v.local)


@dataclass(frozen=True)
class SpineCert:
    """The spine of a tail continues periodically below `attach`."""
    tail: str
    attach: VertexId
    period: int                  # level shift per chain repetition
    chain: Tuple[VertexId, ...]  # the next len(chain) spine vertices

    def vertex(self, step: int) -> VertexId:
        seg, pos = divmod(step, len(self.chain))
        return shift_vertex(self.chain[pos], self.tail, seg * self.period)


@dataclass(frozen=True)
class FanBranchCert:
    """Copies first_index, first_index+1, ... of a fan hang as sibling
    leaves below `attach` (single-vertex copy patterns only)."""
    fan: str
    attach: VertexId
    local: str
    first_index: int

    def vertex(self, step: int) -> VertexId:
        return FanCopy(self.fan, self.first_index + step, self.local)


@dataclass
class NormalTree:
    roots: Tuple[VertexId, ...]
    parent: Dict[VertexId, Optional[VertexId]]
    spines: Tuple[SpineCert, ...] = ()
    fan_branches: Tuple[FanBranchCert, ...] = ()
    _children: Dict[VertexId, List[VertexId]] = field(default_factory=dict)

    def __post_init__(self):
        kids: Dict[VertexId, List[VertexId]] = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                kids[p].append(v)
        for v in kids:
            kids[v].sort(key=_priority)
        self._children = kids

    def children(self, v: VertexId) -> List[VertexId]:
        return self._children[v]

    def root_path(self, v: VertexId) -> List[VertexId]:
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out[::-1]

    def depth(self, v: VertexId) -> int:
        return len(self.root_path(v)) - 1

    def comparable(self, u: VertexId, v: VertexId) -> bool:
        pu, pv = self.root_path(u), self.root_path(v)
        short, long = (pu, pv) if len(pu) <= len(pv) else (pv, pu)
        return long[:len(short)] == short

    def vertices(self) -> FrozenSet[VertexId]:
        return frozenset(self.parent)


# ------------------------------------------------------------ construction

def _grow(G: FiniteGraph, root: VertexId, comp: FrozenSet[VertexId],
          parent: Dict[VertexId, Optional[VertexId]], charge) -> None:
    stack = [(root, comp)]
    while stack:
        v, C = stack.pop()
        charge(len(C))
        rest = C - {v}
        if not rest:
            continue
        for D in components(G.induced(rest), frozenset()):
            c = min((u for u in D if G.has_edge(u, v)), key=_priority)
            parent[c] = v
            stack.append((c, D))


def _make_charger(budget: int):
    spent = [0]

    def charge(n: int):
        spent[0] += n
        if spent[0] > budget:
            raise BudgetExceeded(budget)
    return charge


def _build_finite(G: FiniteGraph, root: Optional[VertexId],
                  budget: int) -> NormalTree:
    charge = _make_charger(budget)
    parent: Dict[VertexId, Optional[VertexId]] = {}
    roots: List[VertexId] = []
    comps = sorted(components(G, frozenset()),
                   key=lambda C: min(_priority(v) for v in C))
    for C in comps:
        r = root if (root is not None and root in C) \
            else min(C, key=_priority)
        parent[r] = None
        roots.append(r)
        _grow(G, r, C, parent, charge)
    return NormalTree(tuple(roots), parent)


def _certify_fans(pres: OmegaPresentation, tree: NormalTree, copies: int
                  ) -> Tuple[Dict[VertexId, Optional[VertexId]],
                             Tuple[FanBranchCert, ...]]:
    parent = dict(tree.parent)
    certs = []
    for fan in pres.fans:
        branch_roots = sorted(
            (v for v in parent
             if isinstance(v, FanCopy) and v.fan == fan.name
             and not isinstance(parent[v], FanCopy)),
            key=_priority)
        if not branch_roots:
            continue
        for v in branch_roots:
            assert not tree.children(v), \
                f"fan {fan.name}: multi-vertex copy patterns are not " \
                f"certifiable"
        attach = {parent[v] for v in branch_roots}
        locals_ = {v.local for v in branch_roots}
        assert len(attach) == 1 and len(locals_) == 1, \
            f"fan {fan.name}: copies do not share an attachment pattern"
        for v in branch_roots:
            if v.index >= copies:
                del parent[v]
        certs.append(FanBranchCert(fan.name, attach.pop(), locals_.pop(),
                                   copies))
    return parent, tuple(certs)


def _certify_spine(tree: NormalTree, tail: str, levels: int,
                   parent: Dict[VertexId, Optional[VertexId]]
                   ) -> Optional[SpineCert]:
    mine = [v for v in parent
            if isinstance(v, TailCopy) and v.tail == tail]
    if not mine:
        return None
    vstar = max(mine, key=lambda v: (v.level, _priority(v)))
    seq = tree.root_path(vstar)
    m = len(seq)
    found = None
    for q in range(1, m // 4 + 1):
        for p in range(1, levels + 1):
            # span covers three periods so the cut below still sits inside
            # verified territory, with the ragged truncation top excluded
            span = range(m - 3 * q - 1, m - q)
            if span.start < 0:
                continue
            ok = all(isinstance(seq[i], TailCopy) and seq[i].tail == tail
                     and seq[i + q] == shift_vertex(seq[i], tail, p)
                     and len(tree.children(seq[i])) == 1
                     for i in span)
            if ok:
                found = (q, p)
                break
        if found:
            break
    if found is None:
        raise BudgetExceeded(
            f"no periodic spine certificate for tail {tail} "
            f"within the materialized window")
    q, p = found
    cut = m - 3 * q - 1
    attach = seq[cut]
    chain = tuple(seq[cut + 1: cut + 1 + q])
    stack = [seq[cut + 1]]
    while stack:
        v = stack.pop()
        stack.extend(tree.children(v))
        if v in parent:
            del parent[v]
    return SpineCert(tail, attach, p, chain)


def _build_omega(pres: OmegaPresentation, root: Optional[VertexId],
                 budget: int, levels: int, copies: int,
                 window: int) -> NormalTree:
    nbig = levels + window
    fbig = copies + 2
    G = truncate(pres, nbig, fbig)
    full = _build_finite(G, root, budget)
    assert len(full.roots) == 1, "presentation graph must be connected"
    parent, fan_certs = _certify_fans(pres, full, copies)
    spines = []
    for tail in pres.tails:
        cert = _certify_spine(full, tail.name, levels, parent)
        if cert is not None:
            spines.append(cert)
    return NormalTree(full.roots, parent, tuple(spines), fan_certs)


def build_normal_tree(bound, root: Optional[VertexId] = None,
                      budget: int = 10 ** 6, levels: int = 6,
                      copies: int = 3, window: int = 8,
                      stability_check: bool = True) -> NormalTree:
    if isinstance(bound, FiniteGraph):
        return _build_finite(bound, root, budget)
    tree = _build_omega(bound, root, budget, levels, copies, window)
    if stability_check:
        deeper = _build_omega(bound, root, budget, levels, copies,
                              window + 2)
        for v, p in tree.parent.items():
            if deeper.parent.get(v, "missing") != p:
                raise BudgetExceeded(
                    f"tree prefix not stable under a deeper window at {v}")
    return tree


# ----------------------------------------------------------------- verify

def verify_normal(G: FiniteGraph, tree: NormalTree) -> dict:
    missing = sorted(v for v in G.vertices if v not in tree.parent)
    bad = []
    for u, v in sorted(G.edges):
        if u in tree.parent and v in tree.parent \
                and not tree.comparable(u, v):
            bad.append((str(u), str(v)))
    return {
        "normal": not bad,
        "spanning": not missing,
        "witness_edges": bad,
        "missing_vertices": [str(v) for v in missing],
    }


# ----------------------------------------------------------- decompositions

def _virtual_root(tree: NormalTree) -> bool:
    return len(tree.roots) > 1


def _walk_nodes(tree: NormalTree):
    """Yield (tree vertex, structural NodeId); multiple components hang
    under a virtual empty root."""
    virtual = _virtual_root(tree)
    out: Dict[VertexId, NodeId] = {}
    for i, r in enumerate(sorted(tree.roots, key=_priority)):
        out[r] = (i,) if virtual else ()
        stack = [r]
        while stack:
            v = stack.pop()
            for j, c in enumerate(tree.children(v)):
                out[c] = out[v] + (j,)
                stack.append(c)
    return out


def nst_decomposition(tree: NormalTree) -> RootedDecomposition:
    nodes = _walk_nodes(tree)
    bags: Dict[NodeId, FrozenSet[VertexId]] = {}
    if _virtual_root(tree):
        bags[()] = frozenset()
    closures: Dict[VertexId, FrozenSet[VertexId]] = {}
    for v in sorted(nodes, key=lambda v: len(nodes[v])):
        p = tree.parent[v]
        closures[v] = (closures[p] if p is not None else frozenset()) \
            | {v}
        bags[nodes[v]] = closures[v]
    frontier: Dict[NodeId, Tuple] = {}
    for sp in tree.spines:
        node = nodes[sp.attach]
        cert = DownClosureRay(
            sp.tail, sp.period, closures[sp.attach],
            tuple(frozenset({v}) for v in sp.chain))
        frontier[node] = frontier.get(node, ()) + (cert,)
    for fb in tree.fan_branches:
        node = nodes[fb.attach]
        cert = FanHub(fb.fan, closures[fb.attach], (fb.local,),
                      fb.first_index)
        frontier[node] = frontier.get(node, ()) + (cert,)
    return RootedDecomposition(bags, frontier)


def _tight_bag(G: FiniteGraph, tree: NormalTree, v: VertexId,
               subtree: FrozenSet[VertexId]) -> FrozenSet[VertexId]:
    """{v} plus the ancestors of v that send an edge to v or above it."""
    out = {v}
    for u in tree.root_path(v)[:-1]:
        if any(w in subtree for w in G.neighbors(u)):
            out.add(u)
    return frozenset(out)


def tightened_decomposition(bound, tree: Optional[NormalTree] = None,
                            **build_kw) -> RootedDecomposition:
    if isinstance(bound, FiniteGraph):
        if tree is None:
            tree = build_normal_tree(bound, **build_kw)
        G = bound
        full = tree
    else:
        levels = build_kw.pop("levels", 6)
        window = build_kw.pop("window", 8)
        copies = build_kw.pop("copies", 3)
        if tree is None:
            tree = build_normal_tree(bound, levels=levels, copies=copies,
                                     window=window, **build_kw)
        # recover the unpruned tree so bags near the frontier see the
        # edges that go above them
        G = truncate(bound, levels + window, copies + 2)
        full = _build_finite(G, tree.roots[0],
                             build_kw.pop("budget", 10 ** 6))

    subtrees: Dict[VertexId, FrozenSet[VertexId]] = {}

    def fill(v: VertexId) -> FrozenSet[VertexId]:
        out = {v}
        for c in full.children(v):
            out |= fill(c)
        subtrees[v] = frozenset(out)
        return subtrees[v]

    for r in full.roots:
        fill(r)

    nodes = _walk_nodes(tree)
    bags: Dict[NodeId, FrozenSet[VertexId]] = {}
    if _virtual_root(tree):
        bags[()] = frozenset()
    vb: Dict[VertexId, FrozenSet[VertexId]] = {}
    for v, node in nodes.items():
        vb[v] = _tight_bag(G, full, v, subtrees[v])
        bags[node] = vb[v]

    frontier: Dict[NodeId, Tuple] = {}
    for sp in tree.spines:
        segment = tuple(_tight_bag(G, full, sp.vertex(i),
                                   subtrees[sp.vertex(i)])
                        for i in range(len(sp.chain)))
        for i in range(len(sp.chain)):
            deep = sp.vertex(i + len(sp.chain))
            if deep in subtrees:
                got = _tight_bag(G, full, deep, subtrees[deep])
                want = frozenset(shift_vertex(u, sp.tail, sp.period)
                                 for u in segment[i])
                assert got == want, \
                    f"tightened bags along tail {sp.tail} not periodic"
        cert = PeriodicRay(sp.tail, sp.period, segment)
        node = nodes[sp.attach]
        frontier[node] = frontier.get(node, ()) + (cert,)
    for fb in tree.fan_branches:
        sample = FanCopy(fb.fan, fb.first_index - 1, fb.local)
        attachment = vb[sample] - {sample} if sample in vb else frozenset()
        cert = FanHub(fb.fan, attachment, (fb.local,), fb.first_index)
        node = nodes[fb.attach]
        frontier[node] = frontier.get(node, ()) + (cert,)

    dec = RootedDecomposition(bags, frontier)
    # per-node reduction: merge every node whose bag is contained in a
    # child's bag
    F = [child for _, child in dec.edges()
         if dec.bags[child[:-1]] <= dec.bags[child]]
    return contract(dec, F) if F else dec
