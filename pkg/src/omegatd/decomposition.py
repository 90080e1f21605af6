"""Rooted tree-decompositions, finite or lazily materialized.

A decomposition is a prefix tree of bags plus optional continuation
certificates on frontier nodes.  A PeriodicRay certificate encodes an
infinite chain of bags repeating under a tail-level shift; a FanHub
certificate encodes infinitely many sibling copy-bags below a hub.  Replay
materializes any finite amount of the encoded infinity; every infinitary
verdict elsewhere in the package is computed from these patterns, never
from a truncated guess.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .graph import FiniteGraph, components
from .ids import Base, FanCopy, TailCopy, VertexId, parse_vertex, shift_vertex
from .separations import Separation

NodeId = Tuple[int, ...]


def shift_set(S: Iterable[VertexId], tail: str, delta: int) -> FrozenSet[VertexId]:
    return frozenset(shift_vertex(v, tail, delta) for v in S)


@dataclass(frozen=True)
class PeriodicRay:
    tail: str
    period: int                               # level shift per segment
    segment: Tuple[FrozenSet[VertexId], ...]  # bag patterns of one segment

    def bag(self, step: int) -> FrozenSet[VertexId]:
        seg, pos = divmod(step, len(self.segment))
        return shift_set(self.segment[pos], self.tail, seg * self.period)


@dataclass(frozen=True)
class FanHub:
    fan: str
    attachment: FrozenSet[VertexId]
    copy_locals: Tuple[str, ...]
    first_index: int = 0

    def bag(self, step: int) -> FrozenSet[VertexId]:
        idx = self.first_index + step
        return self.attachment | frozenset(
            FanCopy(self.fan, idx, l) for l in self.copy_locals)


@dataclass(frozen=True)
class DownClosureRay:
    """Chain of nested bags growing by one periodic increment per step
    (down-closures along a tail spine)."""
    tail: str
    period: int
    prefix: FrozenSet[VertexId]               # bag already accumulated
    segment: Tuple[FrozenSet[VertexId], ...]  # per-step increments

    def increment(self, step: int) -> FrozenSet[VertexId]:
        seg, pos = divmod(step, len(self.segment))
        return shift_set(self.segment[pos], self.tail, seg * self.period)

    def bag(self, step: int) -> FrozenSet[VertexId]:
        out = set(self.prefix)
        for i in range(step + 1):
            out |= self.increment(i)
        return frozenset(out)


ContinuationCertificate = Union[PeriodicRay, FanHub, DownClosureRay]


@dataclass
class RootedDecomposition:
    bags: Dict[NodeId, FrozenSet[VertexId]]
    lazy_frontier: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = \
        field(default_factory=dict)

    def __post_init__(self):
        assert () in self.bags, "decomposition must contain a root"
        for node in self.bags:
            if node:
                assert node[:-1] in self.bags, f"orphan node {node}"
        for node in self.lazy_frontier:
            assert node in self.bags, f"certificate on unknown node {node}"

    # -- tree structure -----------------------------------------------------

    @property
    def root(self) -> NodeId:
        return ()

    def nodes(self) -> List[NodeId]:
        return sorted(self.bags)

    def children(self, node: NodeId) -> List[NodeId]:
        return sorted(q for q in self.bags
                      if len(q) == len(node) + 1 and q[:-1] == node)

    def parent(self, node: NodeId) -> Optional[NodeId]:
        return node[:-1] if node else None

    def edges(self) -> List[Tuple[NodeId, NodeId]]:
        return [(n[:-1], n) for n in self.nodes() if n]

    def subtree(self, node: NodeId) -> List[NodeId]:
        return sorted(q for q in self.bags if q[:len(node)] == node)

    def adhesion(self, child: NodeId) -> FrozenSet[VertexId]:
        return self.bags[child] & self.bags[child[:-1]]

    def path_between(self, a: NodeId, b: NodeId) -> List[NodeId]:
        k = 0
        while k < min(len(a), len(b)) and a[k] == b[k]:
            k += 1
        meet = a[:k]
        up = [a[:i] for i in range(len(a), k, -1)]
        down = [b[:i] for i in range(k, len(b) + 1)]
        return up + down

    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def all_vertices(self) -> FrozenSet[VertexId]:
        out = set()
        for b in self.bags.values():
            out |= b
        return frozenset(out)

    # -- lazy materialization -----------------------------------------------

    def replay(self, steps: int) -> "RootedDecomposition":
        """Materialize every frontier certificate `steps` nodes further.
        The new frontier keeps an advanced copy of each certificate."""
        bags = dict(self.bags)
        frontier: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}
        for node, certs in self.lazy_frontier.items():
            kept: List[ContinuationCertificate] = []
            next_idx = max((q[-1] for q in self.bags
                            if len(q) == len(node) + 1 and q[:-1] == node),
                           default=-1) + 1
            for cert in certs:
                if steps == 0:
                    kept.append(cert)
                    continue
                if isinstance(cert, (PeriodicRay, DownClosureRay)):
                    cur = node
                    for j in range(steps):
                        cur = cur + ((next_idx,) if cur == node else (0,))
                        bags[cur] = cert.bag(j)
                    next_idx += 1
                    if isinstance(cert, PeriodicRay):
                        advanced: ContinuationCertificate = PeriodicRay(
                            cert.tail, cert.period,
                            tuple(cert.bag(steps + i)
                                  for i in range(len(cert.segment))))
                    else:
                        advanced = DownClosureRay(
                            cert.tail, cert.period, cert.bag(steps - 1),
                            tuple(cert.increment(steps + i)
                                  for i in range(len(cert.segment))))
                    frontier[cur] = frontier.get(cur, ()) + (advanced,)
                else:
                    for j in range(steps):
                        bags[node + (next_idx + j,)] = cert.bag(j)
                    next_idx += steps
                    kept.append(replace(cert,
                                        first_index=cert.first_index + steps))
            if kept:
                frontier[node] = frontier.get(node, ()) + tuple(kept)
        return RootedDecomposition(bags, frontier)


# ---------------------------------------------------------------- validate

def validate(dec: RootedDecomposition, G: FiniteGraph,
             restrict: Optional[FrozenSet[VertexId]] = None) -> dict:
    """(T1)/(T2) against a finite bound graph.  With `restrict`, coverage is
    only demanded for vertices/edges inside that set (materialized prefix of
    a lazy decomposition)."""
    covered = dec.all_vertices()
    want = G.vertices if restrict is None else (G.vertices & restrict)
    missing_vertices = sorted(v for v in want if v not in covered)
    missing_edges = []
    for u, v in sorted(G.edges):
        if u not in want or v not in want:
            continue
        if not any(u in b and v in b for b in dec.bags.values()):
            missing_edges.append((u, v))
    trace_violations = []
    for v in sorted(covered):
        hosts = {n for n, b in dec.bags.items() if v in b}
        seed = next(iter(hosts))
        seen = {seed}
        stack = [seed]
        while stack:
            n = stack.pop()
            for m in [n[:-1]] if n else []:
                if m in hosts and m not in seen:
                    seen.add(m)
                    stack.append(m)
            for m in dec.children(n):
                if m in hosts and m not in seen:
                    seen.add(m)
                    stack.append(m)
        if seen != hosts:
            trace_violations.append(v)
    return {
        "t1_vertices": not missing_vertices,
        "t1_edges": not missing_edges,
        "t2": not trace_violations,
        "valid": not (missing_vertices or missing_edges or trace_violations),
        "witness": {
            "uncovered_vertices": [str(v) for v in missing_vertices],
            "uncovered_edges": [(str(u), str(v)) for u, v in missing_edges],
            "disconnected_traces": [str(v) for v in trace_violations],
        },
    }


def edge_separation(dec: RootedDecomposition, child: NodeId,
                    G: FiniteGraph) -> Separation:
    below = set()
    for n in dec.subtree(child):
        below |= dec.bags[n]
    above = set()
    for n in dec.nodes():
        if n[:len(child)] != child:
            above |= dec.bags[n]
    adh = dec.adhesion(child)
    return Separation(frozenset(above | adh) & G.vertices,
                      frozenset(below | adh) & G.vertices)


def up_side(dec: RootedDecomposition, child: NodeId) -> FrozenSet[VertexId]:
    """G↑e: union of bags in the subtree below the edge into `child`."""
    out = set()
    for n in dec.subtree(child):
        out |= dec.bags[n]
    return frozenset(out)


def strict_up_side(dec: RootedDecomposition, child: NodeId) -> FrozenSet[VertexId]:
    """G↑̊e = G↑e minus the adhesion set."""
    return up_side(dec, child) - dec.adhesion(child)


# ---------------------------------------------------------------- contract

def contract(dec: RootedDecomposition, F: Iterable[NodeId]
             ) -> RootedDecomposition:
    """Contract tree edges; each edge is named by its child node.  Branch
    sets take union bags; certificates move to the surviving node."""
    F = set(F)
    for child in F:
        assert child in dec.bags and child != (), f"unknown edge into {child}"

    def rep(node: NodeId) -> NodeId:
        while node in F:
            node = node[:-1]
        return node

    # rebuild structural ids top-down
    new_children: Dict[NodeId, List[NodeId]] = {}
    reps = sorted({rep(n) for n in dec.bags})
    for n in dec.nodes():
        if n == () or n in F:
            continue
        r = rep(n[:-1])
        new_children.setdefault(r, []).append(n)

    bags: Dict[NodeId, FrozenSet[VertexId]] = {}
    frontier: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}
    mapping: Dict[NodeId, NodeId] = {(): ()}

    def bag_of(node: NodeId) -> FrozenSet[VertexId]:
        out = set(dec.bags[node])
        for c in dec.children(node):
            if c in F:
                out |= bag_of(c)
        return frozenset(out)

    def walk(old: NodeId, new: NodeId):
        bags[new] = bag_of(old)
        merged = [old]
        stack = [old]
        while stack:
            n = stack.pop()
            for c in dec.children(n):
                if c in F:
                    merged.append(c)
                    stack.append(c)
        i = 0
        for n in merged:
            if n in dec.lazy_frontier:
                frontier[new] = frontier.get(new, ()) + dec.lazy_frontier[n]
            for c in dec.children(n):
                if c not in F:
                    walk(c, new + (i,))
                    i += 1

    walk((), ())
    return RootedDecomposition(bags, frontier)


# ------------------------------------------------------------------ export

def node_name(node: NodeId) -> str:
    return "r" if not node else "r." + ".".join(map(str, node))


def parse_node_name(text: str) -> NodeId:
    if text == "r":
        return ()
    assert text.startswith("r.")
    return tuple(int(x) for x in text[2:].split("."))


def render_bag(bag: Iterable[VertexId]) -> str:
    return " ".join(str(v) for v in sorted(bag))


def graph_hash(G: FiniteGraph) -> str:
    text = ";".join(str(v) for v in sorted(G.vertices)) + "|" + ";".join(
        f"{min(u, v)}-{max(u, v)}" for u, v in sorted(G.edges))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def export_dot(dec: RootedDecomposition, depth: int = 0) -> str:
    d = dec.replay(depth) if depth else dec
    lines = ["digraph decomposition {"]
    for n in d.nodes():
        lines.append(f'  "{node_name(n)}" [label="{render_bag(d.bags[n])}"];')
    for parent, child in d.edges():
        lines.append(f'  "{node_name(parent)}" -> "{node_name(child)}" '
                     f'[label="{render_bag(d.adhesion(child))}"];')
    for n in sorted(d.lazy_frontier):
        for i, cert in enumerate(d.lazy_frontier[n]):
            if isinstance(cert, PeriodicRay):
                label = (f"PeriodicRay tail={cert.tail} "
                         f"period={cert.period}")
            elif isinstance(cert, DownClosureRay):
                label = (f"DownClosureRay tail={cert.tail} "
                         f"period={cert.period}")
            else:
                label = (f"FanHub fan={cert.fan} "
                         f"from={cert.first_index}")
            anno = f"{node_name(n)}~cert{i}"
            lines.append(f'  "{anno}" [shape=note, label="{label}"];')
            lines.append(f'  "{node_name(n)}" -> "{anno}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_td(dec: RootedDecomposition, G: Optional[FiniteGraph]) -> str:
    lines = ["# td v1"]
    lines.append(f"graph {graph_hash(G) if G is not None else '-'}")
    lines.append("root r")
    for n in dec.nodes():
        parent = "-" if not n else node_name(n[:-1])
        lines.append(f"node {node_name(n)} {parent} | "
                     f"{render_bag(dec.bags[n])}")
    for n in sorted(dec.lazy_frontier):
        for cert in dec.lazy_frontier[n]:
            if isinstance(cert, PeriodicRay):
                segs = " | ".join(render_bag(b) for b in cert.segment)
                lines.append(f"cert {node_name(n)} periodic {cert.tail} "
                             f"{cert.period} | {segs}")
            elif isinstance(cert, DownClosureRay):
                segs = " | ".join(render_bag(b) for b in cert.segment)
                lines.append(f"cert {node_name(n)} downclosure {cert.tail} "
                             f"{cert.period} | {render_bag(cert.prefix)} "
                             f"| {segs}")
            else:
                lines.append(f"cert {node_name(n)} fanhub {cert.fan} "
                             f"{cert.first_index} "
                             f"{','.join(cert.copy_locals)} | "
                             f"{render_bag(cert.attachment)}")
    return "\n".join(lines) + "\n"


def read_td(text: str) -> RootedDecomposition:
    bags: Dict[NodeId, FrozenSet[VertexId]] = {}
    frontier: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] in ("graph", "root"):
            continue
        if toks[0] == "node":
            node = parse_node_name(toks[1])
            bar = toks.index("|")
            bags[node] = frozenset(parse_vertex(t) for t in toks[bar + 1:])
        elif toks[0] == "cert":
            node = parse_node_name(toks[1])
            if toks[2] == "periodic":
                rest = " ".join(toks[5:])
                segment = tuple(
                    frozenset(parse_vertex(t) for t in part.split())
                    for part in rest.split("|") if part.strip())
                cert: ContinuationCertificate = PeriodicRay(
                    toks[3], int(toks[4]), segment)
            elif toks[2] == "downclosure":
                rest = " ".join(toks[5:])
                parts = [frozenset(parse_vertex(t) for t in part.split())
                         for part in rest.split("|")][1:]  # skip pre-bar
                cert = DownClosureRay(toks[3], int(toks[4]), parts[0],
                                      tuple(parts[1:]))
            else:
                bar = toks.index("|")
                cert = FanHub(
                    fan=toks[3],
                    attachment=frozenset(parse_vertex(t)
                                         for t in toks[bar + 1:]),
                    copy_locals=tuple(toks[5].split(",")),
                    first_index=int(toks[4]))
            frontier[node] = frontier.get(node, ()) + (cert,)
        else:
            raise ValueError(f"bad td line: {raw}")
    return RootedDecomposition(bags, frontier)
