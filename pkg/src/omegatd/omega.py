"""Finite presentations of one-way-infinite graphs.

A presentation is a finite base graph, periodic tail units (each carrying
exactly one end), and fan units (infinitely many tight copies over a fixed
attachment set).  Truncation materializes any finite prefix; end profiles,
critical sets, and tight-component growth are computed from stabilizing
truncation statistics, never guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .graph import FiniteGraph, components, tight_components
from .flow import menger
from .ids import Base, FanCopy, TailCopy, VertexId, parse_vertex


class ParseError(Exception):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvariantViolation(Exception):
    pass


class NoStabilization(Exception):
    def __init__(self, window: int, values):
        super().__init__(
            f"degree flow still changing after window {window}: {values}")
        self.window = window
        self.values = values


@dataclass(frozen=True)
class TailUnit:
    name: str
    period_vertices: Tuple[str, ...]
    period_edges: Tuple[Tuple[str, str], ...]
    back_edges: Tuple[Tuple[str, VertexId], ...]      # local -> base
    cross_edges: Tuple[Tuple[str, str], ...]          # local@+1 -> local@0
    broadcast: Tuple[Tuple[VertexId, str], ...]       # base -> local

    def period_graph(self) -> FiniteGraph:
        return FiniteGraph([Base(v) for v in self.period_vertices],
                           [(Base(u), Base(v)) for u, v in self.period_edges])


@dataclass(frozen=True)
class FanUnit:
    name: str
    attachment: FrozenSet[VertexId]
    pattern_vertices: Tuple[str, ...]
    pattern_edges: Tuple[Tuple[str, str], ...]
    boundary: Tuple[Tuple[str, VertexId], ...]        # local -> attachment

    def pattern_graph(self) -> FiniteGraph:
        return FiniteGraph([Base(v) for v in self.pattern_vertices],
                           [(Base(u), Base(v)) for u, v in self.pattern_edges])


@dataclass(frozen=True)
class OmegaPresentation:
    base: FiniteGraph
    tails: Tuple[TailUnit, ...]
    fans: Tuple[FanUnit, ...]
    meta: Tuple[Tuple[str, str], ...] = ()

    def tail(self, name: str) -> TailUnit:
        for t in self.tails:
            if t.name == name:
                return t
        raise KeyError(name)

    def meta_value(self, key: str) -> Optional[str]:
        for k, v in self.meta:
            if k == key:
                return v
        return None


@dataclass
class Stabilization:
    windows: List[int]
    values: List[int]


@dataclass
class EndDescriptor:
    tail: str
    degree: Optional[int] = None
    dominators: FrozenSet[VertexId] = frozenset()
    stabilization: Optional[Stabilization] = None

    @property
    def combined_degree(self) -> Optional[int]:
        if self.degree is None:
            return None
        return self.degree + len(self.dominators)


# ------------------------------------------------------------------ parsing

_LIST_KEYS = {"vertices", "period_vertices", "pattern_vertices", "attachment"}
_PAIR_KEYS = {"edges", "period_edges", "back_edges", "cross_edges",
              "broadcast", "pattern_edges", "boundary"}


def parse_presentation(text: str) -> OmegaPresentation:
    section: Optional[Tuple[str, Optional[str]]] = None
    data: Dict[Tuple[str, Optional[str]], Dict[str, list]] = {}
    order: List[Tuple[str, Optional[str]]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(ln, "unterminated section header")
            toks = line[1:-1].split()
            if not toks:
                raise ParseError(ln, "empty section header")
            kind = toks[0]
            if kind == "base" or kind == "meta":
                if len(toks) != 1:
                    raise ParseError(ln, f"[{kind}] takes no name")
                section = (kind, None)
            elif kind in ("tail", "fan"):
                if len(toks) != 2:
                    raise ParseError(ln, f"[{kind}] needs exactly one name")
                section = (kind, toks[1])
            else:
                raise ParseError(ln, f"unknown section [{kind}]")
            if section in data:
                raise ParseError(ln, f"duplicate section {line}")
            data[section] = {}
            order.append(section)
            continue
        if section is None:
            raise ParseError(ln, "content before any section header")
        toks = line.split()
        key, args = toks[0], toks[1:]
        if section[0] == "meta":
            if len(args) != 1:
                raise ParseError(ln, "meta lines are 'key value'")
            data[section].setdefault("_", []).append((key, args[0]))
            continue
        if key in _LIST_KEYS:
            data[section].setdefault(key, []).extend(args)
        elif key in _PAIR_KEYS:
            if len(args) != 2:
                raise ParseError(ln, f"{key} wants exactly two tokens")
            data[section].setdefault(key, []).append((args[0], args[1]))
        else:
            raise ParseError(ln, f"unknown keyword {key!r}")

    base_rec = data.get(("base", None), {})
    base = FiniteGraph(
        [Base(v) for v in base_rec.get("vertices", [])],
        [(Base(u), Base(v)) for u, v in base_rec.get("edges", [])])
    tails = []
    fans = []
    for sec in order:
        kind, name = sec
        rec = data[sec]
        if kind == "tail":
            tails.append(TailUnit(
                name=name,
                period_vertices=tuple(rec.get("period_vertices", [])),
                period_edges=tuple(rec.get("period_edges", [])),
                back_edges=tuple((l, parse_vertex(b))
                                 for l, b in rec.get("back_edges", [])),
                cross_edges=tuple(rec.get("cross_edges", [])),
                broadcast=tuple((parse_vertex(b), l)
                                for b, l in rec.get("broadcast", []))))
        elif kind == "fan":
            fans.append(FanUnit(
                name=name,
                attachment=frozenset(parse_vertex(v)
                                     for v in rec.get("attachment", [])),
                pattern_vertices=tuple(rec.get("pattern_vertices", [])),
                pattern_edges=tuple(rec.get("pattern_edges", [])),
                boundary=tuple((l, parse_vertex(a))
                               for l, a in rec.get("boundary", []))))
    meta = tuple(data.get(("meta", None), {}).get("_", []))
    return OmegaPresentation(base, tuple(tails), tuple(fans), meta)


def validate_presentation(desc: str) -> OmegaPresentation:
    pres = parse_presentation(desc)
    names = [t.name for t in pres.tails] + [f.name for f in pres.fans]
    if len(set(names)) != len(names):
        raise InvariantViolation("tail/fan names are not unique")
    tail_locals = {t.name: set(t.period_vertices) for t in pres.tails}

    def resolve(v: VertexId, where: str, level0_ok=False):
        if isinstance(v, Base):
            if v not in pres.base.vertices:
                raise InvariantViolation(f"{where}: unknown base vertex {v}")
        elif isinstance(v, TailCopy) and level0_ok:
            if v.tail not in tail_locals or v.level != 0 \
                    or v.local not in tail_locals[v.tail]:
                raise InvariantViolation(
                    f"{where}: {v} is not a tail level-0 vertex")
        else:
            raise InvariantViolation(f"{where}: {v} not allowed here")

    for t in pres.tails:
        locs = set(t.period_vertices)
        if len(locs) != len(t.period_vertices):
            raise InvariantViolation(f"tail {t.name}: duplicate local names")
        for u, v in t.period_edges + t.cross_edges:
            if u not in locs or v not in locs:
                raise InvariantViolation(
                    f"tail {t.name}: unknown local in edge {u}-{v}")
        for l, b in t.back_edges:
            if l not in locs:
                raise InvariantViolation(f"tail {t.name}: back edge local {l}")
            resolve(b, f"tail {t.name} back edge")
        for b, l in t.broadcast:
            if l not in locs:
                raise InvariantViolation(f"tail {t.name}: broadcast local {l}")
            resolve(b, f"tail {t.name} broadcast")
        if not t.period_graph().is_connected():
            raise InvariantViolation(f"tail {t.name}: period not connected")
        if not t.cross_edges:
            raise InvariantViolation(f"tail {t.name}: cross_edges empty")
        # two consecutive copies plus cross edges must be connected, so the
        # tail carries exactly one end
        two = FiniteGraph(
            [TailCopy(t.name, k, l) for k in (0, 1) for l in locs],
            [(TailCopy(t.name, k, u), TailCopy(t.name, k, v))
             for k in (0, 1) for u, v in t.period_edges] +
            [(TailCopy(t.name, 1, u), TailCopy(t.name, 0, v))
             for u, v in t.cross_edges])
        if not two.is_connected():
            raise InvariantViolation(
                f"tail {t.name}: two-copy gadget disconnected")
    for f in pres.fans:
        locs = set(f.pattern_vertices)
        if len(locs) != len(f.pattern_vertices):
            raise InvariantViolation(f"fan {f.name}: duplicate local names")
        for u, v in f.pattern_edges:
            if u not in locs or v not in locs:
                raise InvariantViolation(
                    f"fan {f.name}: unknown local in edge {u}-{v}")
        for v in f.attachment:
            resolve(v, f"fan {f.name} attachment", level0_ok=True)
        image = set()
        for l, a in f.boundary:
            if l not in locs:
                raise InvariantViolation(f"fan {f.name}: boundary local {l}")
            if a not in f.attachment:
                raise InvariantViolation(
                    f"fan {f.name}: boundary target {a} outside attachment")
            image.add(a)
        if image != set(f.attachment):
            raise InvariantViolation(
                f"fan {f.name}: boundary image is a proper subset of the "
                f"attachment; copies would not be tight")
        if f.pattern_vertices and not f.pattern_graph().is_connected():
            raise InvariantViolation(f"fan {f.name}: pattern not connected")
    return pres


# --------------------------------------------------------------- truncation

def truncate(pres: OmegaPresentation, n: int, f: int) -> FiniteGraph:
    assert n >= 0 and f >= 0
    vertices: List[VertexId] = list(pres.base.vertices)
    edges: List[Tuple[VertexId, VertexId]] = list(pres.base.edges)
    for t in pres.tails:
        for lvl in range(n):
            vertices += [TailCopy(t.name, lvl, l) for l in t.period_vertices]
            edges += [(TailCopy(t.name, lvl, u), TailCopy(t.name, lvl, v))
                      for u, v in t.period_edges]
            edges += [(b, TailCopy(t.name, lvl, l)) for b, l in t.broadcast]
        if n >= 1:
            edges += [(b, TailCopy(t.name, 0, l)) for l, b in t.back_edges]
        for lvl in range(n - 1):
            edges += [(TailCopy(t.name, lvl + 1, u), TailCopy(t.name, lvl, v))
                      for u, v in t.cross_edges]
    present = set(vertices)
    for fan in pres.fans:
        for idx in range(f):
            vertices += [FanCopy(fan.name, idx, l)
                         for l in fan.pattern_vertices]
            edges += [(FanCopy(fan.name, idx, u), FanCopy(fan.name, idx, v))
                      for u, v in fan.pattern_edges]
            edges += [(FanCopy(fan.name, idx, l), a)
                      for l, a in fan.boundary if a in present]
    return FiniteGraph(vertices, edges)


def tail_level(pres: OmegaPresentation, tail: str, lvl: int) -> FrozenSet[VertexId]:
    t = pres.tail(tail)
    return frozenset(TailCopy(tail, lvl, l) for l in t.period_vertices)


def frontier(pres: OmegaPresentation, n: int) -> FrozenSet[VertexId]:
    """Vertices whose neighbourhood is not yet final in truncate(·, n, f)."""
    if n == 0:
        out = set()
        for t in pres.tails:
            for l, b in t.back_edges:
                out.add(b)
            for b, l in t.broadcast:
                out.add(b)
        return frozenset(out)
    out = set()
    for t in pres.tails:
        out |= tail_level(pres, t.name, n - 1)
        for b, l in t.broadcast:
            out.add(b)
    return frozenset(out)


# --------------------------------------------------------------------- ends

def ends(pres: OmegaPresentation) -> List[EndDescriptor]:
    out = []
    for t in pres.tails:
        out.append(EndDescriptor(
            tail=t.name,
            dominators=frozenset(b for b, _ in t.broadcast)))
    return out


def end_profile(pres: OmegaPresentation, tail: str,
                window: int = 8) -> EndDescriptor:
    t = pres.tail(tail)
    dom = frozenset(b for b, _ in t.broadcast)
    # Disjoint rays eventually live in the pure periodic strip with the
    # dominators removed; the degree is the stabilized strip capacity.
    values: List[int] = []
    windows: List[int] = []
    degree = None
    for w in range(1, window + 1):
        strip = FiniteGraph(
            [TailCopy(t.name, k, l) for k in range(w + 1)
             for l in t.period_vertices],
            [(TailCopy(t.name, k, u), TailCopy(t.name, k, v))
             for k in range(w + 1) for u, v in t.period_edges] +
            [(TailCopy(t.name, k + 1, u), TailCopy(t.name, k, v))
             for k in range(w) for u, v in t.cross_edges])
        S = tail_level(pres, tail, 0)
        T = frozenset(TailCopy(t.name, w, l) for l in t.period_vertices)
        count, _, _ = menger(strip, S, T)
        windows.append(w)
        values.append(count)
        if len(values) >= 2 and values[-1] == values[-2]:
            degree = values[-1]
            break
    if degree is None:
        raise NoStabilization(window, values)
    return EndDescriptor(tail=tail, degree=degree, dominators=dom,
                         stabilization=Stabilization(windows, values))


def end_profiles(pres: OmegaPresentation, window: int = 8
                 ) -> List[EndDescriptor]:
    return [end_profile(pres, t.name, window) for t in pres.tails]


# ---------------------------------------------------------- critical sets

def tight_component_growth(pres: OmegaPresentation, X: Iterable[VertexId],
                           schedule: Sequence[Tuple[int, int]]) -> List[int]:
    X = frozenset(X)
    counts = []
    for n, f in schedule:
        G = truncate(pres, n, f)
        assert X <= G.vertices, "X not materialized at schedule point"
        fr = frontier(pres, n) - X
        tcs = [C for C in tight_components(G, X) if not (C & fr)]
        counts.append(len(tcs))
    return counts


def critical_sets(pres: OmegaPresentation, size_cap: int = 3,
                  schedule: Optional[Sequence[Tuple[int, int]]] = None
                  ) -> List[Tuple[FrozenSet[VertexId], dict]]:
    assert size_cap >= 1
    if schedule is None:
        schedule = [(2, 2), (4, 4), (8, 8)]
    out: List[Tuple[FrozenSet[VertexId], dict]] = []
    declared = set()
    for fan in pres.fans:
        declared.add(fan.attachment)
        out.append((fan.attachment,
                    {"grade": "certified", "fan": fan.name}))
    # heuristic candidates among base and tail level-0 vertices
    pool = sorted(pres.base.vertices)
    for t in pres.tails:
        pool += sorted(tail_level(pres, t.name, 0))
    for k in range(1, size_cap + 1):
        for combo in combinations(pool, k):
            X = frozenset(combo)
            if X in declared:
                continue
            counts = tight_component_growth(pres, X, schedule)
            if all(a < b for a, b in zip(counts, counts[1:])) and counts:
                out.append((X, {"grade": "growth-evidence",
                                "schedule": list(schedule),
                                "counts": counts}))
    return out
