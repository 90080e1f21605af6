import pytest

from omegatd.bagbuild import (BagBuildInput, BagBuildOutput, NonTermination,
                              build_bag, verify_bag_properties)
from omegatd.fixtures import load_fixture
from omegatd.ids import Base, TailCopy
from omegatd.regions import (PreconditionViolated, Region,
                             epsilon_linked_region, part_of)

from oracles import brute_end_linked_regions


def b(*names):
    return frozenset(Base(n) for n in names)


def tc(tail, k, l="u"):
    return TailCopy(tail, k, l)


def tails_upto(P, tail, lo=0):
    return frozenset(v for v in P.vertices
                     if isinstance(v, TailCopy) and v.tail == tail
                     and v.level >= lo)


def test_ray_golden():
    P = part_of(load_fixture("ray"), levels=8)
    out = build_bag(BagBuildInput(P, b("r0"), (), tc("t", 0)))
    assert out.cases == ("B",)
    (C,) = out.regions
    assert C.vertices == tails_upto(P, "t", 2)
    assert C.neighborhood == {tc("t", 1)}
    assert out.Y == b("r0") | {tc("t", 0), tc("t", 1)}
    rep = verify_bag_properties(
        BagBuildInput(P, b("r0"), (), tc("t", 0)), out)
    assert rep["all_pass"], rep


def test_ray_golden_is_nicest_against_oracle():
    P = part_of(load_fixture("ray"), levels=8)
    inp = BagBuildInput(P, b("r0"), (), tc("t", 0))
    out = build_bag(inp)
    (C,) = out.regions
    Z = inp.X | {inp.x}
    cands = [(V, N) for V, N in
             brute_end_linked_regions(P.H, Z, P.deep("t"))
             if not (N & Z)]
    best = min(len(N) for _, N in cands)
    assert C.ell == best
    for V, N in cands:
        if len(N) == best:
            assert V <= C.vertices


def test_ray_next_level_shifts():
    P = part_of(load_fixture("ray"), levels=9)
    P2 = P.sub(tails_upto(P, "t", 1))
    out = build_bag(BagBuildInput(P2, frozenset([tc("t", 1)]), (),
                                  tc("t", 2)))
    (C,) = out.regions
    assert C.neighborhood == {tc("t", 3)}
    assert out.Y == {tc("t", 1), tc("t", 2), tc("t", 3)}


def test_finite_rayless_part_whole_bag():
    P = part_of(load_fixture("ladder"), levels=8)
    fin = P.sub(b("a0", "b0"))
    out = build_bag(BagBuildInput(fin, b("a0"), (), Base("b0")))
    assert out.regions == ()
    assert out.Y == b("a0", "b0")
    rep = verify_bag_properties(
        BagBuildInput(fin, b("a0"), (), Base("b0")), out)
    assert rep["all_pass"], rep


def test_domray_dominator_stays_in_boundary():
    P = part_of(load_fixture("domray"), levels=8)
    inp = BagBuildInput(P, b("d"), (), Base("r0"))
    out = build_bag(inp)
    (C,) = out.regions
    assert C.neighborhood == b("d") | {tc("t", 0)}
    assert out.Y == b("d", "r0") | {tc("t", 0)}
    rep = verify_bag_properties(inp, out)
    assert rep["all_pass"], rep


def test_twotail_case_a_then_case_b():
    P = part_of(load_fixture("twotail"), levels=8)
    X = frozenset([Base("b"), TailCopy("p", 0, "l")])
    inp = BagBuildInput(P, X, (), TailCopy("p", 0, "r"))
    out = build_bag(inp)
    assert out.cases[0] == "A"
    assert out.regions[0].end == "q"
    assert out.regions[0].ell == 1
    assert set(out.cases[1:]) <= {"B"}
    rep = verify_bag_properties(inp, out)
    assert rep["all_pass"], rep


def test_member_region_becomes_its_own_cutoff():
    P = part_of(load_fixture("twotail"), levels=8)
    D = epsilon_linked_region(P, b("b"), "q")
    inp = BagBuildInput(P, frozenset(), (D,), TailCopy("p", 0, "l"))
    out = build_bag(inp)
    assert out.regions[0].vertices == D.vertices
    assert out.regions[0].end == "q"
    assert {r.end for r in out.regions} == {"p", "q"}
    rep = verify_bag_properties(inp, out)
    assert rep["all_pass"], rep
    assert not (D.vertices & out.Y)


def test_member_dominated_by_x():
    P = part_of(load_fixture("domray"), levels=8)
    D = epsilon_linked_region(P, b("d", "r0"), "t")
    inp = BagBuildInput(P, b("d"), (D,), Base("r0"))
    out = build_bag(inp)
    assert out.regions == (Region(D.vertices, D.neighborhood, "t"),)
    assert out.cases == ("B",)
    rep = verify_bag_properties(inp, out)
    assert rep["all_pass"], rep


def test_input_contract_rejections():
    P = part_of(load_fixture("twotail"), levels=8)
    D = epsilon_linked_region(P, b("b"), "q")
    with pytest.raises(PreconditionViolated):
        BagBuildInput(P, b("b"), (D,), sorted(D.vertices)[0])
    with pytest.raises(PreconditionViolated):
        BagBuildInput(P, frozenset(sorted(D.vertices)[:1]), (D,), Base("b"))
    D2 = epsilon_linked_region(P, frozenset([TailCopy("q", 1, "l"),
                                             TailCopy("q", 1, "r")]), "q")
    with pytest.raises(PreconditionViolated):
        BagBuildInput(P, b("b"), (D, D2), TailCopy("p", 0, "l"))


def test_budget_overrun_raises():
    P = part_of(load_fixture("twotail"), levels=8)
    inp = BagBuildInput(P, b("b"), (), TailCopy("p", 0, "l"))
    with pytest.raises(NonTermination):
        build_bag(inp, slack=-2)


def test_trace_observations_two_ends():
    P = part_of(load_fixture("twotail"), levels=8)
    inp = BagBuildInput(P, b("b"), (), TailCopy("p", 0, "l"))
    out = build_bag(inp)
    assert len(out.regions) == 2
    assert {r.end for r in out.regions} == {"p", "q"}
    rep = verify_bag_properties(inp, out)
    assert rep["all_pass"], rep
    assert rep["O3"] is True and rep["O4"] is True


def test_chain_linkage_a6():
    P = part_of(load_fixture("ray"), levels=9)
    inp = BagBuildInput(P, b("r0"), (), tc("t", 0))
    out = build_bag(inp)
    (C0,) = out.regions
    P2 = P.sub(C0.closure())
    out2 = build_bag(BagBuildInput(P2, C0.neighborhood, (), tc("t", 2)))
    (C1,) = out2.regions
    rep = verify_bag_properties(inp, out, chain=[C0, C1])
    assert rep["A6"] is True
    assert rep["all_pass"], rep
