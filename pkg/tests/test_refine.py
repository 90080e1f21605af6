"""Rayless refinement: single-part recursion, the full compositions, and
the display batteries on every fixture."""

import pytest

from omegatd.decomposition import FanHub, PeriodicRay, shift_set
from omegatd.fixtures import load_fixture
from omegatd.graph import FiniteGraph
from omegatd.ids import Base, FanCopy, TailCopy
from omegatd.omega import OmegaPresentation, truncate
from omegatd.refine import (RefineError, _periodic_cert, aux_unit,
                            theorem1_pipeline, theorem4_pipeline,
                            theorem7_refine)
from omegatd.separations import Separation, Star
from omegatd.verify import (liminf_adhesions, verify_linked,
                            verify_structural)


def b(*names):
    return frozenset(Base(n) for n in names)


def t(tail, lo, hi, local="u"):
    return frozenset(TailCopy(tail, k, local) for k in range(lo, hi + 1))


# ------------------------------------------------------------ theorem 7'

def test_theorem7_ray_golden():
    dec = theorem7_refine(load_fixture("ray"), Star(()), b("r0"), depth=3)
    assert dec.bags == {
        (): b("r0") | t("t", 0, 1),
        (0,): t("t", 1, 3),
        (0, 0): t("t", 3, 5),
    }
    ((node, certs),) = dec.lazy_frontier.items()
    assert node == (0, 0)
    (cert,) = certs
    assert isinstance(cert, PeriodicRay)
    assert cert.tail == "t" and cert.period == 2
    assert cert.segment == (t("t", 5, 7),)
    assert cert.bag(1) == t("t", 7, 9)


def test_theorem7_finite_rayless_part_is_one_bag():
    base = FiniteGraph([Base("a"), Base("b"), Base("c")],
                       [(Base("a"), Base("b")), (Base("b"), Base("c"))])
    pres = OmegaPresentation(base=base, tails=(), fans=())
    dec = theorem7_refine(pres, Star(()), frozenset(), depth=3)
    assert dec.bags == {(): b("a", "b", "c")}
    assert not dec.lazy_frontier


def test_theorem7_fan_side_member_restored_to_original_side():
    pres = load_fixture("fan2")
    G = truncate(pres, 20, 3)
    A = b("x1", "x2")
    B = frozenset(v for v in G.vertices if isinstance(v, FanCopy)) | A
    dec = theorem7_refine(pres, Star((Separation(A | (G.vertices - B), B),)),
                          frozenset(), depth=3)
    assert dec.bags[()] == A
    assert dec.bags[(0,)] == B
    assert len(dec.bags) == 2 and not dec.lazy_frontier


def test_theorem7_output_linked_and_fully_tight():
    for name in ("ray", "ladder", "twotail"):
        pres = load_fixture(name)
        dec = theorem7_refine(pres, Star(()), frozenset(), depth=3)
        assert verify_linked(dec, pres, depth=3)["linked"]
        rep = verify_structural(dec, pres, depth=3)
        assert rep["tight"] and rep["fully_tight"]
        bags = list(dec.bags.values())
        assert len(set(bags)) == len(bags)   # distinct-bag chains


def test_theorem7_deeper_cut_extends_the_same_chain():
    shallow = theorem7_refine(load_fixture("ray"), Star(()), b("r0"), depth=3)
    deep = theorem7_refine(load_fixture("ray"), Star(()), b("r0"), depth=5)
    for node, bag in shallow.bags.items():
        assert deep.bags[node] == bag
    ((_, (cert,)),) = shallow.lazy_frontier.items()
    assert deep.bags[(0, 0, 0)] == cert.bag(0)
    assert deep.bags[(0, 0, 0, 0)] == cert.bag(1)


def test_aux_unit_rejects_non_base_separator():
    with pytest.raises(AssertionError):
        aux_unit(0, frozenset({TailCopy("t", 0, "u")}))


def test_periodic_cert_detection():
    hist = [b("r0") | t("t", 0, 1)] + [t("t", 2 * i - 1, 2 * i + 1)
                                       for i in range(1, 5)]
    cert = _periodic_cert(tuple(hist), "t", depth=3)
    assert cert is not None and cert.period == 2
    assert cert.segment == (hist[3],)
    assert _periodic_cert(tuple(hist[:3]), "t", depth=3) is None
    ragged = tuple(hist[:4]) + (t("t", 9, 12),)
    assert _periodic_cert(ragged, "t", depth=3) is None


# ------------------------------------------------------------ theorem 4'

def test_theorem4_ray_equals_plain_refinement():
    pres = load_fixture("ray")
    dec, rep = theorem4_pipeline(pres, depth=3)
    plain = theorem7_refine(pres, Star(()), frozenset(), depth=3)
    assert dec.bags == plain.bags
    assert dec.lazy_frontier == plain.lazy_frontier
    assert rep["all_pass"]


def test_theorem4_fantail_hub_star_with_refined_tail():
    pres = load_fixture("fantail")
    dec, rep = theorem4_pipeline(pres, depth=4)
    assert rep["all_pass"]
    hubs = [n for n, cs in dec.lazy_frontier.items()
            if any(isinstance(c, FanHub) for c in cs)]
    assert len(hubs) == 1 and dec.bags[hubs[0]] == b("x1", "x2")
    chain = [n for n in dec.bags if dec.bags[n] == t("t", 0, 2)]
    assert chain  # the tail was refined into its own finite bags
    assert rep["hub_linkage"]["ok"] and rep["hub_linkage"]["hubs"]


def test_theorem4_appendix_prefix_all_pass():
    dec, rep = theorem4_pipeline(load_fixture("appendixA"), depth=3)
    assert rep["all_pass"]
    hubs = [n for n, cs in dec.lazy_frontier.items()
            if any(isinstance(c, FanHub) for c in cs)]
    assert len(hubs) == 4
    assert sorted(len(dec.bags[h]) for h in hubs) == [3, 4, 5, 6]


def test_theorem4_battery():
    for name in ("ladder", "domray", "twotail", "fan2"):
        _, rep = theorem4_pipeline(load_fixture(name), depth=4)
        assert rep["all_pass"], (name, rep)


# ------------------------------------------------------------ theorem 1'

def test_theorem1_ray_already_componental():
    pres = load_fixture("ray")
    d4, _ = theorem4_pipeline(pres, depth=3)
    d1, rep = theorem1_pipeline(pres, depth=3)
    assert rep["contracted"] == []
    assert d1.bags == d4.bags
    assert rep["all_pass"]


def test_theorem1_fan_hub_edges_merged_distinct_bags():
    _, rep = theorem1_pipeline(load_fixture("fantail"), depth=4)
    assert rep["contracted"] and rep["paper"]["L3"]
    assert rep["all_pass"]


def test_theorem1_domray_liminf_is_the_dominator():
    dec, rep = theorem1_pipeline(load_fixture("domray"), depth=4)
    assert rep["all_pass"]
    certs = [c for cs in dec.lazy_frontier.values() for c in cs
             if isinstance(c, PeriodicRay)]
    (cert,) = certs
    lim_set, lim_size = liminf_adhesions(cert)
    assert lim_set == b("d") and lim_size == 2


def test_theorem1_liminf_sizes_match_combined_degrees():
    want = {"ray": [1], "ladder": [2], "twotail": [2, 2]}
    for name, sizes in want.items():
        dec, rep = theorem1_pipeline(load_fixture(name), depth=4)
        assert rep["all_pass"]
        got = sorted(liminf_adhesions(c)[1]
                     for cs in dec.lazy_frontier.values() for c in cs
                     if isinstance(c, PeriodicRay))
        assert got == sizes, name
