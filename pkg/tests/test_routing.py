"""Routing areas: construction, recognition, trace, composition, transit."""
import pytest

from routenet.errors import CycleRisk, NotAreaShaped
from routenet.multirel import comm_relation, from_rows, rows_of, trace_formula
from routenet.proofnet import ONE, bang, canonical_equal, tensor, validate
from routenet.routing import (
    RoutingArea,
    boxed_one,
    build_area,
    compose_areas,
    delta,
    gamma,
    juxtapose,
    path_semantics,
    read_area,
    semantics,
    trace_net,
    transit,
)


def test_build_area_round_trips_through_read_area():
    r = from_rows(["a", "b"], ["x", "y"], [[2, 0], [1, 3]])
    net = build_area(RoutingArea(r))
    assert validate(net) == []
    back = read_area(net)
    assert back.rel == r
    assert back.payload == bang(ONE)


def test_payload_formula_kept():
    payload = bang(tensor(ONE, ONE))
    area = RoutingArea(from_rows(["a"], ["x"], [[2]]), payload)
    assert read_area(build_area(area)).payload == payload
    with pytest.raises(ValueError):
        RoutingArea(from_rows(["a"], ["x"], [[1]]), ONE)


def test_gamma_is_the_3_communication_area():
    g = gamma()
    assert read_area(g).rel == comm_relation(3)
    # 3 bidirectional plugs = 6 free wires
    assert len(g.free) == 6


def test_delta_sequences_plug_3():
    d = read_area(delta()).rel
    assert d("3", "1") == 0 and d("3", "2") == 0
    assert d("1", "3") == 1 and d("2", "3") == 1
    assert d("3", "4") == 1 and d("4", "3") == 1
    assert d("1", "2") == 1 and d("2", "1") == 1


def test_trace_comm3_oracle():
    # tracing plug 1 of the 3-communication area leaves [[1,2],[2,1]]
    g = gamma()
    t = trace_net(g, "1", "1")
    assert rows_of(read_area(t).rel) == [[1, 2], [2, 1]]
    assert rows_of(trace_formula(comm_relation(3), "1", "1")) == [[1, 2], [2, 1]]


def test_trace_refuses_connected_pair():
    with pytest.raises(CycleRisk):
        trace_net(gamma(), "1", "2")


def test_compose_is_matrix_product():
    # [[3,5]] . [[5],[0]] = [[15]]
    r = from_rows(["i"], ["m1", "m2"], [[3, 5]])
    s = from_rows(["m1", "m2"], ["o"], [[5], [0]])
    net = compose_areas(
        build_area(RoutingArea(r)), ["m1", "m2"], build_area(RoutingArea(s)), ["m1", "m2"]
    )
    assert rows_of(semantics(net)) == [[15]]


def test_path_semantics_agrees_on_areas():
    for rel in (
        comm_relation(3),
        from_rows(["a", "b"], ["x"], [[2], [3]]),
        from_rows(["a"], ["x", "y"], [[0, 1]]),
    ):
        net = build_area(RoutingArea(rel))
        assert path_semantics(net) == rel
        assert semantics(net) == rel


def test_juxtapose_tags_labels():
    a = build_area(RoutingArea(from_rows(["i"], ["o"], [[1]])))
    n = juxtapose(a, a)
    assert sorted(l for _, l in n.free) == ["L.i", "L.o", "R.i", "R.o"]
    assert validate(n) == []


def test_transit_counts_and_residual():
    r = from_rows(["i1", "i2"], ["o1", "o2"], [[2, 1], [0, 3]])
    net = build_area(RoutingArea(r))
    assert transit(net, "i1") == {"o1": 2, "o2": 1}
    assert transit(net, "i2") == {"o1": 0, "o2": 3}


def test_transit_through_gamma():
    # one boxed payload into plug 1 of the hub: one copy to each other plug
    counts = transit(gamma(), "1", boxed_one())
    assert counts == {"1": 0, "2": 1, "3": 1}


def test_read_area_rejects_non_structural():
    with pytest.raises(NotAreaShaped):
        read_area(boxed_one())


def test_compose_chain_associative_on_nets():
    r = from_rows(["i"], ["a", "b"], [[1, 2]])
    s = from_rows(["a", "b"], ["c"], [[2], [1]])
    t = from_rows(["c"], ["o"], [[3]])
    rs_then_t = compose_areas(
        compose_areas(build_area(RoutingArea(r)), ["a", "b"], build_area(RoutingArea(s)), ["a", "b"]),
        ["c"],
        build_area(RoutingArea(t)),
        ["c"],
    )
    s_then_t = compose_areas(
        build_area(RoutingArea(s)), ["c"], build_area(RoutingArea(t)), ["c"]
    )
    r_then_st = compose_areas(
        build_area(RoutingArea(r)), ["a", "b"], s_then_t, ["a", "b"]
    )
    assert semantics(rs_then_t) == semantics(r_then_st)
    assert rows_of(semantics(rs_then_t)) == [[(1 * 2 + 2 * 1) * 3]]
    assert canonical_equal(rs_then_t, r_then_st)
