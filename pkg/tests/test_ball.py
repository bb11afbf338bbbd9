import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeamalg import (CapacityError, CertificationError, FiniteBall,
                       SchemaError, cayley_ball, builtin_presentation,
                       cycle_graph, finite_graph, grid_ball)


def line_ball(radius):
    return cayley_ball(builtin_presentation("z"), radius)


# -- construction ----------------------------------------------------------


def test_rejects_self_loop():
    with pytest.raises(ValueError):
        FiniteBall(2, [(0, 0), (0, 1)], 0)


def test_rejects_duplicate_edge():
    with pytest.raises(ValueError):
        FiniteBall(2, [(0, 1), (1, 0)], 0)


def test_rejects_disconnected():
    with pytest.raises(ValueError):
        FiniteBall(4, [(0, 1), (2, 3)], 0)


def test_rejects_out_of_range_vertex():
    with pytest.raises(ValueError):
        FiniteBall(2, [(0, 2)], 0)


def test_cycle_depths_and_frontier():
    c6 = cycle_graph(6)
    assert c6.radius == 3
    assert sorted(c6.frontier) == [3]
    assert c6.depth == [0, 1, 2, 3, 2, 1]
    assert c6.complete and c6.cert_radius == 3


def test_cert_radius_defaults_to_radius():
    ball = FiniteBall(3, [(0, 1), (1, 2)], 0)
    assert ball.cert_radius == 2 and not ball.complete


def test_cert_radius_validated():
    with pytest.raises(ValueError):
        FiniteBall(3, [(0, 1), (1, 2)], 0, cert_radius=5)


# -- certified distances ---------------------------------------------------


def test_line_tip_pair_not_certified():
    # the two tips of a radius-5 line ball are 10 apart in the ball but
    # could be closer in a graph the ball was cut from
    ball = line_ball(5)
    tips = sorted(ball.frontier)
    cd = ball.certified_distance(tips[0], tips[1])
    assert (cd.value, cd.certified) == (10, False)


def test_line_near_pair_certified():
    ball = line_ball(5)
    a = next(i for i, lab in enumerate(ball.labels) if lab["word"] == "a")
    inv = next(i for i, lab in enumerate(ball.labels) if lab["word"] == "A")
    cd = ball.certified_distance(a, inv)
    assert (cd.value, cd.certified) == (2, True)


def test_complete_ball_certifies_everything():
    c6 = cycle_graph(6)
    dist, cert = c6.pairwise
    assert cert.all()
    assert int(dist[0][3]) == 3


def test_pairwise_matches_distance():
    ball = grid_ball(2)
    dist, cert = ball.pairwise
    for u in range(ball.n):
        for v in range(ball.n):
            assert int(dist[u][v]) == ball.distance(u, v)
            assert cert[u][v] == ball.certified_distance(u, v).certified


def test_uncertified_pair_is_symmetric():
    ball = line_ball(3)
    _, cert = ball.pairwise
    assert (cert == cert.T).all()


# -- geodesics --------------------------------------------------------------


def test_c4_has_two_geodesics():
    c4 = cycle_graph(4)
    assert c4.all_geodesics(0, 2) == [(0, 1, 2), (0, 3, 2)]
    assert c4.geodesic_count(0, 2) == 2


def test_grid_geodesic_counts_are_binomial():
    ball = grid_ball(2)
    idx = {tuple(lab["xy"]): i for i, lab in enumerate(ball.labels)}
    assert ball.geodesic_count(idx[(0, 0)], idx[(1, 1)]) == 2
    assert ball.geodesic_count(idx[(0, 0)], idx[(2, 0)]) == 1
    assert ball.geodesic_count(idx[(-1, -1)], idx[(1, 1)]) == 6


def test_geodesic_cap_enforced():
    c4 = cycle_graph(4)
    with pytest.raises(CapacityError):
        c4.all_geodesics(0, 2, cap=1)


def test_uncertified_pair_refuses_geodesics():
    ball = line_ball(3)
    tips = sorted(ball.frontier)
    with pytest.raises(CertificationError):
        ball.all_geodesics(tips[0], tips[1])


def test_is_geodesic():
    c6 = cycle_graph(6)
    assert c6.is_geodesic((0, 1, 2, 3))
    assert not c6.is_geodesic((0, 1, 2, 3, 4))          # longer than needed
    assert not c6.is_geodesic((0, 2))                   # not even a path
    with pytest.raises(CertificationError):
        ball = line_ball(2)
        tips = sorted(ball.frontier)
        ball.is_geodesic((tips[0], ball.basepoint, tips[1]))


# -- restriction ------------------------------------------------------------


def test_restricted_line():
    ball = line_ball(5)
    sub, old_ids = ball.restricted(2)
    assert sub.n == 5 and sub.radius == 2
    assert sub.cert_radius == 2            # an honest ball of the line again
    assert all(ball.depth[old_ids[i]] == sub.depth[i] for i in range(sub.n))
    assert sub.meta["restricted_from"] == 5


def test_restriction_beyond_window_refused():
    ball = FiniteBall(3, [(0, 1), (1, 2)], 0, cert_radius=1)
    with pytest.raises(ValueError):
        ball.restricted(2)


def test_complete_ball_restricts_anywhere():
    c6 = cycle_graph(6)
    sub, _ = c6.restricted(1)
    assert sub.n == 3 and not sub.complete


# -- serialization ----------------------------------------------------------


def test_round_trip_is_stable():
    ball = grid_ball(2)
    text = ball.dumps()
    again = FiniteBall.loads(text)
    assert again.dumps() == text
    assert again.depth == ball.depth


def test_from_dict_rejects_bad_schema():
    with pytest.raises(SchemaError):
        FiniteBall.from_dict({"schema": "nope"})


def test_from_dict_rejects_wrong_radius():
    d = cycle_graph(4).to_dict()
    d["radius"] = 7
    with pytest.raises(SchemaError):
        FiniteBall.from_dict(d)


def test_dot_marks_frontier_and_basepoint():
    dot = line_ball(2).to_dot()
    assert "shape=square" in dot
    assert "peripheries=2" in dot
    assert dot.count(" -- ") == line_ball(2).edge_count


# -- properties -------------------------------------------------------------


@st.composite
def random_tree(draw):
    n = draw(st.integers(min_value=1, max_value=20))
    edges = [(draw(st.integers(min_value=0, max_value=v - 1)), v)
             for v in range(1, n)]
    return FiniteBall(n, edges, 0, complete=True)


@given(random_tree())
@settings(max_examples=50, deadline=None)
def test_trees_have_unique_geodesics(ball):
    for u in range(ball.n):
        for v in range(u + 1, ball.n):
            assert ball.geodesic_count(u, v) == 1


@given(random_tree(), st.data())
@settings(max_examples=50, deadline=None)
def test_triangle_inequality(ball, data):
    u = data.draw(st.integers(min_value=0, max_value=ball.n - 1))
    v = data.draw(st.integers(min_value=0, max_value=ball.n - 1))
    w = data.draw(st.integers(min_value=0, max_value=ball.n - 1))
    assert ball.distance(u, w) <= ball.distance(u, v) + ball.distance(v, w)


@given(st.integers(min_value=1, max_value=5),
       st.integers(min_value=0, max_value=5))
@settings(max_examples=30, deadline=None)
def test_restriction_certifies_fewer_pairs(radius, smaller):
    smaller = min(smaller, radius)
    ball = line_ball(radius)
    sub, old_ids = ball.restricted(smaller)
    _, cert = ball.pairwise
    _, sub_cert = sub.pairwise
    # a pair certified in the restriction was already certified in the
    # larger ball: restriction must never invent certainty
    for i in range(sub.n):
        for j in range(sub.n):
            if sub_cert[i][j]:
                assert cert[old_ids[i]][old_ids[j]]
