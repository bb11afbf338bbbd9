import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeamalg import (AmalgamBundle, AmalgamationSpec, CertificationError,
                       PreconditionError, TruncatedTree, ValidationError,
                       adhesion_metrics, build, build_plus, build_swapped_map,
                       builtin_spec, cayley_ball, builtin_presentation,
                       check_pair_preservation, complete_graph, contract,
                       cycle_graph, identification_size, is_trivial,
                       validate_spec)


# -- truncated trees ---------------------------------------------------------


def test_tree_shape_and_canonical_labels():
    tree = TruncatedTree(3, 3, 2)
    assert tree.n_nodes == 10
    assert tree.side[0] == 1 and tree.side[1] == 2
    # root children take slots 0..p1-1, each child end takes slot 0
    assert tree.edges[:3] == [(0, 1, 0, 0), (0, 2, 1, 0), (0, 3, 2, 0)]
    # non-root children take slots 1.. upward
    assert (1, 4, 0, 1) in tree.edges and (1, 5, 0, 2) in tree.edges


def test_tree_arity_one_cannot_extend():
    tree = TruncatedTree(1, 1, 5)
    assert tree.n_nodes == 2
    assert tree.unused_slots(0) == [] and tree.unused_slots(1) == []


def test_tree_unused_slots_at_leaves():
    tree = TruncatedTree(3, 3, 1)
    assert tree.unused_slots(0) == []
    assert tree.unused_slots(1) == [1, 2]


def test_tree_path():
    tree = TruncatedTree(3, 3, 2)
    assert tree.path(4, 5) == [4, 1, 5]
    assert tree.path(4, 0) == [4, 1, 0]
    assert tree.path(0, 0) == [0]


def test_tree_rejects_bad_custom_labels():
    with pytest.raises(ValueError):
        TruncatedTree(2, 2, 1, labels=[(0, 5, 0, 0), (0, 2, 1, 0)])


def test_tree_round_trip():
    tree = TruncatedTree(3, 2, 2)
    again = TruncatedTree.from_dict(tree.to_dict())
    assert again.edges == tree.edges


# -- validation ---------------------------------------------------------------


def test_valid_specs_pass():
    for name in ("k2-single", "k2-trivial", "k3-singletons", "k3-chain",
                 "c6-pair", "z-pair", "free-pair"):
        assert validate_spec(builtin_spec(name, 2)) == []


def test_cardinality_mismatch_names_both_sets():
    spec = builtin_spec("k2-single", 1)
    spec.adhesion1 = [[0, 1]]
    report = validate_spec(spec)
    assert any("|S2_0| = 1" in r and "|S1_0| = 2" in r for r in report)


def test_non_bijective_pairing_reported():
    spec = builtin_spec("k2-single", 1)
    spec.adhesion1 = [[0, 1]]
    spec.adhesion2 = [[0, 1]]
    spec.bijections = {(0, 0): [(0, 0), (1, 0)]}
    report = validate_spec(spec)
    assert any("phi[0,0]" in r and "bijection" in r for r in report)


def test_duplicate_slot_label_reported():
    spec = builtin_spec("k3-singletons", 1)
    spec.labeling = [(0, 1, 0, 0), (0, 2, 0, 0), (0, 3, 2, 0)]
    report = validate_spec(spec)
    assert any("do not exhaust" in r for r in report)


def test_vertex_out_of_range_reported():
    spec = builtin_spec("k3-singletons", 1)
    spec.adhesion2 = [[0], [1], [9]]
    assert any("outside factor2" in r for r in validate_spec(spec))


def test_empty_adhesion_set_reported():
    spec = builtin_spec("k2-single", 1)
    spec.adhesion2 = [[]]
    assert any("empty" in r for r in validate_spec(spec))


def test_build_refuses_invalid_spec():
    spec = builtin_spec("k3-singletons", 1)
    spec.adhesion1 = [[0, 1], [1], [2]]
    with pytest.raises(ValidationError) as err:
        build_plus(spec)
    assert any("cardinality" in v for v in err.value.violations)


def test_permuted_custom_labeling_is_valid():
    spec = builtin_spec("k3-singletons", 1)
    spec.labeling = [(0, 1, 2, 0), (0, 2, 0, 0), (0, 3, 1, 0)]
    assert validate_spec(spec) == []
    bundle = build(spec)
    # slot 2 glues factor vertex 2 of the root to copy 1 now
    assert (2, 3) in bundle.new_edges


# -- building and contracting --------------------------------------------------


def test_two_k2_glued_at_a_vertex():
    bundle = build(builtin_spec("k2-single", 1))
    assert bundle.plus_graph.n == 4 and bundle.plus_graph.edge_count == 3
    assert len(bundle.new_edges) == 1
    assert bundle.contracted.n == 3
    # the (1,1)-tree is a single edge, so nothing was truncated away
    assert bundle.plus_graph.complete and bundle.contracted.complete


def test_depth_zero_is_a_single_copy():
    bundle = build(builtin_spec("k3-singletons", 0))
    assert bundle.plus_graph.n == 3 and not bundle.new_edges
    assert bundle.contraction_map == [0, 1, 2]
    assert bundle.contracted.cert_radius == 0


def test_k3_star_pinned_counts():
    bundle = build(builtin_spec("k3-singletons", 1))
    assert bundle.plus_graph.n == 12
    assert len(bundle.new_edges) == 3
    assert bundle.contracted.n == 9
    assert bundle.plus_graph.cert_radius == 2
    assert bundle.contracted.cert_radius == 1


def test_provenance_covers_every_vertex():
    bundle = build(builtin_spec("c6-pair", 2))
    assert len(bundle.provenance) == bundle.plus_graph.n
    copies = {t for t, _ in bundle.provenance}
    assert copies == set(range(bundle.tree.n_nodes))


def test_new_edges_join_distinct_copies():
    bundle = build(builtin_spec("free-pair", 2))
    for u, v in bundle.new_edges:
        assert bundle.provenance[u][0] != bundle.provenance[v][0]


def test_fiber_sizes_account_for_new_edges():
    # the joining edges form a forest, so contraction removes exactly one
    # vertex per joining edge
    for name, depth in [("k3-singletons", 2), ("k3-chain", 1),
                        ("c6-pair", 2), ("z-pair", 1)]:
        bundle = build(builtin_spec(name, depth))
        shrink = bundle.plus_graph.n - bundle.contracted.n
        assert shrink == len(bundle.new_edges)


def test_adhesion_one_fibers_have_size_at_most_two():
    bundle = build(builtin_spec("k3-singletons", 2))
    assert max(len(f) for f in bundle.fibers()) == 2
    assert max(identification_size(bundle, g)
               for g in range(bundle.contracted.n)) == 2


def test_chained_sets_reach_identification_size_three():
    bundle = build(builtin_spec("k3-chain", 1))
    glued = bundle.contraction_map[0]
    assert identification_size(bundle, glued) == 3
    assert adhesion_metrics(bundle)["max_identification_size"] == 3


def test_identification_size_rejects_unknown_vertex():
    bundle = build(builtin_spec("k2-single", 1))
    with pytest.raises(ValueError):
        identification_size(bundle, 99)


def test_metrics_pinned():
    metrics = adhesion_metrics(build(builtin_spec("k3-singletons", 1)))
    assert metrics["max_adhesion_diameter"] == 0
    assert metrics["max_identification_size"] == 2
    assert metrics["truncation_only"]
    full = builtin_spec("k2-trivial", 1)
    assert adhesion_metrics(build(full))["max_adhesion_diameter"] == 1


def test_metrics_need_certified_diameters():
    # both tips of the line ball in one adhesion set: their distance could
    # shrink in the graph the ball was cut from
    line = cayley_ball(builtin_presentation("z"), 4)
    tips = sorted(line.frontier)
    spec = AmalgamationSpec(factor1=line, factor2=line,
                            adhesion1=[list(tips)], adhesion2=[list(tips)],
                            tree_depth=1)
    with pytest.raises(CertificationError):
        adhesion_metrics(build(spec))


def test_is_trivial():
    assert is_trivial(builtin_spec("k2-trivial", 1))
    assert not is_trivial(builtin_spec("k3-singletons", 1))
    wide = builtin_spec("k2-trivial", 1)
    wide.adhesion1 = [[0, 1], [0, 1]]
    wide.adhesion2 = [[0, 1], [0, 1]]
    assert not is_trivial(wide)       # arity 2 even with full vertex sets


def test_certified_window_saturates_on_incomplete_factors():
    # the factor rim pins the window, so deeper trees keep the same
    # certified ball: the backbone of the depth-stability checks
    for name, cert in (("z-pair", 4), ("free-pair", 3)):
        for depth in (1, 2, 3):
            bundle = build(builtin_spec(name, depth))
            assert bundle.plus_graph.cert_radius == cert
            assert bundle.contracted.cert_radius == cert


def test_rebuild_with_permuted_enumeration_is_isomorphic():
    spec = builtin_spec("k3-singletons", 2)
    reference = build(spec)
    order = list(range(reference.tree.n_nodes))
    random.Random(7).shuffle(order)
    permuted = build(spec, tree_order=order)
    lookup = {pv: i for i, pv in enumerate(permuted.provenance)}
    relabel = [lookup[pv] for pv in reference.provenance]
    assert ({frozenset((relabel[u], relabel[v]))
             for u, v in reference.plus_graph.edges}
            == {frozenset(e) for e in permuted.plus_graph.edges})
    assert reference.contracted.n == permuted.contracted.n
    cmap = permuted.contraction_map
    assert ({frozenset((cmap[relabel[u]], cmap[relabel[v]]))
             for u, v in reference.plus_graph.edges
             if cmap[relabel[u]] != cmap[relabel[v]]}
            == {frozenset(e) for e in permuted.contracted.edges})


def test_bad_tree_order_rejected():
    with pytest.raises(ValueError):
        build_plus(builtin_spec("k2-single", 1), tree_order=[0, 0])


# -- serialization --------------------------------------------------------------


def test_spec_round_trip():
    spec = builtin_spec("c6-pair", 2)
    spec.bijections = {(0, 0): [(0, 0)], (1, 0): [(3, 0)], (0, 1): [(0, 3)]}
    again = AmalgamationSpec.loads(spec.dumps())
    assert again.dumps() == spec.dumps()
    assert validate_spec(again) == []


def test_bundle_round_trip():
    bundle = build(builtin_spec("k3-singletons", 1))
    again = AmalgamBundle.loads(bundle.dumps())
    assert again.dumps() == bundle.dumps()
    assert again.contracted.depth == bundle.contracted.depth
    assert contract(AmalgamBundle.loads(
        build_plus(builtin_spec("k3-singletons", 1)).dumps())).contracted.n == 9


def test_bundle_dot_highlights_new_edges():
    bundle = build(builtin_spec("k2-single", 1))
    dot = bundle.to_dot()
    assert dot.count("color=red") == 1
    assert "fillcolor=lightblue" in dot and "fillcolor=palegreen" in dot


# -- swapped maps ----------------------------------------------------------------


def k3_bundles(depth):
    return (build(builtin_spec("k3-singletons", depth)),
            build(builtin_spec("k3-singletons", depth)))


def test_identity_maps_to_identity():
    bg, bh = k3_bundles(2)
    sm = build_swapped_map(bg, bh, [0, 1, 2], [0, 1, 2])
    assert sm.vertex_map == list(range(bg.plus_graph.n))
    assert sm.tree_map == list(range(bg.tree.n_nodes))
    assert sm.swaps == []


@pytest.mark.parametrize("f1", list(itertools.permutations(range(3))))
def test_every_k3_automorphism_preserves_pairs(f1):
    bg, bh = k3_bundles(2)
    for f2 in itertools.permutations(range(3)):
        sm = build_swapped_map(bg, bh, list(f1), list(f2))
        assert check_pair_preservation(sm, bg, bh) == []
        assert sorted(sm.vertex_map) == list(range(bh.plus_graph.n))
        assert sorted(sm.tree_map) == list(range(bg.tree.n_nodes))


def test_induced_tree_map_is_an_automorphism():
    bg, bh = k3_bundles(3)
    sm = build_swapped_map(bg, bh, [1, 2, 0], [2, 0, 1])
    tree = bg.tree
    for t in range(1, tree.n_nodes):
        assert sm.tree_map[tree.parent[t]] == tree.parent[sm.tree_map[t]]
        assert tree.node_depth[t] == tree.node_depth[sm.tree_map[t]]


def test_per_copy_restriction_deviates_on_at_most_two_vertices():
    bg, bh = k3_bundles(2)
    rot = [1, 2, 0]
    sm = build_swapped_map(bg, bh, rot, rot)
    offsets = {}
    for i, (t, v) in enumerate(bg.provenance):
        if v == 0:
            offsets[t] = i
    for t in range(bg.tree.n_nodes):
        deviations = sum(
            1 for v in range(3)
            if bh.provenance[sm.vertex_map[offsets[t] + v]][1] != rot[v])
        assert deviations <= 2


def test_swap_on_c6_with_slot_exchanging_map():
    bg = build(builtin_spec("c6-pair", 2))
    bh = build(builtin_spec("c6-pair", 2))
    flip = [(i + 3) % 6 for i in range(6)]    # exchanges the two gluing sites
    sm = build_swapped_map(bg, bh, flip, flip)
    assert check_pair_preservation(sm, bg, bh) == []
    assert sm.tree_map != list(range(bg.tree.n_nodes))


def test_swap_preconditions():
    bg, bh = k3_bundles(1)
    with pytest.raises(PreconditionError):
        build_swapped_map(build(builtin_spec("k2-trivial", 1)),
                          build(builtin_spec("k2-trivial", 1)),
                          [0, 1], [0, 1])
    with pytest.raises(PreconditionError):
        build_swapped_map(build(builtin_spec("k3-chain", 1)),
                          build(builtin_spec("k3-chain", 1)),
                          [0, 1, 2], [0, 1, 2])
    with pytest.raises(PreconditionError):
        build_swapped_map(bg, build(builtin_spec("k3-singletons", 2)),
                          [0, 1, 2], [0, 1, 2])
    with pytest.raises(ValueError):
        build_swapped_map(bg, bh, [0, 0, 2], [0, 1, 2])


def test_swap_requires_adhesion_respecting_maps():
    bg = build(builtin_spec("c6-pair", 1))
    bh = build(builtin_spec("c6-pair", 1))
    shift = [(i + 1) % 6 for i in range(6)]   # sends gluing site 0 to 1
    with pytest.raises(ValueError) as err:
        build_swapped_map(bg, bh, shift, shift)
    assert "adhesion vertices" in str(err.value)


# -- properties -------------------------------------------------------------------


@st.composite
def small_specs(draw):
    factor = complete_graph(4)
    card = draw(st.integers(min_value=1, max_value=2))
    verts = st.lists(st.integers(min_value=0, max_value=3), min_size=card,
                     max_size=card, unique=True)
    p1 = draw(st.integers(min_value=1, max_value=2))
    p2 = draw(st.integers(min_value=1, max_value=2))
    depth = draw(st.integers(min_value=0, max_value=2))
    return AmalgamationSpec(
        factor1=factor, factor2=factor,
        adhesion1=[sorted(draw(verts)) for _ in range(p1)],
        adhesion2=[sorted(draw(verts)) for _ in range(p2)],
        tree_depth=depth)


@given(small_specs())
@settings(max_examples=60, deadline=None)
def test_contraction_bookkeeping(spec):
    bundle = build(spec)
    plus, contracted = bundle.plus_graph, bundle.contracted
    assert plus.n == bundle.tree.n_nodes * 4
    assert plus.n - contracted.n == len(bundle.new_edges)
    cmap = bundle.contraction_map
    assert sorted(set(cmap)) == list(range(contracted.n))
    fibers = bundle.fibers()
    assert sum(len(f) - 1 for f in fibers) == len(bundle.new_edges)
    for g, fiber in enumerate(fibers):
        assert identification_size(bundle, g) >= 1
