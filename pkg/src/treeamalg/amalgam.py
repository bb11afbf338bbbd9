"""Tree amalgamations of graph truncations.

Copies of two factor graphs sit on the two sides of a truncated
semiregular tree. Every tree edge glues two copies along designated
vertex sets (adhesion sets) via a bijection: first one joining edge is
added per adhesion vertex (the plus graph), then exactly those joining
edges are contracted (the amalgam).

Truncation honesty: a copy on the rim of the tree, and any vertex on the
uncertified rim of an incomplete factor ball, could gain a neighbour in
the untruncated amalgam. Such vertices are recorded as attachment
vertices, and the certified radius of both produced balls is the
smallest basepoint distance to one of them. Any true path that shortcuts
through unbuilt structure must enter and leave the built region through
attachment vertices, so distances inside the certified window cannot be
beaten and FiniteBall's certification rule stays sound.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace

from .ball import FiniteBall
from .errors import (CertificationError, PreconditionError, SchemaError,
                     ValidationError)
from .generators import resolve_factor

COPY_COLORS = ("lightblue", "palegreen", "lightyellow", "lightpink",
               "lightcyan", "wheat", "lavender", "mistyrose")


class TruncatedTree:
    """Truncated (p1, p2)-semiregular tree with labeled edges.

    Node 0 is the root (side 1); nodes are numbered in BFS order. Every
    edge carries a coordinate pair (k, l): k is the edge's slot at its
    side-1 endpoint, l its slot at the side-2 endpoint. The canonical
    labeling gives the root's children slots 0..p1-1, gives every other
    node's parent edge its own-side slot 0, and numbers child edges
    upward from 1. Custom labelings may reassign the pairs but not the
    shape.
    """

    def __init__(self, p1, p2, depth, labels=None):
        if p1 < 1 or p2 < 1:
            raise ValueError("arities must be at least 1")
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.p1 = int(p1)
        self.p2 = int(p2)
        self.depth = int(depth)
        side = [1]
        parent = [None]
        node_depth = [0]
        edges = []
        queue = deque([0])
        while queue:
            t = queue.popleft()
            if node_depth[t] == self.depth:
                continue
            arity = self.p1 if side[t] == 1 else self.p2
            slots = range(arity) if t == 0 else range(1, arity)
            for k in slots:
                c = len(side)
                side.append(3 - side[t])
                parent.append(t)
                node_depth.append(node_depth[t] + 1)
                # the child end of a fresh edge always takes slot 0
                pair = (k, 0) if side[t] == 1 else (0, k)
                edges.append((t, c, pair[0], pair[1]))
                queue.append(c)
        if labels is not None:
            override = {}
            for item in labels:
                tp, tc, k, l = (int(x) for x in item)
                override[(tp, tc)] = (k, l)
            if set(override) != {(tp, tc) for tp, tc, _, _ in edges}:
                raise ValueError("labeling must cover exactly the tree edges")
            edges = [(tp, tc, *override[(tp, tc)]) for tp, tc, _, _ in edges]
        self.side = side
        self.parent = parent
        self.node_depth = node_depth
        self.edges = edges
        self.children = [[] for _ in side]
        for tp, tc, _, _ in edges:
            self.children[tp].append(tc)

    @property
    def n_nodes(self):
        return len(self.side)

    def arity(self, t):
        return self.p1 if self.side[t] == 1 else self.p2

    def own_slot(self, t, edge):
        tp, tc, k, l = edge
        if t not in (tp, tc):
            raise ValueError(f"edge {edge} is not incident to node {t}")
        return k if self.side[t] == 1 else l

    def incident(self, t):
        return [e for e in self.edges if t in (e[0], e[1])]

    def used_slots(self, t):
        return [self.own_slot(t, e) for e in self.incident(t)]

    def unused_slots(self, t):
        return sorted(set(range(self.arity(t))) - set(self.used_slots(t)))

    def child_at(self, t, slot):
        """Child of t whose connecting edge has own-side slot `slot` at t,
        or None."""
        for e in self.edges:
            if e[0] == t and self.own_slot(t, e) == slot:
                return e[1]
        return None

    def path(self, a, b):
        """Node path from a to b (inclusive)."""
        up_a, up_b = [a], [b]
        while self.node_depth[up_a[-1]] > self.node_depth[up_b[-1]]:
            up_a.append(self.parent[up_a[-1]])
        while self.node_depth[up_b[-1]] > self.node_depth[up_a[-1]]:
            up_b.append(self.parent[up_b[-1]])
        while up_a[-1] != up_b[-1]:
            up_a.append(self.parent[up_a[-1]])
            up_b.append(self.parent[up_b[-1]])
        return up_a + up_b[-2::-1]

    def same_shape(self, other):
        return (self.p1 == other.p1 and self.p2 == other.p2
                and self.depth == other.depth)

    def to_dict(self):
        return {
            "schema": "tree/1",
            "p1": self.p1,
            "p2": self.p2,
            "depth": self.depth,
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != "tree/1":
            raise SchemaError("expected schema tree/1", field="schema")
        return cls(d["p1"], d["p2"], d["depth"], labels=d["edges"])

    def __repr__(self):
        return (f"TruncatedTree(p1={self.p1}, p2={self.p2}, "
                f"depth={self.depth}, nodes={self.n_nodes})")


@dataclass
class AmalgamationSpec:
    """Everything needed to build one truncated tree amalgamation.

    adhesion1[k] lists the side-1 adhesion set for slot k (vertex ids of
    factor1), adhesion2[l] likewise. bijections maps a slot pair (k, l)
    to an explicit pairing; slot pairs without an entry pair the two sets
    in sorted vertex order.
    """

    factor1: FiniteBall
    factor2: FiniteBall
    adhesion1: list
    adhesion2: list
    tree_depth: int
    bijections: dict = field(default_factory=dict)
    labeling: object = "canonical"

    @property
    def p1(self):
        return len(self.adhesion1)

    @property
    def p2(self):
        return len(self.adhesion2)

    def factor(self, side):
        return self.factor1 if side == 1 else self.factor2

    def adhesion(self, side):
        return self.adhesion1 if side == 1 else self.adhesion2

    def tree(self):
        labels = None if self.labeling == "canonical" else list(self.labeling)
        return TruncatedTree(self.p1, self.p2, self.tree_depth, labels=labels)

    def bijection(self, k, l):
        """The gluing map S1_k -> S2_l as a dict."""
        pairs = self.bijections.get((k, l))
        if pairs is None:
            return dict(zip(sorted(self.adhesion1[k]),
                            sorted(self.adhesion2[l])))
        return {int(x): int(y) for x, y in pairs}

    def adhesion_size(self):
        return len(self.adhesion1[0]) if self.adhesion1 else 0

    def to_dict(self):
        d = {
            "schema": "amalgam_spec/1",
            "factor1": self.factor1.to_dict(),
            "factor2": self.factor2.to_dict(),
            "adhesion1": [list(s) for s in self.adhesion1],
            "adhesion2": [list(s) for s in self.adhesion2],
            "tree": {"p1": self.p1, "p2": self.p2, "depth": self.tree_depth},
        }
        if self.bijections:
            d["bijections"] = {f"{k},{l}": [list(p) for p in pairs]
                               for (k, l), pairs in sorted(self.bijections.items())}
        if self.labeling != "canonical":
            d["labeling"] = [list(e) for e in self.labeling]
        return d

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != "amalgam_spec/1":
            raise SchemaError("expected schema amalgam_spec/1", field="schema")
        for key in ("factor1", "factor2", "adhesion1", "adhesion2", "tree"):
            if key not in d:
                raise SchemaError(f"missing field {key}", field=key)
        tree = d["tree"]
        for key in ("p1", "p2", "depth"):
            if key not in tree:
                raise SchemaError(f"missing field tree.{key}",
                                  field=f"tree.{key}")
        adhesion1 = [[int(v) for v in s] for s in d["adhesion1"]]
        adhesion2 = [[int(v) for v in s] for s in d["adhesion2"]]
        if len(adhesion1) != tree["p1"]:
            raise SchemaError("adhesion1 must list one set per side-1 slot",
                              field="adhesion1")
        if len(adhesion2) != tree["p2"]:
            raise SchemaError("adhesion2 must list one set per side-2 slot",
                              field="adhesion2")
        bijections = {}
        for key, pairs in d.get("bijections", {}).items():
            k, l = (int(x) for x in key.split(","))
            bijections[(k, l)] = [(int(a), int(b)) for a, b in pairs]
        labeling = d.get("labeling", "canonical")
        if labeling != "canonical":
            labeling = [tuple(int(x) for x in e) for e in labeling]
        return cls(factor1=resolve_factor(d["factor1"]),
                   factor2=resolve_factor(d["factor2"]),
                   adhesion1=adhesion1, adhesion2=adhesion2,
                   tree_depth=int(tree["depth"]), bijections=bijections,
                   labeling=labeling)

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


def validate_spec(spec):
    """Collect every violated invariant; an empty list means valid."""
    problems = []
    if spec.p1 < 1 or spec.p2 < 1:
        problems.append("each side needs at least one adhesion set")
        return problems
    for side in (1, 2):
        fac = spec.factor(side)
        for k, s in enumerate(spec.adhesion(side)):
            if not s:
                problems.append(f"S{side}_{k} is empty")
            if len(set(s)) != len(s):
                problems.append(f"S{side}_{k} repeats a vertex")
            for v in s:
                if not 0 <= v < fac.n:
                    problems.append(
                        f"S{side}_{k} names vertex {v} outside factor{side}")
    base = len(spec.adhesion1[0])
    for side in (1, 2):
        for k, s in enumerate(spec.adhesion(side)):
            if len(s) != base:
                problems.append(f"cardinality mismatch: |S{side}_{k}| = "
                                f"{len(s)} but |S1_0| = {base}")
    try:
        tree = spec.tree()
    except ValueError as err:
        problems.append(f"labeling rejected: {err}")
        return problems
    for t in range(tree.n_nodes):
        used = tree.used_slots(t)
        arity = tree.arity(t)
        for k in used:
            if not 0 <= k < arity:
                problems.append(f"slot {k} at tree node {t} is out of range")
        seen = set()
        for k in used:
            if k in seen:
                problems.append(f"edge labels at tree node {t} do not exhaust "
                                f"its slots: slot {k} repeated")
            seen.add(k)
    for tp, tc, k, l in tree.edges:
        pairs = spec.bijections.get((k, l))
        if pairs is None:
            continue
        dom = [x for x, _ in pairs]
        img = [y for _, y in pairs]
        if sorted(dom) != sorted(spec.adhesion1[k]) or len(set(dom)) != len(dom):
            problems.append(f"phi[{k},{l}] domain is not exactly S1_{k}")
        if sorted(set(img)) != sorted(spec.adhesion2[l]) or len(set(img)) != len(img):
            problems.append(f"phi[{k},{l}] is not a bijection onto S2_{l}")
    # dedupe, preserving order
    return list(dict.fromkeys(problems))


@dataclass
class AmalgamBundle:
    """A built truncation: the plus graph, and after contract() also the
    contracted amalgam with the quotient map.

    provenance[i] = (tree node, factor vertex) for plus vertex i.
    contraction_map[i] = contracted vertex that plus vertex i ends up at.
    """

    spec: AmalgamationSpec
    tree: TruncatedTree
    plus_graph: FiniteBall
    provenance: list
    new_edges: list
    contracted: FiniteBall = None
    contraction_map: list = None

    def copy_offset(self, t):
        """Plus id of factor vertex 0 of the copy at tree node t."""
        # copies are materialized contiguously
        for i, (node, v) in enumerate(self.provenance):
            if node == t and v == 0:
                return i
        raise ValueError(f"no copy at tree node {t}")

    def fibers(self):
        """Contracted vertex -> sorted list of plus vertices."""
        if self.contraction_map is None:
            raise PreconditionError("contract the bundle first")
        out = [[] for _ in range(self.contracted.n)]
        for v, g in enumerate(self.contraction_map):
            out[g].append(v)
        return out

    def to_dict(self):
        d = {
            "schema": "amalgam_bundle/1",
            "spec": self.spec.to_dict(),
            "tree": self.tree.to_dict(),
            "plus_graph": self.plus_graph.to_dict(),
            "provenance": [list(p) for p in self.provenance],
            "new_edges": [list(e) for e in self.new_edges],
            "contracted": None,
            "contraction_map": None,
        }
        if self.contracted is not None:
            d["contracted"] = self.contracted.to_dict()
            d["contraction_map"] = list(self.contraction_map)
        return d

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != "amalgam_bundle/1":
            raise SchemaError("expected schema amalgam_bundle/1",
                              field="schema")
        contracted = d.get("contracted")
        return cls(
            spec=AmalgamationSpec.from_dict(d["spec"]),
            tree=TruncatedTree.from_dict(d["tree"]),
            plus_graph=FiniteBall.from_dict(d["plus_graph"]),
            provenance=[tuple(p) for p in d["provenance"]],
            new_edges=[tuple(e) for e in d["new_edges"]],
            contracted=None if contracted is None
            else FiniteBall.from_dict(contracted),
            contraction_map=d.get("contraction_map"),
        )

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dot(self):
        """DOT rendering: one fill color per copy, joining edges red."""
        lines = ["graph bundle {", "  node [style=filled];"]
        for i, (t, v) in enumerate(self.provenance):
            color = COPY_COLORS[t % len(COPY_COLORS)]
            shape = ""
            if i == self.plus_graph.basepoint:
                shape = ", shape=square"
            lines.append(f'  {i} [label="{t}:{v}", fillcolor={color}{shape}];')
        new = {frozenset(e) for e in self.new_edges}
        for u, v in self.plus_graph.edges:
            if frozenset((u, v)) in new:
                lines.append(f"  {u} -- {v} [color=red, penwidth=2];")
            else:
                lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _attachment_vertices(spec, tree, offsets):
    """Plus vertices that may gain a neighbour in the untruncated amalgam."""
    out = set()
    for t in range(tree.n_nodes):
        side = tree.side[t]
        fac = spec.factor(side)
        base = offsets[t]
        if not fac.complete:
            for v in range(fac.n):
                if fac.depth[v] >= fac.cert_radius:
                    out.add(base + v)
        for k in tree.unused_slots(t):
            for v in spec.adhesion(side)[k]:
                out.add(base + v)
    return out


def build_plus(spec, *, tree_order=None):
    """Materialize one factor copy per tree node and add the joining edges.

    tree_order optionally permutes the materialization order of the
    copies (vertex numbering changes, the graph does not).
    """
    problems = validate_spec(spec)
    if problems:
        raise ValidationError(problems)
    tree = spec.tree()
    order = list(range(tree.n_nodes)) if tree_order is None else [
        int(t) for t in tree_order]
    if sorted(order) != list(range(tree.n_nodes)):
        raise ValueError("tree_order must be a permutation of the tree nodes")
    offsets = {}
    provenance = []
    labels = []
    n = 0
    for t in order:
        fac = spec.factor(tree.side[t])
        offsets[t] = n
        for v in range(fac.n):
            provenance.append((t, v))
            labels.append({"copy": t, "vertex": v})
        n += fac.n
    edges = []
    for t in order:
        base = offsets[t]
        for u, v in spec.factor(tree.side[t]).edges:
            edges.append((base + u, base + v))
    new_edges = []
    for tp, tc, k, l in tree.edges:
        node1 = tp if tree.side[tp] == 1 else tc
        node2 = tc if node1 == tp else tp
        for x, y in sorted(spec.bijection(k, l).items()):
            new_edges.append((offsets[node1] + x, offsets[node2] + y))
    basepoint = offsets[0] + spec.factor1.basepoint
    attachments = _attachment_vertices(spec, tree, offsets)
    # first pass only to learn depths, then rebuild with honest certification
    probe = FiniteBall(n, edges + new_edges, basepoint)
    complete = not attachments
    cert = probe.radius if complete else min(probe.depth[a]
                                             for a in attachments)
    ball = FiniteBall(n, edges + new_edges, basepoint, cert_radius=cert,
                      complete=complete, labels=labels,
                      meta={"attachment_vertices": sorted(attachments),
                            "kind": "plus_graph"})
    return AmalgamBundle(spec=spec, tree=tree, plus_graph=ball,
                         provenance=provenance, new_edges=new_edges)


def contract(bundle):
    """Contract exactly the joining edges; returns a completed bundle."""
    plus = bundle.plus_graph
    root = list(range(plus.n))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for a, b in bundle.new_edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            root[max(ra, rb)] = min(ra, rb)
    ids = {}
    cmap = []
    for v in range(plus.n):
        r = find(v)
        if r not in ids:
            ids[r] = len(ids)
        cmap.append(ids[r])
    edges = sorted({(min(cmap[u], cmap[v]), max(cmap[u], cmap[v]))
                    for u, v in plus.edges if cmap[u] != cmap[v]})
    m = len(ids)
    basepoint = cmap[plus.basepoint]
    attachments = sorted({cmap[a]
                          for a in plus.meta["attachment_vertices"]})
    probe = FiniteBall(m, edges, basepoint)
    complete = not attachments
    cert = probe.radius if complete else min(probe.depth[a]
                                             for a in attachments)
    ball = FiniteBall(m, edges, basepoint, cert_radius=cert,
                      complete=complete,
                      meta={"attachment_vertices": attachments,
                            "kind": "contracted"})
    return replace(bundle, contracted=ball, contraction_map=cmap)


def build(spec, *, tree_order=None):
    return contract(build_plus(spec, tree_order=tree_order))


def identification_size(bundle, g_vertex):
    """Number of tree nodes spanned by the contraction class of g_vertex."""
    if bundle.contraction_map is None:
        raise PreconditionError("contract the bundle first")
    if not 0 <= g_vertex < bundle.contracted.n:
        raise ValueError(f"unknown contracted vertex {g_vertex}")
    touched = {bundle.provenance[v][0]
               for v, g in enumerate(bundle.contraction_map) if g == g_vertex}
    return len(_tree_span(bundle.tree, touched))


def _tree_span(tree, nodes):
    """Closure of a node set under tree paths (the minimal connecting
    subtree). Contraction classes already touch a connected node set, so
    this usually returns its input."""
    nodes = sorted(nodes)
    span = {nodes[0]}
    for t in nodes[1:]:
        span.update(tree.path(nodes[0], t))
    return span


def adhesion_metrics(bundle):
    """Maxima over the truncation; the flags speak only about what was
    built, never about the untruncated amalgam."""
    if bundle.contraction_map is None:
        raise PreconditionError("contract the bundle first")
    spec = bundle.spec
    diam = 0
    uncertified = []
    for side in (1, 2):
        fac = spec.factor(side)
        dist, cert = fac.pairwise
        for k, s in enumerate(spec.adhesion(side)):
            for i, u in enumerate(s):
                for v in s[i + 1:]:
                    if not cert[u][v]:
                        uncertified.append((side, k, u, v))
                    else:
                        diam = max(diam, int(dist[u][v]))
    if uncertified:
        raise CertificationError(
            "adhesion set diameter not certified at the factor truncation "
            "radius", pairs=uncertified)
    sizes = [identification_size(bundle, g)
             for g in range(bundle.contracted.n)]
    return {
        "max_adhesion_diameter": diam,
        "max_identification_size": max(sizes),
        "bounded_adhesion": True,
        "finite_identification": True,
        "truncation_only": True,
    }


def is_trivial(spec):
    """True iff one factor is glued along its whole vertex set and its
    side has arity 1, which makes the amalgam a copy of the other factor."""
    for side in (1, 2):
        sets = spec.adhesion(side)
        if len(sets) == 1 and sorted(sets[0]) == list(range(spec.factor(side).n)):
            return True
    return False


def _singleton_slots(spec):
    """Per side: slot -> its single adhesion vertex, requiring adhesion 1
    and pairwise distinct sets."""
    out = {}
    for side in (1, 2):
        sets = spec.adhesion(side)
        if any(len(s) != 1 for s in sets):
            raise PreconditionError("construction needs adhesion 1")
        verts = [s[0] for s in sets]
        if len(set(verts)) != len(verts):
            raise PreconditionError("construction needs pairwise distinct "
                                    "adhesion sets")
        out[side] = verts
    return out


@dataclass
class SwappedMap:
    """A copy-by-copy bijection between two plus graphs.

    vertex_map sends plus vertices of the first bundle to plus vertices
    of the second; tree_map is the induced automorphism of the truncated
    tree; swaps records the nontrivial exchanges (tree node, vertex a,
    vertex b) applied on top of the factor maps.
    """

    vertex_map: list
    tree_map: list
    swaps: list

    def to_dict(self):
        return {
            "schema": "swapped_map/1",
            "vertex_map": list(self.vertex_map),
            "tree_map": list(self.tree_map),
            "swaps": [list(s) for s in self.swaps],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != "swapped_map/1":
            raise SchemaError("expected schema swapped_map/1", field="schema")
        return cls(vertex_map=list(d["vertex_map"]),
                   tree_map=list(d["tree_map"]),
                   swaps=[tuple(s) for s in d["swaps"]])


def build_swapped_map(bundle_g, bundle_h, f1, f2):
    """Assemble a bijection between the two plus graphs from per-factor
    bijections f1, f2, fixing them up copy by copy.

    Walking the tree outward, the copy at each node is mapped by its
    factor bijection with one exchange applied: the image of the vertex
    gluing the copy toward its parent is swapped to be the corresponding
    gluing vertex on the other side. The gluing vertex seen from the
    parent determines which child slot the copy lands on, which induces
    an automorphism of the truncated tree. Identified pairs then map to
    identified pairs.
    """
    tg, th = bundle_g.tree, bundle_h.tree
    if not tg.same_shape(th):
        raise PreconditionError("bundles must share the tree shape")
    sg = _singleton_slots(bundle_g.spec)
    sh = _singleton_slots(bundle_h.spec)
    slot_of_h = {side: {v: k for k, v in enumerate(sh[side])}
                 for side in (1, 2)}
    fmaps = {1: list(f1), 2: list(f2)}
    for side in (1, 2):
        fac_g = bundle_g.spec.factor(side)
        fac_h = bundle_h.spec.factor(side)
        f = fmaps[side]
        if len(f) != fac_g.n or sorted(f) != list(range(fac_h.n)):
            raise ValueError(f"f{side} is not a bijection between the "
                             "factor vertex sets")
        stray = [v for v in sg[side] if f[v] not in slot_of_h[side]]
        if stray:
            raise ValueError(f"f{side} must send adhesion vertices to "
                             f"adhesion vertices; offenders: {stray}")
    finv = {side: {img: v for v, img in enumerate(fmaps[side])}
            for side in (1, 2)}

    tree_map = [None] * tg.n_nodes
    tree_map[0] = 0
    h_maps = {0: list(fmaps[1])}
    swaps = []
    # edges are listed parent before child, so h_maps[tp] always exists
    for tp, tc, k, l in tg.edges:
        side_c = tg.side[tc]
        side_p = tg.side[tp]
        slot_c = l if side_c == 2 else k
        slot_p = k if side_p == 1 else l
        u = sg[side_c][slot_c]
        y = sg[side_p][slot_p]
        image_slot = slot_of_h[side_p][h_maps[tp][y]]
        tc_h = th.child_at(tree_map[tp], image_slot)
        if tc_h is None:
            raise PreconditionError(
                f"slot {image_slot} at tree node {tree_map[tp]} has no child "
                "edge; the factor map collides with the parent gluing")
        tree_map[tc] = tc_h
        h_edge = next(e for e in th.edges if e[1] == tc_h)
        w = sh[side_c][th.own_slot(tc_h, h_edge)]
        hm = list(fmaps[side_c])
        partner = finv[side_c][w]
        if partner != u:
            hm[u], hm[partner] = hm[partner], hm[u]
            swaps.append((tc, u, partner))
        h_maps[tc] = hm

    offsets_h = {}
    for i, (t, v) in enumerate(bundle_h.provenance):
        if v == 0:
            offsets_h[t] = i
    vertex_map = [0] * bundle_g.plus_graph.n
    for i, (t, v) in enumerate(bundle_g.provenance):
        vertex_map[i] = offsets_h[tree_map[t]] + h_maps[t][v]
    return SwappedMap(vertex_map=vertex_map, tree_map=tree_map, swaps=swaps)


def check_pair_preservation(swapped, bundle_g, bundle_h):
    """Joining edges of the first bundle whose endpoint images are not a
    joining edge of the second; empty list means the map is pair-true."""
    h_pairs = {frozenset(e) for e in bundle_h.new_edges}
    bad = []
    for a, b in bundle_g.new_edges:
        image = frozenset((swapped.vertex_map[a], swapped.vertex_map[b]))
        if image not in h_pairs:
            bad.append((a, b))
    return bad


# -- ready-made example specs --------------------------------------------


def builtin_spec(name, depth):
    """Example amalgamation specs used by tests, suites and docs.

    k2-single: two K2 copies glued at one vertex each (arity 1).
    k2-trivial: K2 glued along its whole vertex set, arity 1.
    k3-singletons: K3 factors, arity 3, one singleton set per vertex.
    k3-chain: overlapping singleton sets, identification size 3.
    c6-pair: C6 factors, arity 2, antipodal singleton sets.
    z-pair: line balls of radius 4, arity 2, sets at -2 and +2.
    free-pair: rank-2 free-group balls of radius 3, sets at the two
    generators.
    """
    from .generators import (builtin_presentation, cayley_ball,
                             complete_graph, cycle_graph)
    if name == "k2-single":
        k2 = complete_graph(2)
        return AmalgamationSpec(factor1=k2, factor2=k2, adhesion1=[[0]],
                                adhesion2=[[0]], tree_depth=depth)
    if name == "k2-trivial":
        k2 = complete_graph(2)
        return AmalgamationSpec(factor1=k2, factor2=k2, adhesion1=[[0, 1]],
                                adhesion2=[[0, 1]], tree_depth=depth)
    if name == "k3-singletons":
        k3 = complete_graph(3)
        sets = [[0], [1], [2]]
        return AmalgamationSpec(factor1=k3, factor2=k3, adhesion1=sets,
                                adhesion2=[list(s) for s in sets],
                                tree_depth=depth)
    if name == "k3-chain":
        k3 = complete_graph(3)
        return AmalgamationSpec(factor1=k3, factor2=k3,
                                adhesion1=[[0], [0]], adhesion2=[[0]],
                                tree_depth=depth)
    if name == "c6-pair":
        c6 = cycle_graph(6)
        return AmalgamationSpec(factor1=c6, factor2=cycle_graph(6),
                                adhesion1=[[0], [3]], adhesion2=[[0], [3]],
                                tree_depth=depth)
    if name == "z-pair":
        line = cayley_ball(builtin_presentation("z"), 4)
        plus2 = next(i for i, lab in enumerate(line.labels)
                     if lab["word"] == "aa")
        minus2 = next(i for i, lab in enumerate(line.labels)
                      if lab["word"] == "AA")
        sets = [[minus2], [plus2]]
        return AmalgamationSpec(factor1=line,
                                factor2=cayley_ball(
                                    builtin_presentation("z"), 4),
                                adhesion1=sets,
                                adhesion2=[list(s) for s in sets],
                                tree_depth=depth)
    if name == "free-pair":
        ball = cayley_ball(builtin_presentation("free2"), 3)
        va = next(i for i, lab in enumerate(ball.labels)
                  if lab["word"] == "a")
        vb = next(i for i, lab in enumerate(ball.labels)
                  if lab["word"] == "b")
        sets = [[va], [vb]]
        return AmalgamationSpec(factor1=ball,
                                factor2=cayley_ball(
                                    builtin_presentation("free2"), 3),
                                adhesion1=sets,
                                adhesion2=[list(s) for s in sets],
                                tree_depth=depth)
    raise ValueError(f"unknown builtin spec {name!r}")
