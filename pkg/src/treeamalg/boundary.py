"""Finite-scale boundary structure: ends, frontier clustering, ray types.

Ends are rendered as components left after deleting a ball around the
basepoint, keeping only components that reach the frontier (components
that die out are truncation artifacts). The boundary is rendered by
clustering a sphere: two sphere vertices belong together when a chain of
sphere vertices links them with consecutive Gromov products >= t, i.e.
geodesics between chain neighbours stay far from the basepoint.

Certification of a product decision. For x, y on the sphere of radius
rho (rho <= cert_radius so radial distances are exact), the product is
(2*rho - d(x,y)) / 2, and the cluster decision only needs the comparison
d(x,y) <= 2*rho - 2*t. A ball path of length <= the bound settles YES. A
NO needs more: a shorter path through unbuilt territory would have to
dive past the certified window and back, costing at least
2*(cert_radius - rho + 1), so NO is certified when that escape bound
also exceeds the threshold. Anything else is undecided and trips a
partial-result error carrying the decided fraction. Profiling the sphere
of radius r inside a ball of radius 2r decides every pair at every
threshold; that doubling is the documented cost knob (`at_radius`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PartialResultError, PreconditionError

__all__ = ["EndProfile", "BoundaryProfile", "RayClass", "end_profile",
           "boundary_profile", "classify_ray", "components_vs_ends",
           "disconnectedness_score"]


@dataclass(frozen=True)
class EndProfile:
    """Components beyond the deleted k-ball that reach the frontier."""

    k: int
    count: int
    components: tuple
    frontier_share: tuple

    def to_dict(self):
        return {
            "schema": "end_profile/1",
            "k": self.k,
            "count": self.count,
            "components": [list(c) for c in self.components],
            "frontier_share": [round(s, 6) for s in self.frontier_share],
        }


@dataclass(frozen=True)
class BoundaryProfile:
    """Chain clustering of a sphere by Gromov product threshold."""

    threshold: int
    at_radius: int
    clusters: tuple
    count: int
    window: dict = field(default_factory=dict)

    @property
    def all_singletons(self):
        return all(len(c) == 1 for c in self.clusters)

    def to_dict(self):
        return {
            "schema": "boundary_profile/1",
            "threshold": self.threshold,
            "at_radius": self.at_radius,
            "count": self.count,
            "clusters": [list(c) for c in self.clusters],
            "window": self.window,
        }


@dataclass(frozen=True)
class RayClass:
    """Factor-bound or tree-bound classification of a rim geodesic."""

    kind: str
    copy: int = None
    tree_path: tuple = None
    witness: tuple = ()
    cutoff: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": "ray_class/1",
            "kind": self.kind,
            "copy": self.copy,
            "tree_path": None if self.tree_path is None
            else list(self.tree_path),
            "witness": list(self.witness),
            "cutoff": self.cutoff,
        }


# -- ends ------------------------------------------------------------------


def _growth_set(ball):
    # components only count as end candidates while they can still grow:
    # for amalgam truncations that means holding an attachment vertex,
    # for generated balls the frontier; the raw frontier of a bundle is
    # ragged (copies near tree leaves stop early) and would miss live
    # branches
    attachments = (ball.meta or {}).get("attachment_vertices")
    if attachments:
        return set(attachments)
    return set(ball.frontier)


def end_profile(ball, k):
    """Still-growing components of the ball minus the closed k-ball."""
    if not 0 <= k < ball.radius:
        raise ValueError(f"k must lie in [0, {ball.radius - 1}], got {k}")
    alive = [v for v in range(ball.n) if ball.depth[v] > k]
    frontier = _growth_set(ball)
    seen = set()
    components = []
    for start in alive:
        if start in seen or ball.depth[start] <= k:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for w in ball.adjacency[u]:
                if w not in seen and ball.depth[w] > k:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        if frontier & set(comp):
            components.append(tuple(sorted(comp)))
    components.sort(key=lambda c: c[0])
    shares = tuple(len(frontier & set(c)) / len(frontier)
                   for c in components)
    return EndProfile(k=k, count=len(components),
                      components=tuple(components), frontier_share=shares)


# -- boundary clustering ---------------------------------------------------


def _sphere_rows(ball, sphere):
    return {x: ball.distances_from(x) for x in sphere}


def boundary_profile(ball, t, *, at_radius=None):
    """Cluster the sphere of radius `at_radius` (default: ball radius).

    Raises a partial-result error when any pair's cluster decision is
    neither witnessed by a short ball path nor excluded by the escape
    bound; see module docstring for the doubling knob that avoids this.
    """
    rho = ball.radius if at_radius is None else at_radius
    if not 0 <= rho <= ball.radius:
        raise ValueError(f"at_radius must lie in [0, {ball.radius}]")
    if not 0 <= t <= rho:
        raise ValueError(f"threshold must lie in [0, {rho}], got {t}")
    sphere = list(ball.sphere(rho)) if rho > 0 else [ball.basepoint]
    window = {
        "cert_radius": None if ball.complete else ball.cert_radius,
        "escape_bound": None if ball.complete
        else 2 * (ball.cert_radius - rho + 1),
        "distance_threshold": 2 * rho - 2 * t,
    }
    if len(sphere) <= 1:
        clusters = tuple((v,) for v in sphere)
        return BoundaryProfile(threshold=t, at_radius=rho, clusters=clusters,
                               count=len(clusters), window=window)
    if not ball.complete and rho > ball.cert_radius:
        raise PartialResultError(
            f"sphere radius {rho} lies beyond the certified window "
            f"{ball.cert_radius}; no radial distance is exact", coverage=0.0)
    limit = 2 * rho - 2 * t
    escape = window["escape_bound"]
    no_is_safe = ball.complete or escape > limit
    rows = _sphere_rows(ball, sphere)
    parent = {v: v for v in sphere}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    undecided = 0
    total = len(sphere) * (len(sphere) - 1) // 2
    for i, x in enumerate(sphere):
        row = rows[x]
        for y in sphere[i + 1:]:
            if row[y] <= limit:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
            elif not no_is_safe:
                undecided += 1
    if undecided:
        coverage = 1.0 - undecided / total
        raise PartialResultError(
            f"{undecided} of {total} sphere pairs undecided at t={t}, "
            f"radius {rho}: ball paths exceed {limit} but the escape bound "
            f"{escape} does not", coverage=coverage)
    groups = {}
    for v in sphere:
        groups.setdefault(find(v), []).append(v)
    clusters = tuple(sorted((tuple(sorted(g)) for g in groups.values()),
                            key=lambda c: c[0]))
    return BoundaryProfile(threshold=t, at_radius=rho, clusters=clusters,
                           count=len(clusters), window=window)


# -- ray classification ----------------------------------------------------


def _fiber_members(bundle):
    members = {}
    for plus_v, contracted_v in enumerate(bundle.contraction_map):
        members.setdefault(contracted_v, []).append(
            bundle.provenance[plus_v])
    return members


def classify_ray(bundle, ray):
    """Classify a rim geodesic of the contracted amalgam.

    The ray must run from the basepoint to the certified rim (depth
    cert_radius, or the true frontier when complete). It is factor-bound
    when after its last change of copy it stays put for at least half
    its length, tree-bound otherwise; the copies it crosses, in order,
    witness the tree-bound case. Requires adhesion 1: then leaving a
    copy through an identified vertex is irreversible, so the crossing
    sequence follows a path in the amalgamation tree.
    """
    if bundle.contracted is None:
        raise PreconditionError("bundle is not contracted; call contract()")
    spec = bundle.spec
    sets = [s for side in (1, 2) for s in spec.adhesion(side)]
    if any(len(s) != 1 for s in sets):
        raise PreconditionError("ray classification needs adhesion 1")
    ball = bundle.contracted
    ray = tuple(ray)
    if not ray or ray[0] != ball.basepoint:
        raise ValueError("ray must start at the basepoint")
    rim = ball.radius if ball.complete else ball.cert_radius
    if ball.depth[ray[-1]] != rim:
        raise ValueError(
            f"ray must end on the certified rim (depth {rim}), "
            f"got depth {ball.depth[ray[-1]]}")
    if not ball.is_geodesic(ray):
        raise ValueError("ray is not a geodesic of the contracted graph")

    members = _fiber_members(bundle)
    tree = bundle.tree

    def edge_copy(a, b):
        ats = {t: v for t, v in members[a]}
        best = None
        for t, vb in members[b]:
            va = ats.get(t)
            if va is None:
                continue
            factor = spec.factor(tree.side[t])
            if vb in factor.adjacency[va] and (best is None or t < best):
                best = t
        if best is None:
            raise RuntimeError(
                f"contracted edge ({a}, {b}) has no factor-copy source")
        return best

    edges = len(ray) - 1
    if edges == 0:
        home = min(t for t, _ in members[ray[0]])
        return RayClass(kind="factor", copy=home, witness=ray,
                        cutoff={"tail_edges": 0, "ray_edges": 0,
                                "rule": "2*tail_edges >= ray_edges"})
    copy_seq = [edge_copy(ray[i], ray[i + 1]) for i in range(edges)]
    visited = [copy_seq[0]]
    last_change = 0
    for i in range(1, edges):
        if copy_seq[i] != copy_seq[i - 1]:
            visited.append(copy_seq[i])
            last_change = i
    tail = edges - last_change
    cutoff = {"tail_edges": tail, "ray_edges": edges,
              "rule": "2*tail_edges >= ray_edges"}
    if 2 * tail >= edges:
        return RayClass(kind="factor", copy=copy_seq[-1],
                        witness=ray[last_change:], cutoff=cutoff)
    return RayClass(kind="tree", tree_path=tuple(visited),
                    witness=tuple(visited), cutoff=cutoff)


# -- correspondence and scoring --------------------------------------------


def components_vs_ends(ball, k, t, *, at_radius=None):
    """Incidence comparison of end components against sphere clusters.

    Splits each cluster by the complement component its vertices sit in;
    the resulting piece count is compared against the number of ends.
    The two partitions of the sphere witness the same structure exactly
    when the piece count equals the end count.
    """
    rho = ball.radius if at_radius is None else at_radius
    if k >= rho:
        raise ValueError(f"k must stay below the profiled radius {rho}")
    ends = end_profile(ball, k)
    profile = boundary_profile(ball, t, at_radius=at_radius)
    comp_of = {}
    for idx, comp in enumerate(ends.components):
        for v in comp:
            comp_of[v] = idx
    pieces = set()
    for c_idx, cluster in enumerate(profile.clusters):
        for v in cluster:
            pieces.add((c_idx, comp_of.get(v, -1)))
    report = {
        "schema": "components_vs_ends/1",
        "k": k,
        "t": t,
        "at_radius": rho,
        "ends": ends.count,
        "clusters": profile.count,
        "coarse_clusters": len(pieces),
        "match": len(pieces) == ends.count,
    }
    return report


def disconnectedness_score(ball, *, at_radius=None):
    """Smallest threshold making every cluster a singleton, else None.

    None means the minimum cannot be certified: either no decided
    threshold is all-singleton, or undecided thresholds sit right below
    the first singleton one.
    """
    rho = ball.radius if at_radius is None else at_radius
    status = []
    for t in range(rho + 1):
        try:
            profile = boundary_profile(ball, t, at_radius=at_radius)
        except PartialResultError:
            status.append(None)
            continue
        status.append(profile.all_singletons)
    for t in range(rho + 1):
        if status[t]:
            if t == 0 or status[t - 1] is False:
                return t
            return None
    return None
