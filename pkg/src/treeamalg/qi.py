"""Quasi-isometry fitting and the bundle-level metric checks.

qi_constants fits the minimal constants (gamma, c) such that every used
vertex pair (u, v) satisfies

    d(u, v) / gamma - c  <=  d'(f(u), f(v))  <=  gamma * d(u, v) + c

and the image is c-dense in the codomain. Minimization is lexicographic
(gamma first, then c) over exact rationals, recorded in every report.
Since c absorbs any defect, gamma = 1 is always admissible and wins the
lexicographic order; c then has the closed form

    c = max(0, codensity, max(d - d'), max(d' - d)).

Used pairs are the pairs certified in the domain; their images must be
certified in the codomain, otherwise the pair cannot be measured
honestly and the fit refuses. Distances are those of the given balls.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CertificationError, PreconditionError

__all__ = ["QIFit", "qi_constants", "is_quasi_geodesic",
           "check_geodesic_preservation", "check_plus_vs_contracted"]


def _frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x}"


@dataclass(frozen=True)
class QIFit:
    """Fitted constants with the constraints that bind them."""

    gamma: Fraction
    c: Fraction
    codensity: int
    witnesses: dict
    objective: str = "lexicographic (gamma, c)"
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": "qi_fit/1",
            "gamma": _frac_str(self.gamma),
            "c": _frac_str(self.c),
            "codensity": self.codensity,
            "witnesses": self.witnesses,
            "objective": self.objective,
            "meta": self.meta,
        }


def _as_map(vertex_map, n):
    if isinstance(vertex_map, dict):
        missing = [u for u in range(n) if u not in vertex_map]
        if missing:
            raise ValueError(f"map is not total: missing {missing[:5]}")
        return [vertex_map[u] for u in range(n)]
    out = list(vertex_map)
    if len(out) != n:
        raise ValueError(f"map covers {len(out)} of {n} domain vertices")
    return out


def _codensity(cod, image):
    # multi-source BFS from the image set
    dist = [-1] * cod.n
    queue = deque()
    for v in sorted(image):
        if dist[v] < 0:
            dist[v] = 0
            queue.append(v)
    while queue:
        u = queue.popleft()
        for w in cod.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    worst = max(range(cod.n), key=lambda v: dist[v])
    return dist[worst], worst


def qi_constants(vertex_map, dom, cod):
    """Lexicographically minimal (gamma, c) for the map on certified pairs.

    Raises a certification error when a certified domain pair has an
    uncertified image pair (nothing can be asserted about it), or when
    no pair is usable at all.
    """
    if dom.n == 0:
        raise ValueError("empty domain")
    f = _as_map(vertex_map, dom.n)
    for u, img in enumerate(f):
        if not 0 <= img < cod.n:
            raise ValueError(f"image {img} of {u} outside codomain")
    d_dom, c_dom = dom.pairwise
    d_cod, c_cod = cod.pairwise
    blocked = []
    used = 0
    max_shrink = None
    max_stretch = None
    for u in range(dom.n):
        for v in range(u + 1, dom.n):
            if not c_dom[u, v]:
                continue
            fu, fv = f[u], f[v]
            if not c_cod[fu, fv]:
                blocked.append((u, v))
                continue
            used += 1
            d = int(d_dom[u, v])
            d_image = int(d_cod[fu, fv])
            if max_shrink is None or d - d_image > max_shrink[0]:
                max_shrink = (d - d_image, (u, v))
            if max_stretch is None or d_image - d > max_stretch[0]:
                max_stretch = (d_image - d, (u, v))
    if blocked:
        raise CertificationError(
            f"{len(blocked)} certified domain pairs have uncertified "
            f"images, e.g. {blocked[:5]}", pairs=blocked)
    if used == 0 and dom.n > 1:
        raise CertificationError("no certified pair to fit against")
    codensity, worst = _codensity(cod, set(f))
    lower = max(0, max_shrink[0]) if max_shrink else 0
    upper = max(0, max_stretch[0]) if max_stretch else 0
    c = Fraction(max(codensity, lower, upper))
    witnesses = {
        "lower": list(max_shrink[1]) if max_shrink and
        max_shrink[0] == c else None,
        "upper": list(max_stretch[1]) if max_stretch and
        max_stretch[0] == c else None,
        "codensity": worst if codensity == c else None,
    }
    return QIFit(gamma=Fraction(1), c=c, codensity=codensity,
                 witnesses=witnesses, meta={"used_pairs": used})


def is_quasi_geodesic(ball, path, gamma, c):
    """Parameter-interval quasi-geodesic test on a certified walk."""
    gamma = Fraction(gamma)
    c = Fraction(c)
    if gamma < 1 or c < 0:
        raise ValueError("need gamma >= 1 and c >= 0")
    path = list(path)
    if not path:
        raise ValueError("empty path")
    for a, b in zip(path, path[1:]):
        if b not in ball.adjacency[a]:
            raise ValueError(f"({a}, {b}) is not an edge; path must walk")
    bad = [(path[i], path[j])
           for i in range(len(path)) for j in range(i + 1, len(path))
           if not ball.certified_distance(path[i], path[j]).certified]
    if bad:
        raise CertificationError(
            f"path has uncertified vertex pairs, e.g. {bad[:5]}", pairs=bad)
    for i in range(len(path)):
        for j in range(i + 1, len(path)):
            d = ball.distance(path[i], path[j])
            span = j - i
            if d > gamma * span + c or d < span / gamma - c:
                return False
    return True


def _require_adhesion_one(spec):
    sets = [s for side in (1, 2) for s in spec.adhesion(side)]
    if any(len(s) != 1 for s in sets):
        raise PreconditionError("check requires adhesion sets of size 1")


def check_geodesic_preservation(bundle):
    """Within-copy geodesics re-checked in the contracted amalgam.

    For every copy and every factor-certified pair in it, every factor
    geodesic is mapped through the contraction and tested as a geodesic
    there, provided the image endpoints are certified (skipped pairs are
    beyond the window, not evidence either way). Returns violating
    (copy, pair, image path) triples; the expectation is none.
    """
    if bundle.contracted is None:
        raise PreconditionError("bundle is not contracted; call contract()")
    _require_adhesion_one(bundle.spec)
    contracted = bundle.contracted
    psi = bundle.contraction_map
    violations = []
    for t in range(bundle.tree.n_nodes):
        factor = bundle.spec.factor(bundle.tree.side[t])
        offset = bundle.copy_offset(t)
        _, cert = factor.pairwise
        for a in range(factor.n):
            for b in range(a + 1, factor.n):
                if not cert[a, b]:
                    continue
                qa = psi[offset + a]
                qb = psi[offset + b]
                if not contracted.certified_distance(qa, qb).certified:
                    continue
                for path in factor.all_geodesics(a, b):
                    image = tuple(psi[offset + v] for v in path)
                    if not contracted.is_geodesic(image):
                        violations.append((t, (a, b), image))
    return violations


def check_plus_vs_contracted(bundle):
    """Fit of the contraction map, read against identification sizes."""
    if bundle.contracted is None:
        raise PreconditionError("bundle is not contracted; call contract()")
    from .amalgam import adhesion_metrics
    metrics = adhesion_metrics(bundle)
    fit = qi_constants(bundle.contraction_map, bundle.plus_graph,
                       bundle.contracted)
    meta = dict(fit.meta)
    meta["max_identification_size"] = metrics["max_identification_size"]
    meta["max_adhesion_diameter"] = metrics["max_adhesion_diameter"]
    return QIFit(gamma=fit.gamma, c=fit.c, codensity=fit.codensity,
                 witnesses=fit.witnesses, objective=fit.objective,
                 meta=meta)
