"""Hyperbolicity constants on certified balls.

Two separate quantities, never conflated: delta_thin is the thin-triangle
constant (the smallest d such that on every checked triangle, every vertex
of one side is within d of the union of the other two sides, over every
choice of geodesic sides), and delta_four_point is the four-point constant
(half of largest pair-sum minus middle pair-sum, maximized over vertex
quadruples), a cheaper proxy that bounds hyperbolicity up to a
graph-independent factor.

All values are returned as doubled integers (suffix _x2) so arithmetic
stays exact; half_str renders them. Quantification always runs over
certified tuples only: every pair of vertices involved must have a
certified distance, so truncation can shrink the checked set but never
bias a reported value. Distances are those of the built ball; on
certified tuples they agree with the untruncated graph.

Triangles are enumerated as (side pair {x, y}, apex z) with repeats
allowed: the degenerate apex z = x covers two-sided triangles (bigons),
which the thin-triangle definition constrains as well.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, CertificationError
from .generators import (TreeSpec, builtin_presentation, cayley_ball,
                         grid_ball, semiregular_tree)

THIN_EXHAUSTIVE_CAP = 60
_NEG = -(10 ** 6)


def half_str(x2):
    """Render a doubled integer: 4 -> "2", 3 -> "3/2"."""
    return str(x2 // 2) if x2 % 2 == 0 else f"{x2}/2"


@dataclass(frozen=True)
class DeltaReport:
    """One hyperbolicity measurement with its full provenance."""

    delta_thin_x2: int
    delta4_x2: int
    method: str
    triples_checked: int
    certified_fraction: float
    seed: int = None
    params: dict = None

    def to_dict(self):
        return {
            "schema": "delta_report/1",
            "delta_thin": None if self.delta_thin_x2 is None
            else half_str(self.delta_thin_x2),
            "delta_thin_x2": self.delta_thin_x2,
            "delta4": half_str(self.delta4_x2),
            "delta4_x2": self.delta4_x2,
            "method": self.method,
            "triples_checked": self.triples_checked,
            "certified_fraction": round(self.certified_fraction, 6),
            "seed": self.seed,
            "params": self.params or {},
        }


# -- gromov products -------------------------------------------------------


def gromov_product_x2(ball, x, y, basepoint=None):
    """Doubled product: d(o,x) + d(o,y) - d(x,y), all three certified."""
    o = ball.basepoint if basepoint is None else basepoint
    bad = [(a, b) for a, b in ((o, x), (o, y), (x, y))
           if not ball.certified_distance(a, b).certified]
    if bad:
        raise CertificationError(
            f"gromov product needs certified distances; missing {bad}",
            pairs=bad)
    return ball.distance(o, x) + ball.distance(o, y) - ball.distance(x, y)


# -- four-point constant ---------------------------------------------------


def _delta4(ball):
    """(doubled four-point constant, number of anchored pairs checked).

    Sweeps every anchor w: with doubled products M2[x,y] at w, the defect
    max_z min(M2[x,z], M2[y,z]) - M2[x,y] equals (one pairing sum of the
    quadruple w,x,y,z) minus the larger of the other two, so the maximum
    over anchors and pairs is exactly the brute-force quadruple maximum.
    Uncertified pairs enter nowhere: they are masked out of M2 and of the
    defect, which restricts the sweep to fully certified quadruples.
    """
    dist, cert = ball.pairwise
    n = ball.n
    best = 0
    checked = 0
    for w in range(n):
        idx = np.nonzero(cert[w])[0]
        if idx.size == 0:
            continue
        sub_d = dist[np.ix_(idx, idx)].astype(np.int32)
        sub_c = cert[np.ix_(idx, idx)]
        dw = dist[w, idx].astype(np.int32)
        m2 = dw[:, None] + dw[None, :] - sub_d
        m2m = np.where(sub_c, m2, _NEG).astype(np.int32)
        checked += int(sub_c.sum())
        k = idx.size
        chunk = max(1, (1 << 22) // (k * k))
        for s in range(0, k, chunk):
            t2 = np.minimum(m2m[s:s + chunk, None, :],
                            m2m[None, :, :]).max(axis=2)
            defect = np.where(sub_c[s:s + chunk], t2 - m2[s:s + chunk], _NEG)
            best = max(best, int(defect.max()))
    return max(best, 0), checked


def delta_four_point_x2(ball):
    """Doubled four-point constant over certified quadruples."""
    return _delta4(ball)[0]


# -- thin-triangle constant ------------------------------------------------


def _maxmin_to(ball, z, dist):
    """H[v, u] = max over geodesics from u to z of min_{w on path} d(v, w).

    Processing vertices by increasing distance to z walks the shortest
    path dag once; columns are filled for all v simultaneously.
    """
    n = ball.n
    dz = dist[z]
    h = np.full((n, n), _NEG, dtype=np.int32)
    h[:, z] = dist[:, z]
    for u in sorted(range(n), key=lambda u: dz[u]):
        if u == z:
            continue
        succ = [s for s in ball.adjacency[u] if dz[s] == dz[u] - 1]
        if succ:
            h[:, u] = np.minimum(dist[:, u], h[:, succ].max(axis=1))
    return h


def _maxmin_rows(ball, z, dist, rows):
    """The rows of _maxmin_to(z) for the given v indices only."""
    n = ball.n
    dz = dist[z]
    rows = np.asarray(rows, dtype=np.intp)
    h = np.full((rows.size, n), _NEG, dtype=np.int32)
    h[:, z] = dist[rows, z]
    for u in sorted(range(n), key=lambda u: dz[u]):
        if u == z:
            continue
        succ = [s for s in ball.adjacency[u] if dz[s] == dz[u] - 1]
        if succ:
            h[:, u] = np.minimum(dist[rows, u], h[:, succ].max(axis=1))
    return h


def _certified_side_pairs(cert, n):
    return [(x, y) for x in range(n) for y in range(x, n) if cert[x, y]]


def _interval(dist, x, y):
    return np.nonzero(dist[x] + dist[y] == dist[x, y])[0]


def _thin_tree(ball, dist, cert):
    """Tree fast path: geodesics are unique and the distance from v to
    the path between a and b is half the doubled product (a|b)_v."""
    best = 0
    checked = 0
    for x, y in _certified_side_pairs(cert, ball.n):
        path = _interval(dist, x, y)
        apexes = np.nonzero(cert[x] & cert[y])[0]
        checked += int(apexes.size)
        dvx = dist[path, x].astype(np.int32)[:, None]
        dvy = dist[path, y].astype(np.int32)[:, None]
        dvz = dist[np.ix_(path, apexes)].astype(np.int32)
        px2 = dvx + dvz - dist[x, apexes][None, :]
        py2 = dvy + dvz - dist[y, apexes][None, :]
        best = max(best, int(np.minimum(px2, py2).max()))
    return best, checked


def _thin_exhaustive(ball, dist, cert):
    n = ball.n
    pairs = _certified_side_pairs(cert, n)
    intervals = {pair: _interval(dist, *pair) for pair in pairs}
    best = 0
    checked = 0
    for z in range(n):
        h = _maxmin_to(ball, z, dist)
        cz = cert[z]
        for x, y in pairs:
            if not (cz[x] and cz[y]):
                continue
            checked += 1
            iv = intervals[(x, y)]
            val = int(np.minimum(h[iv, x], h[iv, y]).max())
            best = max(best, val)
    return 2 * best, checked


def _thin_triple(ball, dist, x, y, z):
    """Exact thin value of one triangle, all three side roles."""
    val = 0
    for a, b, c in ((x, y, z), (x, z, y), (y, z, x)):
        iv = _interval(dist, a, b)
        h = _maxmin_rows(ball, c, dist, iv)
        val = max(val, int(np.minimum(h[np.arange(iv.size), a],
                                      h[np.arange(iv.size), b]).max()))
    return 2 * val


def delta_thin(ball, mode="exhaustive", *, cap=THIN_EXHAUSTIVE_CAP, seed=0):
    """Thin-triangle constant over certified triangles.

    mode "exhaustive" checks every certified (side pair, apex) combination
    and every geodesic choice; it needs n <= cap unless the ball is a
    tree, where unique geodesics admit a closed form at any size. mode
    "sampled:N" draws triangles uniformly at random (seeded) and reports
    the maximum seen, a lower bound on the exhaustive value.
    """
    dist, cert = ball.pairwise
    n = ball.n
    total = n * n * (n + 1) // 2
    report_seed = None
    if mode == "exhaustive":
        if ball.is_tree:
            thin_x2, checked = _thin_tree(ball, dist, cert)
        elif n > cap:
            raise CapacityError(
                f"exhaustive thin-triangle check on {n} vertices exceeds "
                f"cap {cap}; raise cap or use sampled:N", count=n, cap=cap)
        else:
            thin_x2, checked = _thin_exhaustive(ball, dist, cert)
        fraction = checked / total
    elif mode.startswith("sampled:"):
        count = int(mode.split(":", 1)[1])
        if count < 1:
            raise ValueError("sample count must be positive")
        rng = random.Random(seed)
        report_seed = seed
        thin_x2 = 0
        checked = 0
        attempts = 0
        limit = 50 * count
        while checked < count and attempts < limit:
            attempts += 1
            x, y, z = (rng.randrange(n) for _ in range(3))
            if not (cert[x, y] and cert[x, z] and cert[y, z]):
                continue
            checked += 1
            thin_x2 = max(thin_x2, _thin_triple(ball, dist, x, y, z))
        if checked == 0:
            raise CertificationError(
                "no certified triangle found while sampling")
        fraction = checked / attempts
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if checked == 0:
        raise CertificationError("no certified triangle to check")
    delta4_x2, _ = _delta4(ball)
    return DeltaReport(delta_thin_x2=thin_x2, delta4_x2=delta4_x2,
                       method=mode, triples_checked=checked,
                       certified_fraction=fraction, seed=report_seed)


# -- growth series ---------------------------------------------------------


def ball_for(gen, radius):
    """Generator dispatch for growth series and the CLI.

    "grid", "tree-P1-P2", "amalgam:NAME" (contracted amalgam of the
    builtin spec NAME at tree depth `radius`), or any builtin
    presentation name.
    """
    if gen == "grid":
        return grid_ball(radius)
    if gen.startswith("tree-"):
        _, p1, p2 = gen.split("-")
        return semiregular_tree(TreeSpec(int(p1), int(p2), radius))
    if gen.startswith("amalgam:"):
        from .amalgam import build, builtin_spec
        return build(builtin_spec(gen.split(":", 1)[1], radius)).contracted
    return cayley_ball(builtin_presentation(gen), radius)


def delta_growth(gen, radii):
    """Four-point constant of `gen` at each radius (or tree depth)."""
    if list(radii) != sorted(radii):
        raise ValueError("radii must be increasing")
    reports = []
    for r in radii:
        ball = ball_for(gen, r)
        delta4_x2, checked = _delta4(ball)
        n = ball.n
        reports.append(DeltaReport(
            delta_thin_x2=None, delta4_x2=delta4_x2, method="exhaustive",
            triples_checked=checked,
            certified_fraction=checked / (n * n * n),
            params={"generator": gen, "radius": r, "n": n,
                    "cert_radius": ball.cert_radius}))
    return reports
