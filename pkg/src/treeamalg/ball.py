"""Finite basepointed balls with certified distances.

A FiniteBall is a connected finite graph with a basepoint and a radius, read
as a truncation of a (possibly infinite) locally finite graph: every vertex
lies within `radius` steps of the basepoint, and the frontier collects the
vertices at distance exactly `radius`. Within-ball distances are exact for
the truncation but only upper bounds for the untruncated graph.
certified_distance reports when the two provably agree: a pair (u, v) with
within-ball distance L is certified when

    L <= (cert_radius - d(o,u)) + (cert_radius - d(o,v)) + 1

because any path through a vertex missing from the truncation must first
walk out past depth cert_radius and back, costing at least one more step
than the right-hand side. cert_radius equals radius for generator-produced
balls (they contain every vertex of the underlying graph up to that depth);
amalgamation truncations carry a smaller certification window. Balls with
complete=True are whole finite graphs, so every pair is certified.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, CertificationError, SchemaError

# a path is a vertex sequence; consecutive entries must be adjacent
Path = tuple[int, ...]

GEODESIC_CAP = 10_000


@dataclass(frozen=True)
class CertifiedDistance:
    value: int
    certified: bool


class FiniteBall:
    """Immutable truncated ball. Do not mutate fields after construction."""

    def __init__(self, n, edges, basepoint, *, cert_radius=None, complete=False,
                 labels=None, meta=None):
        if n <= 0:
            raise ValueError("ball must have at least one vertex")
        if not (0 <= basepoint < n):
            raise ValueError(f"basepoint {basepoint} out of range")
        adj = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError(f"loop edge at vertex {u}")
            if v in adj[u]:
                raise ValueError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.adjacency = tuple(tuple(sorted(s)) for s in adj)
        self.basepoint = basepoint
        self._dist_cache: dict[int, list[int]] = {}
        depth = self.distances_from(basepoint)
        if min(depth) < 0:
            missing = [v for v in range(n) if depth[v] < 0]
            raise ValueError(f"vertices unreachable from basepoint: {missing[:20]}")
        self.depth = depth
        self.radius = max(depth)
        if cert_radius is None:
            cert_radius = self.radius
        if not (0 <= cert_radius <= self.radius):
            raise ValueError(f"cert_radius {cert_radius} outside [0, {self.radius}]")
        self.cert_radius = self.radius if complete else cert_radius
        self.complete = bool(complete)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("labels must align with vertex ids")
        self.labels = labels
        self.meta = dict(meta) if meta else {}
        self.frontier = frozenset(v for v in range(n) if depth[v] == self.radius)

    # -- basic queries ---------------------------------------------------

    def _check_vertex(self, v):
        if not (0 <= v < self.n):
            raise ValueError(f"unknown vertex id {v}")

    def neighbors(self, v):
        self._check_vertex(v)
        return self.adjacency[v]

    @cached_property
    def edge_count(self):
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def edges(self):
        return tuple((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @cached_property
    def is_tree(self):
        return self.edge_count == self.n - 1

    def distances_from(self, v):
        """BFS distances from v; -1 marks unreachable (construction only)."""
        if not (0 <= v < self.n):
            raise ValueError(f"unknown vertex id {v}")
        cached = self._dist_cache.get(v)
        if cached is not None:
            return cached
        dist = [-1] * self.n
        dist[v] = 0
        queue = deque([v])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            for y in self.adjacency[x]:
                if dist[y] < 0:
                    dist[y] = dx + 1
                    queue.append(y)
        self._dist_cache[v] = dist
        return dist

    def distance(self, u, v):
        return self.distances_from(u)[v]

    def _certified(self, u, v, value):
        if self.complete:
            return True
        slack = (self.cert_radius - self.depth[u]) + (self.cert_radius - self.depth[v]) + 1
        return value <= slack

    def certified_distance(self, u, v):
        self._check_vertex(u)
        self._check_vertex(v)
        value = self.distance(u, v)
        return CertifiedDistance(value, self._certified(u, v, value))

    @cached_property
    def pairwise(self):
        """(D, C): int distance matrix and boolean certification mask."""
        D = np.empty((self.n, self.n), dtype=np.int32)
        for v in range(self.n):
            D[v] = self.distances_from(v)
        if self.complete:
            C = np.ones((self.n, self.n), dtype=bool)
        else:
            slack = self.cert_radius - np.asarray(self.depth, dtype=np.int32)
            C = D <= slack[:, None] + slack[None, :] + 1
        return D, C

    def sphere(self, k):
        if not (0 <= k <= self.radius):
            raise ValueError(f"sphere radius {k} outside [0, {self.radius}]")
        return [v for v in range(self.n) if self.depth[v] == k]

    # -- geodesics -------------------------------------------------------

    def _require_certified(self, u, v):
        cd = self.certified_distance(u, v)
        if not cd.certified:
            raise CertificationError(
                f"pair ({u}, {v}) is not certified (within-ball distance "
                f"{cd.value} may shrink in the untruncated graph)",
                pairs=[(u, v)])
        return cd.value

    def geodesic_count(self, u, v):
        """Number of shortest u-v paths, exact (no cap)."""
        length = self.distance(u, v)
        du = self.distances_from(u)
        dv = self.distances_from(v)
        layer = sorted((x for x in range(self.n) if du[x] + dv[x] == length),
                       key=lambda x: du[x])
        count = {u: 1}
        for x in layer:
            if x == u:
                continue
            count[x] = sum(count[y] for y in self.adjacency[x]
                           if du[y] == du[x] - 1 and du[y] + dv[y] == length)
        return count[v]

    def all_geodesics(self, u, v, cap=GEODESIC_CAP):
        """Every shortest u-v path, in lexicographic vertex order.

        The pair must be certified, so the returned paths are geodesics of
        the untruncated graph as well. Raises CapacityError if more than
        `cap` paths exist.
        """
        self._check_vertex(u)
        self._check_vertex(v)
        length = self._require_certified(u, v)
        total = self.geodesic_count(u, v)
        if total > cap:
            raise CapacityError(
                f"{total} geodesics between {u} and {v} exceed cap {cap}",
                count=total, cap=cap)
        du = self.distances_from(u)
        dv = self.distances_from(v)
        out = []
        stack = [(u, (u,))]
        while stack:
            x, path = stack.pop()
            if x == v:
                out.append(path)
                continue
            succs = [y for y in self.adjacency[x]
                     if du[y] == du[x] + 1 and du[y] + dv[y] == length]
            for y in reversed(succs):
                stack.append((y, path + (y,)))
        out.sort()
        return out

    def is_geodesic(self, p):
        """True iff p is a path whose length equals the certified distance
        of its endpoints."""
        p = tuple(p)
        if not p:
            raise ValueError("empty path")
        for v in p:
            self._check_vertex(v)
        length = self._require_certified(p[0], p[-1])
        for a, b in zip(p, p[1:]):
            if b not in self.adjacency[a]:
                return False
        return len(p) - 1 == length

    # -- truncation ------------------------------------------------------

    def restricted(self, new_radius):
        """The sub-ball of radius new_radius, with dense relabeled ids.

        Only honest restrictions are allowed: new_radius must not exceed
        cert_radius unless the ball is complete, since beyond the certified
        window the restriction would not be a full ball of the untruncated
        graph. Returns (ball, old_ids) where old_ids[new_id] = old id.
        """
        if not (0 <= new_radius <= self.radius):
            raise ValueError(f"radius {new_radius} outside [0, {self.radius}]")
        if new_radius > self.cert_radius and not self.complete:
            raise ValueError(
                f"cannot restrict to radius {new_radius}: certification window "
                f"ends at {self.cert_radius}")
        keep = [v for v in range(self.n) if self.depth[v] <= new_radius]
        old_of_new = list(keep)
        new_of_old = {old: i for i, old in enumerate(keep)}
        edges = [(new_of_old[u], new_of_old[v]) for u, v in self.edges
                 if u in new_of_old and v in new_of_old]
        labels = None
        if self.labels is not None:
            labels = [self.labels[v] for v in keep]
        complete = self.complete and new_radius >= self.radius
        meta = dict(self.meta)
        if new_radius < self.radius:
            meta["restricted_from"] = self.radius
        return FiniteBall(len(keep), edges, new_of_old[self.basepoint],
                          complete=complete, labels=labels, meta=meta), old_of_new

    # -- serialization ---------------------------------------------------

    def to_dict(self):
        d = {
            "schema": "ball/1",
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "basepoint": self.basepoint,
            "radius": self.radius,
            "frontier": sorted(self.frontier),
            "cert_radius": self.cert_radius,
            "complete": self.complete,
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or d.get("schema") != "ball/1":
            raise SchemaError("expected a ball/1 document", field="schema")
        for field in ("n", "edges", "basepoint", "radius", "frontier"):
            if field not in d:
                raise SchemaError("missing required field", field=field)
        try:
            ball = cls(d["n"], d["edges"], d["basepoint"],
                       cert_radius=d.get("cert_radius"),
                       complete=d.get("complete", False),
                       labels=d.get("labels"),
                       meta=d.get("meta"))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        if ball.radius != d["radius"]:
            raise SchemaError(
                f"declared radius {d['radius']} != computed {ball.radius}",
                field="radius")
        if ball.frontier != frozenset(d["frontier"]):
            raise SchemaError("declared frontier does not match computed set",
                              field="frontier")
        return ball

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dot(self):
        """GraphViz source; frontier vertices are drawn filled with double
        borders so truncation edges are visible at a glance."""
        lines = ["graph ball {", "  node [shape=circle];"]
        for v in range(self.n):
            attrs = []
            if v == self.basepoint:
                attrs.append("shape=square")
            if v in self.frontier:
                attrs.append("peripheries=2")
                attrs.append("style=filled")
                attrs.append("fillcolor=lightgray")
            suffix = f" [{', '.join(attrs)}]" if attrs else ""
            lines.append(f"  {v}{suffix};")
        for u, v in self.edges:
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return (f"FiniteBall(n={self.n}, radius={self.radius}, "
                f"basepoint={self.basepoint}, cert_radius={self.cert_radius}, "
                f"complete={self.complete})")
