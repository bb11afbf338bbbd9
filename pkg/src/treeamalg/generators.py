"""Graph generators: Cayley balls, semiregular trees, grids, finite graphs.

Cayley balls are built by layered BFS over group elements. Element
identification uses bounded rewriting: every cyclic rotation of every relator
(and of its inverse) is split into non-length-increasing rules lhs -> rhs,
and two words are equal when eager free reduction plus these rules shrink
u * v^-1 to the empty word. For the shipped presentations (free groups, Z,
Z^2, the genus-2 surface group, free products of finite cyclic groups) this
search is a complete decision procedure. A relator-trace sweep over the
finished ball guards arbitrary presentations: if walking any relator from
any vertex fails to close up, generation fails loudly instead of returning a
wrong graph.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .ball import FiniteBall
from .errors import GenerationError, SchemaError

STATE_CAP = 200_000


# -- presentations -------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """Group presentation. Lowercase letters are generators, the matching
    uppercase letter is the inverse; involutions list generators equal to
    their own inverse."""

    generators: tuple[str, ...]
    relators: tuple[str, ...] = ()
    involutions: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for g in self.generators:
            if len(g) != 1 or not g.isalpha() or not g.islower():
                raise ValueError(f"generator {g!r} must be a single lowercase letter")
            if g in seen:
                raise ValueError(f"duplicate generator {g!r}")
            seen.add(g)
        for g in self.involutions:
            if g not in seen:
                raise ValueError(f"involution {g!r} is not a generator")
        for r in self.relators:
            for ch in r:
                if ch.lower() not in seen:
                    raise ValueError(f"relator {r!r} uses unknown letter {ch!r}")

    def to_dict(self):
        return {"generators": list(self.generators),
                "relators": list(self.relators),
                "involutions": list(self.involutions)}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "generators" not in d:
            raise SchemaError("presentation needs a generators list",
                              field="generators")
        try:
            return cls(tuple(d["generators"]),
                       tuple(d.get("relators", ())),
                       tuple(d.get("involutions", ())))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc


BUILTIN_PRESENTATIONS = {
    "z": Presentation(("a",)),
    "free2": Presentation(("a", "b")),
    "free3": Presentation(("a", "b", "c")),
    "z2": Presentation(("a", "b"), ("abAB",)),
    "surface2": Presentation(("a", "b", "c", "d"), ("abABcdCD",)),
}


def free_product_cyclic(orders):
    """Presentation of C_n1 * C_n2 * ... for the given cyclic orders."""
    orders = list(orders)
    if not orders or any(n < 2 for n in orders):
        raise ValueError("cyclic orders must all be >= 2")
    if len(orders) > 26:
        raise ValueError("too many factors")
    gens = tuple(chr(ord("a") + i) for i in range(len(orders)))
    relators = tuple(g * n for g, n in zip(gens, orders))
    return Presentation(gens, relators)


def builtin_presentation(name):
    if name in BUILTIN_PRESENTATIONS:
        return BUILTIN_PRESENTATIONS[name]
    if "*" in name:  # e.g. "c2*c3"
        parts = name.split("*")
        try:
            orders = [int(p.lstrip("c")) for p in parts]
        except ValueError:
            orders = None
        if orders and all(p.startswith("c") for p in parts):
            return free_product_cyclic(orders)
    raise ValueError(f"unknown builtin presentation {name!r}; "
                     f"known: {sorted(BUILTIN_PRESENTATIONS)} or cN*cM")


# -- word machinery ------------------------------------------------------


class _Words:
    """Word arithmetic and bounded equality search for one presentation."""

    def __init__(self, pres: Presentation, state_cap=STATE_CAP):
        self.pres = pres
        self.state_cap = state_cap
        self.inv = {}
        for g in pres.generators:
            if g in pres.involutions:
                self.inv[g] = g
                self.inv[g.upper()] = g
            else:
                self.inv[g] = g.upper()
                self.inv[g.upper()] = g
        # letters used to step to neighbors; involutions step once
        self.letters = []
        for g in pres.generators:
            self.letters.append(g)
            if g not in pres.involutions:
                self.letters.append(g.upper())
        self.relators = []
        for r in pres.relators:
            rn = self._cyclic_reduce(self.reduce(self.normalize(r)))
            if rn:
                self.relators.append(rn)
        for g in pres.involutions:
            if g * 2 not in self.relators:
                self.relators.append(g * 2)
        self.rules = self._make_rules()
        self.rules_by_first = {}
        for lhs, rhs in self.rules:
            self.rules_by_first.setdefault(lhs[0], []).append((lhs, rhs))
        self.max_relator = max((len(r) for r in self.relators), default=0)
        self._abelian_setup()
        self._eq_cache = {}

    def normalize(self, word):
        # inverse letters of involutions fold onto the generator itself
        return "".join(self.inv[self.inv[ch]] for ch in word)

    def reduce(self, word):
        out = []
        for ch in word:
            if out and out[-1] == self.inv[ch]:
                out.pop()
            else:
                out.append(ch)
        return "".join(out)

    def inverse(self, word):
        return "".join(self.inv[ch] for ch in reversed(word))

    def _cyclic_reduce(self, word):
        while len(word) >= 2 and word[0] == self.inv[word[-1]]:
            word = self.reduce(word[1:-1])
        return word

    def _make_rules(self):
        rules = set()
        for rel in self.relators:
            for base in (rel, self.inverse(rel)):
                m = len(base)
                for i in range(m):
                    rot = base[i:] + base[:i]
                    for k in range((m + 1) // 2, m + 1):
                        lhs, rest = rot[:k], rot[k:]
                        rhs = self.inverse(rest)
                        if lhs != rhs:
                            rules.add((lhs, rhs))
        return sorted(rules)

    def _abelian_setup(self):
        gens = self.pres.generators
        idx = {g: i for i, g in enumerate(gens)}
        mods = [0] * len(gens)  # 0 = unconstrained
        prunable = True
        for rel in self.relators:
            vec = [0] * len(gens)
            for ch in rel:
                if ch.islower():
                    vec[idx[ch]] += 1
                else:
                    vec[idx[ch.lower()]] -= 1
            nonzero = [i for i, x in enumerate(vec) if x]
            if not nonzero:
                continue
            if len(nonzero) == 1:
                i = nonzero[0]
                mods[i] = math.gcd(mods[i], abs(vec[i]))
            else:
                # mixed abelianization: exponent vectors are not a sound key
                prunable = False
        self._abelian_idx = idx
        self._abelian_mods = mods
        self._abelian_prunable = prunable

    def abelian_key(self, word):
        if not self._abelian_prunable:
            return ()
        vec = [0] * len(self.pres.generators)
        for ch in word:
            if ch.islower():
                vec[self._abelian_idx[ch]] += 1
            else:
                vec[self._abelian_idx[ch.lower()]] -= 1
        return tuple(x % m if m else x
                     for x, m in zip(vec, self._abelian_mods))

    def equal(self, u, v):
        """Bounded search for u == v in the group."""
        if u == v:
            return True
        key = (u, v) if u <= v else (v, u)
        hit = self._eq_cache.get(key)
        if hit is not None:
            return hit
        result = self._search_trivial(self.reduce(u + self.inverse(v)), (u, v))
        self._eq_cache[key] = result
        return result

    def _search_trivial(self, start, pair):
        if not start:
            return True
        if not self.rules:
            return False
        seen = {start}
        queue = deque([start])
        while queue:
            w = queue.popleft()
            n = len(w)
            for i in range(n):
                for lhs, rhs in self.rules_by_first.get(w[i], ()):
                    if w[i:i + len(lhs)] != lhs:
                        continue
                    y = self.reduce(w[:i] + rhs + w[i + len(lhs):])
                    if not y:
                        return True
                    if y not in seen:
                        if len(seen) >= self.state_cap:
                            raise GenerationError(
                                f"element identification inconclusive for "
                                f"words {pair[0]!r} and {pair[1]!r}: rewriting "
                                f"search exceeded {self.state_cap} states")
                        seen.add(y)
                        queue.append(y)
        return False


# -- generators ----------------------------------------------------------


def cayley_ball(pres, radius, *, state_cap=STATE_CAP):
    """Ball of the Cayley graph of `pres` around the identity.

    Vertices carry their (first-found, geodesic) word in labels. If the
    whole group fits inside the requested radius the ball is marked
    complete and the radius clamps to the group's diameter from 1.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    words = _Words(pres, state_cap=state_cap)
    reps = [""]
    by_word = {"": 0}
    buckets = {words.abelian_key(""): [0]}
    step = {}
    edges = set()
    layer = [0]

    def locate(w):
        vid = by_word.get(w)
        if vid is not None:
            return vid
        for cand in buckets.get(words.abelian_key(w), ()):
            if words.equal(w, reps[cand]):
                return cand
        return None

    def add_vertex(w):
        vid = len(reps)
        if vid >= state_cap:
            raise GenerationError(
                f"ball of {pres.generators} at radius {radius} exceeds "
                f"{state_cap} vertices; lower the radius or raise state_cap")
        reps.append(w)
        by_word[w] = vid
        buckets.setdefault(words.abelian_key(w), []).append(vid)
        return vid

    for d in range(1, radius + 1):
        nxt = []
        for u in layer:
            for letter in words.letters:
                w = words.reduce(reps[u] + letter)
                t = locate(w)
                if t is None:
                    if len(w) < d:
                        raise GenerationError(
                            f"identification failure: word {w!r} of length "
                            f"{len(w)} surfaced at depth {d}")
                    t = add_vertex(w)
                    nxt.append(t)
                step[(u, letter)] = t
                if t != u:
                    edges.add((min(u, t), max(u, t)))
        if not nxt:
            break
        layer = nxt

    # connect the last layer among itself; products leaving the ball are None
    complete = True
    for u in layer:
        for letter in words.letters:
            if (u, letter) in step:
                continue
            w = words.reduce(reps[u] + letter)
            t = locate(w)
            step[(u, letter)] = t
            if t is None:
                complete = False
            elif t != u:
                edges.add((min(u, t), max(u, t)))

    _trace_relators(words, reps, step)

    labels = [{"word": w} for w in reps]
    meta = {"generator": "cayley", "presentation": pres.to_dict(),
            "requested_radius": radius}
    return FiniteBall(len(reps), sorted(edges), 0, complete=complete,
                      labels=labels, meta=meta)


def _trace_relators(words, reps, step):
    for v in range(len(reps)):
        for rel in words.relators:
            cur = v
            for ch in rel:
                cur = step.get((cur, ch))
                if cur is None:
                    break
            if cur is not None and cur != v:
                raise GenerationError(
                    f"relator trace {rel!r} from word {reps[v]!r} closed at "
                    f"{reps[cur]!r} instead; identification incomplete for "
                    f"this presentation")


@dataclass(frozen=True)
class TreeSpec:
    """Degrees of the two sides of a semiregular tree plus truncation depth.

    p1/p2 may be math.inf; infinite degrees are capped at infinity_cap and
    the cap is recorded in the generated ball's meta.
    """

    p1: int | float
    p2: int | float
    depth: int
    infinity_cap: int = 3

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if p != math.inf and (not isinstance(p, int) or p < 1):
                raise ValueError(f"degree {p!r} must be a positive int or inf")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.infinity_cap < 1:
            raise ValueError("infinity_cap must be >= 1")

    def effective(self):
        p1 = self.infinity_cap if self.p1 == math.inf else self.p1
        p2 = self.infinity_cap if self.p2 == math.inf else self.p2
        return p1, p2

    def to_dict(self):
        enc = lambda p: "inf" if p == math.inf else p
        d = {"p1": enc(self.p1), "p2": enc(self.p2), "depth": self.depth}
        if self.p1 == math.inf or self.p2 == math.inf:
            d["infinity_cap"] = self.infinity_cap
        return d

    @classmethod
    def from_dict(cls, d):
        dec = lambda p: math.inf if p == "inf" else p
        try:
            return cls(dec(d["p1"]), dec(d["p2"]), d["depth"],
                       d.get("infinity_cap", 3))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad tree spec: {exc}") from exc
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc


def semiregular_tree(spec: TreeSpec):
    """Depth-truncated (p1, p2)-semiregular tree, basepoint on side 1."""
    p1, p2 = spec.effective()
    degree = {1: p1, 2: p2}
    side = [1]
    parent = [-1]
    edges = []
    layer = [0]
    for d in range(spec.depth):
        nxt = []
        for v in layer:
            n_children = degree[side[v]] - (0 if v == 0 else 1)
            for _ in range(n_children):
                c = len(side)
                side.append(3 - side[v])
                parent.append(v)
                edges.append((v, c))
                nxt.append(c)
        layer = nxt
    labels = [{"side": s} for s in side]
    meta = {"generator": "semiregular_tree", "tree": spec.to_dict()}
    return FiniteBall(len(side), edges, 0, labels=labels, meta=meta)


def grid_ball(radius):
    """l1 ball of the square lattice; 2r^2 + 2r + 1 vertices."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    points = sorted((x, y)
                    for x in range(-radius, radius + 1)
                    for y in range(-radius, radius + 1)
                    if abs(x) + abs(y) <= radius)
    index = {pt: i for i, pt in enumerate(points)}
    edges = []
    for (x, y), i in index.items():
        for nb in ((x + 1, y), (x, y + 1)):
            j = index.get(nb)
            if j is not None:
                edges.append((i, j))
    labels = [{"xy": list(pt)} for pt in points]
    meta = {"generator": "grid", "radius": radius}
    return FiniteBall(len(points), edges, index[(0, 0)], labels=labels, meta=meta)


def finite_graph(edges, basepoint, labels=None):
    """Wrap a whole finite connected graph as a complete ball: the radius is
    the basepoint's eccentricity and every pair is certified."""
    edges = [(int(u), int(v)) for u, v in edges]
    if not edges and basepoint != 0:
        raise ValueError("empty edge list only allows the single vertex 0")
    n = max((max(u, v) for u, v in edges), default=basepoint) + 1
    n = max(n, basepoint + 1)
    # connectivity check with component listing
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    comp = [-1] * n
    comps = []
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = len(comps)
        members = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if comp[y] < 0:
                    comp[y] = comp[s]
                    members.append(y)
                    queue.append(y)
        comps.append(sorted(members))
    if len(comps) > 1:
        raise ValueError(f"graph is disconnected; components: {comps}")
    meta = {"generator": "finite_graph"}
    return FiniteBall(n, edges, basepoint, complete=True, labels=labels,
                      meta=meta)


def cycle_graph(k, basepoint=0):
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return finite_graph([(i, (i + 1) % k) for i in range(k)], basepoint)


def complete_graph(k, basepoint=0):
    if k < 1:
        raise ValueError("complete graph needs at least 1 vertex")
    if k == 1:
        return finite_graph([], basepoint)
    return finite_graph([(i, j) for i in range(k) for j in range(i + 1, k)],
                        basepoint)


def resolve_factor(obj):
    """Build a FiniteBall from a JSON-style description.

    Accepted shapes: an inline graph {"edges": [...], "basepoint": 0}, a
    serialized ball {"schema": "ball/1", ...}, or a generator reference
    {"generator": "cayley"|"cycle"|"complete"|"grid"|"tree", ...}.
    """
    if not isinstance(obj, dict):
        raise SchemaError(f"factor description must be an object, got {obj!r}")
    if obj.get("schema") == "ball/1":
        return FiniteBall.from_dict(obj)
    if "edges" in obj:
        edges = [tuple(e) for e in obj["edges"]]
        return finite_graph(edges, obj.get("basepoint", 0))
    gen = obj.get("generator")
    if gen == "cayley":
        pres = obj.get("presentation")
        if isinstance(pres, str):
            pres = builtin_presentation(pres)
        elif isinstance(pres, dict):
            pres = Presentation.from_dict(pres)
        else:
            raise SchemaError("cayley factor needs a presentation name or "
                              "object", field="presentation")
        if "radius" not in obj:
            raise SchemaError("cayley factor needs a radius", field="radius")
        return cayley_ball(pres, int(obj["radius"]))
    if gen == "cycle":
        return cycle_graph(int(obj["k"]))
    if gen == "complete":
        return complete_graph(int(obj["k"]))
    if gen == "grid":
        return grid_ball(int(obj["radius"]))
    if gen == "tree":
        spec = TreeSpec(obj["p1"], obj["p2"], obj["depth"])
        return semiregular_tree(spec)
    raise SchemaError(f"unknown factor description: {obj!r}",
                      field="generator")
