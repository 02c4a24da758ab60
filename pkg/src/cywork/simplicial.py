"""Finite simplicial sets in Eilenberg-Zilber normal form.

An n-simplex is a pair ``(eta, x)``: ``x`` is the key of a nondegenerate
m-simplex and ``eta`` is a monotone surjection ``[n] -> [m]`` written as the
tuple ``(eta(0), ..., eta(n))``.  Nondegenerate simplices have ``eta`` equal
to the identity.  For every nondegenerate simplex of positive dimension the
set stores its faces ``d_0 .. d_n`` in this form; everything else (faces of
degenerate simplices, degeneracies) is derived.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .linalg import QQ, BoundedChainComplex, Field, SparseMatrix, betti_numbers

Key = Hashable
Eta = tuple[int, ...]
Simplex = tuple[Eta, Key]


class SimplicialError(ValueError):
    pass


def identity(n: int) -> Eta:
    return tuple(range(n + 1))


def is_identity(eta: Eta) -> bool:
    return all(v == i for i, v in enumerate(eta))


def _is_surjective(eta: Eta) -> bool:
    return eta[0] == 0 and all(b - a in (0, 1) for a, b in zip(eta, eta[1:]))


@dataclass(frozen=True)
class FiniteSimplicialSet:
    """``simplices[n]`` lists nondegenerate n-simplex keys; ``faces[x]`` their faces."""

    simplices: Mapping[int, tuple[Key, ...]]
    faces: Mapping[Key, tuple[Simplex, ...]]

    def __post_init__(self):
        seen = set()
        for n, keys in self.simplices.items():
            for k in keys:
                if k in seen:
                    raise SimplicialError(f"duplicate simplex key {k!r}")
                seen.add(k)
                if n > 0 and (k not in self.faces or len(self.faces[k]) != n + 1):
                    raise SimplicialError(f"simplex {k!r} needs {n + 1} faces")

    @property
    def dim(self) -> int:
        return max((n for n, ks in self.simplices.items() if ks), default=-1)

    def nd(self, n: int) -> tuple[Key, ...]:
        return tuple(self.simplices.get(n, ()))

    def count(self, n: int) -> int:
        return len(self.simplices.get(n, ()))

    def dim_of(self, key: Key) -> int:
        for n, ks in self.simplices.items():
            if key in ks:
                return n
        raise KeyError(key)

    def all_keys(self) -> list[Key]:
        return [k for n in sorted(self.simplices) for k in self.simplices[n]]

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * len(ks) for n, ks in self.simplices.items())

    # simplicial operators on arbitrary simplices
    def face(self, s: Simplex, i: int) -> Simplex:
        eta, x = s
        new = eta[:i] + eta[i + 1:]
        if not new:
            raise SimplicialError("0-simplices have no faces")
        if new[0] == 0 and new[-1] == eta[-1] and _is_surjective(new):
            return new, x
        v = eta[i]
        zeta, y = self.faces[x][v]
        lowered = tuple(e - 1 if e > v else e for e in new)
        return tuple(zeta[e] for e in lowered), y

    def degeneracy(self, s: Simplex, j: int) -> Simplex:
        eta, x = s
        return eta[:j + 1] + eta[j:], x

    def total_count(self, n: int) -> int:
        """Number of all n-simplices (degenerate included)."""
        from math import comb
        return sum(comb(n, m) * len(ks) for m, ks in self.simplices.items() if m <= n)

    def edge(self, s: Simplex, i: int, j: int) -> Simplex:
        """The 1-simplex of ``s`` spanned by its vertices ``i < j``."""
        n = len(s[0]) - 1
        cur = s
        for k in range(n, -1, -1):
            if k not in (i, j):
                cur = self.face(cur, k)
        return cur

    def check_identities(self) -> None:
        """Verify ``d_i d_j = d_{j-1} d_i`` for ``i < j`` on every nondegenerate simplex."""
        for n in range(2, self.dim + 1):
            for x in self.nd(n):
                s = (identity(n), x)
                for j in range(n + 1):
                    for i in range(j):
                        a = self.face(self.face(s, j), i)
                        b = self.face(self.face(s, i), j - 1)
                        if a != b:
                            raise SimplicialError(f"simplicial identity fails on {x!r} (i={i}, j={j})")

    # chains
    def chain_complex(self, field: Field = QQ) -> BoundedChainComplex:
        """Normalized chain complex; degenerate faces are dropped."""
        top = max(self.dim, 0)
        index = {n: {k: i for i, k in enumerate(self.nd(n))} for n in range(top + 1)}
        dims = {n: len(index[n]) for n in range(top + 1)}
        diffs = {}
        for n in range(1, top + 1):
            entries = {}
            for col, x in enumerate(self.nd(n)):
                for i, (eta, y) in enumerate(self.faces[x]):
                    if is_identity(eta):
                        r = index[n - 1][y]
                        entries[(r, col)] = entries.get((r, col), 0) + (-1) ** i
            diffs[n] = SparseMatrix.from_entries(dims[n - 1], dims[n], entries, field)
        return BoundedChainComplex(dims, diffs, field)

    def index(self, n: int) -> dict[Key, int]:
        return {k: i for i, k in enumerate(self.nd(n))}

    # JSON
    def to_json(self) -> dict:
        names = {}
        for k in self.all_keys():
            names[k] = k if isinstance(k, str) else repr(k)
        return {
            "simplices": {str(n): [names[k] for k in ks] for n, ks in sorted(self.simplices.items())},
            "faces": {names[k]: [[list(eta), names[y]] for eta, y in fs] for k, fs in self.faces.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteSimplicialSet":
        try:
            simplices = {int(n): tuple(str(k) for k in ks) for n, ks in data["simplices"].items()}
            faces = {str(k): tuple((tuple(int(v) for v in eta), str(y)) for eta, y in fs)
                     for k, fs in data.get("faces", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise SimplicialError(f"malformed simplicial set JSON: {exc}") from exc
        if not any(simplices.values()):
            raise SimplicialError("simplicial set has no simplices")
        S = cls(simplices, faces)
        _validate_face_targets(S)
        S.check_identities()
        return S


def _validate_face_targets(S: FiniteSimplicialSet) -> None:
    for n in range(1, S.dim + 1):
        for x in S.nd(n):
            for eta, y in S.faces[x]:
                if len(eta) != n or not _is_surjective(eta):
                    raise SimplicialError(f"face of {x!r} has bad degeneracy word {eta}")
                m = eta[-1]
                if y not in S.nd(m):
                    raise SimplicialError(f"face of {x!r} points to unknown {m}-simplex {y!r}")


# ---------------------------------------------------------------- constructions


@dataclass(frozen=True)
class AbstractSimplicialComplex:
    vertices: tuple
    faces: frozenset

    @classmethod
    def from_facets(cls, vertices: Sequence, facets: Iterable[Iterable]) -> "AbstractSimplicialComplex":
        faces = set()
        for f in facets:
            f = tuple(f)
            for r in range(1, len(f) + 1):
                faces.update(frozenset(c) for c in itertools.combinations(f, r))
        faces.update(frozenset([v]) for v in vertices)
        return cls(tuple(vertices), frozenset(faces))

    @classmethod
    def from_json(cls, data: Mapping) -> "AbstractSimplicialComplex":
        try:
            verts = tuple(data["vertices"])
            faces = frozenset(frozenset(f) for f in data["faces"])
        except (KeyError, TypeError) as exc:
            raise SimplicialError(f"malformed complex JSON: {exc}") from exc
        if data.get("close", False):
            return cls.from_facets(verts, faces)
        return cls(verts, faces | frozenset(frozenset([v]) for v in verts))


def from_abstract(K: AbstractSimplicialComplex) -> FiniteSimplicialSet:
    order = {v: i for i, v in enumerate(K.vertices)}
    if len(order) != len(K.vertices):
        raise SimplicialError("duplicate vertices")
    for f in K.faces:
        if not f:
            raise SimplicialError("empty face")
        for v in f:
            if v not in order:
                raise SimplicialError(f"face uses undeclared vertex {v!r}")
        if len(f) > 1:
            for v in f:
                if f - {v} not in K.faces:
                    raise SimplicialError(f"face set is not closed under subsets: {sorted(f, key=order.get)}")
    for v in K.vertices:
        if frozenset([v]) not in K.faces:
            raise SimplicialError(f"missing singleton {v!r}")
    simplices: dict[int, list] = {}
    for f in sorted(K.faces, key=lambda f: (len(f), sorted(order[v] for v in f))):
        key = tuple(sorted(f, key=order.get))
        simplices.setdefault(len(f) - 1, []).append(key)
    faces = {}
    for n, keys in simplices.items():
        if n == 0:
            continue
        for key in keys:
            faces[key] = tuple((identity(n - 1), key[:i] + key[i + 1:]) for i in range(n + 1))
    return FiniteSimplicialSet({n: tuple(ks) for n, ks in simplices.items()}, faces)


def simplex(n: int) -> FiniteSimplicialSet:
    return from_abstract(AbstractSimplicialComplex.from_facets(tuple(range(n + 1)), [tuple(range(n + 1))]))


def point() -> FiniteSimplicialSet:
    return FiniteSimplicialSet({0: ("*",)}, {})


def minimal_s1() -> FiniteSimplicialSet:
    """One vertex ``v`` and one edge ``e`` from ``v`` to ``v``."""
    return FiniteSimplicialSet({0: ("v",), 1: ("e",)}, {"e": (((0,), "v"), ((0,), "v"))})


def _surjections(n: int, m: int):
    """Monotone surjections ``[n] -> [m]``."""
    for jumps in itertools.combinations(range(n), m):
        eta, v = [0], 0
        js = set(jumps)
        for j in range(n):
            if j in js:
                v += 1
            eta.append(v)
        yield tuple(eta)


def _normalize_pair(a: Simplex, b: Simplex) -> Simplex:
    """Write a product simplex as (common degeneracy, nondegenerate pair)."""
    (e1, x), (e2, y) = a, b
    n = len(e1) - 1
    common = [j for j in range(n) if e1[j] == e1[j + 1] and e2[j] == e2[j + 1]]
    sigma, v = [0], 0
    cs = set(common)
    for j in range(n):
        if j not in cs:
            v += 1
        sigma.append(v)
    keep = [0] + [j + 1 for j in range(n) if j not in cs]
    f1 = tuple(e1[j] for j in keep)
    f2 = tuple(e2[j] for j in keep)
    return tuple(sigma), (f1, x, f2, y)


def product(S: FiniteSimplicialSet, T: FiniteSimplicialSet) -> FiniteSimplicialSet:
    """Cartesian product; nondegenerate simplices are indexed by shuffles."""
    simplices: dict[int, list] = {}
    faces = {}
    for p in range(S.dim + 1):
        for q in range(T.dim + 1):
            for n in range(max(p, q), p + q + 1):
                for e1 in _surjections(n, p):
                    for e2 in _surjections(n, q):
                        if any(e1[j] == e1[j + 1] and e2[j] == e2[j + 1] for j in range(n)):
                            continue
                        for x in S.nd(p):
                            for y in T.nd(q):
                                simplices.setdefault(n, []).append((e1, x, e2, y))
    for n, keys in simplices.items():
        if n == 0:
            continue
        for key in keys:
            e1, x, e2, y = key
            fs = []
            for i in range(n + 1):
                fa = S.face((e1, x), i)
                fb = T.face((e2, y), i)
                fs.append(_normalize_pair(fa, fb))
            faces[key] = tuple(fs)
    return FiniteSimplicialSet({n: tuple(ks) for n, ks in sorted(simplices.items())}, faces)


def is_face_closed(S: FiniteSimplicialSet, U: Iterable[Key]) -> bool:
    U = set(U)
    for x in U:
        for _, y in S.faces.get(x, ()):
            if y not in U:
                return False
    return True


def contract(S: FiniteSimplicialSet, U: Iterable[Key]) -> FiniteSimplicialSet:
    """Pushout of ``S <- U -> point`` for a face-closed subset ``U``.

    The new point is keyed ``("pt",)``.
    """
    return contract_family(S, [U])


def contract_family(S: FiniteSimplicialSet, family: Sequence[Iterable[Key]]) -> FiniteSimplicialSet:
    """Collapse each member of a disjoint family of face-closed subsets to its own point.

    Points are keyed ``("pt", i)`` in family order (``("pt",)`` for a single subset).
    """
    family = [set(u) for u in family]
    if not family or any(not u for u in family):
        raise SimplicialError("cannot contract an empty subset")
    owner: dict[Key, int] = {}
    for i, u in enumerate(family):
        for k in u:
            S.dim_of(k)
            if k in owner:
                raise SimplicialError("subsets in a contraction family must be disjoint")
            owner[k] = i
        if not is_face_closed(S, u):
            raise SimplicialError("contracted subset must be closed under faces")
    pts = [("pt", i) if len(family) > 1 else ("pt",) for i in range(len(family))]
    simplices: dict[int, list] = {0: list(pts)}
    faces = {}
    for n in range(S.dim + 1):
        for x in S.nd(n):
            if x in owner:
                continue
            simplices.setdefault(n, []).append(x)
            if n:
                fs = []
                for eta, y in S.faces[x]:
                    if y in owner:
                        fs.append(((0,) * n, pts[owner[y]]))
                    else:
                        fs.append((eta, y))
                faces[x] = tuple(fs)
    return FiniteSimplicialSet({n: tuple(ks) for n, ks in sorted(simplices.items())}, faces)


def homology(S: FiniteSimplicialSet, field: Field = QQ) -> tuple[int, ...]:
    b = betti_numbers(S.chain_complex(field))
    return tuple(b[n] for n in sorted(b))


def compact_cohomology(S: FiniteSimplicialSet, field: Field = QQ) -> tuple[int, ...]:
    """For a finite simplicial set this is the cohomology of the dual complex."""
    b = betti_numbers(S.chain_complex(field).dual())
    return tuple(b[-n] for n in range(0, S.dim + 1))


def one_skeleton(S: FiniteSimplicialSet) -> list[tuple[Key, Key, Key]]:
    """Edges as ``(key, source, target)`` with source ``d_1`` and target ``d_0``."""
    out = []
    for e in S.nd(1):
        (_, t), (_, s) = S.faces[e]
        out.append((e, s, t))
    return out


def maximal_tree(S: FiniteSimplicialSet) -> frozenset:
    """Vertices plus a BFS spanning tree of the 1-skeleton."""
    verts = S.nd(0)
    if not verts:
        raise SimplicialError("empty simplicial set")
    adj: dict[Key, list] = {v: [] for v in verts}
    for e, s, t in one_skeleton(S):
        if s != t:
            adj[s].append((e, t))
            adj[t].append((e, s))
    seen = {verts[0]}
    tree = {verts[0]}
    queue = deque([verts[0]])
    while queue:
        v = queue.popleft()
        for e, w in adj[v]:
            if w not in seen:
                seen.add(w)
                tree.update((e, w))
                queue.append(w)
    if len(seen) != len(verts):
        raise SimplicialError("simplicial set is disconnected")
    return frozenset(tree)


# ---------------------------------------------------------------- random examples


def random_complex(rng: random.Random, nverts: int = 6, nfacets: int = 5, maxdim: int = 3
                   ) -> AbstractSimplicialComplex:
    verts = tuple(range(nverts))
    facets = []
    for _ in range(nfacets):
        k = rng.randint(1, min(maxdim + 1, nverts))
        facets.append(tuple(sorted(rng.sample(verts, k))))
    return AbstractSimplicialComplex.from_facets(verts, facets)


def contractible_subsets(K: AbstractSimplicialComplex, rng: random.Random, count: int = 2) -> list[frozenset]:
    """Disjoint closed simplices (cones, hence contractible), as key sets of ``from_abstract(K)``."""
    order = {v: i for i, v in enumerate(K.vertices)}
    faces = sorted(K.faces, key=lambda f: (-len(f), sorted(order[v] for v in f)))
    rng.shuffle(faces)
    used: set = set()
    out = []
    for f in faces:
        if used & f:
            continue
        keys = frozenset(tuple(sorted(c, key=order.get))
                         for r in range(1, len(f) + 1) for c in itertools.combinations(f, r))
        out.append(keys)
        used |= f
        if len(out) == count:
            break
    return out
