"""Built-in triangulated aspherical manifolds with edge labels in their fundamental groups.

Each builder returns a ``RawManifold``: a simplicial set, a group model and
an assignment of a group element to every nondegenerate edge such that every
triangle ``(0,1,2)`` satisfies ``g(01) g(12) = g(02)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping

from .groups import FreeAbelian, GroupModel, KleinBottle, SurfaceGroup
from .simplicial import AbstractSimplicialComplex, FiniteSimplicialSet, from_abstract, identity, minimal_s1


@dataclass(frozen=True)
class RawManifold:
    name: str
    S: FiniteSimplicialSet
    group: GroupModel
    edge_map: Mapping
    dim: int
    orientable: bool = True


def torus_n(n: int) -> RawManifold:
    """One-vertex triangulation of the n-torus from the cube ``[0,1]^n``.

    k-simplices are chains ``0 < v1 < ... < vk`` in ``{0,1}^n``; ``d_0``
    subtracts ``v1`` and ``d_i`` deletes ``v_i``.
    """
    cube = [v for v in itertools.product((0, 1), repeat=n) if any(v)]

    def leq(u, v):
        return all(a <= b for a, b in zip(u, v)) and u != v

    chains: dict[int, list] = {0: [()]}
    for k in range(1, n + 1):
        nxt = []
        for c in chains[k - 1]:
            last = c[-1] if c else (0,) * n
            for v in cube:
                if leq(last, v):
                    nxt.append(c + (v,))
        chains[k] = sorted(nxt)
    faces = {}
    for k in range(1, n + 1):
        for c in chains[k]:
            v1 = c[0]
            d0 = tuple(tuple(a - b for a, b in zip(v, v1)) for v in c[1:])
            fs = [(identity(k - 1), d0)]
            for i in range(1, k + 1):
                fs.append((identity(k - 1), c[:i - 1] + c[i:]))
            faces[c] = tuple(fs)
    S = FiniteSimplicialSet({k: tuple(cs) for k, cs in chains.items()}, faces)
    edge_map = {(v,): tuple(v) for v in cube}
    return RawManifold(f"T{n}", S, FreeAbelian(n), edge_map, n)


def circle() -> RawManifold:
    return RawManifold("circle", minimal_s1(), FreeAbelian(1), {"e": (1,)}, 1)


def _square(second: str) -> tuple[FiniteSimplicialSet, dict]:
    """Square with diagonal c = ab; the second triangle has edges (b, a, c) or (c, a, b)."""
    if second == "torus":
        t2 = (((0, 1), "a"), ((0, 1), "c"), ((0, 1), "b"))      # (P0, P3, P2): b then a equals c
    else:
        t2 = (((0, 1), "a"), ((0, 1), "b"), ((0, 1), "c"))      # (P0, P2, P3): c then a equals b
    S = FiniteSimplicialSet(
        {0: ("v",), 1: ("a", "b", "c"), 2: ("T1", "T2")},
        {
            "a": (((0,), "v"), ((0,), "v")),
            "b": (((0,), "v"), ((0,), "v")),
            "c": (((0,), "v"), ((0,), "v")),
            "T1": (((0, 1), "b"), ((0, 1), "c"), ((0, 1), "a")),
            "T2": t2,
        },
    )
    return S, {}


def torus_square() -> RawManifold:
    S, _ = _square("torus")
    return RawManifold("torus", S, FreeAbelian(2), {"a": (1, 0), "b": (0, 1), "c": (1, 1)}, 2)


def klein_square() -> RawManifold:
    """Boundary word ``a b a b^-1``; the group is ``<a, b | a b a = b>``."""
    S, _ = _square("klein")
    K = KleinBottle()
    a, b = K.letter(0), K.letter(2)
    return RawManifold("klein", S, K, {"a": a, "b": b, "c": K.mul(a, b)}, 2, orientable=False)


def torus7() -> RawManifold:
    """The 7-vertex torus, a quotient of the triangular lattice by ``x + 3y = 0 mod 7``."""
    verts = tuple(range(7))
    facets = [tuple(sorted({i, (i + 1) % 7, (i + 3) % 7})) for i in range(7)]
    facets += [tuple(sorted({i, (i + 2) % 7, (i + 3) % 7})) for i in range(7)]
    S = from_abstract(AbstractSimplicialComplex.from_facets(verts, facets))

    def label(p):
        return (p[0] + 3 * p[1]) % 7

    lift = {v: (v, 0) for v in verts}
    steps = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
    edge_map = {}
    for e in S.nd(1):
        u, v = e
        for dx, dy in steps:
            q = (lift[u][0] + dx, lift[u][1] + dy)
            if label(q) == v:
                lx, ly = q[0] - lift[v][0], q[1] - lift[v][1]
                # coordinates in the lattice basis (7, 0), (-3, 1)
                edge_map[e] = ((lx + 3 * ly) // 7, ly)
                break
    return RawManifold("torus7", S, FreeAbelian(2), edge_map, 2)


def genus2() -> RawManifold:
    """Fan triangulation of the octagon ``a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1`` from one corner."""
    G = SurfaceGroup(2)
    w = [("a1", 1), ("b1", 1), ("a1", -1), ("b1", -1), ("a2", 1), ("b2", 1), ("a2", -1), ("b2", -1)]
    letter_of = {n: 2 * i for i, n in enumerate(G.gen_names)}

    def elem(prefix):
        return G.from_letters([letter_of[n] if e == 1 else letter_of[n] ^ 1 for n, e in prefix])

    # edges from P0 to P_k
    diag = {1: "a1", 7: "b2"}
    for k in range(2, 7):
        diag[k] = f"d{k}"
    edge_map = {n: G.letter(letter_of[n]) for n in G.gen_names}
    for k in range(2, 7):
        edge_map[f"d{k}"] = elem(w[:k])
    faces = {n: (((0,), "v"), ((0,), "v")) for n in edge_map}
    tris = []
    for k in range(1, 7):
        name, e = w[k]
        key = f"T{k}"
        if e == 1:      # vertices (P0, P_k, P_k+1)
            faces[key] = (((0, 1), name), ((0, 1), diag[k + 1]), ((0, 1), diag[k]))
        else:           # vertices (P0, P_k+1, P_k)
            faces[key] = (((0, 1), name), ((0, 1), diag[k]), ((0, 1), diag[k + 1]))
        tris.append(key)
    edges = tuple(G.gen_names) + tuple(f"d{k}" for k in range(2, 7))
    S = FiniteSimplicialSet({0: ("v",), 1: edges, 2: tuple(tris)}, faces)
    return RawManifold("genus2", S, G, edge_map, 2)


BUILTINS: dict[str, Callable[[], RawManifold]] = {
    "circle": circle,
    "torus": torus_square,
    "torus7": torus7,
    "t3": lambda: torus_n(3),
    "klein": klein_square,
    "genus2": genus2,
}


def builtin(name: str) -> RawManifold:
    if name.startswith("t") and name[1:].isdigit() and name not in BUILTINS:
        return torus_n(int(name[1:]))
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown built-in manifold {name!r}; choose from {sorted(BUILTINS)}") from None
