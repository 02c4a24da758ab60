"""Surface tilings to quivers with potential, tree contraction and integer weight homogeneity.

A tiling is given by its signed faces, each a cyclically ordered list of edge
names.  Edges become arrows and faces become potential terms; the edge list
of a face is read as a path, so a ``+`` face is traversed counterclockwise
and a ``-`` face clockwise.  Quiver vertices are the classes of arrow ends
glued by consecutive edges of the faces.

Only combinatorial checks are made (edge incidence, Euler characteristic);
nothing here certifies consistency of the tiling in any stronger sense.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Mapping

from .linalg import QQ, Feasible, Infeasible, check_certificate, integer_feasible
from .quiver import Arrow, Potential, Quiver

CHECK_LABEL = "combinatorially-checked"


class TilingError(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    sign: int
    edges: tuple[str, ...]


@dataclass(frozen=True)
class SurfaceTiling:
    genus: int
    faces: tuple[Face, ...]

    @classmethod
    def from_json(cls, data: Mapping) -> "SurfaceTiling":
        try:
            faces = []
            for f in data["faces"]:
                sign = {"+": 1, "-": -1}[str(f["sign"])]
                faces.append(Face(sign, tuple(str(e) for e in f["edges"])))
            t = cls(int(data["genus"]), tuple(faces))
        except (KeyError, TypeError, ValueError) as exc:
            raise TilingError(f"malformed tiling JSON: {exc!r}") from exc
        t.validate()
        return t

    def to_json(self) -> dict:
        return {"genus": self.genus,
                "faces": [{"sign": "+" if f.sign > 0 else "-", "edges": list(f.edges)} for f in self.faces]}

    @property
    def edges(self) -> list[str]:
        seen: dict[str, None] = {}
        for f in self.faces:
            for e in f.edges:
                seen.setdefault(e)
        return list(seen)

    def incidence(self) -> dict[str, tuple[int, int]]:
        """Edge -> (index of its + face, index of its - face)."""
        pos: dict[str, list[int]] = {}
        neg: dict[str, list[int]] = {}
        for i, f in enumerate(self.faces):
            for e in f.edges:
                (pos if f.sign > 0 else neg).setdefault(e, []).append(i)
        out = {}
        for e in self.edges:
            p, n = pos.get(e, []), neg.get(e, [])
            if len(p) != 1 or len(n) != 1:
                raise TilingError(f"edge {e!r} lies on {len(p)} positive and {len(n)} negative faces; "
                                  "each edge needs exactly one of each")
            out[e] = (p[0], n[0])
        return out

    def vertex_classes(self) -> dict[tuple[str, str], int]:
        """Union-find over arrow ends; keys are ``(edge, "src" | "dst")``."""
        parent: dict = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            find((e, "src"))
            find((e, "dst"))
        for f in self.faces:
            k = len(f.edges)
            for j in range(k):
                a, b = find((f.edges[j], "dst")), find((f.edges[(j + 1) % k], "src"))
                if a != b:
                    parent[max(a, b)] = min(a, b)
        roots = sorted({find(x) for x in parent})
        label = {r: i for i, r in enumerate(roots)}
        return {x: label[find(x)] for x in parent}

    def euler_characteristic(self) -> int:
        V = len(set(self.vertex_classes().values()))
        return V - len(self.edges) + len(self.faces)

    def validate(self) -> None:
        if len(self.faces) < 2:
            raise TilingError("a tiling needs at least one positive and one negative face")
        if any(not f.edges for f in self.faces):
            raise TilingError("empty face")
        self.incidence()
        chi = self.euler_characteristic()
        if chi != 2 - 2 * self.genus:
            raise TilingError(f"Euler characteristic {chi} does not match genus {self.genus} "
                              f"(expected {2 - 2 * self.genus})")


@dataclass(frozen=True)
class QuiverWithPotential:
    quiver: Quiver
    potential: Potential
    label: str = CHECK_LABEL

    def to_json(self) -> dict:
        return {"quiver": self.quiver.to_json(), "potential": self.potential.to_json(), "status": self.label}


def tiling_to_qp(t: SurfaceTiling) -> QuiverWithPotential:
    t.validate()
    cls = t.vertex_classes()
    names = [f"v{i}" for i in range(len(set(cls.values())))]
    arrows = tuple(Arrow(e, names[cls[(e, "src")]], names[cls[(e, "dst")]], False) for e in t.edges)
    Q = Quiver(tuple(names), arrows)
    W = Potential([(f.sign, tuple((e, 1) for e in f.edges)) for f in t.faces], QQ, Q)
    return QuiverWithPotential(Q, W)


def maximal_tree_arrows(Q: Quiver) -> list[str]:
    """Arrows of a BFS spanning tree of the underlying undirected graph."""
    if not Q.vertices:
        return []
    seen = {Q.vertices[0]}
    tree = []
    frontier = [Q.vertices[0]]
    while frontier:
        nxt = []
        for v in frontier:
            for a in Q.arrows:
                for u, w in ((a.src, a.dst), (a.dst, a.src)):
                    if u == v and w not in seen:
                        seen.add(w)
                        tree.append(a.name)
                        nxt.append(w)
        frontier = nxt
    if len(seen) != len(Q.vertices):
        raise TilingError("quiver is disconnected; no maximal tree spans it")
    return tree


def contract_tree_qp(qp: QuiverWithPotential) -> QuiverWithPotential:
    Q = qp.quiver
    tree = set(maximal_tree_arrows(Q))
    if not tree:
        return qp
    v = Q.vertices[0]
    arrows = tuple(Arrow(a.name, v, v, a.invertible) for a in Q.arrows if a.name not in tree)
    Q2 = Quiver((v,), arrows)
    terms = [(c, tuple(l for l in cw.rep if l[0] not in tree)) for cw, c in qp.potential.terms.items()]
    return QuiverWithPotential(Q2, Potential([(c, w) for c, w in terms if w], qp.potential.field, Q2), qp.label)


def localize(qp: QuiverWithPotential) -> QuiverWithPotential:
    return QuiverWithPotential(qp.quiver.localized(), qp.potential, qp.label)


@dataclass(frozen=True)
class WeightResult:
    unknowns: tuple[str, ...]
    equations: tuple[tuple[dict, int], ...]
    result: Feasible | Infeasible
    verified: bool

    @property
    def feasible(self) -> bool:
        return isinstance(self.result, Feasible)

    def to_json(self) -> dict:
        out = {"unknowns": list(self.unknowns), "verified": self.verified, "status": CHECK_LABEL,
               "equations": [{"coeffs": {k: v for k, v in sorted(c.items())}, "rhs": r}
                             for c, r in self.equations]}
        if isinstance(self.result, Feasible):
            out["verdict"] = "Feasible"
            out["witness"] = {u: self.result.witness[u] for u in self.unknowns}
        else:
            r = self.result
            out["verdict"] = "Infeasible"
            out["certificate"] = {"kind": r.kind, "multipliers": [str(Fraction(y)) for y in r.multipliers],
                                  "variable": r.variable, "value": None if r.value is None else str(r.value)}
        return out


def weight_equations(qp: QuiverWithPotential) -> tuple[list[str], list[tuple[dict, int]]]:
    """One equation per potential term: the arrow weights of the word sum to 1."""
    if qp.potential.is_zero():
        raise TilingError("empty potential")
    unknowns = list(qp.quiver.arrow_names)
    eqs = []
    for cw, _ in qp.potential.sorted_terms():
        coeffs: dict[str, int] = {}
        for name, e in cw.rep:
            coeffs[name] = coeffs.get(name, 0) + e
        eqs.append(({k: v for k, v in coeffs.items() if v}, 1))
    return unknowns, eqs


def weight_assignment(qp: QuiverWithPotential) -> WeightResult:
    unknowns, eqs = weight_equations(qp)
    res = integer_feasible(eqs, unknowns)
    return WeightResult(tuple(unknowns), tuple(eqs), res, check_certificate(eqs, unknowns, res))


def genus2_tiling() -> SurfaceTiling:
    data = json.loads(resources.files("cywork.data").joinpath("genus2_tiling.json").read_text())
    return SurfaceTiling.from_json(data)


def hexagonal_torus() -> SurfaceTiling:
    return SurfaceTiling(1, (Face(1, ("x", "y", "z")), Face(-1, ("x", "z", "y"))))


def genus2_modified_qp() -> QuiverWithPotential:
    """Drop ``f`` and the term ``fi`` and replace ``cef`` by ``cei``."""
    Q = Quiver.one_vertex("abcdeghi")
    W = Potential.parse("adg - gia - bdh + behc - cei")
    return QuiverWithPotential(Q, Potential(W.terms, QQ, Q))
