"""Conjugacy-class graded Hochschild and cyclic homology of fundamental group algebras.

Two chain models are used.

* The Gamma model: a one-vertex triangulation ``S`` with edge labels gives a
  free bimodule resolution with one generator per nondegenerate simplex.
  After tensoring with ``A = k[G]`` a basis element is ``(s, h)``; it lies in
  the class of ``h * gamma(s)`` where ``gamma(s)`` is the label of the long
  edge ``0 -> dim s``.  We index basis elements by ``(s, x)`` with
  ``x = h * gamma(s)`` an element of the class, so the differential reads

      d(s, x) = sum_{i<t} (-1)^i (d_i s, x) + (-1)^t (d_t s, z x z^-1),

  with ``z = zeta_{t-1}(s)`` the label of the last edge ``t-1 -> t``.

* The normalized cyclic bar complex of ``k[G]``, restricted to one class and
  filtered by total word length ``|g_0| + ... + |g_n| <= R``.  Both ``b`` and
  ``B`` preserve this filtration, so every truncation is itself a mixed
  complex and the Connes sequence of the truncation is exact.
"""

from __future__ import annotations

import itertools
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .groups import (CentralUnitReport, FreeAbelian, GroupModel, KleinBottle, SurfaceGroup,
                     central_unit_search, conjugacy_class_in_ball)
from .linalg import (QQ, BoundedChainComplex, CycleReducer, Echelon, Field, SparseMatrix, homology, rank)
from .manifolds import RawManifold
from .simplicial import FiniteSimplicialSet, contract, identity, is_identity, maximal_tree, one_skeleton


class NotOrientableError(ValueError):
    code = "NOT_ORIENTABLE"


class RelatorError(ValueError):
    pass


class TruncationError(ValueError):
    pass


def _exact_flag(exact: bool, R: int) -> str:
    return "EXACT" if exact else f"TRUNCATED({R})"


# ---------------------------------------------------------------- models


@dataclass
class TriangulatedManifoldModel:
    name: str
    S: FiniteSimplicialSet
    group: GroupModel
    edge_map: Mapping
    dim: int
    field: Field
    orientation: dict

    def __post_init__(self):
        self._zeta: dict = {}
        self._gamma: dict = {}
        for n in range(1, self.dim + 1):
            for s in self.S.nd(n):
                simp = (identity(n), s)
                self._zeta[s] = tuple(self.edge_element(self.S.edge(simp, i, i + 1)) for i in range(n))
                self._gamma[s] = self.edge_element(self.S.edge(simp, 0, n))
        for v in self.S.nd(0):
            self._gamma[v] = self.group.identity()

    def edge_element(self, edge) -> object:
        eta, key = edge
        if not is_identity(eta):
            return self.group.identity()
        return self.edge_map[key]

    def zeta(self, s, i: int):
        return self._zeta[s][i]

    def gamma(self, s):
        return self._gamma[s]


def build_model(raw: RawManifold | tuple, field: Field = QQ) -> TriangulatedManifoldModel:
    """Contract a maximal tree, gauge the edge labels, check relators, find the orientation."""
    if isinstance(raw, RawManifold):
        name, S_raw, G, emap, dim = raw.name, raw.S, raw.group, dict(raw.edge_map), raw.dim
    else:
        S_raw, G, emap = raw[:3]
        name, dim = "input", S_raw.dim
        emap = dict(emap)
    for e in S_raw.nd(1):
        if e not in emap:
            raise RelatorError(f"edge {e!r} has no group label")
    edges = one_skeleton(S_raw)
    if S_raw.count(0) > 1:
        tree = maximal_tree(S_raw)
        root = S_raw.nd(0)[0]
        phi = {root: G.identity()}
        tree_edges = [(e, s, t) for e, s, t in edges if e in tree]
        while len(phi) < S_raw.count(0):
            for e, s, t in tree_edges:
                if s in phi and t not in phi:
                    phi[t] = G.mul(phi[s], emap[e])
                elif t in phi and s not in phi:
                    phi[s] = G.mul(phi[t], G.inv(emap[e]))
        gauged = {e: G.mul(G.mul(phi[s], emap[e]), G.inv(phi[t])) for e, s, t in edges}
        for e in tree:
            if e in gauged and gauged[e] != G.identity():
                raise RelatorError("gauge fixing failed on a tree edge")
        S = contract(S_raw, tree)
        emap = {e: g for e, g in gauged.items() if e not in tree}
    else:
        S = S_raw
    model = TriangulatedManifoldModel(name, S, G, emap, dim, field, {})
    for t in S.nd(2):
        simp = (identity(2), t)
        g01 = model.edge_element(S.edge(simp, 0, 1))
        g12 = model.edge_element(S.edge(simp, 1, 2))
        g02 = model.edge_element(S.edge(simp, 0, 2))
        if G.mul(g01, g12) != g02:
            raise RelatorError(f"relator check fails on 2-simplex {t!r}")
    H = homology(S.chain_complex(field), representatives=True)
    top = H.get(dim)
    if top is None or top.betti != 1:
        raise NotOrientableError(
            f"NOT_ORIENTABLE: top homology of {name} over {field.label} has rank "
            f"{0 if top is None else top.betti}; non-orientable manifolds carry a fundamental "
            f"class only in characteristic 2")
    rep = top.representatives[0]
    keys = S.nd(dim)
    lead = rep[min(rep)]
    scale = field.inv(lead)
    model.orientation = {keys[i]: field.mul(field(v), scale) for i, v in sorted(rep.items())}
    return model


# ---------------------------------------------------------------- Gamma model per class


@dataclass
class PerClassChainComplex:
    class_label: str
    basis: dict[int, list[tuple]]
    complex: BoundedChainComplex
    flag: str
    model: TriangulatedManifoldModel = dc_field(repr=False)

    @property
    def betti(self) -> tuple[int, ...]:
        h = homology(self.complex)
        return tuple(h[n].betti for n in sorted(h))

    def h_of(self, s, x):
        """The coefficient ``h`` of the basis element ``(s, x)``."""
        G = self.model.group
        return G.mul(x, G.inv(self.model.gamma(s)))

    def to_json(self) -> dict:
        return {"class": self.class_label, "flag": self.flag, "betti": list(self.betti),
                "dims": [len(self.basis.get(n, ())) for n in range(self.model.dim + 1)]}


def _gamma_terms(model: TriangulatedManifoldModel, s, t: int, x, conj):
    """Boundary terms ``(sign, face key, class element)``; ``None`` marks an escaped element."""
    out = []
    for i, (eta, y) in enumerate(model.S.faces[s]):
        if not is_identity(eta):
            continue
        if i < t:
            out.append(((-1) ** i, y, x))
        else:
            out.append(((-1) ** t, y, conj(x, model.zeta(s, t - 1))))
    return out


def _class_members(G: GroupModel, c, R: int):
    if G.is_abelian or c == G.identity():
        return (c,), True
    ex = conjugacy_class_in_ball(G, c, R)
    return ex.elements, ex.closed


def _conjugator(G: GroupModel, R: int):
    if isinstance(G, SurfaceGroup):
        def conj(x, z):
            if not z:
                return x
            return G.conjugate_lookup(x, z, R)
    else:
        def conj(x, z):
            return G.conjugate(x, z)
    return conj


def hochschild_component(model: TriangulatedManifoldModel, c, R: int = 4) -> PerClassChainComplex:
    G, F, S = model.group, model.field, model.S
    orbit, closed = _class_members(G, c, R)
    exact = closed
    conj = _conjugator(G, R)
    orbit_set = set(orbit)
    basis: dict[int, list] = {}
    index: dict[int, dict] = {}
    diffs = {}
    for t in range(model.dim + 1):
        keep = []
        cols = []
        for s in S.nd(t):
            for x in orbit:
                if t == 0:
                    keep.append((s, x))
                    cols.append([])
                    continue
                terms = _gamma_terms(model, s, t, x, conj)
                ok = all(xx is not None and (xx in orbit_set) and (y, xx) in index[t - 1] for _, y, xx in terms)
                if not ok:
                    if exact:
                        raise TruncationError("class orbit is not closed under the differential")
                    continue
                keep.append((s, x))
                cols.append(terms)
        basis[t] = keep
        index[t] = {k: i for i, k in enumerate(keep)}
        if t:
            entries = {}
            for j, terms in enumerate(cols):
                for sign, y, xx in terms:
                    r = index[t - 1][(y, xx)]
                    entries[(r, j)] = entries.get((r, j), 0) + sign
            diffs[t] = SparseMatrix.from_entries(len(basis[t - 1]), len(keep), entries, F)
    cx = BoundedChainComplex({t: len(basis[t]) for t in basis}, diffs, F)
    return PerClassChainComplex(G.label(c), basis, cx, _exact_flag(exact, R), model)


def stabilization(model: TriangulatedManifoldModel, c, R: int) -> dict:
    """Betti numbers at ``R - 1`` and ``R``; stable when they agree (a heuristic, not a proof)."""
    cur = hochschild_component(model, c, R)
    if cur.flag == "EXACT" or R <= model.group.length(c):
        return {"stable": cur.flag == "EXACT", "betti_previous": None}
    prev = hochschild_component(model, c, R - 1)
    return {"stable": prev.betti == cur.betti, "betti_previous": list(prev.betti)}


def class_representatives(G: GroupModel, R: int) -> list:
    """One element per conjugacy class met in ``ball(R)``, in normal-form order."""
    if G.is_abelian:
        return sorted(G.ball(R), key=G.order_key)
    seen, reps = set(), []
    for g in sorted(G.ball(R), key=G.order_key):
        if g in seen:
            continue
        reps.append(g)
        seen.update(conjugacy_class_in_ball(G, g, R).elements)
    return reps


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("WORKBENCH_THREADS", "1")))
    except ValueError:
        return 1


def all_components(model: TriangulatedManifoldModel, R: int) -> list[PerClassChainComplex]:
    """Components for every class met in ``ball(R)``, merged in normal-form order."""
    reps = class_representatives(model.group, R)
    workers = thread_cap()
    # the surface-group ball grows lazily and is not safe to share
    if workers > 1 and not isinstance(model.group, SurfaceGroup):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: hochschild_component(model, c, R), reps))
    return [hochschild_component(model, c, R) for c in reps]


def identity_component(model: TriangulatedManifoldModel) -> PerClassChainComplex:
    return hochschild_component(model, model.group.identity(), 0)


@dataclass(frozen=True)
class FundamentalClass:
    chain: dict
    degree: int
    is_cycle: bool
    generates_top: bool

    @property
    def ok(self) -> bool:
        return self.is_cycle and self.generates_top


class SignConventionError(RuntimeError):
    pass


def fundamental_class(model: TriangulatedManifoldModel) -> FundamentalClass:
    comp = identity_component(model)
    d = model.dim
    e = model.group.identity()
    chain = {(s, e): c for s, c in model.orientation.items()}
    idx = {k: i for i, k in enumerate(comp.basis[d])}
    vec = {idx[k]: v for k, v in chain.items()}
    img = comp.complex.d(d).apply(vec)
    is_cycle = not img
    if not is_cycle:
        raise SignConventionError("orientation chain is not a cycle in the identity component")
    top = homology(comp.complex)[d].betti
    # no (d+1)-chains, so a nonzero cycle generates when the top rank is 1
    gen = top == 1 and bool(vec)
    return FundamentalClass(chain, d, is_cycle, gen)


def bp_pushforward(model: TriangulatedManifoldModel, chain: Mapping) -> dict:
    """``(s, x) -> s`` on chains of a class component."""
    F = model.field
    out: dict = {}
    for (s, _), c in chain.items():
        out[s] = F.add(out.get(s, F.zero), F(c))
    return {k: v for k, v in out.items() if v != 0}


# ---------------------------------------------------------------- bar model


def _sequences(G: GroupModel, n: int, budget: int, ball_by_len: list[list]):
    """Tuples of ``n`` non-identity elements and their total weight, at most ``budget``."""
    if n == 0:
        yield (), 0
        return
    for rest, w in _sequences(G, n - 1, budget - 1, ball_by_len):
        for L in range(1, budget - w + 1):
            for g in ball_by_len[L] if L < len(ball_by_len) else ():
                yield rest + (g,), w + L


@dataclass
class MixedComplexSlice:
    """Per-class normalized cyclic bar chains of weight at most ``radius``, degrees ``0..top``."""

    group: GroupModel
    class_label: str
    radius: int
    top: int
    field: Field
    basis: dict[int, list[tuple]]
    b: dict[int, SparseMatrix]
    B: dict[int, SparseMatrix]
    class_closed: bool

    @property
    def flag(self) -> str:
        # chains are always cut by weight; EXACT would claim more than we know
        return f"TRUNCATED({self.radius})"

    def dim(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    def b_mat(self, n: int) -> SparseMatrix:
        m = self.b.get(n)
        return m if m is not None else SparseMatrix.zero(self.dim(n - 1), self.dim(n), self.field)

    def B_mat(self, n: int) -> SparseMatrix:
        m = self.B.get(n)
        return m if m is not None else SparseMatrix.zero(self.dim(n + 1), self.dim(n), self.field)

    def hochschild(self) -> BoundedChainComplex:
        dims = {n: self.dim(n) for n in range(self.top + 1)}
        return BoundedChainComplex(dims, {n: self.b_mat(n) for n in range(1, self.top + 1)}, self.field)

    def offsets(self, n: int) -> dict[int, int]:
        """Start of column ``p`` (the ``C_{n-2p}`` summand) inside ``Tot_n``."""
        o, off = 0, {}
        for p in range(n // 2 + 1):
            off[p] = o
            o += self.dim(n - 2 * p)
        return off

    def tot_dim(self, n: int) -> int:
        return sum(self.dim(n - 2 * p) for p in range(n // 2 + 1))

    def total(self, upto: int) -> BoundedChainComplex:
        """(b, B) total complex in degrees ``0..upto`` (needs ``upto <= top``)."""
        if upto > self.top:
            raise TruncationError("total complex needs chains up to its top degree")
        dims = {n: self.tot_dim(n) for n in range(upto + 1)}
        diffs = {}
        for n in range(1, upto + 1):
            src, dst = self.offsets(n), self.offsets(n - 1)
            entries = []
            for p, o in src.items():
                q = n - 2 * p
                if q >= 1:
                    entries += [(dst[p] + i, o + j, v) for i, j, v in self.b_mat(q).entries()]
                if p >= 1:
                    entries += [(dst[p - 1] + i, o + j, v) for i, j, v in self.B_mat(q).entries()]
            diffs[n] = SparseMatrix.from_entries(dims[n - 1], dims[n], entries, self.field)
        return BoundedChainComplex(dims, diffs, self.field)

    def check_identities(self) -> bool:
        """``b^2 = 0``, ``B^2 = 0`` and ``bB + Bb = 0`` as matrices."""
        for n in range(self.top + 1):
            if n >= 2 and not (self.b_mat(n - 1) @ self.b_mat(n)).is_zero():
                return False
            if n + 2 <= self.top and not (self.B_mat(n + 1) @ self.B_mat(n)).is_zero():
                return False
            if 1 <= n and n + 1 <= self.top:
                s = (self.b_mat(n + 1) @ self.B_mat(n))
                t = (self.B_mat(n - 1) @ self.b_mat(n))
                for i, j, v in s.entries():
                    if t.get(i, j) != self.field.neg(v):
                        return False
                for i, j, v in t.entries():
                    if s.get(i, j) != self.field.neg(v):
                        return False
        return True

    def random_chain_check(self, rng: random.Random, count: int = 200) -> int:
        """Apply the identities to random chains; returns how many were checked."""
        F = self.field
        degrees = [n for n in range(self.top + 1) if self.dim(n)]
        done = 0
        for _ in range(count):
            n = rng.choice(degrees)
            k = rng.randint(1, min(5, self.dim(n)))
            vec = {i: F(rng.randint(-3, 3) or 1) for i in rng.sample(range(self.dim(n)), k)}
            if n >= 2 and self.b_mat(n - 1).apply(self.b_mat(n).apply(vec)):
                raise AssertionError("b^2 != 0")
            if n + 2 <= self.top and self.B_mat(n + 1).apply(self.B_mat(n).apply(vec)):
                raise AssertionError("B^2 != 0")
            if n >= 1 and n + 1 <= self.top:
                u = self.b_mat(n + 1).apply(self.B_mat(n).apply(vec))
                w = self.B_mat(n - 1).apply(self.b_mat(n).apply(vec))
                tot = {i: F.add(u.get(i, F.zero), w.get(i, F.zero)) for i in set(u) | set(w)}
                if any(v != 0 for v in tot.values()):
                    raise AssertionError("bB + Bb != 0")
            done += 1
        return done


def bar_slice(G: GroupModel, c, R: int, top: int, field: Field = QQ) -> MixedComplexSlice:
    """Cyclic bar mixed complex of ``k[G]`` on the class of ``c``, weight at most ``R``."""
    if G.length(c) > R:
        raise TruncationError(f"class representative {G.label(c)} is outside ball({R})")
    members, closed = _class_members(G, c, R)
    e = G.identity()
    ball = G.ball(R)
    by_len: list[list] = [[] for _ in range(R + 1)]
    for g in ball:
        by_len[G.length(g)].append(g)
    basis: dict[int, list] = {}
    for n in range(top + 1):
        chains = []
        for seq, w in _sequences(G, n, R, by_len):
            prod = e
            for g in seq:
                prod = G.mul(prod, g)
            if G.length(prod) > R:
                continue
            for x in members:
                g0 = _times_inverse(G, x, prod, R - w)
                if g0 is None:
                    continue
                chains.append((g0,) + seq)
        basis[n] = sorted(set(chains), key=lambda t: tuple(G.order_key(g) for g in t))

    mul = G.mul

    def b_terms(t):
        n = len(t) - 1
        out = []
        for i in range(n):
            nt = t[:i] + (mul(t[i], t[i + 1]),) + t[i + 2:]
            if e not in nt[1:]:
                out.append(((-1) ** i, nt))
        nt = (mul(t[n], t[0]),) + t[1:n]
        if e not in nt[1:]:
            out.append(((-1) ** n, nt))
        return out

    def B_terms(t):
        n = len(t) - 1
        if t[0] == e:
            return []
        out = []
        for i in range(n + 1):
            nt = (e,) + t[i:] + t[:i]
            out.append(((-1) ** (n * i), nt))
        return out

    # prune to the largest sub-mixed complex inside the enumerated span
    index = {n: {t: i for i, t in enumerate(basis[n])} for n in basis}
    changed = True
    while changed:
        changed = False
        for n in range(top + 1):
            keep = []
            for t in basis[n]:
                ok = True
                if n >= 1:
                    ok = all(nt in index[n - 1] for _, nt in b_terms(t))
                if ok and n + 1 <= top:
                    ok = all(nt in index[n + 1] for _, nt in B_terms(t))
                if ok:
                    keep.append(t)
                elif closed:
                    raise TruncationError(
                        f"radius {R} does not close the bar complex of class {G.label(c)} in degree {n}")
            if len(keep) != len(basis[n]):
                changed = True
                basis[n] = keep
                index[n] = {t: i for i, t in enumerate(keep)}
    bm, Bm = {}, {}
    for n in range(top + 1):
        if n >= 1:
            ent = {}
            for j, t in enumerate(basis[n]):
                for s, nt in b_terms(t):
                    key = (index[n - 1][nt], j)
                    ent[key] = ent.get(key, 0) + s
            bm[n] = SparseMatrix.from_entries(len(basis[n - 1]), len(basis[n]), ent, field)
        if n + 1 <= top:
            ent = {}
            for j, t in enumerate(basis[n]):
                for s, nt in B_terms(t):
                    key = (index[n + 1][nt], j)
                    ent[key] = ent.get(key, 0) + s
            Bm[n] = SparseMatrix.from_entries(len(basis[n + 1]), len(basis[n]), ent, field)
    return MixedComplexSlice(G, G.label(c), R, top, field, basis, bm, Bm, closed)


def _times_inverse(G: GroupModel, x, prod, budget: int):
    """``x prod^-1`` if its length is at most ``budget``."""
    if budget < 0:
        return None
    if isinstance(G, SurfaceGroup):
        return G.lookup(x + tuple(l ^ 1 for l in reversed(prod)), budget)
    g0 = G.mul(x, G.inv(prod))
    return g0 if G.length(g0) <= budget else None


# ---------------------------------------------------------------- cyclic homology and the Connes sequence


@dataclass
class _HomologyData:
    reps: list
    reducer: CycleReducer

    @property
    def dim(self) -> int:
        return len(self.reps)


def _homology_data(cx: BoundedChainComplex, n: int) -> _HomologyData:
    reps = list(homology(cx, representatives=True)[n].representatives) if cx.dims.get(n) else []
    lo, hi = cx.degrees
    bds = cx.d(n + 1).columns() if n + 1 <= hi else []
    return _HomologyData(reps, CycleReducer(cx.field, bds, reps))


def _induced(F: Field, src: _HomologyData, dst: _HomologyData, f) -> SparseMatrix:
    cols = [dst.reducer.coordinates(f(z)) if dst.dim else () for z in src.reps]
    entries = [(i, j, v) for j, col in enumerate(cols) for i, v in enumerate(col)]
    return SparseMatrix.from_entries(dst.dim, src.dim, entries, F)


@dataclass
class CyclicData:
    """HH and HC of a mixed complex slice in degrees ``0..N`` with the Connes maps."""

    slice: MixedComplexSlice
    N: int
    hh: dict[int, _HomologyData]
    hc: dict[int, _HomologyData]

    @property
    def hh_betti(self) -> tuple[int, ...]:
        return tuple(self.hh[n].dim for n in range(self.N + 1))

    @property
    def hc_betti(self) -> tuple[int, ...]:
        return tuple(self.hc[n].dim for n in range(self.N + 1))

    def _I(self, n):
        return lambda z: dict(z)

    def _S(self, n):
        s, t = self.slice.offsets(n), self.slice.offsets(n - 2)

        def f(v):
            out = {}
            for p in range(1, n // 2 + 1):
                lo, hi = s[p], s[p] + self.slice.dim(n - 2 * p)
                out.update({t[p - 1] + i - lo: c for i, c in v.items() if lo <= i < hi})
            return out
        return f

    def _B(self, n):
        """``HC_{n-1} -> HH_n``: apply ``B`` to the column-0 component."""
        d0 = self.slice.dim(n - 1)
        Bm = self.slice.B_mat(n - 1)
        return lambda v: Bm.apply({i: c for i, c in v.items() if i < d0})

    def map_I(self, n: int) -> SparseMatrix:
        return _induced(self.slice.field, self.hh[n], self.hc[n], self._I(n))

    def map_S(self, n: int) -> SparseMatrix:
        return _induced(self.slice.field, self.hc[n], self.hc[n - 2], self._S(n))

    def map_B(self, n: int) -> SparseMatrix:
        return _induced(self.slice.field, self.hc[n - 1], self.hh[n], self._B(n))

    def connes_boundary_chains(self, n: int) -> list[dict]:
        """Chain-level images ``B x_0`` of the ``HC_{n-1}`` representatives."""
        f = self._B(n)
        return [f(z) for z in self.hc[n - 1].reps]


def cyclic_data(sl: MixedComplexSlice, N: int) -> CyclicData:
    if N + 1 > sl.top:
        raise TruncationError("need chains up to degree N + 1")
    hcx = sl.hochschild()
    tot = sl.total(N + 1)
    hh = {n: _homology_data(hcx, n) for n in range(N + 1)}
    hc = {n: _homology_data(tot, n) for n in range(N + 1)}
    return CyclicData(sl, N, hh, hc)


def cyclic_homology(model: TriangulatedManifoldModel, c, N: int, R: int) -> dict:
    """HC and HH of the class of ``c`` through degree ``N`` plus the Connes boundary into ``HH_d``."""
    G, F, d = model.group, model.field, model.dim
    top = max(N, d) + 1
    sl = bar_slice(G, c, R, top, F)
    cd = cyclic_data(sl, max(N, d))
    B = cd.map_B(d)
    return {
        "class": G.label(c),
        "degree": N,
        "radius": R,
        "flag": sl.flag,
        "class_closed": sl.class_closed,
        "hh_betti": list(cd.hh_betti[:N + 1]),
        "hc_betti": list(cd.hc_betti[:N + 1]),
        "connes_boundary": {"from": f"HC_{d - 1}", "to": f"HH_{d}", "shape": list(B.shape),
                            "matrix": [[str(v) for v in row] for row in B.to_dense()]},
    }


def _zero_space(F: Field) -> _HomologyData:
    return _HomologyData([], CycleReducer(F, [], []))


@dataclass(frozen=True)
class ExactnessNode:
    label: str
    dim: int
    rank_in: int
    rank_out: int
    composite_zero: bool

    @property
    def exact(self) -> bool:
        return self.composite_zero and self.rank_in + self.rank_out == self.dim

    def to_json(self) -> dict:
        return {"node": self.label, "dim": self.dim, "rank_in": self.rank_in,
                "rank_out": self.rank_out, "exact": self.exact}


def connes_les(cd: CyclicData) -> list[ExactnessNode]:
    """Exactness of ``HH_n -I-> HC_n -S-> HC_{n-2} -B-> HH_{n-1}`` at every node in range.

    ``HC_n'`` is ``HC_n`` seen as the target of ``S`` and source of ``B``.
    """
    F = cd.slice.field
    N = cd.N
    hc = dict(cd.hc)
    for m in (-2, -1):
        hc[m] = _zero_space(F)

    def zero(rows, cols):
        return SparseMatrix.zero(rows, cols, F)

    def I(n):
        return cd.map_I(n)

    def S(n):
        return cd.map_S(n) if n >= 2 else zero(hc[n - 2].dim, hc[n].dim)

    def B(n):
        return cd.map_B(n) if n >= 1 else zero(cd.hh[0].dim, 0)

    nodes = []

    def node(label, dim, fin, fout):
        nodes.append(ExactnessNode(label, dim, rank(fin), rank(fout), (fout @ fin).is_zero()))

    for n in range(N + 1):
        node(f"HH_{n}", cd.hh[n].dim, B(n), I(n))
        node(f"HC_{n}", hc[n].dim, I(n), S(n))
        if n + 2 <= N:
            node(f"HC_{n}'", hc[n].dim, S(n + 2), B(n + 1))
    return nodes


# ---------------------------------------------------------------- nerve and the composite bp o B


@dataclass
class NerveSlice:
    """Normalized bar chains ``[g_1|...|g_n]`` of ``BG`` with ``sum |g_i| <= radius``."""

    group: GroupModel
    radius: int
    top: int
    complex: BoundedChainComplex
    index: dict[int, dict[tuple, int]]


def nerve_slice(G: GroupModel, R: int, top: int, field: Field = QQ) -> NerveSlice:
    e = G.identity()
    by_len: list[list] = [[] for _ in range(R + 1)]
    for g in G.ball(R):
        by_len[G.length(g)].append(g)
    basis = {n: [seq for seq, _ in _sequences(G, n, R, by_len)] for n in range(top + 1)}
    index = {n: {t: i for i, t in enumerate(basis[n])} for n in basis}
    diffs = {}
    for n in range(1, top + 1):
        ent: dict = {}
        for j, t in enumerate(basis[n]):
            terms = [(1, t[1:])]
            for i in range(n - 1):
                terms.append(((-1) ** (i + 1), t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2:]))
            terms.append(((-1) ** n, t[:-1]))
            for sgn, nt in terms:
                if e in nt:
                    continue
                key = (index[n - 1][nt], j)
                ent[key] = ent.get(key, 0) + sgn
        diffs[n] = SparseMatrix.from_entries(len(basis[n - 1]), len(basis[n]), ent, field)
    cx = BoundedChainComplex({n: len(basis[n]) for n in basis}, diffs, field)
    return NerveSlice(G, R, top, cx, index)


def bp_bar(sl: MixedComplexSlice, n: int, chain: Mapping, nerve: NerveSlice) -> dict:
    """``(g_0, ..., g_n) -> [g_1|...|g_n]`` into the nerve."""
    F = sl.field
    out: dict = {}
    for i, c in chain.items():
        k = nerve.index[n][sl.basis[n][i][1:]]
        out[k] = F.add(out.get(k, F.zero), c)
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class CompositeCheck:
    class_label: str
    degree: int
    radius: int
    nerve_radius: int
    rows: tuple[tuple, ...]

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for row in self.rows for v in row)

    def to_json(self) -> dict:
        return {"class": self.class_label, "degree": self.degree, "radius": self.radius,
                "nerve_radius": self.nerve_radius, "zero": self.is_zero,
                "matrix": [[str(v) for v in r] for r in self.rows],
                "flag": f"TRUNCATED({self.radius})"}


def bp_connes_composite(G: GroupModel, c, k: int, R: int, field: Field = QQ,
                        nerve_radius: int | None = None) -> CompositeCheck:
    """Matrix of ``bp o B : HC_{k-1} -> H_k(BG)`` on the class of ``c``, both sides truncated."""
    Rn = R if nerve_radius is None else nerve_radius
    sl = bar_slice(G, c, R, k + 1, field)
    cd = cyclic_data(sl, k)
    nv = nerve_slice(G, Rn, k + 1, field)
    hk = _homology_data(nv.complex, k)
    rows = []
    for z in cd.connes_boundary_chains(k):
        rows.append(hk.reducer.coordinates(bp_bar(sl, k, z, nv)) if hk.dim else ())
    # transpose so rows index H_k(BG) generators
    mat = tuple(tuple(rows[j][i] for j in range(len(rows))) for i in range(hk.dim))
    return CompositeCheck(G.label(c), k, R, Rn, mat)


# ---------------------------------------------------------------- exactness obstruction


def _det(vectors: Sequence[Sequence[int]]) -> int:
    n = len(vectors)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        prod = 1
        for i, p in enumerate(perm):
            prod *= vectors[p][i]
        total += sign * prod
    return total


def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, L = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            L += 1
        if L % 2 == 0:
            sign = -sign
    return sign


@dataclass
class ObstructionReport:
    name: str
    radius: int
    verdict: str
    witnesses: list
    central: CentralUnitReport | None
    field: Field

    def to_json(self) -> dict:
        out = {"manifold": self.name, "radius": self.radius, "verdict": self.verdict,
               "field": self.field.label, "witnesses": self.witnesses}
        if self.central is not None:
            out["central_units"] = self.central.to_json()
        return out


def abelian_witness(G: FreeAbelian, field: Field = QQ) -> dict:
    """``lambda = sum sgn(s) (e_1, e_s(2), ..., e_s(d))`` in the class ``(1, ..., 1)``.

    The determinant is a cocycle on the nerve; it is checked to vanish on
    boundaries and then evaluated on ``bp B lambda``.
    """
    d = G.n
    basis_vecs = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    u = tuple([1] * d)
    sl = bar_slice(G, u, d, d, field)
    idx = {t: i for i, t in enumerate(sl.basis[d - 1])}
    lam: dict = {}
    for perm in itertools.permutations(range(1, d)):
        t = (basis_vecs[0],) + tuple(basis_vecs[p] for p in perm)
        sign = _perm_sign([p - 1 for p in perm])
        lam[idx[t]] = field.add(lam.get(idx[t], field.zero), field(sign))
    is_cycle = d == 1 or not sl.b_mat(d - 1).apply(lam)
    Blam = sl.B_mat(d - 1).apply(lam)
    nv = nerve_slice(G, d + 1, d + 1, field)
    phi = {i: field(_det(t)) for t, i in nv.index[d].items()}
    cocycle = all(
        sum((field.mul(v, phi.get(r, field.zero)) for r, v in col.items()), field.zero) == 0
        for col in nv.complex.d(d + 1).columns())
    nv_small = nerve_slice(G, d, d, field)
    img = bp_bar(sl, d, Blam, nv_small)
    value = sum((field.mul(c, field(_det(nv_small_key))) for nv_small_key, c in
                 ((t, img[i]) for t, i in nv_small.index[d].items() if i in img)), field.zero)
    return {
        "class": G.label(u),
        "central_unit": G.label(u),
        "lambda": {"+".join(G.label(g) for g in sl.basis[d - 1][i]): str(c) for i, c in sorted(lam.items())},
        "lambda_is_cycle": is_cycle,
        "cocycle": "det",
        "cocycle_checked": cocycle,
        "pairing": str(value),
        "certified": bool(is_cycle and cocycle and value != 0),
    }


def obstruction(model: TriangulatedManifoldModel, R: int) -> ObstructionReport:
    G, F, d = model.group, model.field, model.dim
    if isinstance(G, FreeAbelian) and G.n == d:
        w = abelian_witness(G, F)
        central = central_unit_search(G, 1)
        verdict = "EXACTNESS_POSSIBLE" if w["certified"] else f"NO_WITNESS_FOUND({R})"
        return ObstructionReport(model.name, R, verdict, [w], central, F)
    central = central_unit_search(G, R)
    witnesses = []
    for cs in central.nontrivial:
        radius = max(G.length(x) for x in cs.elements) + 2
        cc = bp_connes_composite(G, cs.elements[0], d, radius, F)
        if not cc.is_zero:
            # nonzero in a truncated nerve is only evidence
            witnesses.append({"class": cs.labels[0], "composite": cc.to_json(), "certified": False})
    verdict = "CANDIDATE_FOUND" if witnesses else f"NO_WITNESS_FOUND({R})"
    return ObstructionReport(model.name, R, verdict, witnesses, central, F)


# ---------------------------------------------------------------- Klein bottle Ext^2 bimodule


@dataclass
class KleinExt2Report:
    char: int
    radius: int
    checks: dict[str, bool]
    quotient_rank: int | None

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and self.quotient_rank in (None, 0)

    def to_json(self) -> dict:
        return {"char": self.char, "radius": self.radius, "checks": self.checks,
                "quotient_rank": self.quotient_rank, "ok": self.ok,
                "flag": f"TRUNCATED({self.radius})"}


class KleinBimodule:
    """``M = Ext^2(A, A e)`` for ``A = k[pi_1(K)]``, with basis ``r (x) 1``.

    The right action is the regular one; on the left ``a`` acts by ``a^-1`` and
    ``b`` by ``-b``.
    """

    def __init__(self, field: Field):
        self.K = KleinBottle()
        self.F = field
        self.a, self.b = self.K.letter(0), self.K.letter(2)

    def left(self, s, vec: Mapping) -> dict:
        K, F = self.K, self.F
        if s in (self.a, K.inv(self.a)):
            g, sign = K.inv(s), F.one
        else:
            g, sign = s, F.neg(F.one)
        return _combine(F, ((K.mul(g, r), F.mul(sign, c)) for r, c in vec.items()))

    def right(self, vec: Mapping, s) -> dict:
        return _combine(self.F, ((self.K.mul(r, s), c) for r, c in vec.items()))

    def generators(self):
        K = self.K
        return [self.a, K.inv(self.a), self.b, K.inv(self.b)]


def _combine(F: Field, items) -> dict:
    out: dict = {}
    for k, v in items:
        out[k] = F.add(out.get(k, F.zero), v)
    return {k: v for k, v in out.items() if v != 0}


def klein_ext2_casestudy(char: int, R: int = 4) -> KleinExt2Report:
    F = Field(char)
    M = KleinBimodule(F)
    K = M.K
    one = {K.identity(): F.one}
    checks: dict[str, bool] = {}
    bi = {K.inv(M.b): F.one}
    if char == 0:
        lhs = _combine(F, list(M.right(bi, M.b).items()) +
                       [(k, F.neg(v)) for k, v in M.left(M.b, bi).items()])
        half = F.inv(F(2))
        checks["half_commutator_is_unit"] = {k: F.mul(half, v) for k, v in lhs.items()} == one
        rank0 = _quotient_rank(M, R)
        return KleinExt2Report(0, R, checks, rank0)
    # left multiplication by b is an isomorphism A -> M of bimodules
    ok = True
    for r in K.ball(R):
        phi_r = {K.mul(M.b, r): F.one}
        for s in M.generators():
            ok &= M.right(phi_r, s) == {K.mul(M.b, K.mul(r, s)): F.one}
            ok &= M.left(s, phi_r) == {K.mul(M.b, K.mul(s, r)): F.one}
    checks["left_b_intertwines"] = ok
    return KleinExt2Report(char, R, checks, None)


def _quotient_rank(M: KleinBimodule, R: int) -> int:
    """``dim V_R / (V_R cap N)`` where ``N`` is the sub-bimodule generated by commutators.

    ``N`` is truncated to the span of ``u [s, m] v`` with ``s`` a generator,
    ``u`` a generator or 1, and ``m, v`` in ``ball(R)``.
    """
    K, F = M.K, M.F
    ball = K.ball(R)
    inner = set(ball)
    rels = []
    for m in ball:
        vec = {m: F.one}
        for s in M.generators():
            c = _combine(F, list(M.left(s, vec).items()) +
                         [(k, F.neg(v)) for k, v in M.right(vec, s).items()])
            if not c:
                continue
            for v in ball:
                cv = M.right(c, v)
                rels.append(cv)
                for u in M.generators():
                    rels.append(M.left(u, cv))
    support = sorted({k for r in rels for k in r} | inner,
                     key=lambda g: (g in inner, K.order_key(g)))
    pos = {g: i for i, g in enumerate(support)}
    # outer coordinates get the smallest indices, so echelon rows led by an
    # inner coordinate span the relations supported on V_R
    ech = Echelon(F)
    for r in rels:
        ech.add({pos[k]: v for k, v in r.items()})
    first_inner = len(support) - len(inner)
    return len(inner) - sum(1 for piv in ech.pivots if piv >= first_inner)
