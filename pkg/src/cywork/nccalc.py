"""Noncommutative differential forms and the Ginzburg dg-algebra.

A form is a linear combination of token words.  A token is
``(name, exponent, marked)``; a marked token ``(a, 1, True)`` stands for
``Da``.  Generators carry a cohomological degree (``deg`` mapping, default 0)
and a token's parity is ``deg + marked`` mod 2.  All sign rules are Koszul
rules for that parity:

* ``D`` is odd: ``D(uv) = D(u) v + (-1)^|u| u D(v)``.
* a derivation ``theta`` of degree ``k`` acts by ``L(a) = theta(a)``,
  ``L(Da) = (-1)^k D(theta(a))``, so that ``L D = (-1)^k D L``.
* a double derivation ``lam`` contracts with the outer bimodule structure and
  parity ``1 + deg(lam)``; the reduced contraction is ``m . beta`` with
  ``beta(p (x) q) = (-1)^{|p||q|} q (x) p``.

With these rules ``iota_Delta(sum_a Da Da*) = -D(sum_a [a, a*])`` exactly, so
the standard form handled here is ``omega = -sum_a Da Da*`` (the scalar
normalisation of a bisymplectic form does not change the construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import Iterable, Mapping, Sequence

from .linalg import QQ, Field, FieldMismatchError
from .quiver import (Arrow, NCPoly, Potential, Quiver, Word, jacobi_relations)

Token = tuple[str, int, bool]
TWord = tuple[Token, ...]


class UnsupportedError(ValueError):
    pass


def star(name: str) -> str:
    return name + "*"


def _reduce_tokens(w: Sequence[Token]) -> TWord:
    out: list[Token] = []
    for tok in w:
        n, e, m = tok
        if out and not m and not out[-1][2] and out[-1][0] == n and out[-1][1] == -e:
            out.pop()
        else:
            out.append(tok)
    return tuple(out)


class Form:
    """Element of the tensor algebra of 1-forms (not yet cyclically reduced)."""

    __slots__ = ("terms", "field", "deg")

    def __init__(self, terms: Mapping[TWord, object] | Iterable[tuple[object, TWord]] = (),
                 field: Field = QQ, deg: Mapping[str, int] | None = None):
        self.field = field
        self.deg = dict(deg or {})
        acc: dict[TWord, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((w, c) for c, w in terms)
        for w, c in items:
            w = _reduce_tokens(w)
            acc[w] = field.add(acc.get(w, field.zero), field(c))
        self.terms = {w: c for w, c in acc.items() if c != 0}

    # construction helpers
    @classmethod
    def from_poly(cls, p: NCPoly, deg: Mapping[str, int] | None = None) -> "Form":
        return cls({tuple((n, e, False) for n, e in w): c for w, c in p.terms.items()}, p.field, deg)

    @classmethod
    def letter(cls, name: str, marked: bool = False, field: Field = QQ, deg=None) -> "Form":
        return cls({((name, 1, marked),): 1}, field, deg)

    def _new(self, terms) -> "Form":
        return Form(terms, self.field, self.deg)

    def parity(self, w: Sequence[Token]) -> int:
        return sum(self.deg.get(n, 0) + m for n, _, m in w) % 2

    def form_degree(self, w: Sequence[Token]) -> int:
        return sum(1 for t in w if t[2])

    def _check(self, other: "Form"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field.label} vs {other.field.label}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = self.field.add(t.get(w, self.field.zero), c)
        return Form(t, self.field, {**self.deg, **other.deg})

    def __neg__(self) -> "Form":
        return self._new({w: self.field.neg(c) for w, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, s) -> "Form":
        s = self.field(s)
        return self._new({w: self.field.mul(c, s) for w, c in self.terms.items()})

    def __mul__(self, other: "Form") -> "Form":
        self._check(other)
        F = self.field
        acc: dict[TWord, object] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = _reduce_tokens(w1 + w2)
                acc[w] = F.add(acc.get(w, F.zero), F.mul(c1, c2))
        return Form(acc, F, {**self.deg, **other.deg})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, Form) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items()):
            body = " ".join(("D" if m else "") + (n if e == 1 else f"{n}^-1") for n, e, m in w) or "1"
            parts.append(f"{c}*{body}" if c != 1 else body)
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"terms": [{"coeff": str(c), "word": [("D" if m else "") + (n if e == 1 else f"{n}^-1")
                                                     for n, e, m in w]}
                          for w, c in sorted(self.terms.items())]}


def _graded_leibniz(f: Form, on_token, op_parity: int) -> Form:
    """Extend a per-token operator to words: ``sum_i (-1)^{op*|prefix|} .. op(t_i) ..``."""
    F = f.field
    acc: dict[TWord, object] = {}
    for w, c in f.terms.items():
        prefix_par = 0
        for i, tok in enumerate(w):
            img = on_token(tok)
            if img:
                sign = -1 if (op_parity and prefix_par) else 1
                for mid, cm in img.items():
                    nw = _reduce_tokens(w[:i] + mid + w[i + 1:])
                    acc[nw] = F.add(acc.get(nw, F.zero), F.mul(F(sign), F.mul(c, cm)))
            prefix_par ^= f.parity((tok,))
    return Form(acc, F, f.deg)


def de_rham_D(f: Form) -> Form:
    """The universal odd derivation ``a -> Da``, ``Da -> 0``."""
    F = f.field

    def on_token(tok):
        n, e, m = tok
        if m:
            return None
        if e == 1:
            return {((n, 1, True),): F.one}
        if f.deg.get(n, 0) != 0:
            raise UnsupportedError("inverses of graded generators are not supported")
        return {((n, -1, False), (n, 1, True), (n, -1, False)): F.neg(F.one)}

    return _graded_leibniz(f, on_token, 1)


@dataclass(frozen=True)
class GradedDerivation:
    """Derivation given by its values on generators."""

    degree: int
    values: Mapping[str, NCPoly]

    def value(self, name: str) -> NCPoly:
        try:
            return self.values[name]
        except KeyError:
            raise KeyError(f"derivation has no value on generator {name!r}") from None


def lie_derivative(theta: GradedDerivation, f: Form) -> Form:
    F = f.field
    k = theta.degree % 2

    def on_token(tok):
        n, e, m = tok
        v = Form.from_poly(theta.value(n), f.deg)
        if v.field != F:
            raise FieldMismatchError("derivation and form over different fields")
        if m:
            img = de_rham_D(v)
            if k:
                img = -img
            return img.terms
        if e == 1:
            return v.terms
        if f.deg.get(n, 0) != 0:
            raise UnsupportedError("inverses of graded generators are not supported")
        inv = Form({((n, -1, False),): 1}, F, f.deg)
        return (-(inv * v * inv)).terms

    return _graded_leibniz(f, on_token, k)


@dataclass(frozen=True)
class DoubleDerivation:
    """Values in ``A (x) A`` given as ``{(left_word, right_word): coeff}``."""

    degree: int
    values: Mapping[str, Mapping[tuple[Word, Word], object]]

    @classmethod
    def canonical(cls, names: Iterable[str]) -> "DoubleDerivation":
        """``Delta(a) = a (x) 1 - 1 (x) a``."""
        return cls(0, {n: {(((n, 1),), ()): 1, ((), ((n, 1),)): -1} for n in names})

    def value(self, name: str):
        try:
            return self.values[name]
        except KeyError:
            raise KeyError(f"double derivation has no value on generator {name!r}") from None


def contraction(lam: DoubleDerivation, f: Form) -> dict[tuple[TWord, TWord], object]:
    """``i_lam`` into ``Omega (x) Omega`` via the outer bimodule structure."""
    F = f.field
    lam_par = (1 + lam.degree) % 2
    acc: dict[tuple[TWord, TWord], object] = {}
    for w, c in f.terms.items():
        prefix_par = 0
        for i, (n, e, m) in enumerate(w):
            if m:
                sign = -1 if (lam_par and prefix_par) else 1
                for (l, r), cv in lam.value(n).items():
                    left = _reduce_tokens(w[:i] + tuple((a, x, False) for a, x in l))
                    right = _reduce_tokens(tuple((a, x, False) for a, x in r) + w[i + 1:])
                    key = (left, right)
                    acc[key] = F.add(acc.get(key, F.zero), F.mul(F(sign), F.mul(c, F(cv))))
            prefix_par ^= f.parity(((n, e, m),))
    return {k: v for k, v in acc.items() if v != 0}


def reduced_contraction(lam: DoubleDerivation, f: Form) -> Form:
    """``iota_lam = m . beta . i_lam``."""
    F = f.field
    acc: dict[TWord, object] = {}
    for (p, q), c in contraction(lam, f).items():
        sign = -1 if (f.parity(p) and f.parity(q)) else 1
        w = _reduce_tokens(q + p)
        acc[w] = F.add(acc.get(w, F.zero), F.mul(F(sign), c))
    return Form(acc, F, f.deg)


# ---------------------------------------------------------------- cyclic quotient


def _dr_canonical(w: TWord, parity) -> tuple[TWord, int]:
    """Least graded rotation of ``w`` and its sign; sign 0 means the word is zero."""
    w = tuple(w)
    while len(w) >= 2 and not w[0][2] and not w[-1][2] and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    n = len(w)
    if n == 0:
        return w, 1
    pars = [parity((t,)) for t in w]
    total = sum(pars) % 2
    best, best_signs = None, set()
    pre = 0
    for k in range(n):
        rot = w[k:] + w[:k]
        sign = -1 if (pre and (total ^ pre)) else 1
        if best is None or rot < best:
            best, best_signs = rot, {sign}
        elif rot == best:
            best_signs.add(sign)
        pre ^= pars[k]
    if len(best_signs) > 1:
        return best, 0
    return best, best_signs.pop()


def dr(f: Form) -> Form:
    """Image in ``DR = Omega / [Omega, Omega]`` (graded commutators)."""
    F = f.field
    acc: dict[TWord, object] = {}
    for w, c in f.terms.items():
        cw, s = _dr_canonical(w, f.parity)
        if s == 0:
            continue
        acc[cw] = F.add(acc.get(cw, F.zero), F.mul(F(s), c))
    out = Form((), F, f.deg)
    out.terms = {k: v for k, v in acc.items() if v != 0}
    return out


# ---------------------------------------------------------------- doubled quivers


def double(Q: Quiver, dual_degree: int = -1) -> tuple[Quiver, dict[str, int]]:
    """Quiver with an extra arrow ``a*`` (reversed) per arrow, and its grading."""
    stars = tuple(Arrow(star(a.name), a.dst, a.src, False) for a in Q.arrows)
    deg = {a.name: 0 for a in Q.arrows}
    deg.update({star(a.name): dual_degree for a in Q.arrows})
    return Quiver(Q.vertices, Q.arrows + stars), deg


def standard_form(names: Sequence[str], field: Field = QQ, dual_degree: int = -1) -> Form:
    """``omega = -sum_a Da Da*``."""
    deg = {n: 0 for n in names}
    deg.update({star(n): dual_degree for n in names})
    return Form({((n, 1, True), (star(n), 1, True)): -1 for n in names}, field, deg)


def moment_map(names_or_quiver, field: Field = QQ) -> NCPoly:
    """``sum_a [a, a*]`` for the doubling of the given arrows."""
    names = names_or_quiver.arrow_names if isinstance(names_or_quiver, Quiver) else tuple(names_or_quiver)
    terms = {}
    for n in names:
        terms[((n, 1), (star(n), 1))] = 1
        terms[((star(n), 1), (n, 1))] = -1
    return NCPoly(terms, field)


def check_moment_identity(names: Sequence[str], field: Field = QQ, dual_degree: int = -1) -> bool:
    """``D(moment_map) == iota_Delta(omega)`` exactly in Omega."""
    omega = standard_form(names, field, dual_degree)
    all_names = list(names) + [star(n) for n in names]
    lhs = de_rham_D(Form.from_poly(moment_map(names, field), omega.deg))
    rhs = reduced_contraction(DoubleDerivation.canonical(all_names), omega)
    return lhs == rhs


# ---------------------------------------------------------------- graded derivations on NCPoly


def _apply_derivation(p: NCPoly, values: Mapping[str, NCPoly], deg: Mapping[str, int], degree: int) -> NCPoly:
    F = p.field
    out = NCPoly((), F)
    odd = degree % 2
    for w, c in p.terms.items():
        par = 0
        for i, (n, e) in enumerate(w):
            v = values.get(n)
            if v is not None and not v.is_zero():
                if e == -1:
                    inv = NCPoly.monomial(((n, -1),), 1, F)
                    v = -(inv * v * inv)
                sign = -1 if (odd and par) else 1
                left = NCPoly.monomial(w[:i], F.mul(c, F(sign)), F)
                right = NCPoly.monomial(w[i + 1:], 1, F)
                out = out + left * v * right
            par ^= deg.get(n, 0) % 2
    return out


@dataclass(frozen=True)
class DsqVerdict:
    ok: bool
    failing: str | None = None
    residual: NCPoly | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "failing_generator": self.failing,
                "residual": None if self.residual is None else str(self.residual)}


@dataclass(frozen=True)
class GinzburgDGA:
    quiver: Quiver
    potential: Potential
    c: int
    degrees: Mapping[str, int]
    dvals: Mapping[str, NCPoly]
    field: Field = QQ
    order: tuple[str, ...] = dc_field(default=())

    @property
    def generators(self) -> tuple[str, ...]:
        return self.order or tuple(self.degrees)

    def d(self, p: NCPoly) -> NCPoly:
        return _apply_derivation(p, self.dvals, self.degrees, 1)

    def degree_of(self, w: Word) -> int:
        return sum(self.degrees[n] * e for n, e in w)

    def with_d(self, name: str, value: NCPoly) -> "GinzburgDGA":
        """Copy with one differential value replaced (used to build broken inputs)."""
        return replace(self, dvals={**self.dvals, name: value})

    def as_derivation(self) -> GradedDerivation:
        return GradedDerivation(1, {n: self.dvals.get(n, NCPoly((), self.field)) for n in self.generators})

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "field": self.field.label,
            "generators": [{"name": n, "degree": self.degrees[n], "d": self.dvals[n].to_json(),
                            "d_text": str(self.dvals[n])}
                           for n in self.generators],
        }


def ginzburg_dga(Q: Quiver, W: Potential, c: int = -1) -> GinzburgDGA:
    F = W.field
    for n in W.letters():
        if n.endswith("*") or n == "t":
            raise UnsupportedError(f"potential may not contain starred letters or t: {n}")
    for cw in W.terms:
        if any(e == -1 for _, e in cw.rep):
            raise UnsupportedError("potential terms with inverse letters are not supported")
    if Q.arrows and c != -1:
        raise UnsupportedError(f"degree c={c} is only supported for the empty quiver")
    if not Q.arrows and not W.is_zero():
        raise UnsupportedError("nonzero potential on the empty quiver")
    for n in Q.arrow_names:
        if n.endswith("*") or n == "t":
            raise UnsupportedError(f"arrow name {n!r} is reserved")
    rels = jacobi_relations(Q, W)
    degrees: dict[str, int] = {}
    dvals: dict[str, NCPoly] = {}
    order = []
    for a in Q.arrow_names:
        degrees[a] = 0
        dvals[a] = NCPoly((), F)
        order.append(a)
    for a, r in zip(Q.arrow_names, rels):
        degrees[star(a)] = -1
        dvals[star(a)] = r
        order.append(star(a))
    degrees["t"] = c - 1
    dvals["t"] = moment_map(Q.arrow_names, F)
    order.append("t")
    return GinzburgDGA(Q, W, c, degrees, dvals, F, tuple(order))


def check_d_squared(G: GinzburgDGA) -> DsqVerdict:
    for g in G.generators:
        if g not in G.dvals:
            return DsqVerdict(False, g, None)
        r = G.d(G.dvals[g])
        if not r.is_zero():
            return DsqVerdict(False, g, r)
    return DsqVerdict(True)


def h0_presentation(G: GinzburgDGA) -> tuple[Quiver, list[NCPoly]]:
    """Degree-0 generators modulo ``d`` of the degree -1 generators."""
    rels = [G.dvals[g] for g in G.generators if G.degrees[g] == -1]
    return G.quiver, rels


def check_lie_omega(G: GinzburgDGA) -> bool:
    """``L_xi omega == 0`` in DR^2 for ``xi`` the differential restricted to A."""
    names = G.quiver.arrow_names
    omega = standard_form(names, G.field)
    xi = GradedDerivation(1, {n: G.dvals[n] for n in omega.deg})
    return dr(lie_derivative(xi, omega)).is_zero()


# ---------------------------------------------------------------- exactness witness


def sigma(eps: Form) -> NCPoly:
    """``u Dv w  ->  (-1)^{|w|(|u|+|Dv|)} [wu, v]`` (graded commutator)."""
    F = eps.field
    out = NCPoly((), F)
    for w, c in eps.terms.items():
        marks = [i for i, t in enumerate(w) if t[2]]
        if len(marks) != 1:
            raise ValueError("sigma is defined on 1-forms")
        i = marks[0]
        u, (n, _, _), tail = w[:i], w[i], w[i + 1:]
        pu, pt = eps.parity(u), eps.parity(tail)
        pv = eps.deg.get(n, 0) % 2
        sign = -1 if (pt and (pu ^ pv ^ 1)) else 1
        wu = tuple((a, e) for a, e, _ in tail + u)
        v = ((n, 1),)
        pwu = (pu + pt) % 2
        term = NCPoly.monomial(wu + v, 1, F) - NCPoly.monomial(v + wu, -1 if (pwu and pv) else 1, F)
        if term.terms:
            out = out + term.scale(F.mul(c, F(sign)))
    return out


@dataclass(frozen=True)
class WitnessReport:
    epsilon: Form
    sigma_epsilon: NCPoly
    dt: NCPoly
    b_image: tuple[Form, Form]
    sigma_ok: bool
    b_ok: bool

    @property
    def ok(self) -> bool:
        return self.sigma_ok and self.b_ok

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon.to_json(),
            "epsilon_text": str(self.epsilon),
            "sigma_epsilon": str(self.sigma_epsilon),
            "dt": str(self.dt),
            "sigma_epsilon_equals_dt": self.sigma_ok,
            "B_image": [str(self.b_image[0]), str(self.b_image[1])],
            "B_image_is_Dt": self.b_ok,
        }


class WitnessError(RuntimeError):
    pass


def exact_cy_witness(G: GinzburgDGA) -> WitnessReport:
    """``eps = sum_a a D(a*)`` with the checks ``sigma(eps) = dt`` and ``B(eps, t) = (Dt, 0)``."""
    if G.c != -1:
        raise UnsupportedError("the witness is constructed for c = -1")
    F = G.field
    deg = dict(G.degrees)
    eps = dr(Form({((a, 1, False), (star(a), 1, True)): 1 for a in G.quiver.arrow_names}, F, deg))
    se = sigma(eps)
    dt = G.dvals["t"]
    t_form = Form.letter("t", False, F, deg)
    # B on the X-complex: natural D on degree 0, zero on the 1-form part
    b_image = (dr(de_rham_D(t_form)), Form((), F, deg))
    b_ok = b_image[0] == dr(Form.letter("t", True, F, deg)) and b_image[1].is_zero()
    rep = WitnessReport(eps, se, dt, b_image, se == dt, b_ok)
    if not rep.sigma_ok:
        raise WitnessError(f"sigma(eps) = {se} differs from dt = {dt}")
    return rep
