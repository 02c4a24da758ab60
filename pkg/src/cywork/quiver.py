"""Quivers, localized path algebras, cyclic words and potentials.

A word is a tuple of letters ``(arrow_name, exponent)`` with exponent ``+1``
or ``-1``; the empty tuple is the idempotent of a vertex (the vertex itself is
not tracked in the word, one-vertex quivers being the main case).  Words are
composed left to right: ``xy`` means "first x, then y", so the target of x is
the source of y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linalg import QQ, Field, FieldMismatchError

Letter = tuple[str, int]
Word = tuple[Letter, ...]


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    src: str
    dst: str
    invertible: bool = False


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise QuiverError("arrow names must be unique")
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("vertex labels must be unique")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.src not in vs or a.dst not in vs:
                raise QuiverError(f"arrow {a.name} has undeclared endpoint")

    @classmethod
    def one_vertex(cls, names: Iterable[str], invertible: bool = False, vertex: str = "v0") -> "Quiver":
        return cls((vertex,), tuple(Arrow(n, vertex, vertex, invertible) for n in names))

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise QuiverError(f"no arrow named {name!r}")

    @property
    def arrow_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.arrows)

    def localized(self) -> "Quiver":
        return Quiver(self.vertices, tuple(Arrow(a.name, a.src, a.dst, True) for a in self.arrows))

    def endpoints(self, w: Word) -> tuple[str, str] | None:
        """(source, target) of a nonempty composable word; raises otherwise."""
        if not w:
            return None
        ends = []
        for name, e in w:
            a = self.arrow(name)
            ends.append((a.src, a.dst) if e == 1 else (a.dst, a.src))
        for (s0, t0), (s1, t1) in zip(ends, ends[1:]):
            if t0 != s1:
                raise QuiverError(f"word {format_word(w)} is not composable")
        return ends[0][0], ends[-1][1]

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"name": a.name, "src": a.src, "dst": a.dst, "invertible": a.invertible}
                       for a in self.arrows],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Quiver":
        try:
            verts = tuple(str(v) for v in data["vertices"])
            arrows = tuple(
                Arrow(str(a["name"]), str(a["src"]), str(a["dst"]), bool(a.get("invertible", False)))
                for a in data["arrows"]
            )
        except (KeyError, TypeError) as exc:
            raise QuiverError(f"malformed quiver JSON: {exc}") from exc
        return cls(verts, arrows)


# ---------------------------------------------------------------- words


def word(*names: str) -> Word:
    """Build a word from names; a trailing ``^-1`` marks an inverse."""
    out = []
    for n in names:
        if n.endswith("^-1"):
            out.append((n[:-3], -1))
        else:
            out.append((n, 1))
    return tuple(out)


def invert(w: Word) -> Word:
    return tuple((n, -e) for n, e in reversed(w))


def reduce(w: Sequence[Letter], quiver: Quiver | None = None) -> Word:
    """Free cancellation of adjacent ``x x^-1`` pairs.

    With a quiver, inverse letters on non-invertible arrows are rejected and
    composability is checked.
    """
    if quiver is not None:
        for name, e in w:
            if e == -1 and not quiver.arrow(name).invertible:
                raise QuiverError(f"arrow {name} is not invertible")
        quiver.endpoints(tuple(w))
    out: list[Letter] = []
    for name, e in w:
        if e not in (1, -1):
            raise QuiverError(f"exponent must be +1 or -1, got {e}")
        if out and out[-1] == (name, -e):
            out.pop()
        else:
            out.append((name, e))
    return tuple(out)


def format_word(w: Word) -> str:
    if not w:
        return "1"
    parts = [n if e == 1 else f"{n}^-1" for n, e in w]
    if all(len(n) == 1 for n, _ in w):
        return "".join(parts)
    return ".".join(parts)


def _rotations(w: Word):
    for i in range(len(w)):
        yield w[i:] + w[:i]


@dataclass(frozen=True, order=True)
class CyclicWord:
    """A closed word up to rotation, stored as its lexicographically least rotation."""

    rep: Word

    def __str__(self) -> str:
        return format_word(self.rep)


def cyclic_canonical(w: Sequence[Letter], quiver: Quiver | None = None) -> CyclicWord:
    w = tuple(w)
    if quiver is not None and w:
        s, t = quiver.endpoints(w)
        if s != t:
            raise QuiverError(f"word {format_word(w)} is not closed")
    # a freely reduced closed word may still cancel across the seam
    while len(w) >= 2 and w[0] == (w[-1][0], -w[-1][1]):
        w = w[1:-1]
    if not w:
        return CyclicWord(())
    return CyclicWord(min(_rotations(w)))


# ---------------------------------------------------------------- polynomials


def _coeff(field: Field, c):
    return field(c)


class NCPoly:
    """Finite linear combination of words with exact coefficients."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: Mapping[Word, object] | Iterable[tuple[object, Word]] = (), field: Field = QQ):
        self.field = field
        acc: dict[Word, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((w, c) for c, w in terms)
        for w, c in items:
            w = tuple(w)
            acc[w] = field.add(acc.get(w, field.zero), field(c))
        self.terms = {w: c for w, c in acc.items() if c != 0}

    @classmethod
    def monomial(cls, w: Word, coeff=1, field: Field = QQ) -> "NCPoly":
        return cls({tuple(w): coeff}, field)

    @classmethod
    def one(cls, field: Field = QQ) -> "NCPoly":
        return cls({(): 1}, field)

    def _check(self, other: "NCPoly"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field.label} vs {other.field.label}")

    def __add__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = self.field.add(t.get(w, self.field.zero), c)
        return NCPoly(t, self.field)

    def __neg__(self) -> "NCPoly":
        return NCPoly({w: self.field.neg(c) for w, c in self.terms.items()}, self.field)

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, s) -> "NCPoly":
        s = self.field(s)
        return NCPoly({w: self.field.mul(c, s) for w, c in self.terms.items()}, self.field)

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        F = self.field
        t: dict[Word, object] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = reduce(w1 + w2)
                t[w] = F.add(t.get(w, F.zero), F.mul(c1, c2))
        return NCPoly(t, F)

    def commutator(self, other: "NCPoly") -> "NCPoly":
        return self * other - other * self

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, NCPoly) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def letters(self) -> set[str]:
        return {n for w in self.terms for n, _ in w}

    def sorted_terms(self) -> list[tuple[Word, object]]:
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for w, c in self.sorted_terms():
            c = Fraction(c) if self.field.char == 0 else c
            if self.field.char == 0 and c < 0:
                sign, mag = "-", -c
            else:
                sign, mag = "+", c
            body = format_word(w)
            if mag != 1:
                body = f"{mag}*{body}" if w else str(mag)
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"terms": [{"coeff": str(c), "word": [n if e == 1 else f"{n}^-1" for n, e in w]}
                          for w, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: Mapping, field: Field = QQ) -> "NCPoly":
        return cls([(Fraction(str(t["coeff"])), word(*t["word"])) for t in data["terms"]], field)


def cyclic_class(p: NCPoly) -> dict[CyclicWord, object]:
    """Image of ``p`` in the commutator quotient (ungraded rotation)."""
    F = p.field
    out: dict[CyclicWord, object] = {}
    for w, c in p.terms.items():
        cw = cyclic_canonical(w)
        out[cw] = F.add(out.get(cw, F.zero), c)
    return {k: v for k, v in out.items() if v != 0}


# ---------------------------------------------------------------- potentials


class Potential:
    """Linear combination of cyclic words."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: Mapping[CyclicWord, object] | Iterable[tuple[object, Sequence[Letter]]] = (),
                 field: Field = QQ, quiver: Quiver | None = None):
        self.field = field
        acc: dict[CyclicWord, object] = {}
        if isinstance(terms, Mapping):
            items = [(c, cw.rep) for cw, c in terms.items()]
        else:
            items = list(terms)
        for c, w in items:
            w = reduce(tuple(w), quiver)
            cw = cyclic_canonical(w, quiver)
            acc[cw] = field.add(acc.get(cw, field.zero), field(c))
        self.terms = {k: v for k, v in acc.items() if v != 0}

    @classmethod
    def parse(cls, text: str, field: Field = QQ) -> "Potential":
        """Parse ``"xyz - xzy"`` style input with one-character arrow names."""
        terms = []
        for sign, chunk in _split_signed(text):
            coeff, letters = Fraction(1), chunk
            if "*" in chunk:
                c, letters = chunk.split("*", 1)
                coeff = Fraction(c)
            terms.append((sign * coeff, tuple((ch, 1) for ch in letters)))
        return cls(terms, field)

    def is_zero(self) -> bool:
        return not self.terms

    def letters(self) -> set[str]:
        return {n for cw in self.terms for n, _ in cw.rep}

    def __add__(self, other: "Potential") -> "Potential":
        if self.field != other.field:
            raise FieldMismatchError("potentials over different fields")
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = self.field.add(t.get(k, self.field.zero), v)
        return Potential(t, self.field)

    def scale(self, s) -> "Potential":
        s = self.field(s)
        return Potential({k: self.field.mul(v, s) for k, v in self.terms.items()}, self.field)

    def __eq__(self, other) -> bool:
        return isinstance(other, Potential) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __str__(self) -> str:
        return str(NCPoly({cw.rep: c for cw, c in self.terms.items()}, self.field))

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"terms": [{"coeff": str(c), "word": [n if e == 1 else f"{n}^-1" for n, e in cw.rep]}
                          for cw, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: Mapping, field: Field = QQ, quiver: Quiver | None = None) -> "Potential":
        try:
            terms = [(Fraction(str(t["coeff"])), word(*t["word"])) for t in data["terms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise QuiverError(f"malformed potential JSON: {exc}") from exc
        return cls(terms, field, quiver)


def _split_signed(text: str):
    s = text.replace(" ", "").replace("−", "-")
    if not s:
        return
    if s[0] not in "+-":
        s = "+" + s
    i = 0
    while i < len(s):
        sign = 1 if s[i] == "+" else -1
        j = i + 1
        while j < len(s) and s[j] not in "+-":
            j += 1
        chunk = s[i + 1:j]
        if not chunk:
            raise QuiverError(f"cannot parse potential {text!r}")
        yield sign, chunk
        i = j


def cyclic_derivative(W: Potential, a: str) -> NCPoly:
    """Sum over occurrences of a in each term of the word read cyclically after it."""
    F = W.field
    out: dict[Word, object] = {}
    for cw, c in W.terms.items():
        w = cw.rep
        for i, (name, e) in enumerate(w):
            if name != a:
                continue
            if e == -1:
                raise QuiverError(f"cyclic derivative by {a} of a term containing {a}^-1 is not supported")
            rest = reduce(w[i + 1:] + w[:i])
            out[rest] = F.add(out.get(rest, F.zero), c)
    return NCPoly(out, F)


def jacobi_relations(Q: Quiver, W: Potential) -> list[NCPoly]:
    """One relation per arrow of ``Q``, in arrow order."""
    unknown = W.letters() - set(Q.arrow_names)
    if unknown:
        raise QuiverError(f"potential uses letters not in quiver: {sorted(unknown)}")
    return [cyclic_derivative(W, a) for a in Q.arrow_names]


def necklace_sum(Q: Quiver, W: Potential) -> NCPoly:
    """``sum_a [a, d_a W]`` in the path algebra (zero for every W)."""
    total = NCPoly((), W.field)
    for a, rel in zip(Q.arrow_names, jacobi_relations(Q, W)):
        total = total + NCPoly.monomial(((a, 1),), 1, W.field).commutator(rel)
    return total


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
