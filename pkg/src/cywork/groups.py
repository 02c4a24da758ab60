"""Group models with solvable word problem.

Every model exposes hashable normal forms, multiplication, inverses, word
length with respect to its standard generators, and ordered balls.  Letters
are integers: generator ``j`` is ``2j`` and its inverse is ``2j + 1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

Element = Hashable


class GroupError(ValueError):
    pass


def _inv_letter(l: int) -> int:
    return l ^ 1


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == l ^ 1:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


class GroupModel:
    """Interface shared by all built-in groups."""

    is_abelian: bool = False
    gen_names: tuple[str, ...] = ()

    # subclasses implement these
    def identity(self) -> Element: ...
    def mul(self, g: Element, h: Element) -> Element: ...
    def inv(self, g: Element) -> Element: ...
    def letter(self, l: int) -> Element: ...
    def length(self, g: Element) -> int: ...
    def label(self, g: Element) -> str: ...
    def sort_key(self, g: Element): ...
    def spec(self) -> dict: ...

    # derived operations
    @property
    def ngens(self) -> int:
        return len(self.gen_names)

    def letters(self) -> list[int]:
        return [l for j in range(self.ngens) for l in (2 * j, 2 * j + 1)]

    def from_letters(self, letters: Iterable[int]) -> Element:
        g = self.identity()
        for l in letters:
            g = self.mul(g, self.letter(l))
        return g

    def parse_word(self, text: str | Sequence[str]) -> Element:
        """Parse ``"a b^-1"`` (or a list of tokens); ``"1"`` and ``""`` are the identity."""
        tokens = text.replace(".", " ").split() if isinstance(text, str) else list(text)
        letters = []
        for tok in tokens:
            if tok in ("1", "e"):
                continue
            inv = tok.endswith("^-1")
            name = tok[:-3] if inv else tok
            if name not in self.gen_names:
                raise GroupError(f"unknown generator {name!r}; expected one of {self.gen_names}")
            letters.append(2 * self.gen_names.index(name) + int(inv))
        return self.from_letters(letters)

    def normal_form(self, g: Element) -> Element:
        return g

    def conjugate(self, g: Element, h: Element) -> Element:
        """``h g h^-1``."""
        return self.mul(self.mul(h, g), self.inv(h))

    def ball(self, r: int) -> list[Element]:
        """Elements of word length at most ``r`` ordered by (length, sort key)."""
        seen = {self.identity()}
        layer = [self.identity()]
        out = [self.identity()]
        gens = [self.letter(l) for l in self.letters()]
        for _ in range(r):
            nxt = set()
            for g in layer:
                for s in gens:
                    h = self.mul(g, s)
                    if h not in seen:
                        seen.add(h)
                        nxt.add(h)
            layer = sorted(nxt, key=self.sort_key)
            out.extend(layer)
        return out

    def in_ball(self, g: Element, r: int) -> bool:
        return self.length(g) <= r

    def order_key(self, g: Element):
        return (self.length(g), self.sort_key(g))


# ---------------------------------------------------------------- Z^n


_ABELIAN_NAMES = "xyzw"


class FreeAbelian(GroupModel):
    is_abelian = True

    def __init__(self, n: int):
        if n < 0:
            raise GroupError("rank must be nonnegative")
        self.n = n
        self.gen_names = tuple(_ABELIAN_NAMES[:n]) if n <= 4 else tuple(f"e{i + 1}" for i in range(n))

    def identity(self):
        return (0,) * self.n

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def letter(self, l):
        j, s = divmod(l, 2)
        return tuple((-1 if s else 1) if i == j else 0 for i in range(self.n))

    def length(self, g):
        return sum(abs(a) for a in g)

    def label(self, g):
        return "(" + ",".join(str(a) for a in g) + ")"

    def parse_label(self, text: str):
        t = text.strip()
        if t.startswith("("):
            vals = tuple(int(v) for v in t.strip("()").split(",") if v.strip())
            if len(vals) != self.n:
                raise GroupError(f"expected {self.n} coordinates")
            return vals
        return self.parse_word(t)

    def sort_key(self, g):
        return tuple(g)

    def conjugate(self, g, h):
        return g

    def spec(self):
        return {"type": "free_abelian", "rank": self.n}


# ---------------------------------------------------------------- free groups


class FreeGroup(GroupModel):
    def __init__(self, n: int):
        if n < 0:
            raise GroupError("rank must be nonnegative")
        self.n = n
        self.is_abelian = n <= 1
        self.gen_names = tuple("abcdefgh"[:n]) if n <= 8 else tuple(f"g{i + 1}" for i in range(n))

    def identity(self):
        return ()

    def mul(self, g, h):
        return _free_reduce(g + h)

    def inv(self, g):
        return tuple(l ^ 1 for l in reversed(g))

    def letter(self, l):
        return (l,)

    def length(self, g):
        return len(g)

    def label(self, g):
        return _word_label(g, self.gen_names)

    def parse_label(self, text):
        return self.parse_word(text)

    def sort_key(self, g):
        return tuple(g)

    def spec(self):
        return {"type": "free", "rank": self.n}


def _word_label(letters: Sequence[int], names: Sequence[str]) -> str:
    if not letters:
        return "1"
    return " ".join(names[l // 2] + ("^-1" if l % 2 else "") for l in letters)


# ---------------------------------------------------------------- Klein bottle


class KleinBottle(GroupModel):
    """``<a, b | a b a = b>``; elements ``b^m a^n`` stored as ``(m, n)``.

    From ``a b = b a^-1`` one gets ``(b^m a^n)(b^p a^q) = b^(m+p) a^((-1)^p n + q)``.
    """

    gen_names = ("a", "b")

    def identity(self):
        return (0, 0)

    def mul(self, g, h):
        m, n = g
        p, q = h
        return (m + p, (n if p % 2 == 0 else -n) + q)

    def inv(self, g):
        m, n = g
        # (b^m a^n)^-1 = a^-n b^-m = b^-m a^((-1)^m * -n)
        return (-m, -n if m % 2 == 0 else n)

    def letter(self, l):
        return [(0, 1), (0, -1), (1, 0), (-1, 0)][l]

    def length(self, g):
        return abs(g[0]) + abs(g[1])

    def label(self, g):
        m, n = g
        parts = []
        if m:
            parts.append("b" if m == 1 else f"b^{m}")
        if n:
            parts.append("a" if n == 1 else f"a^{n}")
        return " ".join(parts) or "1"

    def parse_label(self, text):
        t = text.strip()
        toks = t.replace(".", " ").split()
        if any("^" in tok and not tok.endswith("^-1") for tok in toks):
            g = self.identity()
            for tok in toks:
                name, _, e = tok.partition("^")
                k = int(e) if e else 1
                base = self.letter(0 if name == "a" else 2)
                step = base if k > 0 else self.inv(base)
                for _ in range(abs(k)):
                    g = self.mul(g, step)
            return g
        return self.parse_word(t)

    def sort_key(self, g):
        return (g[0], g[1])

    def ball(self, r):
        out = [(m, n) for m in range(-r, r + 1) for n in range(-r, r + 1) if abs(m) + abs(n) <= r]
        return sorted(out, key=self.order_key)

    def spec(self):
        return {"type": "klein_bottle"}


# ---------------------------------------------------------------- products with Z


class ProductWithZ(GroupModel):
    """``G x Z``; the extra generator is named ``t``."""

    def __init__(self, inner: GroupModel):
        self.inner = inner
        self.is_abelian = inner.is_abelian
        name = "t"
        while name in inner.gen_names:
            name += "'"
        self.gen_names = tuple(inner.gen_names) + (name,)

    def identity(self):
        return (self.inner.identity(), 0)

    def mul(self, g, h):
        return (self.inner.mul(g[0], h[0]), g[1] + h[1])

    def inv(self, g):
        return (self.inner.inv(g[0]), -g[1])

    def letter(self, l):
        j = l // 2
        if j < self.inner.ngens:
            return (self.inner.letter(l), 0)
        return (self.inner.identity(), -1 if l % 2 else 1)

    def length(self, g):
        return self.inner.length(g[0]) + abs(g[1])

    def label(self, g):
        return f"({self.inner.label(g[0])}, {g[1]})"

    def sort_key(self, g):
        return (self.inner.order_key(g[0]), g[1])

    def ball(self, r):
        out = []
        for h in self.inner.ball(r):
            k = r - self.inner.length(h)
            out.extend((h, t) for t in range(-k, k + 1))
        return sorted(out, key=self.order_key)

    def in_ball(self, g, r):
        return abs(g[1]) <= r and self.inner.in_ball(g[0], r - abs(g[1]))

    def spec(self):
        return {"type": "product_with_Z", "inner": self.inner.spec()}


# ---------------------------------------------------------------- surface groups


class SurfaceGroup(GroupModel):
    """Closed orientable surface group of genus ``g >= 2``.

    The word problem is solved with Dehn's algorithm for the symmetrized
    relator ``[a1,b1]...[ag,bg]``.  Normal forms are shortlex-least geodesics,
    obtained from a breadth-first enumeration of balls; equal elements are
    matched by homomorphic fingerprints and confirmed by Dehn reduction.
    """

    def __init__(self, genus: int, seed: int = 0, max_radius: int = 8):
        if genus < 2:
            raise GroupError("surface_group needs genus >= 2")
        self.genus = genus
        self.seed = seed
        self.max_radius = max_radius
        self.gen_names = tuple(n for i in range(1, genus + 1) for n in (f"a{i}", f"b{i}"))
        rel = []
        for i in range(genus):
            a, b = 4 * i, 4 * i + 2
            rel += [a, b, a ^ 1, b ^ 1]
        self.relator = tuple(rel)
        self._build_table()
        self._build_fingerprints(seed)
        # ball state
        self._canon: dict[tuple, tuple] = {(): ()}
        self._by_fp: dict[tuple, list[tuple]] = {self.fingerprint(()): [()]}
        self._layers: list[list[tuple]] = [[()]]
        self._fps: dict[tuple, tuple] = {(): self.fingerprint(())}

    # Dehn's algorithm
    def _build_table(self):
        L = len(self.relator)
        half = L // 2
        sym = set()
        for r in (self.relator, tuple(l ^ 1 for l in reversed(self.relator))):
            for i in range(L):
                sym.add(r[i:] + r[:i])
        table: dict[tuple, tuple] = {}
        for r in sorted(sym):
            for k in range(half + 1, L + 1):
                u, v = r[:k], r[k:]
                table[u] = tuple(l ^ 1 for l in reversed(v))
        self._table = table
        self._lens = tuple(range(L, half, -1))

    def dehn(self, letters: Iterable[int]) -> tuple[int, ...]:
        stack: list[int] = []
        todo = list(reversed(list(letters)))
        table, lens = self._table, self._lens
        while todo:
            l = todo.pop()
            if stack and stack[-1] == l ^ 1:
                stack.pop()
                continue
            stack.append(l)
            n = len(stack)
            for k in lens:
                if n >= k:
                    rep = table.get(tuple(stack[n - k:]))
                    if rep is not None:
                        del stack[n - k:]
                        todo.extend(reversed(rep))
                        break
        return tuple(stack)

    def is_trivial_word(self, letters: Iterable[int]) -> bool:
        return not self.dehn(letters)

    # fingerprints: abelianisation plus permutation images
    def _build_fingerprints(self, seed: int):
        rng = random.Random(seed)
        deg = 13
        reps = []
        g = self.genus
        for mode in range(4):
            p = list(range(deg)); rng.shuffle(p)
            q = list(range(deg)); rng.shuffle(q)
            ident = list(range(deg))
            imgs = []
            for i in range(g):
                if mode == 0:
                    pair = (p, q) if i % 2 == 0 else (q, p)
                    if g % 2 == 1 and i == g - 1:
                        pair = (ident, ident)
                elif mode == 1:
                    pair = (p if i % 2 == 0 else q, ident)
                elif mode == 2:
                    pair = (ident, p if i % 2 == 0 else q)
                else:
                    pair = (p, q) if i == 0 else ((q, p) if i == 1 else (ident, ident))
                imgs.extend(pair)
            table = []
            for perm in imgs:
                inv = [0] * deg
                for x, y in enumerate(perm):
                    inv[y] = x
                table.append((tuple(perm), tuple(inv)))
            reps.append(table)
        self._reps = reps
        self._deg = deg

    def fingerprint(self, letters: Sequence[int]) -> tuple:
        ab = [0] * (2 * self.genus)
        for l in letters:
            ab[l // 2] += -1 if l % 2 else 1
        out = [tuple(ab)]
        for table in self._reps:
            cur = tuple(range(self._deg))
            for l in letters:
                perm = table[l // 2][l % 2]
                cur = tuple(perm[x] for x in cur)
            out.append(cur)
        return tuple(out)

    def _extend_fp(self, fp: tuple, l: int) -> tuple:
        ab = list(fp[0])
        ab[l // 2] += -1 if l % 2 else 1
        out = [tuple(ab)]
        for table, cur in zip(self._reps, fp[1:]):
            perm = table[l // 2][l % 2]
            out.append(tuple(perm[x] for x in cur))
        return tuple(out)

    def _match(self, word: tuple, fp: tuple) -> tuple | None:
        for c in self._by_fp.get(fp, ()):
            if not self.dehn(word + tuple(l ^ 1 for l in reversed(c))):
                return c
        return None

    @property
    def radius(self) -> int:
        return len(self._layers) - 1

    def grow(self, r: int) -> None:
        """Enumerate the ball of radius ``r``."""
        if r > self.max_radius:
            raise GroupError(f"radius {r} exceeds the configured cap {self.max_radius}")
        gens = self.letters()
        while self.radius < r:
            k = self.radius
            new: list[tuple] = []
            for w in self._layers[k]:
                fpw = self._fps[w]
                for s in gens:
                    if w and w[-1] == s ^ 1:
                        continue
                    cand = w + (s,)
                    red = self.dehn(cand)
                    if red in self._canon:
                        continue
                    fp = self._extend_fp(fpw, s)
                    c = self._match(red, fp)
                    if c is not None:
                        self._canon[red] = c
                        continue
                    self._canon[red] = cand
                    self._canon[cand] = cand
                    self._fps[cand] = fp
                    self._by_fp.setdefault(fp, []).append(cand)
                    new.append(cand)
            self._layers.append(new)

    def canonical(self, letters: Iterable[int], cap: int | None = None) -> tuple:
        red = self.dehn(letters)
        c = self._canon.get(red)
        if c is not None:
            return c
        fp = self.fingerprint(red)
        if self.radius < len(red) and len(red) <= (cap if cap is not None else self.max_radius):
            self.grow(len(red))
        c = self._canon.get(red) or self._match(red, fp)
        if c is None:
            raise GroupError("element is outside the enumerated ball; raise max_radius")
        self._canon[red] = c
        return c

    def lookup(self, letters: Iterable[int], r: int) -> tuple | None:
        """Normal form if the element has length at most ``r``, else ``None``."""
        if self.radius < r:
            self.grow(r)
        red = self.dehn(letters)
        c = self._canon.get(red)
        if c is not None:
            return c if len(c) <= r else None
        if len(red) <= r:
            return self.canonical(red)
        c = self._match(red, self.fingerprint(red))
        if c is not None:
            self._canon[red] = c
            return c if len(c) <= r else None
        return None

    def identity(self):
        return ()

    def mul(self, g, h):
        return self.canonical(g + h)

    def inv(self, g):
        return self.canonical(tuple(l ^ 1 for l in reversed(g)))

    def letter(self, l):
        return (l,)

    def length(self, g):
        return len(g)

    def label(self, g):
        return _word_label(g, self.gen_names)

    def parse_label(self, text):
        return self.parse_word(text)

    def from_letters(self, letters):
        return self.canonical(tuple(letters))

    def sort_key(self, g):
        return tuple(g)

    def ball(self, r):
        self.grow(r)
        return [w for layer in self._layers[:r + 1] for w in sorted(layer)]

    def in_ball(self, g, r):
        return len(g) <= r

    def conjugate_lookup(self, g: tuple, h: tuple, r: int) -> tuple | None:
        return self.lookup(h + g + tuple(l ^ 1 for l in reversed(h)), r)

    def spec(self):
        return {"type": "surface", "genus": self.genus}


# ---------------------------------------------------------------- specs


def from_spec(spec: Mapping) -> GroupModel:
    try:
        kind = spec["type"]
        if kind == "free_abelian":
            return FreeAbelian(int(spec["rank"]))
        if kind == "free":
            return FreeGroup(int(spec["rank"]))
        if kind == "klein_bottle":
            return KleinBottle()
        if kind == "surface":
            return SurfaceGroup(int(spec["genus"]))
        if kind == "product_with_Z":
            return ProductWithZ(from_spec(spec["inner"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupError(f"malformed group spec: {exc}") from exc
    raise GroupError(f"unknown group type {spec.get('type')!r}")


free_abelian = FreeAbelian
free_group = FreeGroup
klein_bottle = KleinBottle
surface_group = SurfaceGroup
direct_product_with_Z = ProductWithZ


# ---------------------------------------------------------------- conjugacy


def _conj_in_ball(m: GroupModel, g, h_letter: int, r: int):
    if isinstance(m, SurfaceGroup):
        return m.conjugate_lookup(g, (h_letter,), r)
    x = m.conjugate(g, m.letter(h_letter))
    return x if m.in_ball(x, r) else None


@dataclass(frozen=True)
class ConjugacyExploration:
    elements: tuple
    closed: bool


def conjugacy_class_in_ball(m: GroupModel, g, R: int, early_abort: bool = False) -> ConjugacyExploration:
    """Orbit of ``g`` under conjugation by generators, restricted to ``ball(R)``."""
    if not m.in_ball(g, R):
        raise GroupError("g must lie in ball(R)")
    if m.is_abelian:
        return ConjugacyExploration((g,), True)
    seen = {g}
    frontier = [g]
    closed = True
    letters = m.letters()
    while frontier:
        nxt = []
        for x in frontier:
            for l in letters:
                y = _conj_in_ball(m, x, l, R)
                if y is None:
                    closed = False
                    if early_abort:
                        return ConjugacyExploration(tuple(sorted(seen, key=m.order_key)), False)
                    continue
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return ConjugacyExploration(tuple(sorted(seen, key=m.order_key)), closed)


@dataclass(frozen=True)
class ClassSum:
    """``s_c``: the sum of the elements of a finite conjugacy class."""

    elements: tuple
    labels: tuple[str, ...]
    trivial: bool = False

    def to_json(self) -> dict:
        return {"elements": list(self.labels), "size": len(self.labels)}


@dataclass(frozen=True)
class CentralUnitReport:
    radius: int
    candidates: tuple[ClassSum, ...]
    examined: int

    @property
    def nontrivial(self) -> tuple[ClassSum, ...]:
        return tuple(c for c in self.candidates if not c.trivial)

    @property
    def verdict(self) -> str:
        return "FOUND" if self.nontrivial else f"NONE_FOUND({self.radius})"

    def to_json(self, limit: int = 50) -> dict:
        return {
            "radius": self.radius,
            "verdict": self.verdict,
            "elements_examined": self.examined,
            "finite_classes": len(self.candidates),
            "finite_nontrivial_classes": len(self.nontrivial),
            "class_sums": [c.to_json() for c in self.candidates[:limit]],
            "truncated_listing": len(self.candidates) > limit,
            "note": "finite classes are those whose orbit closed inside the ball; absence is evidence, not proof",
        }


def central_unit_search(m: GroupModel, R: int) -> CentralUnitReport:
    """Class sums of conjugacy classes found to be finite inside ``ball(R)``."""
    done = set()
    found = []
    ball = m.ball(R)
    for g in ball:
        if g in done:
            continue
        ex = conjugacy_class_in_ball(m, g, R, early_abort=True)
        done.update(ex.elements)
        if ex.closed:
            found.append(ClassSum(ex.elements, tuple(m.label(x) for x in ex.elements),
                                  ex.elements == (m.identity(),)))
    return CentralUnitReport(R, tuple(found), len(ball))
