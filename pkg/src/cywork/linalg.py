"""Exact linear algebra over Q and F_p, and homology of bounded chain complexes.

Vectors are sparse dicts ``{index: value}`` with no stored zeros.  Over Q the
elimination is fraction-free: rows are kept as primitive integer vectors and
combined as ``p*r - a*s``, which keeps coefficients small on the sparse
complexes coming from triangulations.  Over F_p values are ints in ``[0, p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class FieldMismatchError(ValueError):
    """Raised when objects over different fields are combined."""


class ChainComplexError(ValueError):
    """Raised when a chain complex fails validation (shapes or d^2 = 0)."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class Field:
    """The rationals (``char == 0``) or the prime field F_p."""

    char: int = 0

    def __post_init__(self):
        if self.char != 0 and not _is_prime(self.char):
            raise ValueError(f"characteristic must be 0 or prime, got {self.char}")

    @classmethod
    def parse(cls, spec: str) -> "Field":
        """Parse ``q``, ``f2`` or ``fp:<p>``."""
        s = spec.strip().lower()
        if s in ("q", "qq", "0"):
            return cls(0)
        if s.startswith("fp:"):
            return cls(int(s[3:]))
        if s.startswith("f") and s[1:].isdigit():
            return cls(int(s[1:]))
        raise ValueError(f"unknown field {spec!r}")

    @property
    def label(self) -> str:
        return "Q" if self.char == 0 else f"F{self.char}"

    def __call__(self, x) -> Fraction | int:
        """Coerce an int, Fraction or numeric string into this field."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.char == 0:
            return Fraction(x)
        p = self.char
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{p}")
            return x.numerator * pow(x.denominator, -1, p) % p
        return int(x) % p

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def inv(self, x):
        if self.char == 0:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.char)

    def neg(self, x):
        return -x if self.char == 0 else (-x) % self.char

    def add(self, x, y):
        return x + y if self.char == 0 else (x + y) % self.char

    def mul(self, x, y):
        return x * y if self.char == 0 else (x * y) % self.char


QQ = Field(0)
F2 = Field(2)


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable sparse matrix; ``rows_map[i][j]`` holds nonzero entries."""

    nrows: int
    ncols: int
    rows_map: Mapping[int, Mapping[int, object]]
    field: Field = QQ

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries, field: Field = QQ) -> "SparseMatrix":
        """Build from ``{(i, j): value}`` or an iterable of ``(i, j, value)``.

        Repeated positions are summed; zeros are dropped.
        """
        items = entries.items() if isinstance(entries, Mapping) else (((i, j), v) for i, j, v in entries)
        rows: dict[int, dict[int, object]] = {}
        for (i, j), v in items:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            row = rows.setdefault(i, {})
            row[j] = field.add(row.get(j, field.zero), field(v))
        clean = {}
        for i, row in rows.items():
            row = {j: v for j, v in row.items() if v != 0}
            if row:
                clean[i] = row
        return cls(nrows, ncols, clean, field)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field: Field = QQ) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        return cls.from_entries(
            nrows, ncols, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v != 0}, field
        )

    @classmethod
    def zero(cls, nrows: int, ncols: int, field: Field = QQ) -> "SparseMatrix":
        return cls(nrows, ncols, {}, field)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def entries(self):
        for i, row in self.rows_map.items():
            for j, v in row.items():
                yield i, j, v

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows_map.values())

    def is_zero(self) -> bool:
        return not self.rows_map

    def get(self, i: int, j: int):
        return self.rows_map.get(i, {}).get(j, self.field.zero)

    def to_dense(self) -> list[list]:
        out = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_entries(
            self.ncols, self.nrows, ((j, i, v) for i, j, v in self.entries()), self.field
        )

    def columns(self) -> list[dict[int, object]]:
        cols: list[dict[int, object]] = [{} for _ in range(self.ncols)]
        for i, j, v in self.entries():
            cols[j][i] = v
        return cols

    def apply(self, vec: Mapping[int, object]) -> dict[int, object]:
        """Matrix times a sparse column vector."""
        F = self.field
        out: dict[int, object] = {}
        for i, row in self.rows_map.items():
            s = F.zero
            for j, v in vec.items():
                e = row.get(j)
                if e is not None:
                    s = F.add(s, F.mul(e, v))
            if s != 0:
                out[i] = s
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field.label} @ {other.field.label}")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        F = self.field
        out: dict[tuple[int, int], object] = {}
        for i, row in self.rows_map.items():
            for k, a in row.items():
                orow = other.rows_map.get(k)
                if not orow:
                    continue
                for j, b in orow.items():
                    out[(i, j)] = F.add(out.get((i, j), F.zero), F.mul(a, b))
        return SparseMatrix.from_entries(self.nrows, other.ncols, out, F)


def stack_rows(mats: Sequence[SparseMatrix]) -> SparseMatrix:
    """Vertical concatenation; all blocks must share one field."""
    fields = {m.field for m in mats}
    if len(fields) > 1:
        raise FieldMismatchError("cannot stack matrices over " + ", ".join(sorted(f.label for f in fields)))
    ncols = {m.ncols for m in mats}
    if len(ncols) > 1:
        raise ValueError("column counts differ")
    F = fields.pop() if fields else QQ
    entries, off = [], 0
    for m in mats:
        entries.extend((i + off, j, v) for i, j, v in m.entries())
        off += m.nrows
    return SparseMatrix.from_entries(off, ncols.pop() if ncols else 0, entries, F)


# ---------------------------------------------------------------- elimination


def _content_normalize(row: dict, tag: dict | None):
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
    if tag:
        for v in tag.values():
            g = math.gcd(g, v)
    if g > 1:
        row = {k: v // g for k, v in row.items()}
        if tag is not None:
            tag = {k: v // g for k, v in tag.items()}
    return row, tag


def _to_integer_row(vec: Mapping[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in vec.values():
        den = den * Fraction(v).denominator // math.gcd(den, Fraction(v).denominator)
    return {k: int(Fraction(v) * den) for k, v in vec.items() if v != 0}


class Echelon:
    """Incremental row-echelon basis of sparse vectors.

    With ``track=True`` each vector carries a tag (a sparse combination of
    labels) that is transformed alongside it, so a vector that reduces to
    zero yields a linear dependency among the inputs.
    """

    def __init__(self, field: Field = QQ, track: bool = False):
        self.field = field
        self.track = track
        self.pivots: dict[int, tuple[dict, dict | None]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def _prepare(self, vec, tag):
        if self.field.char == 0:
            if tag is None:
                return _to_integer_row(vec), None
            # scale vec and tag together
            den = 1
            for v in list(vec.values()) + list(tag.values()):
                d = Fraction(v).denominator
                den = den * d // math.gcd(den, d)
            return (
                {k: int(Fraction(v) * den) for k, v in vec.items() if v != 0},
                {k: int(Fraction(v) * den) for k, v in tag.items() if v != 0},
            )
        F = self.field
        row = {k: F(v) for k, v in vec.items()}
        row = {k: v for k, v in row.items() if v}
        if tag is not None:
            tag = {k: F(v) for k, v in tag.items()}
            tag = {k: v for k, v in tag.items() if v}
        return row, tag

    def reduce(self, vec: Mapping[int, object], tag: Mapping | None = None):
        """Reduce ``vec`` against the basis; return ``(remainder, tag)``.

        Over Q the remainder is only determined up to a nonzero scalar (the
        returned tag is scaled consistently).
        """
        row, tg = self._prepare(vec, tag)
        return self._reduce(row, tg)

    def _reduce(self, row, tg):
        p = self.field.char
        pivots = self.pivots
        while row:
            hit = None
            for c in sorted(row):
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            prow, ptag = pivots[hit]
            a = row[hit]
            if p == 0:
                pv = prow[hit]
                new = {k: pv * v for k, v in row.items()}
                for k, v in prow.items():
                    nv = new.get(k, 0) - a * v
                    if nv:
                        new[k] = nv
                    else:
                        new.pop(k, None)
                if tg is not None:
                    nt = {k: pv * v for k, v in tg.items()}
                    for k, v in (ptag or {}).items():
                        nv = nt.get(k, 0) - a * v
                        if nv:
                            nt[k] = nv
                        else:
                            nt.pop(k, None)
                    tg = nt
                row, tg = _content_normalize(new, tg)
            else:
                new = dict(row)
                for k, v in prow.items():
                    nv = (new.get(k, 0) - a * v) % p
                    if nv:
                        new[k] = nv
                    else:
                        new.pop(k, None)
                if tg is not None:
                    nt = dict(tg)
                    for k, v in (ptag or {}).items():
                        nv = (nt.get(k, 0) - a * v) % p
                        if nv:
                            nt[k] = nv
                        else:
                            nt.pop(k, None)
                    tg = nt
                row = new
        return row, tg

    def add(self, vec: Mapping[int, object], tag: Mapping | None = None):
        """Insert ``vec``.  Returns ``None`` if it was independent, else the
        tag of the dependency it reduced to (``{}`` when not tracking)."""
        row, tg = self.reduce(vec, tag)
        if not row:
            return tg if tg is not None else {}
        lead = min(row)
        if self.field.char == 0:
            if row[lead] < 0:
                row = {k: -v for k, v in row.items()}
                if tg is not None:
                    tg = {k: -v for k, v in tg.items()}
        else:
            inv = pow(row[lead], -1, self.field.char)
            p = self.field.char
            row = {k: v * inv % p for k, v in row.items()}
            if tg is not None:
                tg = {k: v * inv % p for k, v in tg.items()}
        self.pivots[lead] = (row, tg)
        return None

    def contains(self, vec: Mapping[int, object]) -> bool:
        row, _ = self.reduce(vec)
        return not row


def _rational_vec(vec: Mapping[int, object], field: Field) -> dict[int, object]:
    """Primitive integer vectors are returned as-is over Q (content 1)."""
    return {k: field(v) for k, v in vec.items() if v}


def rank(m: SparseMatrix) -> int:
    ech = Echelon(m.field)
    for _, row in sorted(m.rows_map.items(), key=lambda kv: len(kv[1])):
        ech.add(row)
    return len(ech)


def kernel_basis(m: SparseMatrix) -> list[dict[int, object]]:
    """Sparse basis of ``{v : m v = 0}`` with primitive integer entries over Q."""
    ech = Echelon(m.field, track=True)
    cols = m.columns()
    basis = []
    order = sorted(range(m.ncols), key=lambda j: len(cols[j]))
    for j in order:
        dep = ech.add(cols[j], {j: 1})
        if dep is not None:
            basis.append(_rational_vec(dep, m.field))
    return basis


def rank_and_kernel(m: SparseMatrix) -> tuple[int, list[tuple]]:
    """Rank of ``m`` and a dense kernel basis (``rank + len(kernel) == ncols``)."""
    kb = kernel_basis(m)
    dense = [tuple(v.get(j, m.field.zero) for j in range(m.ncols)) for v in kb]
    return m.ncols - len(kb), dense


# ---------------------------------------------------------------- chain complexes


@dataclass(frozen=True)
class BoundedChainComplex:
    """Homologically graded complex ``C_lo ... C_hi``.

    ``differentials[n]`` is ``d_n : C_n -> C_{n-1}`` as a ``dims[n-1] x dims[n]``
    matrix; missing degrees are zero maps.
    """

    dims: Mapping[int, int]
    differentials: Mapping[int, SparseMatrix]
    field: Field = QQ
    check: bool = dc_field(default=True, compare=False)

    def __post_init__(self):
        if not self.check:
            return
        lo, hi = self.degrees
        if sorted(self.dims) != list(range(lo, hi + 1)):
            raise ChainComplexError("degrees must form a contiguous range")
        for n, d in self.differentials.items():
            if d.field != self.field:
                raise FieldMismatchError(f"d_{n} is over {d.field.label}, complex over {self.field.label}")
            if d.shape != (self.dims.get(n - 1, 0), self.dims.get(n, 0)):
                raise ChainComplexError(f"d_{n} has shape {d.shape}, expected "
                                        f"{(self.dims.get(n - 1, 0), self.dims.get(n, 0))}")
        for n in range(lo, hi + 1):
            d1, d0 = self.differentials.get(n + 1), self.differentials.get(n)
            if d1 is not None and d0 is not None and not (d0 @ d1).is_zero():
                raise ChainComplexError(f"d^2 != 0: d_{n} o d_{n + 1} is nonzero")

    @property
    def degrees(self) -> tuple[int, int]:
        return (min(self.dims), max(self.dims)) if self.dims else (0, -1)

    def d(self, n: int) -> SparseMatrix:
        m = self.differentials.get(n)
        if m is None:
            return SparseMatrix.zero(self.dims.get(n - 1, 0), self.dims.get(n, 0), self.field)
        return m

    def dual(self) -> "BoundedChainComplex":
        """Cochain complex regraded homologically: degree n becomes -n."""
        dims = {-n: k for n, k in self.dims.items()}
        diffs = {-(n - 1): m.transpose() for n, m in self.differentials.items()}
        return BoundedChainComplex(dims, diffs, self.field)


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    betti: int
    representatives: tuple[dict[int, object], ...] = ()


def homology(c: BoundedChainComplex, representatives: bool = False) -> dict[int, HomologyGroup]:
    """Per-degree Betti numbers, optionally with representative cycles."""
    out = {}
    lo, hi = c.degrees
    ranks = {n: rank(c.d(n)) for n in range(lo, hi + 2)}
    for n in range(lo, hi + 1):
        betti = c.dims[n] - ranks[n] - ranks[n + 1]
        reps: tuple = ()
        if representatives and betti:
            reps = tuple(_representatives(c, n, betti))
        out[n] = HomologyGroup(n, betti, reps)
    return out


def betti_numbers(c: BoundedChainComplex) -> dict[int, int]:
    return {n: h.betti for n, h in homology(c).items()}


def _representatives(c: BoundedChainComplex, n: int, betti: int) -> list[dict]:
    ech = Echelon(c.field)
    for col in c.d(n + 1).columns():
        if col:
            ech.add(col)
    reps = []
    for z in kernel_basis(c.d(n)):
        if ech.add(z) is None:
            reps.append(z)
            if len(reps) == betti:
                break
    return reps


class CycleReducer:
    """Coordinates of cycles in a homology basis modulo boundaries."""

    def __init__(self, field: Field, boundaries: Iterable[Mapping], reps: Sequence[Mapping]):
        self.field = field
        self.ech = Echelon(field, track=True)
        for b in boundaries:
            if b:
                self.ech.add(b, {})
        self.nreps = 0
        for r in reps:
            if self.ech.add(r, {self.nreps: 1}) is not None:
                raise ValueError("representatives are dependent modulo boundaries")
            self.nreps += 1

    def coordinates(self, z: Mapping) -> tuple:
        """Coefficients ``c`` with ``z = sum c_i rep_i + boundary``.

        Raises ``ValueError`` when ``z`` is not in the span.
        """
        F = self.field
        rem, tag = self.ech.reduce(z, {-1: 1})
        if rem:
            raise ValueError("vector is not in span of representatives and boundaries")
        scale = tag.get(-1, 0)
        # the tag records scale*z as minus the combination of stored rows
        inv = F.neg(F.inv(scale))
        return tuple(F.mul(F(tag.get(i, 0)), inv) for i in range(self.nreps))

    def is_boundary(self, z: Mapping) -> bool:
        return not any(self.coordinates(z))


# ---------------------------------------------------------------- integer systems


@dataclass(frozen=True)
class Feasible:
    witness: dict


@dataclass(frozen=True)
class Infeasible:
    """``kind`` is ``"rational"`` (y.A = 0, y.b != 0), ``"forced"`` (a variable
    equals a non-integer on the rational solution set) or ``"lattice"``
    (y.A integral, y.b not)."""

    kind: str
    multipliers: tuple
    variable: object = None
    value: Fraction | None = None


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots, r = [], 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def _solve_left(A: list[list[Fraction]], target: list[Fraction]) -> list[Fraction]:
    """Some ``y`` with ``y^T A = target`` (assumed solvable)."""
    m, n = len(A), len(target)
    aug = [[A[i][j] for i in range(m)] + [target[j]] for j in range(n)]
    red, piv = _rref(aug)
    y = [Fraction(0)] * m
    for r, c in enumerate(piv):
        if c == m:
            raise ValueError("target not in row space")
        y[c] = red[r][m]
    return y


def _hnf_columns(A: list[list[int]]):
    """Column-style Hermite reduction of a full-row-rank integer matrix.

    Returns ``(H, U)`` with ``A U = [H | 0]``, ``H`` lower triangular with
    positive diagonal and ``U`` unimodular.
    """
    m, n = len(A), len(A[0])
    M = [list(r) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for X in (M, U):
            for row in X:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    for i in range(m):
        for j in range(i + 1, n):
            if M[i][j] == 0:
                continue
            x, y = M[i][i], M[i][j]
            g, s, t = _xgcd(x, y)
            colop(i, j, s, t, -y // g, x // g)
        if M[i][i] < 0:
            for X in (M, U):
                for row in X:
                    row[i] = -row[i]
        if M[i][i] == 0:
            raise ValueError("matrix is not of full row rank")
    H = [row[:m] for row in M]
    return H, U


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def integer_feasible(equations: Sequence[tuple[Mapping, int]], unknowns: Sequence) -> Feasible | Infeasible:
    """Decide whether ``sum_j c_j x_j = rhs`` (all equations) has an integer solution.

    ``equations`` is a list of ``(coeffs, rhs)`` with ``coeffs`` a mapping from
    unknown to integer.  Infeasibility comes with a re-checkable certificate.
    """
    unknowns = list(unknowns)
    idx = {u: k for k, u in enumerate(unknowns)}
    n = len(unknowns)
    A, b = [], []
    for coeffs, rhs in equations:
        row = [0] * n
        for u, c in coeffs.items():
            if u not in idx:
                raise ValueError(f"unknown {u!r} not declared")
            if int(c) != c:
                raise ValueError("coefficients must be integers")
            row[idx[u]] += int(c)
        A.append(row)
        b.append(int(rhs))
    if not A:
        return Feasible({u: 0 for u in unknowns})

    # rational consistency, with multipliers for the contradiction
    aug = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] + [Fraction(int(i == k)) for k in range(len(A))]
           for i in range(len(A))]
    red, piv = _rref(aug)
    for r, c in enumerate(piv):
        if c == n:
            y = tuple(red[r][n + 1:])
            return Infeasible("rational", y)
        if c > n:
            break
    core = [p for p in piv if p < n]

    # rational solution set: particular solution and free directions
    particular = [Fraction(0)] * n
    for r, c in enumerate(core):
        particular[c] = red[r][n]
    free = [j for j in range(n) if j not in core]
    forced = []
    for r, c in enumerate(core):
        if all(red[r][j] == 0 for j in free):
            forced.append(c)
    for c in sorted(forced, key=lambda j: str(unknowns[j])):
        if particular[c].denominator != 1:
            target = [Fraction(int(j == c)) for j in range(n)]
            y = _solve_left([[Fraction(v) for v in row] for row in A], target)
            return Infeasible("forced", tuple(y), unknowns[c], particular[c])

    # maximal independent subset of the original rows
    ech = Echelon(QQ)
    keep = [i for i in range(len(A)) if ech.add({j: v for j, v in enumerate(A[i]) if v}) is None]
    if not keep:
        return Feasible({u: 0 for u in unknowns})
    Ak = [A[i] for i in keep]
    bk = [b[i] for i in keep]
    H, U = _hnf_columns(Ak)
    m = len(Ak)
    z = [Fraction(0)] * m
    for k in range(m):
        s = Fraction(bk[k]) - sum(H[k][j] * z[j] for j in range(k))
        z[k] = s / H[k][k]
        if z[k].denominator != 1:
            # row k of H^{-1}: solve e_k = y H
            target = [Fraction(int(j == k)) for j in range(m)]
            yk = _solve_left([[Fraction(v) for v in row] for row in H], target)
            y = [Fraction(0)] * len(A)
            for pos, i in enumerate(keep):
                y[i] = yk[pos]
            return Infeasible("lattice", tuple(y))
    full = [int(v) for v in z] + [0] * (n - m)
    x = [sum(U[i][j] * full[j] for j in range(n)) for i in range(n)]
    return Feasible({unknowns[i]: x[i] for i in range(n)})


def check_certificate(equations: Sequence[tuple[Mapping, int]], unknowns: Sequence,
                      result: Feasible | Infeasible) -> bool:
    """Independent re-verification of an ``integer_feasible`` verdict."""
    unknowns = list(unknowns)
    if isinstance(result, Feasible):
        return all(
            sum(int(c) * result.witness[u] for u, c in coeffs.items()) == rhs for coeffs, rhs in equations
        )
    y = result.multipliers
    comb = {u: sum(Fraction(y[i]) * eq[0].get(u, 0) for i, eq in enumerate(equations)) for u in unknowns}
    rhs = sum(Fraction(y[i]) * eq[1] for i, eq in enumerate(equations))
    if result.kind == "rational":
        return all(v == 0 for v in comb.values()) and rhs != 0
    if result.kind == "forced":
        return (all(v == (1 if u == result.variable else 0) for u, v in comb.items())
                and rhs == result.value and rhs.denominator != 1)
    return all(v.denominator == 1 for v in comb.values()) and rhs.denominator != 1
