"""Exact integer lattice algebra and coefficient arithmetic.

Everything here works with Python integers and :class:`fractions.Fraction`,
so nothing overflows and nothing is rounded.  Floating point lives in
:mod:`tropper.amoeba` only.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

IntVector = tuple[int, ...]
IntMatrix = list[list[int]]


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


class GaussianRational:
    """An element ``re + im*i`` of Q(i).

    Results whose imaginary part vanishes collapse to :class:`Fraction`, so the
    common real case never pays for the complex bookkeeping.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def make(re, im):
        re, im = Fraction(re), Fraction(im)
        if im == 0:
            return re
        return GaussianRational(re, im)

    @staticmethod
    def _parts(x):
        if isinstance(x, GaussianRational):
            return x.re, x.im
        return Fraction(x), Fraction(0)

    def __add__(self, other):
        a, b = self._parts(other)
        return self.make(self.re + a, self.im + b)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        a, b = self._parts(other)
        return self.make(self.re - a, self.im - b)

    def __rsub__(self, other):
        a, b = self._parts(other)
        return self.make(a - self.re, b - self.im)

    def __mul__(self, other):
        a, b = self._parts(other)
        return self.make(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._parts(other)
        n = a * a + b * b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self.make((self.re * a + self.im * b) / n, (self.im * a - self.re * b) / n)

    def __rtruediv__(self, other):
        return GaussianRational(*self._parts(other)) / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return 1 / (self ** (-e))
        out: Fraction | GaussianRational = Fraction(1)
        base: Fraction | GaussianRational = self
        while e:
            if e & 1:
                out = base * out
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        try:
            a, b = self._parts(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == a and self.im == b

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.re == 0:
            return f"{_frac_str(self.im)}*I"
        sign = "+" if self.im > 0 else "-"
        return f"({_frac_str(self.re)} {sign} {_frac_str(abs(self.im))}*I)"


Scalar = Fraction | GaussianRational


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def scalar(x) -> Scalar:
    """Coerce ints, Fractions, numeric strings and sympy numbers to an exact scalar."""
    if isinstance(x, (Fraction, GaussianRational)):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floating point values are not exact scalars")
    # sympy numbers
    import sympy

    x = sympy.nsimplify(x) if isinstance(x, sympy.Float) else x
    re, im = sympy.re(x), sympy.im(x)
    if not (re.is_Rational and im.is_Rational):
        raise ValueError(f"{x} is not an element of Q(i)")
    return GaussianRational.make(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def scalar_str(c: Scalar) -> str:
    return _frac_str(c) if isinstance(c, Fraction) else str(c)


# ---------------------------------------------------------------------------
# integer lattices
# ---------------------------------------------------------------------------


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> IntVector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def det(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with each diagonal
    entry dividing the next; diagonal entries are non-negative.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    D = [list(map(int, r)) for r in M]
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):  # row_dst -= q * row_src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):  # col_dst -= q * col_src
        for r in D:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    for s in range(min(rows, cols)):
        while True:
            pivot = None
            for i in range(s, rows):
                for j in range(s, cols):
                    if D[i][j] != 0 and (pivot is None or abs(D[i][j]) < abs(D[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(s, pivot[0])
            swap_cols(s, pivot[1])
            done = True
            for i in range(s + 1, rows):
                q = D[i][s] // D[s][s]
                if q:
                    add_row(s, i, q)
                if D[i][s] != 0:
                    done = False
            for j in range(s + 1, cols):
                q = D[s][j] // D[s][s]
                if q:
                    add_col(s, j, q)
                if D[s][j] != 0:
                    done = False
            if not done:
                continue
            # enforce divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(s + 1, rows) for j in range(s + 1, cols) if D[i][j] % D[s][s]),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], s, -1)  # row_s += row_bad, then re-reduce
        if s < rows and s < cols and D[s][s] < 0:
            D[s] = [-x for x in D[s]]
            U[s] = [-x for x in U[s]]
    return U, D, V


def smith_diagonal(M: Sequence[Sequence[int]]) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def divisibility_index(xi: Sequence[int]) -> int:
    """Index of divisibility of an integral vector (gcd of its entries)."""
    g = reduce(math.gcd, (abs(int(x)) for x in xi), 0)
    if g == 0:
        raise ValueError("divisibility index of the zero vector is undefined")
    return g


def primitive(xi: Sequence[int]) -> IntVector:
    g = divisibility_index(xi)
    return tuple(int(x) // g for x in xi)


def kernel_sublattice(M: Sequence[Sequence[int]], ncols: int | None = None) -> list[IntVector]:
    """Basis of the saturated integer kernel ``{v : M v = 0}``.

    ``ncols`` is needed only when ``M`` has no rows.
    """
    if not M:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [tuple(r) for r in identity(ncols)]
    cols = len(M[0])
    _, D, V = smith_normal_form(M)
    rank = sum(1 for i in range(min(len(D), cols)) if D[i][i] != 0)
    basis = [tuple(V[r][j] for r in range(cols)) for j in range(rank, cols)]
    return [_normalize_sign(b) for b in basis]


def _normalize_sign(v: IntVector) -> IntVector:
    for x in v:
        if x != 0:
            return v if x > 0 else tuple(-y for y in v)
    return v


def hermite_rows(vectors: Iterable[Sequence[int]], ncols: int) -> list[IntVector]:
    """Row-style Hermite normal form: a basis of the lattice spanned by ``vectors``."""
    rows = [list(map(int, v)) for v in vectors if any(v)]
    out: list[IntVector] = []
    col = 0
    while rows and col < ncols:
        live = [r for r in rows if r[col] != 0]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            for r in live[1:]:
                q = r[col] // p[col]
                for j in range(ncols):
                    r[j] -= q * p[j]
            live = [r for r in live if r[col] != 0]
        p = live[0]
        if p[col] < 0:
            p[:] = [-x for x in p]
        out.append(tuple(p))
        rows = [r for r in rows if r is not p and any(r)]
        col += 1
    # reduce entries above pivots
    for i, row in enumerate(out):
        c = next(j for j, x in enumerate(row) if x)
        for k in range(i):
            q = out[k][c] // row[c]
            if q:
                out[k] = tuple(a - q * b for a, b in zip(out[k], row))
    return out


def solve_in_lattice(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Integer coefficients expressing ``v`` in ``basis`` or ``None``."""
    if not basis:
        return [] if not any(v) else None
    A = transpose(basis)  # columns are basis vectors
    U, D, V = smith_normal_form(A)
    b = matvec(U, v)
    r = len(basis)
    y = []
    for i in range(len(b)):
        d = D[i][i] if i < r else 0
        if d == 0:
            if b[i] != 0:
                return None
            if i < r:
                y.append(0)
        else:
            if b[i] % d:
                return None
            y.append(b[i] // d)
    y = y[:r] + [0] * (r - len(y))
    return list(matvec(V, y))


# ---------------------------------------------------------------------------
# Laurent coefficients in named parameters
# ---------------------------------------------------------------------------

Monomial = tuple[tuple[str, int], ...]  # sorted (name, nonzero exponent) pairs


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted((k, e) for k, e in d.items() if e))


def mono_pow(a: Monomial, e: int) -> Monomial:
    return tuple((k, x * e) for k, x in a) if e else ()


def mono_str(m: Monomial) -> str:
    return "*".join(k if e == 1 else f"{k}^{e}" for k, e in m)


class LaurentCoefficient:
    """Laurent polynomial over Q(i) in finitely many named parameters.

    Immutable; the zero polynomial has an empty term map.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = scalar(c)
            if c != 0:
                clean[tuple(sorted((k, int(e)) for k, e in m if e))] = c
        self.terms: dict[Monomial, Scalar] = clean
        self._hash = None

    @classmethod
    def constant(cls, c) -> LaurentCoefficient:
        return cls({(): scalar(c)})

    @classmethod
    def param(cls, name: str, exponent: int = 1) -> LaurentCoefficient:
        return cls({((name, exponent),): Fraction(1)})

    @classmethod
    def parse(cls, text: str) -> LaurentCoefficient:
        from .parsing import parse_laurent

        terms = parse_laurent(text, lattice_names=())
        return cls({p: c for (_, _, p), c in terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def is_unit(self) -> bool:
        return len(self.terms) == 1

    def params(self) -> set[str]:
        return {k for m in self.terms for k, _ in m}

    def __add__(self, other):
        other = _coerce_coeff(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return LaurentCoefficient(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentCoefficient({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce_coeff(other))

    def __rsub__(self, other):
        return _coerce_coeff(other) - self

    def __mul__(self, other):
        other = _coerce_coeff(other)
        out: dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return LaurentCoefficient(out)

    __rmul__ = __mul__

    def inverse(self) -> LaurentCoefficient:
        if not self.is_unit():
            raise ValueError(f"{self} is not a unit")
        (m, c), = self.terms.items()
        return LaurentCoefficient({mono_pow(m, -1): 1 / c})

    def __truediv__(self, other):
        return self * _coerce_coeff(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = LaurentCoefficient.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _coerce_coeff(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for k, e in m:
                v *= complex(values[k]) ** e
            total += v
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda mc: _mono_sort_key(mc[0])):
            cs = scalar_str(c)
            if not m:
                parts.append(cs)
            elif c == 1:
                parts.append(mono_str(m))
            elif c == -1:
                parts.append("-" + mono_str(m))
            else:
                parts.append(f"{cs}*{mono_str(m)}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentCoefficient({str(self)!r})"


def _mono_sort_key(m: Monomial):
    return (sum(abs(e) for _, e in m), m)


def _coerce_coeff(x) -> LaurentCoefficient:
    if isinstance(x, LaurentCoefficient):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)) and not isinstance(x, bool):
        return LaurentCoefficient.constant(x)
    raise TypeError(f"cannot use {type(x).__name__} as a coefficient")


# ---------------------------------------------------------------------------
# presented multiplicative group for gluing values
# ---------------------------------------------------------------------------


class MultiplicativeValue:
    """Element ``exp(2 pi i * angle) * prod g_j^{e_j}`` of a presented abelian group.

    The generators ``g_j`` are free; ``angle`` is a rational number mod 1, so
    the torsion part is a root of unity.  Identity is decidable exactly.
    """

    __slots__ = ("angle", "exponents")

    def __init__(self, angle=0, exponents: Mapping[str, int] | None = None):
        a = Fraction(angle)
        self.angle = a - math.floor(a)
        self.exponents: dict[str, int] = {k: int(e) for k, e in sorted((exponents or {}).items()) if e}

    @classmethod
    def identity(cls) -> MultiplicativeValue:
        return cls()

    @classmethod
    def generator(cls, name: str) -> MultiplicativeValue:
        return cls(0, {name: 1})

    @classmethod
    def root_of_unity(cls, p: int, q: int) -> MultiplicativeValue:
        return cls(Fraction(p, q))

    def __mul__(self, other: MultiplicativeValue) -> MultiplicativeValue:
        e = dict(self.exponents)
        for k, x in other.exponents.items():
            e[k] = e.get(k, 0) + x
        return MultiplicativeValue(self.angle + other.angle, e)

    def inverse(self) -> MultiplicativeValue:
        return MultiplicativeValue(-self.angle, {k: -x for k, x in self.exponents.items()})

    def __truediv__(self, other: MultiplicativeValue) -> MultiplicativeValue:
        return self * other.inverse()

    def __pow__(self, n: int) -> MultiplicativeValue:
        return MultiplicativeValue(self.angle * n, {k: x * n for k, x in self.exponents.items()})

    def is_identity(self) -> bool:
        return self.angle == 0 and not self.exponents

    def order(self) -> int | None:
        """Multiplicative order, or ``None`` for elements of infinite order."""
        if self.exponents:
            return None
        return self.angle.denominator

    def __eq__(self, other):
        if not isinstance(other, MultiplicativeValue):
            return NotImplemented
        return self.angle == other.angle and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.angle, tuple(self.exponents.items())))

    def to_json(self) -> dict:
        return {"angle": _frac_str(self.angle), "exponents": dict(self.exponents)}

    @classmethod
    def from_json(cls, data: Mapping) -> MultiplicativeValue:
        return cls(Fraction(str(data.get("angle", 0))), dict(data.get("exponents", {})))

    def __str__(self):
        parts = [k if e == 1 else f"{k}^{e}" for k, e in self.exponents.items()]
        if self.angle:
            parts.insert(0, f"exp(2*pi*I*{_frac_str(self.angle)})")
        return "*".join(parts) or "1"

    def __repr__(self):
        return f"MultiplicativeValue({str(self)!r})"
