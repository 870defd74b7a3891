"""Truncated graded series ``A[Lambda][t] / (t^{k+1})``.

A series is a finite map ``(lattice exponent, t-degree, parameter monomial)
-> exact scalar``.  Two truncations apply: the t-degree is at most ``k`` and,
when a weight cap is set, the total weight of a term is at most the cap.
Weights are rational and additive, so products of positive-weight terms
only grow in weight; this is what makes ``log`` and ``exp`` terminate.

Formal logarithms of units (``log a``, ``log s``, ``log 2``) are carried in
a separate ``logs`` table and never evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import sympy
from scipy.optimize import linprog

from .errors import NotWeightPositive, WeightSearchFailed
from .exact import (
    GaussianRational,
    LaurentCoefficient,
    Monomial,
    Scalar,
    mono_mul,
    mono_pow,
    mono_str,
    scalar,
    scalar_str,
)
from .parsing import parse_laurent

Key = tuple[tuple[int, ...], int, Monomial]


@dataclass(frozen=True)
class Grading:
    """Rational weights on lattice directions, on ``t`` and on parameters."""

    lattice: tuple[Fraction, ...]
    t: Fraction = Fraction(1)
    params: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lattice", tuple(Fraction(w) for w in self.lattice))
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "params", tuple(sorted((k, Fraction(w)) for k, w in self.params)))
        if self.t <= 0:
            raise ValueError("the weight of t must be positive")

    def weight(self, key: Key) -> Fraction:
        lam, tdeg, mono = key
        w = self.t * tdeg
        for a, b in zip(self.lattice, lam):
            if b:
                w += a * b
        if mono and self.params:
            pw = dict(self.params)
            for name, e in mono:
                w += pw.get(name, 0) * e
        return w


@dataclass(frozen=True)
class SeriesRing:
    """Ambient ring: variable names, truncation order and grading."""

    lattice_names: tuple[str, ...]
    t_name: str = "t"
    k: int | None = 4
    grading: Grading | None = None
    cap: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "lattice_names", tuple(self.lattice_names))
        if self.grading is None:
            object.__setattr__(self, "grading", Grading(tuple(Fraction(0) for _ in self.lattice_names)))
        if len(self.grading.lattice) != len(self.lattice_names):
            raise ValueError("grading dimension does not match the lattice")
        if self.cap is not None:
            object.__setattr__(self, "cap", Fraction(self.cap))

    @property
    def rank(self) -> int:
        return len(self.lattice_names)

    def with_grading(self, grading: Grading, cap: Fraction | str | None = "auto") -> SeriesRing:
        """Same variables and order, new grading; ``cap="auto"`` sets ``k * w_t``."""
        if cap == "auto":
            cap = None if self.k is None else grading.t * self.k
        return replace(self, grading=grading, cap=cap)

    def keeps(self, key: Key, weight: Fraction | None = None) -> bool:
        if self.k is not None and key[1] > self.k:
            return False
        if self.cap is not None:
            w = self.grading.weight(key) if weight is None else weight
            if w > self.cap:
                return False
        return True

    # constructors -------------------------------------------------------
    def zero(self) -> TruncatedSeries:
        return TruncatedSeries(self, {})

    def one(self) -> TruncatedSeries:
        return self.constant(1)

    def constant(self, c) -> TruncatedSeries:
        if isinstance(c, LaurentCoefficient):
            return TruncatedSeries(self, {(self._zero_lam(), 0, m): v for m, v in c.terms.items()})
        return TruncatedSeries(self, {(self._zero_lam(), 0, ()): scalar(c)})

    def monomial(self, lam: Sequence[int] | None = None, tdeg: int = 0, coeff=1) -> TruncatedSeries:
        lam = tuple(lam) if lam is not None else self._zero_lam()
        if isinstance(coeff, LaurentCoefficient):
            return TruncatedSeries(self, {(lam, tdeg, m): v for m, v in coeff.terms.items()})
        return TruncatedSeries(self, {(lam, tdeg, ()): scalar(coeff)})

    def parse(self, text: str) -> TruncatedSeries:
        return TruncatedSeries(self, parse_laurent(text, self.lattice_names, self.t_name))

    def _zero_lam(self) -> tuple[int, ...]:
        return (0,) * self.rank


class TruncatedSeries:
    """Immutable element of a :class:`SeriesRing`."""

    __slots__ = ("ring", "terms", "logs", "_weights")

    def __init__(self, ring: SeriesRing, terms: Mapping[Key, Scalar], logs: Mapping[str, Fraction] | None = None):
        self.ring = ring
        kept = {}
        for key, c in terms.items():
            if c != 0 and ring.keeps(key):
                kept[key] = c
        self.terms: dict[Key, Scalar] = kept
        self.logs: dict[str, Fraction] = {k: Fraction(v) for k, v in sorted((logs or {}).items()) if v}
        self._weights: dict[Key, Fraction] | None = None

    # helpers ------------------------------------------------------------
    def weights(self) -> dict[Key, Fraction]:
        if self._weights is None:
            g = self.ring.grading
            self._weights = {key: g.weight(key) for key in self.terms}
        return self._weights

    def _same_ring(self, other: TruncatedSeries):
        if other.ring.lattice_names != self.ring.lattice_names or other.ring.t_name != self.ring.t_name:
            raise ValueError("series live in different rings")

    def _coerce(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            self._same_ring(other)
            return other
        return self.ring.constant(other)

    def is_zero(self) -> bool:
        return not self.terms and not self.logs

    def has_logs(self) -> bool:
        return bool(self.logs)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other) -> TruncatedSeries:
        other = self._coerce(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        logs = dict(self.logs)
        for k, v in other.logs.items():
            logs[k] = logs.get(k, 0) + v
        return TruncatedSeries(self.ring, out, logs)

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.ring, {k: -c for k, c in self.terms.items()}, {k: -v for k, v in self.logs.items()})

    def __sub__(self, other) -> TruncatedSeries:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TruncatedSeries:
        return self._coerce(other) - self

    def scale(self, c) -> TruncatedSeries:
        c = scalar(c)
        logs = {}
        if self.logs:
            if not isinstance(c, Fraction):
                raise ValueError("formal logarithms scale by rationals only")
            logs = {k: v * c for k, v in self.logs.items()}
        return TruncatedSeries(self.ring, {k: v * c for k, v in self.terms.items()}, logs)

    def __mul__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            if isinstance(other, LaurentCoefficient):
                other = self.ring.constant(other)
            else:
                return self.scale(other)
        self._same_ring(other)
        if self.logs or other.logs:
            raise ValueError("products of series carrying formal logarithms are not defined")
        ring = self.ring
        k, cap = ring.k, ring.cap
        wa, wb = self.weights(), other.weights()
        out: dict[Key, Scalar] = {}
        b_items = sorted(other.terms.items(), key=lambda kv: wb[kv[0]])
        for ka, ca in self.terms.items():
            w1 = wa[ka]
            lam1, t1, m1 = ka
            for kb, cb in b_items:
                if cap is not None and w1 + wb[kb] > cap:
                    break
                lam2, t2, m2 = kb
                t = t1 + t2
                if k is not None and t > k:
                    continue
                key = (tuple(x + y for x, y in zip(lam1, lam2)), t, mono_mul(m1, m2))
                out[key] = out.get(key, 0) + ca * cb
        return TruncatedSeries(ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> TruncatedSeries:
        if e < 0:
            return inverse_series(self) ** (-e)
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def shift(self, lam: Sequence[int], tdeg: int = 0, mono: Monomial = (), coeff=1) -> TruncatedSeries:
        """Multiply by the monomial ``coeff * z^lam * t^tdeg * mono``."""
        if self.logs:
            raise ValueError("cannot shift a series carrying formal logarithms")
        c = scalar(coeff)
        out = {}
        for (l, t, m), v in self.terms.items():
            out[(tuple(a + b for a, b in zip(l, lam)), t + tdeg, mono_mul(m, mono))] = v * c
        return TruncatedSeries(self.ring, out)

    def retruncate(self, ring: SeriesRing) -> TruncatedSeries:
        self._same_ring(TruncatedSeries(ring, {}))
        return TruncatedSeries(ring, self.terms, self.logs)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (
                self.ring.lattice_names == other.ring.lattice_names
                and self.terms == other.terms
                and self.logs == other.logs
            )
        try:
            return self == self.ring.constant(other)
        except (TypeError, ValueError):
            return NotImplemented

    __hash__ = None

    # accessors ------------------------------------------------------------
    def coefficient(self, lam: Sequence[int] | None = None, tdeg: int = 0) -> LaurentCoefficient:
        lam = tuple(lam) if lam is not None else self.ring._zero_lam()
        return LaurentCoefficient({m: c for (l, t, m), c in self.terms.items() if l == lam and t == tdeg})

    def t_coefficients(self) -> dict[int, LaurentCoefficient]:
        """For a pure-t series: ``{degree: coefficient}``."""
        degs = sorted({t for (_, t, _) in self.terms})
        return {d: self.coefficient(None, d) for d in degs}

    def support(self) -> set[tuple[tuple[int, ...], int]]:
        return {(l, t) for (l, t, _) in self.terms}

    def constant_key(self) -> Key:
        return (self.ring._zero_lam(), 0, ())

    def evaluate(self, lattice: Sequence[complex], t: complex, params: Mapping[str, complex]) -> complex:
        total = 0j
        for (lam, tdeg, mono), c in self.terms.items():
            v = complex(c) * complex(t) ** tdeg
            for z, e in zip(lattice, lam):
                v *= complex(z) ** e
            for name, e in mono:
                v *= complex(params[name]) ** e
            total += v
        return total

    # serialisation --------------------------------------------------------
    def to_json(self) -> list[dict]:
        grouped: dict[tuple[tuple[int, ...], int], LaurentCoefficient] = {}
        for lam, t in sorted(self.support()):
            grouped[(lam, t)] = self.coefficient(lam, t)
        out = [{"lambda": list(lam), "t": t, "coeff": str(c)} for (lam, t), c in grouped.items()]
        zero = list(self.ring._zero_lam())
        for name, v in self.logs.items():
            out.append({"lambda": zero, "t": 0, "coeff": scalar_str(v), "log": name})
        return out

    @classmethod
    def from_json(cls, ring: SeriesRing, data: Iterable[Mapping]) -> TruncatedSeries:
        terms: dict[Key, Scalar] = {}
        logs: dict[str, Fraction] = {}
        for entry in data:
            if "log" in entry:
                logs[entry["log"]] = logs.get(entry["log"], 0) + Fraction(entry["coeff"])
                continue
            coeff = LaurentCoefficient.parse(entry["coeff"])
            for m, c in coeff.terms.items():
                key = (tuple(entry["lambda"]), int(entry["t"]), m)
                terms[key] = terms.get(key, 0) + c
        return cls(ring, terms, logs)

    def __str__(self):
        names = self.ring.lattice_names
        parts = []
        items = sorted(self.terms.items(), key=lambda kv: (kv[0][1], sum(map(abs, kv[0][0])), kv[0]))
        for (lam, t, m), c in items:
            factors = [mono_str(m)] if m else []
            factors += [n if e == 1 else f"{n}^{e}" for n, e in zip(names, lam) if e]
            if t:
                factors.append(self.ring.t_name if t == 1 else f"{self.ring.t_name}^{t}")
            body = "*".join(factors)
            cs = scalar_str(c)
            if not body:
                parts.append(cs)
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{cs}*{body}")
        for name, v in self.logs.items():
            parts.append(f"{scalar_str(v)}*log({name})" if v != 1 else f"log({name})")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def __repr__(self):
        return f"TruncatedSeries({str(self)!r})"


@dataclass(frozen=True)
class BinomialFactor:
    """A factor ``1 + a z^m t^l``."""

    coeff: LaurentCoefficient
    exponent: tuple[int, ...]
    t_order: int

    def as_series(self, ring: SeriesRing) -> TruncatedSeries:
        return ring.one() + ring.monomial(self.exponent, self.t_order, self.coeff)

    def weight(self, grading: Grading) -> Fraction:
        ws = {grading.weight((self.exponent, self.t_order, m)) for m in self.coeff.terms}
        return min(ws)


# ---------------------------------------------------------------------------
# unit extraction, log, exp
# ---------------------------------------------------------------------------


def leading_unit(f: TruncatedSeries) -> tuple[Key, Scalar]:
    """The unique minimal-weight term of ``f``; it must have lattice exponent 0."""
    if f.logs:
        raise NotWeightPositive("series carries formal logarithms")
    if not f.terms:
        raise NotWeightPositive("zero series has no unit")
    ws = f.weights()
    wmin = min(ws.values())
    lows = [k for k, w in ws.items() if w == wmin]
    if len(lows) != 1:
        raise NotWeightPositive(
            "not weight-positive: several terms of minimal weight " + ", ".join(map(str, lows))
        )
    key = lows[0]
    if any(key[0]):
        raise NotWeightPositive(f"not weight-positive: leading term {key} has nonzero lattice exponent")
    return key, f.terms[key]


def _positive_part(f: TruncatedSeries, unit: Key, c: Scalar) -> TruncatedSeries:
    lam, tdeg, mono = unit
    g = f.shift(tuple(-x for x in lam), -tdeg, mono_pow(mono, -1), 1 / c) - 1
    ring = g.ring
    for key, w in g.weights().items():
        if w <= 0:
            raise NotWeightPositive(f"not weight-positive: term {key} has weight {w}")
        if ring.cap is None and key[1] <= 0:
            raise NotWeightPositive("a weight cap is required when terms of t-degree <= 0 are present")
    return g


def unit_logs(unit: Key, c: Scalar, t_name: str) -> dict[str, Fraction]:
    """Formal logarithm of the unit ``c * t^d * params``."""
    _, tdeg, mono = unit
    logs: dict[str, Fraction] = {}
    if tdeg:
        logs[t_name] = Fraction(tdeg)
    for name, e in mono:
        logs[name] = logs.get(name, 0) + e
    if isinstance(c, GaussianRational):
        logs[str(c)] = Fraction(1)
    elif c != 1:
        if c < 0:
            logs["-1"] = Fraction(1)
        for p, e in sympy.factorint(abs(c.numerator)).items():
            logs[str(p)] = logs.get(str(p), 0) + e
        for p, e in sympy.factorint(c.denominator).items():
            logs[str(p)] = logs.get(str(p), 0) - e
    return {k: v for k, v in logs.items() if v}


def log_series(f: TruncatedSeries) -> TruncatedSeries:
    """``log f`` for ``f = c (1 + g)`` with ``c`` a unit and ``g`` of positive weight.

    The result carries ``log c`` as formal logarithms plus
    ``sum_j (-1)^(j-1) g^j / j`` truncated in the ring of ``f``.
    """
    unit, c = leading_unit(f)
    g = _positive_part(f, unit, c)
    acc = f.ring.zero()
    power = g
    j = 1
    while power.terms:
        acc = acc + power.scale(Fraction((-1) ** (j - 1), j))
        power = power * g
        j += 1
    return TruncatedSeries(f.ring, acc.terms, unit_logs(unit, c, f.ring.t_name))


def _log_unit(logs: Mapping[str, Fraction], ring: SeriesRing) -> tuple[int, Monomial, Scalar]:
    tdeg = 0
    mono: dict[str, int] = {}
    c: Scalar = Fraction(1)
    for name, v in logs.items():
        if v.denominator != 1:
            raise ValueError(f"cannot exponentiate {v}*log({name}) exactly")
        e = int(v)
        if name == ring.t_name:
            tdeg += e
        elif name == "-1":
            c = c * (-1) ** (e % 2)
        elif _is_number(name):
            c = c * scalar(sympy.sympify(name)) ** e
        else:
            mono[name] = mono.get(name, 0) + e
    return tdeg, tuple(sorted((k, e) for k, e in mono.items() if e)), c


def _is_number(name: str) -> bool:
    try:
        sympy.sympify(name).evalf()
        return bool(sympy.sympify(name).is_number)
    except (sympy.SympifyError, TypeError):
        return False


def exp_series(f: TruncatedSeries) -> TruncatedSeries:
    """Inverse of :func:`log_series` on weight-positive input."""
    ring = f.ring
    h = TruncatedSeries(ring, f.terms)
    for key, w in h.weights().items():
        if w <= 0:
            raise NotWeightPositive(f"exp of a term of non-positive weight {key}")
        if ring.cap is None and key[1] <= 0:
            raise NotWeightPositive("a weight cap is required when terms of t-degree <= 0 are present")
    acc = ring.one()
    power = ring.one()
    j = 1
    fact = 1
    while True:
        power = power * h
        if not power.terms:
            break
        fact *= j
        acc = acc + power.scale(Fraction(1, fact))
        j += 1
    if f.logs:
        tdeg, mono, c = _log_unit(f.logs, ring)
        acc = acc.shift(ring._zero_lam(), tdeg, mono, c)
    return acc


def inverse_series(f: TruncatedSeries) -> TruncatedSeries:
    unit, c = leading_unit(f)
    g = _positive_part(f, unit, c)
    acc = f.ring.one()
    power = f.ring.one()
    neg = -g
    while True:
        power = power * neg
        if not power.terms:
            break
        acc = acc + power
    lam, tdeg, mono = unit
    return acc.shift(tuple(-x for x in lam), -tdeg, mono_pow(mono, -1), 1 / c)


# ---------------------------------------------------------------------------
# factorisation and normalisation
# ---------------------------------------------------------------------------


def factorize_binomials(f: TruncatedSeries) -> tuple[LaurentCoefficient, list[BinomialFactor]]:
    """Write ``f = unit * prod (1 + a z^m t^l)`` up to the truncation of its ring.

    Factors are read off one weight level at a time, lowest first.
    """
    unit, c = leading_unit(f)
    if unit[1] != 0:
        raise NotWeightPositive("the unit of a factorisation must not involve t")
    ring = f.ring
    current = _positive_part(f, unit, c) + 1
    factors: list[BinomialFactor] = []
    while True:
        rest = current - 1
        if not rest.terms:
            break
        ws = rest.weights()
        wmin = min(ws.values())
        if wmin <= 0:
            raise NotWeightPositive(f"not weight-positive at weight {wmin}")
        level: dict[tuple[tuple[int, ...], int], dict[Monomial, Scalar]] = {}
        for key, w in ws.items():
            if w == wmin:
                level.setdefault((key[0], key[1]), {})[key[2]] = rest.terms[key]
        divisor = ring.one()
        for (lam, tdeg), coeffs in sorted(level.items()):
            b = BinomialFactor(LaurentCoefficient(coeffs), lam, tdeg)
            factors.append(b)
            divisor = divisor * b.as_series(ring)
        current = current * inverse_series(divisor)
    unit_coeff = LaurentCoefficient({unit[2]: c})
    return unit_coeff, factors


def zero_exponent_part(f: TruncatedSeries) -> TruncatedSeries:
    """Terms with lattice exponent zero (formal logarithms are kept)."""
    return TruncatedSeries(f.ring, {k: c for k, c in f.terms.items() if not any(k[0])}, f.logs)


def normalize_slab(f: TruncatedSeries, t_name: str | None = None, max_rounds: int = 200) -> TruncatedSeries:
    """The pure-t correction ``g`` making ``log(f + g)`` free of pure t-powers.

    ``f`` must have unit 1.  Returns ``g`` with zero lattice exponents.
    """
    if t_name is not None and t_name != f.ring.t_name:
        raise ValueError(f"series variable is {f.ring.t_name!r}, not {t_name!r}")
    unit, c = leading_unit(f)
    if unit != f.constant_key() or c != 1:
        raise NotWeightPositive("normalization requires the constant term 1 as unit")
    g = f.ring.zero()
    for _ in range(max_rounds):
        z = zero_exponent_part(log_series(f + g))
        if not z.terms:
            return g
        ws = z.weights()
        wmin = min(ws.values())
        g = g - TruncatedSeries(f.ring, {k: v for k, v in z.terms.items() if ws[k] == wmin})
    raise RuntimeError("normalization did not converge")


# ---------------------------------------------------------------------------
# weight search
# ---------------------------------------------------------------------------


def find_grading(
    f: TruncatedSeries,
    unit: Key | None = None,
    preference: Callable[[Key], float] | None = None,
    bound: float = 1000.0,
) -> tuple[Grading, Key]:
    """Search a grading making ``f`` weight-positive around a lattice-constant unit.

    Candidate units are the terms with lattice exponent zero, tried in order of
    ``preference`` (smaller first).  For each, a linear program looks for
    weights with ``weight(term) - weight(unit) >= 1`` for every other term and
    ``w_t >= 1``; the solution is rationalised and re-verified exactly.
    """
    keys = list(f.terms)
    if unit is not None:
        candidates = [unit]
    else:
        candidates = [k for k in keys if not any(k[0])]
        candidates.sort(key=preference or (lambda k: (k[1], sum(abs(e) for _, e in k[2]))))
    params = sorted({name for k in keys for name, _ in k[2]})
    n = f.ring.rank
    nv = n + 1 + len(params)

    def vec(key: Key) -> np.ndarray:
        v = np.zeros(nv)
        v[:n] = key[0]
        v[n] = key[1]
        for name, e in key[2]:
            v[n + 1 + params.index(name)] = e
        return v

    for u in candidates:
        rows, rhs = [], []
        uv = vec(u)
        for k in keys:
            if k == u:
                continue
            rows.append(-(vec(k) - uv))
            rhs.append(-1.0)
        tvec = np.zeros(nv)
        tvec[n] = -1
        rows.append(tvec)
        rhs.append(-1.0)
        # minimise sum |w| via split variables w = p - q
        A = np.hstack([np.array(rows), -np.array(rows)])
        res = linprog(
            np.ones(2 * nv),
            A_ub=A,
            b_ub=np.array(rhs),
            bounds=[(0, bound)] * (2 * nv),
            method="highs",
        )
        if res.status != 0:
            continue
        w = res.x[:nv] - res.x[nv:]
        for denom in (1, 2, 6, 12, 60, 1000, 10**6):
            ws = [Fraction(x).limit_denominator(denom) for x in w]
            grading = Grading(tuple(ws[:n]), ws[n] if ws[n] > 0 else Fraction(1), tuple(zip(params, ws[n + 1 :])))
            wu = grading.weight(u)
            if all(grading.weight(k) > wu for k in keys if k != u):
                return grading, u
    raise WeightSearchFailed("no grading makes the series weight-positive")


def graded(f: TruncatedSeries, grading: Grading, cap: Fraction | str | None = "auto") -> TruncatedSeries:
    """Move ``f`` into the same ring with a new grading (and derived cap)."""
    ring = f.ring.with_grading(grading, cap)
    return TruncatedSeries(ring, f.terms, f.logs)
