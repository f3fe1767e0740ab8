"""Sparse truncated multivariate power series over exact rationals.

Variables come in three families:

* ``p1, p2, ...`` and ``q1, q2, ...`` with weighted degree ``deg p_i = i``;
  each family has its own weight bound.
* auxiliary parameters (``u``, ``u1``, ``h``, ``v``, ``w``, ``z``, ``d0``, ...)
  bounded by plain degree, one bound per variable.

A bound of ``None`` means the series is exact (polynomial) in that family.
Only ``h`` (the genus parameter) may carry negative exponents.

Monomials are tuples of ``(var_id, exponent)`` pairs sorted by id; ids are
``i`` for ``p_i``, ``Q_BASE + i`` for ``q_i`` and ``AUX_BASE + k`` for the
k-th registered auxiliary name, so sorting by id gives the canonical
variable order P < Q < AUX.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

Q_BASE = 1 << 16
AUX_BASE = 1 << 17

HBAR = "h"

_AUX_NAMES: list[str] = []
_AUX_INDEX: dict[str, int] = {}
_NEGATIVE_OK = {HBAR}


def register_aux(name: str) -> int:
    """Register an auxiliary variable name and return its id."""
    if re.fullmatch(r"[pq]\d+", name):
        raise ValueError(f"{name!r} clashes with the p/q families")
    if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
        raise ValueError(f"bad variable name {name!r}")
    if name not in _AUX_INDEX:
        _AUX_INDEX[name] = len(_AUX_NAMES)
        _AUX_NAMES.append(name)
    return AUX_BASE + _AUX_INDEX[name]


for _name in ["u", *(f"u{i}" for i in range(1, 10)), HBAR, "v", "w", "z", "s", "y", "t",
              *(f"d{i}" for i in range(32))]:
    register_aux(_name)


def var_id(name: str | int) -> int:
    if isinstance(name, int):
        return name
    m = re.fullmatch(r"([pq])(\d+)", name)
    if m:
        idx = int(m.group(2))
        if idx < 1:
            raise ValueError(f"p/q indices start at 1, got {name!r}")
        return idx if m.group(1) == "p" else Q_BASE + idx
    if name not in _AUX_INDEX:
        raise KeyError(f"unregistered auxiliary variable {name!r}")
    return AUX_BASE + _AUX_INDEX[name]


def var_name(vid: int) -> str:
    if vid < Q_BASE:
        return f"p{vid}"
    if vid < AUX_BASE:
        return f"q{vid - Q_BASE}"
    return _AUX_NAMES[vid - AUX_BASE]


def rational(x) -> mpq:
    """Coerce int, Fraction, mpq or a ``"num/den"`` string to an exact rational."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point coefficients are not allowed")
    return mpq(x)


# ---------------------------------------------------------------- monomials

def pweight(m) -> int:
    w = 0
    for v, e in m:
        if v >= Q_BASE:
            break
        w += v * e
    return w


def qweight(m) -> int:
    w = 0
    for v, e in m:
        if v < Q_BASE:
            continue
        if v >= AUX_BASE:
            break
        w += (v - Q_BASE) * e
    return w


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(item for item in d.items() if item[1]))


def monomial(spec) -> tuple:
    """Build a monomial from a dict ``{"p2": 1, "u": 1}``, a string
    ``"p1^2*u"`` or an existing tuple."""
    if isinstance(spec, tuple):
        return spec
    if isinstance(spec, str):
        d: dict[int, int] = {}
        s = spec.strip()
        if s in ("", "1"):
            return ()
        for tok in re.split(r"[*\s]+", s):
            if not tok:
                continue
            name, _, exp = tok.partition("^")
            e = int(exp) if exp else 1
            vid = var_id(name)
            d[vid] = d.get(vid, 0) + e
        return tuple(sorted((v, e) for v, e in d.items() if e))
    return tuple(sorted((var_id(k), int(e)) for k, e in spec.items() if e))


def mono_str(m) -> str:
    if not m:
        return "1"
    return "*".join(var_name(v) if e == 1 else f"{var_name(v)}^{e}" for v, e in m)


def mono_dict(m) -> dict[str, int]:
    return {var_name(v): e for v, e in m}


def _aux_degree(m) -> int:
    return sum(e for v, e in m if v >= AUX_BASE)


def _canonical_key(m):
    return (pweight(m) + qweight(m), _aux_degree(m), m)


# ---------------------------------------------------------------- truncation

class Truncation:
    """Weight bounds for the p and q families and degree bounds per aux variable."""

    __slots__ = ("p", "q", "aux", "_aux_ids")

    def __init__(self, p: int | None = None, q: int | None = None,
                 aux: Mapping[str, int | None] | None = None):
        self.p = p
        self.q = q
        items = {}
        for k, b in (aux or {}).items():
            if b is not None:
                items[k] = int(b)
        self.aux = tuple(sorted(items.items(), key=lambda kv: var_id(kv[0])))
        self._aux_ids = {var_id(k): b for k, b in self.aux}

    @classmethod
    def exact(cls) -> "Truncation":
        return cls()

    def aux_bound(self, name: str) -> int | None:
        return self._aux_ids.get(var_id(name))

    def meet(self, other: "Truncation") -> "Truncation":
        if self is other:
            return self
        aux = dict(self.aux)
        for k, b in other.aux:
            aux[k] = b if k not in aux else min(aux[k], b)
        return Truncation(_min(self.p, other.p), _min(self.q, other.q), aux)

    def admits(self, m) -> bool:
        if self.p is not None and pweight(m) > self.p:
            return False
        if self.q is not None and qweight(m) > self.q:
            return False
        if self._aux_ids:
            for v, e in m:
                if v >= AUX_BASE:
                    b = self._aux_ids.get(v)
                    if b is not None and e > b:
                        return False
        return True

    def replace(self, **changes) -> "Truncation":
        p = changes.pop("p", self.p)
        q = changes.pop("q", self.q)
        aux = dict(self.aux)
        aux.update(changes.pop("aux", {}))
        drop = changes.pop("drop", ())
        if changes:
            raise TypeError(f"unknown fields {sorted(changes)}")
        for k in drop:
            aux.pop(k, None)
        return Truncation(p, q, aux)

    def lowered(self, vid: int, order: int) -> "Truncation":
        """Truncation of a derivative of the given order in variable vid."""
        if vid < Q_BASE:
            return self.replace(p=None if self.p is None else self.p - vid * order)
        if vid < AUX_BASE:
            return self.replace(q=None if self.q is None else self.q - (vid - Q_BASE) * order)
        name = var_name(vid)
        b = self._aux_ids.get(vid)
        return self if b is None else self.replace(aux={name: b - order})

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "aux": dict(self.aux)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Truncation":
        return cls(d.get("p"), d.get("q"), d.get("aux") or {})

    def __eq__(self, other):
        return (isinstance(other, Truncation) and self.p == other.p and self.q == other.q
                and self.aux == other.aux)

    def __hash__(self):
        return hash((self.p, self.q, self.aux))

    def __repr__(self):
        parts = []
        if self.p is not None:
            parts.append(f"p={self.p}")
        if self.q is not None:
            parts.append(f"q={self.q}")
        if self.aux:
            parts.append(f"aux={dict(self.aux)}")
        return f"Truncation({', '.join(parts)})"


def _min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


EXACT = Truncation()


# ---------------------------------------------------------------- series

class TruncationError(ValueError):
    """A coefficient was requested beyond the range the truncation guarantees."""


class Series:
    """Immutable sparse truncated power series with mpq coefficients."""

    __slots__ = ("terms", "trunc", "_buckets")

    def __init__(self, terms: Mapping | None = None, trunc: Truncation | None = None,
                 *, _raw: bool = False):
        self.trunc = trunc if trunc is not None else EXACT
        self._buckets = None
        if _raw:
            self.terms = terms
            return
        out = {}
        for m, c in (terms or {}).items():
            m = monomial(m)
            c = rational(c)
            if c and self.trunc.admits(m):
                for v, e in m:
                    if e < 0 and var_name(v) not in _NEGATIVE_OK:
                        raise ValueError(f"negative exponent on {var_name(v)}")
                out[m] = out.get(m, 0) + c
        self.terms = {m: c for m, c in out.items() if c}

    # -- constructors

    @classmethod
    def const(cls, c, trunc: Truncation | None = None) -> "Series":
        c = rational(c)
        return cls({(): c} if c else {}, trunc, _raw=True)

    @classmethod
    def zero(cls, trunc: Truncation | None = None) -> "Series":
        return cls({}, trunc, _raw=True)

    @classmethod
    def var(cls, name: str, trunc: Truncation | None = None) -> "Series":
        return cls({((var_id(name), 1),): 1}, trunc)

    @classmethod
    def parse(cls, text: str, trunc: Truncation | None = None) -> "Series":
        """Parse a polynomial like ``"1/2*p1^2 - p2 + 3"``."""
        s = text.replace(" ", "")
        if not s:
            return cls.zero(trunc)
        terms: dict = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            factors = body.split("*")
            coeff = mpq(1)
            rest = []
            for f in factors:
                if re.fullmatch(r"\d+(/\d+)?", f):
                    coeff *= mpq(f)
                else:
                    rest.append(f)
            if sign == "-":
                coeff = -coeff
            m = monomial("*".join(rest))
            terms[m] = terms.get(m, 0) + coeff
        return cls(terms, trunc)

    # -- basic queries

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: _canonical_key(kv[0])))

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> mpq:
        return self.terms.get((), mpq(0))

    def coefficient(self, m) -> mpq:
        m = monomial(m)
        if not self.trunc.admits(m):
            raise TruncationError(f"{mono_str(m)} lies beyond {self.trunc}")
        return self.terms.get(m, mpq(0))

    def variables(self) -> set[str]:
        return {var_name(v) for m in self.terms for v, _ in m}

    def max_degree(self, name: str) -> int:
        vid = var_id(name)
        return max((e for m in self.terms for v, e in m if v == vid), default=0)

    def with_trunc(self, trunc: Truncation) -> "Series":
        """Re-truncate to a narrower (or equal) truncation."""
        t = self.trunc.meet(trunc)
        return Series({m: c for m, c in self.terms.items() if t.admits(m)}, t, _raw=True)

    def homogeneous_part(self, weight: int) -> "Series":
        return Series({m: c for m, c in self.terms.items() if pweight(m) + qweight(m) == weight},
                      self.trunc, _raw=True)

    # -- ring operations

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        return Series.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        t = self.trunc.meet(other.trunc)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        if t != self.trunc or t != other.trunc:
            out = {m: c for m, c in out.items() if t.admits(m)}
        return Series(out, t, _raw=True)

    __radd__ = __add__

    def __neg__(self):
        return Series({m: -c for m, c in self.terms.items()}, self.trunc, _raw=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Series":
        c = rational(c)
        if not c:
            return Series.zero(self.trunc)
        return Series({m: v * c for m, v in self.terms.items()}, self.trunc, _raw=True)

    def _bucketed(self):
        if self._buckets is None:
            b = defaultdict(list)
            for m, c in self.terms.items():
                b[(pweight(m), qweight(m))].append((m, c))
            self._buckets = dict(b)
        return self._buckets

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        t = self.trunc.meet(other.trunc)
        if not self.terms or not other.terms:
            return Series.zero(t)
        P, Q = t.p, t.q
        auxb = t._aux_ids
        out: dict = {}
        get = out.get
        for (pa, qa), la in self._bucketed().items():
            for (pb, qb), lb in other._bucketed().items():
                if P is not None and pa + pb > P:
                    continue
                if Q is not None and qa + qb > Q:
                    continue
                for ma, ca in la:
                    for mb, cb in lb:
                        if not ma:
                            m = mb
                        elif not mb:
                            m = ma
                        else:
                            m = mono_mul(ma, mb)
                            if auxb and not _aux_ok(m, auxb):
                                continue
                        out[m] = get(m, 0) + ca * cb
        return Series({m: c for m, c in out.items() if c}, t, _raw=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.reciprocal()
        return self.scale(1 / rational(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        result = Series.const(1, self.trunc)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, mpq, Series)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    # -- transcendental operations on nilpotent arguments

    def _check_nilpotent(self):
        t = self.trunc
        for m in self.terms:
            if not m:
                continue
            if t.p is not None and pweight(m) > 0:
                continue
            if t.q is not None and qweight(m) > 0:
                continue
            if any(v >= AUX_BASE and e > 0 and v in t._aux_ids for v, e in m):
                continue
            raise ValueError(f"term {mono_str(m)} is not nilpotent under {t}")

    def _power_sum(self, coeff: Callable[[int], mpq]) -> "Series":
        """Sum of coeff(k) * self^k for k >= 0; self must be nilpotent."""
        self._check_nilpotent()
        total = Series.const(coeff(0), self.trunc)
        power = Series.const(1, self.trunc)
        k = 0
        while True:
            k += 1
            power = power * self
            if power.is_zero():
                return total
            c = coeff(k)
            if c:
                total = total + power.scale(c)

    def exp(self) -> "Series":
        if self.constant_term():
            raise ValueError("exp requires a zero constant term")
        facts = [mpq(1)]

        def inv_fact(k):
            while len(facts) <= k:
                facts.append(facts[-1] / len(facts))
            return facts[k]
        return self._power_sum(inv_fact)

    def log(self) -> "Series":
        if self.constant_term() != 1:
            raise ValueError("log requires constant term 1")
        x = self - 1
        return x._power_sum(lambda k: mpq(0) if k == 0 else mpq((-1) ** (k + 1), k))

    def reciprocal(self) -> "Series":
        c = self.constant_term()
        if not c:
            raise ZeroDivisionError("series has no invertible constant term")
        x = self.scale(1 / c) - 1
        return x._power_sum(lambda k: mpq((-1) ** k)).scale(1 / c)

    # -- calculus and substitutions

    def d(self, name, order: int = 1) -> "Series":
        """Iterated partial derivative."""
        vid = var_id(name)
        out = {}
        for m, c in self.terms.items():
            for i, (v, e) in enumerate(m):
                if v == vid:
                    if 0 <= e < order:
                        break
                    f = 1
                    for j in range(order):
                        f *= e - j
                    rest = m[:i] + (((v, e - order),) if e != order else ()) + m[i + 1:]
                    out[rest] = out.get(rest, 0) + c * f
                    break
        t = self.trunc.lowered(vid, order)
        return Series({m: c for m, c in out.items() if c and t.admits(m)}, t, _raw=True)

    def partial(self, spec: str) -> "Series":
        """Derivative written as a partition of p-indices, e.g. ``"1^2 3^1"``."""
        from tauforge.partitions import parse_partition
        out = self
        for value, mult in sorted(parse_partition(spec).multiplicities().items()):
            out = out.d(f"p{value}", mult)
        return out

    def coeff_series(self, name: str, exp: int) -> "Series":
        """Coefficient of ``name^exp`` as a series in the remaining variables."""
        vid = var_id(name)
        out = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (v, ev) in enumerate(m):
                if v == vid:
                    e = ev
                    rest = m[:i] + m[i + 1:]
                    break
            if e == exp:
                out[rest] = c
        if vid >= AUX_BASE:
            t = self.trunc.replace(drop=[name])
        else:
            t = self.trunc.lowered(vid, exp)
        return Series(out, t, _raw=True)

    def substitute_scaled(self, scale: str, exponent: Callable[[int], int] | Mapping[str, int],
                          bound: int | None = None, offset: int = 0) -> "Series":
        """Multiply each monomial by ``scale`` raised to the sum of ``exponent(v)*e``
        over its variables, plus ``offset``.

        Terms whose resulting exponent exceeds ``bound`` are dropped (the result
        is truncated there); an exponent below ``-bound`` is an error.
        """
        if isinstance(exponent, Mapping):
            table = {var_id(k): v for k, v in exponent.items()}
            exponent = lambda vid: table.get(vid, 0)  # noqa: E731
        sid = var_id(scale)
        out = {}
        for m, c in self.terms.items():
            k = offset + sum(exponent(v) * e for v, e in m if v != sid)
            if k == 0:
                out[m] = out.get(m, 0) + c
                continue
            nm = mono_mul(m, ((sid, k),))
            e = dict(nm).get(sid, 0)
            if e < 0 and scale not in _NEGATIVE_OK:
                raise ValueError(f"negative exponent on {scale}")
            if bound is not None:
                if e > bound:
                    continue
                if e < -bound:
                    raise ValueError(f"{scale} exponent {e} exceeds the declared bound {bound}")
            out[nm] = out.get(nm, 0) + c
        t = self.trunc.replace(aux={scale: bound}) if bound is not None else self.trunc
        return Series({m: c for m, c in out.items() if c}, t, _raw=True)

    def evaluate(self, values: Mapping[str, object], trunc: Truncation | None = None) -> "Series":
        """Substitute rational values for some variables.

        The result keeps the input truncation minus the evaluated aux bounds unless
        ``trunc`` is given; evaluating p/q variables is exact only when the input
        is exact in those variables.
        """
        vals = {var_id(k): rational(v) for k, v in values.items()}
        out = {}
        for m, c in self.terms.items():
            rest = []
            for v, e in m:
                if v in vals:
                    c = c * vals[v] ** e
                    if not c:
                        break
                else:
                    rest.append((v, e))
            if c:
                r = tuple(rest)
                out[r] = out.get(r, 0) + c
        if trunc is None:
            trunc = self.trunc.replace(drop=[k for k in values if var_id(k) >= AUX_BASE])
        return Series({m: c for m, c in out.items() if c and trunc.admits(m)}, trunc, _raw=True)

    def substitute(self, values: Mapping[str, "Series"], trunc: Truncation | None = None) -> "Series":
        """Replace variables by series (polynomial substitution).

        The input is treated as exact; the result is truncated to ``trunc``.
        """
        trunc = trunc if trunc is not None else EXACT
        subs = {var_id(k): v for k, v in values.items()}
        powers: dict = {}

        def power(vid, e):
            key = (vid, e)
            if key not in powers:
                powers[key] = subs[vid].with_trunc(trunc) ** e
            return powers[key]

        total = Series.zero(trunc)
        grouped = defaultdict(dict)
        for m, c in self.terms.items():
            keep = tuple((v, e) for v, e in m if v not in subs)
            moved = tuple((v, e) for v, e in m if v in subs)
            grouped[moved][keep] = c
        for moved, rest in grouped.items():
            factor = Series.const(1, trunc)
            for v, e in moved:
                factor = factor * power(v, e)
            total = total + factor * Series(rest, trunc)
        return total

    def to_family(self, family: str) -> "Series":
        """Move the p-variables into the given family (``"p"`` or ``"q"``)."""
        if family == "p":
            return self
        if family != "q":
            raise ValueError(f"unknown family {family!r}")
        out = {}
        for m, c in self.terms.items():
            if any(Q_BASE <= v < AUX_BASE for v, _ in m):
                raise ValueError("series already uses q-variables")
            out[tuple(sorted((v + Q_BASE if v < Q_BASE else v, e) for v, e in m))] = c
        t = self.trunc.replace(p=None, q=self.trunc.p)
        return Series(out, t, _raw=True)

    def swap_families(self) -> "Series":
        """Exchange p_i and q_i."""
        out = {}
        for m, c in self.terms.items():
            nm = []
            for v, e in m:
                if v < Q_BASE:
                    nm.append((v + Q_BASE, e))
                elif v < AUX_BASE:
                    nm.append((v - Q_BASE, e))
                else:
                    nm.append((v, e))
            out[tuple(sorted(nm))] = c
        t = self.trunc.replace(p=self.trunc.q, q=self.trunc.p)
        return Series(out, t, _raw=True)

    # -- serialization

    def to_json_obj(self) -> dict:
        return {
            "header": {"truncation": self.trunc.to_dict()},
            "terms": [{"monomial": mono_dict(m), "coeff": str(c)} for m, c in self],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json(cls, data) -> "Series":
        if isinstance(data, str):
            data = json.loads(data)
        trunc = Truncation.from_dict(data["header"]["truncation"])
        return cls({monomial(t["monomial"]): t["coeff"] for t in data["terms"]}, trunc)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self:
            if not m:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(mono_str(m))
            elif c == -1:
                pieces.append("-" + mono_str(m))
            else:
                pieces.append(f"{c}*{mono_str(m)}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self):
        return f"Series({self}, {self.trunc!r})"


def _aux_ok(m, bounds) -> bool:
    for v, e in reversed(m):
        if v < AUX_BASE:
            return True
        b = bounds.get(v)
        if b is not None and e > b:
            return False
    return True


def series_det(matrix: list[list[Series]], trunc: Truncation | None = None) -> Series:
    """Determinant of a square matrix of series by Laplace expansion along rows,
    memoized on the set of columns still available."""
    n = len(matrix)
    trunc = trunc if trunc is not None else EXACT
    if n == 0:
        return Series.const(1, trunc)
    memo: dict[int, Series] = {}
    full = (1 << n) - 1

    def minor(mask: int) -> Series:
        # rows already used = n - popcount(mask)
        if mask == 0:
            return Series.const(1, trunc)
        if mask in memo:
            return memo[mask]
        row = n - bin(mask).count("1")
        total = Series.zero(trunc)
        sign = 1
        for col in range(n):
            bit = 1 << col
            if not mask & bit:
                continue
            entry = matrix[row][col]
            if not entry.is_zero():
                sub = minor(mask & ~bit)
                if not sub.is_zero():
                    term = entry * sub
                    total = total + term if sign > 0 else total - term
            sign = -sign
        memo[mask] = total
        return total

    return minor(full)
