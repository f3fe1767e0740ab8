"""Schur polynomials in the power-sum variables p_i (deg p_i = i)."""

from __future__ import annotations

import math
import threading

from gmpy2 import mpq

from tauforge.partitions import Partition, contents, dim_ratio, partitions, partitions_upto, z_factor
from tauforge.series import EXACT, Series, Truncation, monomial, series_det


class SchurCache:
    """Exact Schur polynomials keyed by partition.

    Entries are stored as exact polynomials and re-truncated on request, so a
    single cache serves every truncation.
    """

    def __init__(self):
        self._rows: list[Series] = [Series.const(1)]
        self._polys: dict[Partition, Series] = {}
        self._lock = threading.Lock()

    def row(self, k: int) -> Series:
        if k < 0:
            return Series.zero()
        with self._lock:
            # Newton: k s_k = sum_{i=1}^k p_i s_{k-i}
            while len(self._rows) <= k:
                n = len(self._rows)
                acc = Series.zero()
                for i in range(1, n + 1):
                    acc = acc + Series.var(f"p{i}") * self._rows[n - i]
                self._rows.append(acc.scale(mpq(1, n)))
            return self._rows[k]

    def get(self, p: Partition, rows: int | None = None) -> Series:
        p = Partition(p)
        if rows is not None:
            return _jacobi_trudi(p, rows, self.row)
        cached = self._polys.get(p)
        if cached is None:
            cached = _jacobi_trudi(p, len(p), self.row)
            with self._lock:
                self._polys[p] = cached
        return cached


def _jacobi_trudi(p: Partition, rows: int, row) -> Series:
    if rows < len(p):
        raise ValueError(f"need at least {len(p)} rows for {p}")
    parts = list(p) + [0] * (rows - len(p))
    matrix = [[row(parts[i] - i + j) for j in range(rows)] for i in range(rows)]
    return series_det(matrix)


_CACHE = SchurCache()


def _trunc(trunc) -> Truncation:
    if trunc is None:
        return EXACT
    if isinstance(trunc, int):
        return Truncation(p=trunc)
    return trunc


def schur_row(k: int, trunc=None) -> Series:
    """Coefficient of z^k in exp(sum p_i z^i / i)."""
    t = _trunc(trunc)
    if t.p is not None and k > t.p:
        raise ValueError(f"s_{k} exceeds the weight bound {t.p}")
    return _CACHE.row(k).with_trunc(t)


def schur(p: Partition, trunc=None, family: str = "p", rows: int | None = None) -> Series:
    """Schur polynomial s_p by the Jacobi-Trudi determinant det(s_{p_i - i + j}).

    ``rows`` pads the determinant with extra rows (the result does not depend
    on it); ``family="q"`` returns the polynomial in the q-variables.
    """
    p = Partition(p)
    t = _trunc(trunc)
    s = _CACHE.get(p, rows)
    if family == "q":
        s = s.to_family("q")
        bound = t.q
    else:
        bound = t.p
    if bound is not None and p.size() > bound:
        raise ValueError(f"|{p}| exceeds the weight bound {bound}")
    return s.with_trunc(t)


def principal_specialization(p: Partition, v) -> mpq:
    """s_p at p_i = v for all i, via dim_p/|p|! * prod (v + c(w))."""
    v = mpq(v)
    return dim_ratio(p) * math.prod((v + c for c in contents(p)), start=mpq(1))


def evaluate_at(s: Series, values: dict[int, object]) -> mpq:
    """Evaluate a p-polynomial at p_i = values[i] (missing indices are 0)."""
    vals = {f"p{i}": v for i, v in values.items()}
    for m in s.terms:
        for vid, _ in m:
            name = f"p{vid}"
            vals.setdefault(name, 0)
    return s.evaluate(vals, EXACT).constant_term()


def cauchy_sum(trunc) -> Series:
    """Sum over |mu| <= N of s_mu(p) s_mu(q)."""
    t = _trunc(trunc)
    if isinstance(trunc, int):
        t = Truncation(p=trunc, q=trunc)
    n = min(x for x in (t.p, t.q) if x is not None)
    total = Series.zero(t)
    for mu in partitions_upto(n):
        total = total + schur(mu, t) * schur(mu, t, family="q")
    return total


def power_monomial(mu: Partition, family: str = "p") -> tuple:
    """The monomial p_mu = p_{mu_1} p_{mu_2} ... as a series key."""
    d: dict[str, int] = {}
    for part in mu:
        d[f"{family}{part}"] = d.get(f"{family}{part}", 0) + 1
    return monomial(d)


def power_sum_expansion_row(k: int) -> Series:
    """s_k = sum over mu |- k of p_mu / z_mu (independent route to schur_row)."""
    return Series({power_monomial(mu): mpq(1, z_factor(mu)) for mu in partitions(k)})
