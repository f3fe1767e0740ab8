"""Tau-functions: the content-product family, its genus expansion, the
two-set family for the Toda lattice, and the plane-to-tau construction."""

from __future__ import annotations

import math
from typing import Callable, Sequence

from gmpy2 import mpq

from tauforge.partitions import Partition, contents, dim_ratio, partitions_upto
from tauforge.schur import schur
from tauforge.series import AUX_BASE, Q_BASE, Series, Truncation, TruncationError, rational

HBAR = "h"


def _as_series(x) -> Series:
    return x if isinstance(x, Series) else Series.const(rational(x))


def _var(x) -> Series:
    return Series.var(x) if isinstance(x, str) else _as_series(x)


# ---------------------------------------------------------------- parameters

class TauParams:
    """Content weights y_c, given either explicitly or through
    phi(c) = d_0 + d_1 c + d_2 c^2 + ...

    ``weight(c, trunc)`` returns y_c as a series; ``d(k)`` returns the k-th
    coefficient of phi (``max_k`` bounds the nonzero ones, None if infinite).
    """

    def __init__(self, name: str, weight: Callable[[int, Truncation], Series] | None = None,
                 d: Callable[[int], Series] | None = None, max_k: int | None = None):
        if weight is None and d is None:
            raise ValueError("need an explicit weight or phi coefficients")
        self.name = name
        self._weight = weight
        self._d = d
        self.max_k = max_k
        self._cache: dict = {}

    def has_phi(self) -> bool:
        return self._d is not None

    def d(self, k: int) -> Series:
        if self._d is None:
            raise ValueError(f"{self.name} weights are not given in phi form")
        if self.max_k is not None and k > self.max_k:
            return Series.zero()
        return _as_series(self._d(k))

    def y(self, c: int, trunc: Truncation) -> Series:
        key = (c, trunc)
        val = self._cache.get(key)
        if val is None:
            if self._weight is not None:
                val = _as_series(self._weight(c, trunc)).with_trunc(trunc)
            else:
                val = self._phi_sum(c, trunc, None)
            self._cache[key] = val
        return val

    def phi_hbar(self, c: int, trunc: Truncation) -> Series:
        """phi(hbar c) = sum_k d_k c^k hbar^k, cut at the hbar bound of trunc."""
        key = ("h", c, trunc)
        val = self._cache.get(key)
        if val is None:
            val = self._phi_sum(c, trunc, HBAR)
            self._cache[key] = val
        return val

    def _phi_sum(self, c: int, trunc: Truncation, scale: str | None) -> Series:
        bound = self.max_k
        if scale is not None:
            hb = trunc.aux_bound(scale)
            if hb is None:
                raise TruncationError(f"genus expansion needs a bound on {scale}")
            bound = hb if bound is None else min(bound, hb)
        if bound is None:
            raise TruncationError(f"{self.name}: phi has infinitely many terms; bound {scale or 'it'}")
        total = Series.zero(trunc)
        for k in range(bound + 1):
            dk = self.d(k)
            if dk.is_zero() or (c == 0 and k > 0):
                continue
            term = dk.scale(mpq(c) ** k)
            if scale is not None and k:
                term = term * Series({((_hid(), k),): 1})
            total = total + term.with_trunc(trunc)
        return total

    def y_mu(self, mu: Partition, trunc: Truncation, shift: int = 0) -> Series:
        """prod over cells of y_{c(w) + shift}."""
        out = Series.const(1, trunc)
        counts: dict[int, int] = {}
        for c in contents(mu):
            counts[c + shift] = counts.get(c + shift, 0) + 1
        for c, e in sorted(counts.items()):
            out = out * self.y(c, trunc) ** e
        return out

    def r0(self, n: int, trunc: Truncation) -> Series:
        """Normalizing factor of tau_n in the two-set family."""
        out = Series.const(1, trunc)
        if n >= 0:
            for j in range(1, n):
                out = out * self.y(j, trunc) ** (n - j)
        else:
            for j in range(n + 1, 1):
                out = out * self.y(j, trunc) ** (j - n)
        return out

    def __repr__(self):
        return f"TauParams({self.name})"


def _hid() -> int:
    from tauforge.series import var_id
    return var_id(HBAR)


def _elementary(vals: Sequence[Series], k: int) -> Series:
    e = [Series.const(1)] + [Series.zero()] * k
    for v in vals:
        for j in range(k, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e[k]


def _gen_binom(m: int, k: int) -> mpq:
    out = mpq(1)
    for i in range(k):
        out = out * (m - i) / (i + 1)
    return out


FAMILIES = ("hurwitz", "generalized", "bms", "monotonic", "n-function", "custom-phi")


def named_params(kind: str, m: int | None = None, u=None, d: Sequence | None = None) -> TauParams:
    """Content weights of a named family.

    ``u`` is the parameter: a variable name, a series or rational, or for
    ``generalized`` a sequence of them (default u1..um).  ``custom-phi`` takes
    ``d = [d_0, d_1, ...]`` (rationals, series or variable names); with d
    omitted it uses the formal variables d0..d31.
    """
    if kind == "hurwitz":
        U = _var(u if u is not None else "u")
        return TauParams("hurwitz",
                         weight=lambda c, t: U.with_trunc(t).scale(c).exp() if c else Series.const(1, t),
                         d=lambda k: U ** k * mpq(1, math.factorial(k)))
    if kind == "generalized":
        if m is None:
            m = len(u) if u is not None else 2
        us = [_var(x) for x in (u if u is not None else [f"u{i}" for i in range(1, m + 1)])]
        if len(us) != m:
            raise ValueError(f"generalized({m}) needs {m} parameters")

        def gen_weight(c, t):
            out = Series.const(1, t)
            for ui in us:
                out = out * (Series.const(1, t) + ui.with_trunc(t).scale(c))
            return out
        return TauParams(f"generalized({m})", weight=gen_weight,
                         d=lambda k: _elementary(us, k), max_k=m)
    if kind == "bms":
        if m is None:
            raise ValueError("bms needs m")
        U = _var(u if u is not None else "u")

        def bms_weight(c, t):
            base = Series.const(1, t) + U.with_trunc(t).scale(c)
            return base ** m
        return TauParams(f"bms({m})", weight=bms_weight,
                         d=lambda k: U ** k * _gen_binom(m, k),
                         max_k=m if m >= 0 else None)
    if kind == "monotonic":
        # 1/(1 - uc) has a pole at u = 1/c, so u stays formal
        if u is not None and not isinstance(u, (str, Series)):
            raise ValueError("monotonic weights need a formal parameter u, not a number")
        U = _var(u if u is not None else "u")
        return TauParams("monotonic",
                         weight=lambda c, t: (Series.const(1, t) - U.with_trunc(t).scale(c)).reciprocal(),
                         d=lambda k: U ** k)
    if kind == "n-function":
        U = _var(u if u is not None else "u")
        return TauParams("n-function", weight=lambda c, t: U.with_trunc(t) + c,
                         d=lambda k: U if k == 0 else Series.const(1), max_k=1)
    if kind == "custom-phi":
        if d is None:
            coeffs = [Series.var(f"d{k}") for k in range(32)]
        else:
            coeffs = [_var(x) for x in d]
        return TauParams("custom-phi", d=lambda k: coeffs[k] if k < len(coeffs) else Series.zero(),
                         max_k=len(coeffs) - 1)
    raise ValueError(f"unknown family {kind!r}; expected one of {', '.join(FAMILIES)}")


# ---------------------------------------------------------------- one-set family

def _weight_bound(trunc: Truncation, family: str = "p") -> int:
    b = trunc.p if family == "p" else trunc.q
    if b is None:
        raise TruncationError(f"a weight bound on the {family}-variables is required")
    return b


def orlov_shcherbin_tau(y: TauParams, trunc: Truncation) -> Series:
    """sum over |mu| <= N of y_mu (dim_mu / |mu|!) s_mu(p)."""
    total = Series.zero(trunc)
    for mu in partitions_upto(_weight_bound(trunc)):
        total = total + (y.y_mu(mu, trunc) * schur(mu, trunc)).scale(dim_ratio(mu))
    return total


def genus_expansion(y: TauParams, trunc: Truncation, genus_max: int = 1) -> Series:
    """hbar^2 log sum_mu prod phi(hbar c) (dim_mu/|mu|!) s_mu(p_i / hbar^{i+1}).

    Computed as the log of the series with p unscaled, followed by the
    rescaling p_i -> hbar^{-i-1} p_i.  A monomial p_lambda hbar^k of the log
    lands at hbar^{k - |lambda| - l(lambda) + 2}, so an hbar bound of
    2N - 2 + 2 genus_max before rescaling determines every term up to
    hbar^{2 genus_max}.  Raises if an odd or negative power of hbar survives.
    """
    if not y.has_phi():
        raise ValueError(f"{y.name} has no phi form")
    d0 = y.d(0)
    if d0 != 1:
        raise ValueError("genus expansion needs phi(0) = 1")
    N = _weight_bound(trunc)
    top = max(2 * N - 2 + 2 * genus_max, 0)
    t = trunc.replace(aux={HBAR: top})
    Z = Series.zero(t)
    for mu in partitions_upto(N):
        w = Series.const(1, t)
        for c in contents(mu):
            w = w * y.phi_hbar(c, t)
        Z = Z + (w * schur(mu, t)).scale(dim_ratio(mu))
    F = Z.log()
    Fh = F.substitute_scaled(HBAR, lambda vid: -(vid + 1) if vid < Q_BASE else 0,
                             bound=2 * genus_max, offset=2)
    check_genus_parity(Fh)
    return Fh


def check_genus_parity(Fh: Series):
    hid = _hid()
    for m in Fh.terms:
        e = dict(m).get(hid, 0)
        if e < 0 or e % 2:
            raise ArithmeticError(f"hbar^{e} in a genus expansion")


def genus_part(Fh: Series, g: int) -> Series:
    return Fh.coeff_series(HBAR, 2 * g)


# ---------------------------------------------------------------- two-set family

def toda_tau(n: int, y: TauParams, trunc: Truncation, v: str | None = None) -> Series:
    """r_0(n) sum_mu r_mu(n) s_mu(p) s_mu(q), optionally with v^{|mu|}."""
    N = min(_weight_bound(trunc, "p"), _weight_bound(trunc, "q"))
    total = Series.zero(trunc)
    for mu in partitions_upto(N):
        term = y.y_mu(mu, trunc, shift=n) * schur(mu, trunc) * schur(mu, trunc, family="q")
        if v is not None and mu.size():
            term = term * Series({((_vid(v), mu.size()),): 1})
        total = total + term
    return total * y.r0(n, trunc)


def _vid(name: str) -> int:
    from tauforge.series import var_id
    return var_id(name)


class TodaFamily:
    """tau_n for all n, computed lazily."""

    def __init__(self, y: TauParams, trunc: Truncation, max_charge: int = 3,
                 v: str | None = None):
        self.y = y
        self.trunc = trunc
        self.max_charge = max_charge
        self.v = v
        self._taus: dict[int, Series] = {}
        self._overrides: dict[int, Series] = {}

    def __getitem__(self, n: int) -> Series:
        if n in self._overrides:
            return self._overrides[n]
        if abs(n) > self.max_charge:
            raise ValueError(f"charge {n} beyond the configured limit {self.max_charge}")
        if n not in self._taus:
            self._taus[n] = toda_tau(n, self.y, self.trunc, self.v)
        return self._taus[n]

    def with_override(self, n: int, tau: Series) -> "TodaFamily":
        out = TodaFamily(self.y, self.trunc, self.max_charge, self.v)
        out._taus = self._taus
        out._overrides = dict(self._overrides)
        out._overrides[n] = tau
        return out


def double_hurwitz_tau(trunc: Truncation, u="u", v: str | None = "v") -> Series:
    """D-circ: sum_mu e^{u f_2(mu)} s_mu(p) s_mu(q) v^{|mu|}."""
    return toda_tau(0, named_params("hurwitz", u=u), trunc, v)


def n_function(trunc: Truncation, u="u") -> Series:
    """N = log sum_mu prod (u + c) s_mu(p) s_mu(q)."""
    return toda_tau(0, named_params("n-function", u=u), trunc).log()


def map_series(n_max: int, w="w", z: str = "z") -> Series:
    """R(w, z; p): N at u = w, q_2 = z, other q_i = 0.

    The coefficient of p_kappa w^m z^n is the automorphism-weighted number of
    connected maps with n edges, m faces and vertex degrees kappa.
    """
    N = 2 * n_max
    t = Truncation(p=N, q=N)
    y = named_params("n-function", u=w)
    total = Series.zero(Truncation(p=N, aux={z: n_max}))
    zid = _vid(z)
    for mu in partitions_upto(N):
        sq = schur(mu, t, family="q")
        # keep only monomials in q_2, rename q_2^k -> z^k
        spec = {}
        for m, c in sq.terms.items():
            if not m:
                spec[()] = c
            elif len(m) == 1 and m[0][0] == Q_BASE + 2:
                spec[((zid, m[0][1]),)] = c
        if not spec:
            continue
        total = total + y.y_mu(mu, t) * schur(mu, t) * Series(spec)
    return total.with_trunc(Truncation(p=N, aux={z: n_max})).log()


# ---------------------------------------------------------------- planes

class LaurentPlane:
    """Rows beta_k(z) = sum_e c_{k,e} z^e for k = 1..K, known for e <= zmax.

    Rows past K are taken to be z^{-k} exactly.
    """

    def __init__(self, rows: dict[int, dict[int, object]], zmax: int):
        self.rows = {k: {e: _as_series(c) for e, c in r.items()} for k, r in rows.items()}
        self.zmax = zmax
        for k, r in self.rows.items():
            low = [e for e, c in r.items() if e < -k and not c.is_zero()]
            if low:
                raise ValueError(f"beta_{k} has a term z^{min(low)} below z^{-k}")

    @property
    def depth(self) -> int:
        return max(self.rows, default=0)

    def coeff(self, k: int, e: int) -> Series:
        if e > self.zmax:
            raise TruncationError(f"z^{e} lies beyond the known depth z^{self.zmax}")
        if k not in self.rows:
            return Series.const(1 if e == -k else 0)
        return self.rows[k].get(e, Series.zero())

    def leading(self, k: int) -> Series:
        return self.coeff(k, -k)


def exp_plane(N: int) -> LaurentPlane:
    """beta_k = e^z z^{-k}."""
    return LaurentPlane({k: {i - k: mpq(1, math.factorial(i)) for i in range(N + k)}
                         for k in range(1, N + 1)}, N - 1)


def diagonal_plane(y: TauParams, N: int, trunc: Truncation) -> LaurentPlane:
    """e^z z^{-k} plane acted on by diag(u_j): beta_k = (1/u_{-k}) sum_i u_{i-k} z^{i-k}/i!,
    with u_0 = 1 and u_j / u_{j-1} = y_j."""
    u = {0: Series.const(1, trunc)}
    for j in range(1, N):
        u[j] = u[j - 1] * y.y(j, trunc)
    for j in range(-1, -N - 1, -1):
        u[j] = u[j + 1] * y.y(j + 1, trunc).reciprocal()
    rows = {}
    for k in range(1, N + 1):
        inv = u[-k].reciprocal()
        rows[k] = {i - k: (u[i - k] * inv).scale(mpq(1, math.factorial(i)))
                   for i in range(N + k)}
    return LaurentPlane(rows, N - 1)


def plane_to_tau(plane: LaurentPlane, trunc: Truncation) -> Series:
    """sum_mu det[coefficient of z^{mu_i - i} in beta_j]_{i,j <= l(mu)} s_mu(p).

    Each row is first divided by its leading coefficient.  With leading
    terms z^{-k} the infinite minor is block triangular with a unit block
    past l(mu), so the l(mu) x l(mu) minor is exact.
    """
    from tauforge.series import series_det
    N = _weight_bound(trunc)
    if N - 1 > plane.zmax:
        raise TruncationError(f"weight {N} needs rows known through z^{N - 1}")
    lead_inv = {}
    for k in range(1, N + 1):
        a = plane.leading(k)
        if a.is_zero():
            raise ZeroDivisionError(f"beta_{k} has no z^{-k} term; the vacuum coefficient vanishes")
        lead_inv[k] = a.with_trunc(trunc).reciprocal()
    total = Series.const(1, trunc)
    for mu in partitions_upto(N):
        if not mu:
            continue
        L = len(mu)
        rows = [mu[i] - (i + 1) for i in range(L)]
        matrix = [[(plane.coeff(j, rows[i]).with_trunc(trunc) * lead_inv[j])
                   for j in range(1, L + 1)] for i in range(L)]
        coef = series_det(matrix, trunc)
        if not coef.is_zero():
            total = total + coef * schur(mu, trunc)
    return total


def plucker_g24_residual(a: Sequence, b: Sequence) -> mpq:
    """y12 y34 - y13 y24 + y14 y23 for the minors y_ij = a_i b_j - a_j b_i."""
    a = [rational(x) for x in a]
    b = [rational(x) for x in b]
    if len(a) != 4 or len(b) != 4:
        raise ValueError("need two 4-vectors")

    def y(i, j):
        return a[i - 1] * b[j - 1] - a[j - 1] * b[i - 1]
    return y(1, 2) * y(3, 4) - y(1, 3) * y(2, 4) + y(1, 4) * y(2, 3)


__all__ = [
    "TauParams", "named_params", "orlov_shcherbin_tau", "genus_expansion", "genus_part",
    "toda_tau", "TodaFamily", "double_hurwitz_tau", "n_function", "map_series",
    "LaurentPlane", "exp_plane", "diagonal_plane", "plane_to_tau", "plucker_g24_residual",
    "FAMILIES", "HBAR", "AUX_BASE",
]
