"""Maps as permutation triples, rooted triangulations, the constants b_g and
the asymptotic checks built on them."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from tauforge.partitions import (Partition, aut_order, class_size, contents, dim_ratio,
                                 partitions, partitions_upto)
from tauforge.series import Series, monomial, rational
from tauforge.symmetric_group import (_Meter, compose, cycle_type, inverse, is_transitive,
                                      num_cycles, permutations_of_type)


# ---------------------------------------------------------------- permutation triples

def fixed_involution(n_edges: int) -> tuple:
    """alpha = (1 2)(3 4)... on 2n half-edges (0-based tuple)."""
    img = []
    for e in range(n_edges):
        img += [2 * e + 1, 2 * e]
    return tuple(img)


@dataclass(frozen=True)
class MapTriple:
    """Half-edge triple with phi o alpha o sigma = id."""
    alpha: tuple
    sigma: tuple
    phi: tuple = field(default=None)

    def __post_init__(self):
        n = len(self.alpha)
        if n % 2 or any(self.alpha[i] == i or self.alpha[self.alpha[i]] != i for i in range(n)):
            raise ValueError("alpha must be a fixed-point-free involution")
        phi = inverse(compose(self.alpha, self.sigma))
        if self.phi is None:
            object.__setattr__(self, "phi", phi)
        elif tuple(self.phi) != phi:
            raise ValueError("phi o alpha o sigma is not the identity")

    @property
    def n_edges(self) -> int:
        return len(self.alpha) // 2

    def vertices(self) -> int:
        return num_cycles(self.sigma)

    def faces(self) -> int:
        return num_cycles(self.phi)

    def connected(self) -> bool:
        return is_transitive([self.alpha, self.sigma], len(self.alpha))

    def genus(self) -> int:
        chi = self.vertices() - self.n_edges + self.faces()
        return (2 - chi) // 2


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def map_oracle(n_edges: int, vertex_type=None, face_type=None, face_count: int | None = None,
               genus: int | None = None, connected: bool = True, rooted: bool = True,
               budget: int | None = None) -> mpq:
    """Automorphism-weighted count |{(alpha, sigma, phi)}| / (2n)! of maps with
    n edges; ``rooted=True`` multiplies by 2n.

    alpha is fixed to (1 2)(3 4)... and the count scaled by the number
    (2n-1)!! of fixed-point-free involutions.  When ``vertex_type`` is given
    only sigma of that type are enumerated; otherwise when ``face_type`` is
    given phi is enumerated and sigma = alpha o phi^{-1}.
    """
    n = 2 * n_edges
    alpha = fixed_involution(n_edges)
    if vertex_type is not None:
        vertex_type = Partition(vertex_type)
        if vertex_type.size() != n:
            raise ValueError(f"vertex type must be a partition of {n}")
    if face_type is not None:
        face_type = Partition(face_type)
        if face_type.size() != n:
            raise ValueError(f"face type must be a partition of {n}")
    if vertex_type is not None:
        candidates = permutations_of_type(vertex_type)
        total = class_size(vertex_type)
        mode = "sigma"
    elif face_type is not None:
        candidates = permutations_of_type(face_type)
        total = class_size(face_type)
        mode = "phi"
    else:
        candidates = itertools.permutations(range(n))
        total = math.factorial(n)
        mode = "sigma"
    meter = _Meter(budget)
    meter.charge(total)
    count = 0
    for g in candidates:
        if mode == "sigma":
            sigma = g
            phi = inverse(compose(alpha, sigma))
        else:
            phi = g
            sigma = compose(alpha, inverse(phi))
        if mode == "sigma" and face_type is not None and cycle_type(phi) != face_type:
            continue
        faces = num_cycles(phi)
        if face_count is not None and faces != face_count:
            continue
        if connected and not is_transitive([alpha, sigma], n):
            continue
        if genus is not None:
            chi = num_cycles(sigma) - n_edges + faces
            if chi != 2 - 2 * genus:
                continue
        count += 1
    weighted = mpq(count * _double_factorial(n - 1), math.factorial(n))
    return weighted * n if rooted else weighted


def rooted_cubic_count(n: int, g: int, budget: int | None = None) -> mpq:
    """Rooted connected maps of genus g with 2n trivalent vertices (duals of
    triangulations with 2n triangles)."""
    return map_oracle(3 * n, vertex_type=[3] * (2 * n), genus=g, budget=budget)


def rooted_triangulation_count(n: int, g: int, budget: int | None = None) -> mpq:
    """Rooted connected maps of genus g with 2n triangular faces."""
    return map_oracle(3 * n, face_type=[3] * (2 * n), genus=g, budget=budget)


# ---------------------------------------------------------------- triangulations

def in_domain(n: int, g: int) -> bool:
    return n >= -1 and 0 <= g and 2 * g <= n + 1


@dataclass
class TriangulationTable:
    t: dict[tuple[int, int], mpq]
    t00: mpq

    def T(self, n: int, g: int) -> mpq:
        if not in_domain(n, g):
            return mpq(0)
        return self.t[(n, g)] / (3 * n + 2)

    def rows(self):
        for (n, g) in sorted(self.t):
            yield n, g, self.t[(n, g)], self.T(n, g)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "g", "t", "T"])
        for n, g, t, T in self.rows():
            w.writerow([n, g, _fmt(t), _fmt(T)])
        return buf.getvalue()


def _fmt(x) -> str:
    x = mpq(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def calibrate_t00(budget: int | None = None) -> mpq:
    """t(0,0) from the brute-force count of T(1,0).

    At (1,0) the recurrence reduces to t(1,0) = 10 * 2 t(-1,0) t(0,0) = 10 t(0,0),
    and T(1,0) = t(1,0) / 5.
    """
    T10 = rooted_cubic_count(1, 0, budget)
    return T10 * 5 / 10


def triangulation_table(n_max: int, g_max: int | None = None, t00=None) -> TriangulationTable:
    """t(n, g) for -1 <= n <= n_max by the quadratic recurrence."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    t00 = calibrate_t00() if t00 is None else rational(t00)
    t: dict[tuple[int, int], mpq] = {(-1, 0): mpq(1, 2), (0, 0): t00}

    def get(n, g):
        return t.get((n, g), mpq(0)) if in_domain(n, g) else mpq(0)

    for n in range(1, n_max + 1):
        top = (n + 1) // 2 if g_max is None else min((n + 1) // 2, g_max)
        for g in range(top + 1):
            acc = n * (3 * n - 2) * get(n - 2, g - 1)
            for i in range(-1, n):
                j = n - 2 - i
                for h in range(g + 1):
                    a = get(i, h)
                    if a:
                        b = get(j, g - h)
                        if b:
                            acc += a * b
            t[(n, g)] = mpq(4 * (3 * n + 2), n + 1) * acc
    return TriangulationTable(t, t00)


# ---------------------------------------------------------------- b_g and Painleve I

@dataclass
class BgTable:
    b: list[mpq]

    def __getitem__(self, g: int) -> mpq:
        return self.b[g]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["g", "b_g"])
        for g, v in enumerate(self.b):
            w.writerow([g, _fmt(v)])
        return buf.getvalue()


def bg_table(g_max: int) -> BgTable:
    """b_0 = -1, b_{g+1} = (25 g^2 - 1)/24 b_g + 1/2 sum_{m=1}^{g} b_{g+1-m} b_m.

    The step g = 0 (empty sum) gives b_1 = 1/24.
    """
    b = [mpq(-1)]
    for g in range(g_max):
        acc = mpq(25 * g * g - 1, 24) * b[g]
        acc += sum((b[g + 1 - m] * b[m] for m in range(1, g + 1)), mpq(0)) / 2
        b.append(acc)
    return BgTable(b)


def painleve_residual(b, g_max: int) -> Series:
    """Coefficients of U''/3 + U^2 - y for U = sum_g b_g y^{(1-5g)/2}.

    The coefficient of y^{1 - 5G/2} is returned as the coefficient of s^G
    (s stands for y^{-5/2}); it is
    sum_{g+h=G} b_g b_h + a(a-1)/3 b_{G-1} - [G = 0],  a = (6 - 5G)/2.
    """
    out = {}
    for G in range(g_max + 1):
        c = sum((b[g] * b[G - g] for g in range(G + 1)), mpq(0))
        if G >= 1:
            a = mpq(6 - 5 * G, 2)
            c += a * (a - 1) / 3 * b[G - 1]
        if G == 0:
            c -= 1
        out[monomial({"s": G})] = c
    return Series(out)


def painleve_check(g_max: int, table: BgTable | None = None):
    from tauforge.hierarchy import ResidualReport
    table = table if table is not None else bg_table(g_max)
    return ResidualReport("painleve.I", painleve_residual(table.b, g_max), g_max)


# ---------------------------------------------------------------- asymptotics (binary64)

def triangulation_asymptotic(n: int, g: int, bg: BgTable | None = None) -> float:
    """3 b_g / Gamma(5g/2 - 1/2) (3/8)^{(g-1)/2} n^{5(g-1)/2} (12 sqrt 3)^n."""
    return math.exp(_log_tri_asymptotic(n, g, bg)) * _sign(bg, g)


def _bg(bg, g):
    return (bg if bg is not None else bg_table(g))[g]


def _sign(bg, g) -> float:
    b = _bg(bg, g)
    s = 1 if b > 0 else -1
    return s * (1 if math.gamma(2.5 * g - 0.5) > 0 else -1)


def _log_tri_asymptotic(n: int, g: int, bg) -> float:
    b = abs(float(_bg(bg, g)))
    gam = abs(math.gamma(2.5 * g - 0.5))
    return (math.log(3 * b / gam) + (g - 1) / 2 * math.log(3 / 8)
            + 2.5 * (g - 1) * math.log(n) + n * math.log(12 * math.sqrt(3)))


def _log_ratio(exact, log_asym: float) -> float:
    x = mpq(exact)
    return math.log(int(x.numerator)) - math.log(int(x.denominator)) - log_asym


@dataclass
class TrendReport:
    label: str
    points: list[tuple[int, float]]   # (n, ratio)

    def deviation(self, n: int) -> float:
        return abs(dict(self.points)[n] - 1)

    def improves(self, n_lo: int, n_hi: int) -> bool:
        return self.deviation(n_hi) < self.deviation(n_lo)


def triangulation_trend(g: int, ns, table: TriangulationTable | None = None) -> TrendReport:
    ns = list(ns)
    table = table if table is not None else triangulation_table(max(ns), g_max=g)
    bg = bg_table(max(g, 1))
    pts = []
    for n in ns:
        T = table.T(n, g)
        pts.append((n, math.exp(_log_ratio(T, _log_tri_asymptotic(n, g, bg))) * _sign(bg, g)))
    return TrendReport(f"T(n,{g}) / asymptotic", pts)


def _poly_mul(a, b, deg):
    out = [mpq(0)] * (deg + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), deg + 1 - i)):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def hurwitz_one_part_numbers(n_max: int, g: int) -> dict[int, mpq]:
    """h_{m;1^n} / m! with m = 2n + 2g - 2, for 1 <= n <= n_max.

    The p_1^n part of the disconnected series is
    A_n(u) = sum_{lambda |- n} e^{u f_2(lambda)} (dim_lambda / n!)^2;
    the connected part is its logarithm in x = p_1, by the recurrence
    n B_n = n A_n - sum_{k<n} k B_k A_{n-k}.
    """
    deg = 2 * n_max + 2 * g - 2
    facts = [mpq(1, math.factorial(k)) for k in range(deg + 1)]
    A = [[mpq(1)] + [mpq(0)] * deg]
    for n in range(1, n_max + 1):
        weights: dict[int, mpq] = {}
        for lam in partitions(n):
            f2 = sum(contents(lam))
            weights[f2] = weights.get(f2, mpq(0)) + dim_ratio(lam) ** 2
        poly = [mpq(0)] * (deg + 1)
        for f2, w in weights.items():
            pw = mpq(1)
            for k in range(deg + 1):
                poly[k] += w * pw * facts[k]
                pw *= f2
        A.append(poly)
    B = [None]
    for n in range(1, n_max + 1):
        acc = [x * n for x in A[n]]
        for k in range(1, n):
            prod = _poly_mul(B[k], A[n - k], deg)
            acc = [x - k * y for x, y in zip(acc, prod)]
        B.append([x / n for x in acc])
    out = {}
    for n in range(1, n_max + 1):
        m = 2 * n + 2 * g - 2
        if m >= 0:
            out[n] = B[n][m]
    return out


def hurwitz_asymptotic(n: int, g: int, bg: BgTable | None = None) -> float:
    """e^n n^{5(g-1)/2 - 1} b_g / (Gamma(5g/2 - 1/2) 2^{3g/2 - 1/2})."""
    b = float(_bg(bg, g))
    return (math.exp(n) * n ** (2.5 * (g - 1) - 1) * b
            / (math.gamma(2.5 * g - 0.5) * 2 ** (1.5 * g - 0.5)))


def hurwitz_asymptotic_check(n_max: int, g: int) -> TrendReport:
    vals = hurwitz_one_part_numbers(n_max, g)
    bg = bg_table(max(g, 1))
    pts = [(n, float(v) / hurwitz_asymptotic(n, g, bg)) for n, v in sorted(vals.items())]
    return TrendReport(f"h_(2n+{2 * g}-2;1^n) / asymptotic", pts)


# ---------------------------------------------------------------- genus-0 closed forms

def rising(x: int, r: int) -> mpq:
    """(d+1)^{overline r} with x = d+1: x (x+1) ... (x+r-1); for r < 0 it is
    1 / ((x+r) (x+r+1) ... (x-1))."""
    if r >= 0:
        return mpq(math.prod(range(x, x + r)))
    return 1 / mpq(math.prod(range(x + r, x)))


def genus0_closed(kind: str, mu, m: int | None = None) -> mpq:
    """Closed genus-0 values.

    hurwitz: h_{m;mu} with m = |mu| + l(mu) - 2 (the coefficient of
    p_mu u^m in the connected series is this divided by m!);
    bms: b_{m,k;mu} with k = |mu| + l(mu) - 2 (coefficient of u^k p_mu);
    monotonic: the monotone number with m = |mu| + l(mu) - 2 (coefficient of u^m p_mu).
    """
    mu = Partition(mu)
    size, ell = mu.size(), mu.length()
    if not ell:
        raise ValueError("empty partition")
    if kind == "hurwitz":
        mm = size + ell - 2
        val = mpq(size) ** (ell - 3) * math.factorial(mm) / aut_order(mu)
        for x in mu:
            val *= mpq(x ** x, math.factorial(x))
        return val
    if kind == "bms":
        if m is None:
            raise ValueError("bms needs m")
        k = size + ell - 2
        val = m * rising(m * size - k + 1, ell - 3) / aut_order(mu)
        for x in mu:
            val *= _binom(m * x - 1, x)
        return val
    if kind == "monotonic":
        val = rising(2 * size + 1, ell - 3) / aut_order(mu)
        for x in mu:
            val *= math.comb(2 * x, x)
        return val
    raise ValueError(f"unknown kind {kind!r}")


def _binom(a: int, k: int) -> mpq:
    out = mpq(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


__all__ = [
    "MapTriple", "fixed_involution", "map_oracle", "rooted_cubic_count",
    "rooted_triangulation_count", "TriangulationTable", "triangulation_table", "calibrate_t00",
    "BgTable", "bg_table", "painleve_residual", "painleve_check", "triangulation_asymptotic",
    "triangulation_trend", "hurwitz_one_part_numbers", "hurwitz_asymptotic",
    "hurwitz_asymptotic_check", "TrendReport", "genus0_closed", "rising", "partitions_upto",
]
