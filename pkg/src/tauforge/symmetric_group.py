"""Brute-force ground truth in S_n.

Permutations are tuples of 0-based images.  Composition follows
``(f o g)(x) = f(g(x))`` throughout; a sequence ``t_1, ..., t_m`` has product
``t_1 o t_2 o ... o t_m``.  Factorization counts only depend on the cycle
type of the product, which is the same for a sequence and for its reversal
(the reversed product is the inverse of the product of the inverses), so the
reverse ordering ``eta_m o ... o eta_1`` gives identical counts.

Every counting oracle enumerates all sequences exhaustively.  Sequences are
aggregated by state ``(running product, orbit partition generated so far)``
so that long sequences stay tractable; ``enumerate_sequences`` gives the
literal one-tuple-at-a-time sweep for cross-checking on small cases.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import defaultdict
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

from gmpy2 import mpq

from tauforge.partitions import Partition, class_size, contents, degeneracy, partitions
from tauforge.series import Series, monomial, rational

DEFAULT_BUDGET = 50_000_000


class BudgetExceeded(RuntimeError):
    """An exhaustive sweep would exceed the configured work budget."""


class PoleError(ZeroDivisionError):
    """A content-product weight has a pole at some content value."""


def default_budget() -> int:
    env = os.environ.get("TAUFORGE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class _Meter:
    def __init__(self, budget: int | None):
        self.budget = default_budget() if budget is None else budget
        self.work = 0

    def charge(self, units: int):
        self.work += units
        if self.work > self.budget:
            raise BudgetExceeded(f"sweep exceeded budget of {self.budget} steps")


# ---------------------------------------------------------------- permutations

class Permutation(tuple):
    """A permutation of {1..n}, stored as 0-based images."""

    def __new__(cls, images: Iterable[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images}")
        return super().__new__(cls, images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        """Build from 1-based cycles, e.g. ``from_cycles(5, [(1, 2, 3), (4, 5)])``."""
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a - 1] = b - 1
        return cls(img)

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Permutation":
        """Build from 1-based images ``[g(1), g(2), ...]``."""
        return cls(x - 1 for x in images)

    @property
    def n(self) -> int:
        return len(self)

    def __mul__(self, other):
        return Permutation(compose(self, other))

    def inverse(self) -> "Permutation":
        return Permutation(inverse(self))

    def cycles(self) -> list[tuple[int, ...]]:
        return [tuple(x + 1 for x in c) for c in _cycles(self)]

    def cycle_type(self) -> Partition:
        return cycle_type(self)

    def __str__(self):
        cs = [c for c in self.cycles() if len(c) > 1]
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cs) or "id"


def compose(f, g) -> tuple:
    return tuple(f[x] for x in g)


def inverse(f) -> tuple:
    inv = [0] * len(f)
    for i, x in enumerate(f):
        inv[x] = i
    return tuple(inv)


def _cycles(g) -> list[list[int]]:
    seen = [False] * len(g)
    out = []
    for i in range(len(g)):
        if not seen[i]:
            c = []
            j = i
            while not seen[j]:
                seen[j] = True
                c.append(j)
                j = g[j]
            out.append(c)
    return out


@lru_cache(maxsize=1 << 20)
def cycle_type(g) -> Partition:
    return Partition(len(c) for c in _cycles(g))


def num_cycles(g) -> int:
    return len(_cycles(g))


def perm_degeneracy(g) -> int:
    return len(g) - num_cycles(g)


def is_transitive(gens: Sequence, n: int) -> bool:
    """True iff the group generated by ``gens`` acts transitively on {1..n}."""
    if n <= 1:
        return True
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        if len(g) != n:
            raise ValueError("generator size mismatch")
        for i, gi in enumerate(g):
            a, b = find(i), find(gi)
            if a != b:
                parent[a] = b
    root = find(0)
    return all(find(i) == root for i in range(n))


@lru_cache(maxsize=None)
def all_permutations(n: int) -> tuple[tuple, ...]:
    return tuple(itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def permutations_by_type(n: int) -> dict[Partition, tuple[tuple, ...]]:
    out: dict[Partition, list] = defaultdict(list)
    for g in all_permutations(n):
        out[cycle_type(g)].append(g)
    return {k: tuple(v) for k, v in out.items()}


def permutations_of_type(mu) -> Iterator[tuple]:
    """All permutations of cycle type mu, without enumerating the whole group.

    The smallest unused point opens each new cycle, so every permutation is
    produced exactly once.
    """
    mu = Partition(mu)
    n = mu.size()
    img = [None] * n
    remaining = dict(mu.multiplicities())

    def fill(unused: list[int]):
        if not unused:
            yield tuple(img)
            return
        a, rest = unused[0], unused[1:]
        for length in sorted(remaining):
            if not remaining[length]:
                continue
            remaining[length] -= 1
            for others in itertools.permutations(rest, length - 1):
                cyc = (a,) + others
                for x, y in zip(cyc, cyc[1:] + cyc[:1]):
                    img[x] = y
                left = [x for x in rest if x not in others] if others else rest
                yield from fill(left)
            remaining[length] += 1

    yield from fill(list(range(n)))


@lru_cache(maxsize=None)
def transpositions(n: int) -> tuple[tuple[tuple, int, int], ...]:
    """All (perm, a, b) with a < b (0-based), ordered by b then a."""
    out = []
    for b in range(n):
        for a in range(b):
            img = list(range(n))
            img[a], img[b] = b, a
            out.append((tuple(img), a, b))
    return tuple(out)


# ---------------------------------------------------------------- orbit tracking

def _trivial_labels(n: int) -> tuple:
    return tuple(range(n))


def _merge(labels: tuple, a: int, b: int) -> tuple:
    la, lb = labels[a], labels[b]
    if la == lb:
        return labels
    lo, hi = (la, lb) if la < lb else (lb, la)
    return tuple(lo if x == hi else x for x in labels)


@lru_cache(maxsize=1 << 18)
def _merge_perm(labels: tuple, g: tuple) -> tuple:
    for i, gi in enumerate(g):
        if labels[i] != labels[gi]:
            labels = _merge(labels, i, gi)
    return labels


def _connected(labels) -> bool:
    return labels is None or all(x == 0 for x in labels)


def _normalize(counts: dict, n: int) -> dict:
    f = math.factorial(n)
    return {k: mpq(v, f) for k, v in sorted(counts.items(), key=lambda kv: _sort_key(kv[0]))}


def _sort_key(k):
    if isinstance(k, Partition):
        return (k.size(), [-x for x in k])
    return tuple(_sort_key(x) if isinstance(x, Partition) else x for x in k)


# ---------------------------------------------------------------- literal sweep

def enumerate_sequences(n: int, choices: Sequence[Sequence[tuple]], connected: bool,
                        predicate: Callable[[tuple], bool] | None = None,
                        budget: int | None = None) -> dict[Partition, int]:
    """Literal sweep over ``itertools.product(*choices)``; returns raw counts by
    cycle type of the product.  Used to cross-check the aggregated sweeps."""
    meter = _Meter(budget)
    meter.charge(math.prod(len(c) for c in choices))
    counts: dict[Partition, int] = defaultdict(int)
    ident = tuple(range(n))
    for seq in itertools.product(*choices):
        if predicate is not None and not predicate(seq):
            continue
        if connected and not is_transitive(seq, n):
            continue
        g = ident
        for t in seq:
            g = compose(g, t)
        counts[cycle_type(g)] += 1
    return dict(counts)


# ---------------------------------------------------------------- oracles

def _sweep(n: int, steps: Sequence[Sequence[tuple]], connected: bool, meter: _Meter,
           start=None) -> dict:
    """Aggregate all sequences choosing steps[i] at step i.

    Each choice is ``(perm, tag)``; tags are summed into the state.  Returns
    raw counts keyed by ``(product, labels, tag_total)``.
    """
    ident = tuple(range(n))
    states = start if start is not None else {
        (ident, _trivial_labels(n) if connected else None, 0): 1}
    for choices in steps:
        meter.charge(len(states) * len(choices))
        new: dict = defaultdict(int)
        for (g, lab, acc), cnt in states.items():
            for t, tag in choices:
                nl = _merge_perm(lab, t) if connected else None
                new[(compose(g, t), nl, acc + tag)] += cnt
        states = new
    return states


def hurwitz_oracle(n: int, m: int, connected: bool = False,
                   budget: int | None = None) -> dict[Partition, mpq]:
    """h°_{m;mu} (or connected h_{m;mu}) for every mu |- n."""
    if n == 0:
        return {} if connected else {Partition(): mpq(1)}
    meter = _Meter(budget)
    trans = [(t, 0) for t, _, _ in transpositions(n)]
    counts: dict[Partition, int] = defaultdict(int)
    for (g, lab, _), cnt in _sweep(n, [trans] * m, connected, meter).items():
        if _connected(lab):
            counts[cycle_type(g)] += cnt
    return _normalize(counts, n)


def generalized_oracle(n: int, degeneracies: Sequence[int], connected: bool = False,
                       budget: int | None = None) -> dict[Partition, mpq]:
    """a°_{k_1..k_m;mu}: tuples with k(tau_i) = k_i, keyed by product type."""
    if n == 0:
        ok = all(k == 0 for k in degeneracies)
        return {} if connected or not ok else {Partition(): mpq(1)}
    meter = _Meter(budget)
    by_type = permutations_by_type(n)
    steps = []
    for k in degeneracies:
        steps.append([(g, 0) for mu, gs in by_type.items() if degeneracy(mu) == k for g in gs])
    counts: dict[Partition, int] = defaultdict(int)
    for (g, lab, _), cnt in _sweep(n, steps, connected, meter).items():
        if _connected(lab):
            counts[cycle_type(g)] += cnt
    return _normalize(counts, n)


def bms_oracle(n: int, m: int, connected: bool = False,
               budget: int | None = None) -> dict[tuple[int, Partition], mpq]:
    """b°_{m,k;mu}: m-tuples of arbitrary permutations binned by total degeneracy k."""
    if n == 0:
        return {} if connected else {(0, Partition()): mpq(1)}
    meter = _Meter(budget)
    choices = [(g, perm_degeneracy(g)) for g in all_permutations(n)]
    counts: dict = defaultdict(int)
    for (g, lab, k), cnt in _sweep(n, [choices] * m, connected, meter).items():
        if _connected(lab):
            counts[(k, cycle_type(g))] += cnt
    return _normalize(counts, n)


def monotonic_oracle(n: int, m: int, connected: bool = False, budget: int | None = None,
                     weights: Sequence | None = None) -> dict:
    """Weakly monotone transposition m-tuples (b_1 <= ... <= b_m) by product type.

    With rational ``weights = [d_0, d_1, ..., d_K]`` the length ``m`` is ignored and
    sequences of every length are summed with weight d_{k_1} ... d_{k_n}
    (see ``weighted_monotonic_oracle``), with d_k = 0 for k > K.
    """
    if weights is not None:
        formal = weighted_monotonic_oracle(n, len(weights) - 1, connected, budget)
        values = {f"d{k}": w for k, w in enumerate(weights)}
        out = {}
        for mu, poly in formal.items():
            val = poly.evaluate(values)
            out[mu] = val.constant_term() if val.variables() == set() else val
        return out
    if n == 0:
        return {} if connected or m else {Partition(): mpq(1)}
    meter = _Meter(budget)
    ident = tuple(range(n))
    states = {(ident, _trivial_labels(n) if connected else None, 0): 1}
    trans = transpositions(n)
    for _ in range(m):
        meter.charge(len(states) * len(trans))
        new: dict = defaultdict(int)
        for (g, lab, last), cnt in states.items():
            for t, a, b in trans:
                if b < last:
                    continue
                nl = _merge(lab, a, b) if connected else None
                new[(compose(g, t), nl, b)] += cnt
        states = new
    counts: dict[Partition, int] = defaultdict(int)
    for (g, lab, _), cnt in states.items():
        if _connected(lab):
            counts[cycle_type(g)] += cnt
    return _normalize(counts, n)


def weighted_monotonic_oracle(n: int, max_k: int, connected: bool = False,
                              budget: int | None = None) -> dict[Partition, Series]:
    """Weakly monotone transposition sequences of any length, each weighted by
    d_{k_1} ... d_{k_n} where k_s counts transpositions whose larger element is s.

    Only sequences with every k_s <= max_k are included; the weights are
    polynomials in the auxiliary variables d0, d1, ...
    """
    meter = _Meter(budget)
    ident = tuple(range(n))
    states = {(ident, _trivial_labels(n) if connected else None, ()): 1}
    trans = transpositions(n)
    for s in range(n):
        with_s = [(t, a) for t, a, b in trans if b == s]
        new: dict = defaultdict(int)
        for (g, lab, ks), cnt in states.items():
            # choose k_s transpositions (a, s), a < s, in sequence
            layer = {(g, lab): cnt}
            for k in range(max_k + 1):
                for (h, hl), c in layer.items():
                    new[(h, hl, tuple(sorted(ks + (k,))))] += c
                if k == max_k or not with_s:
                    break
                meter.charge(len(layer) * len(with_s))
                nxt: dict = defaultdict(int)
                for (h, hl), c in layer.items():
                    for t, a in with_s:
                        nl = _merge(hl, a, s) if connected else None
                        nxt[(compose(h, t), nl)] += c
                layer = nxt
        states = new
    f = math.factorial(n)
    out: dict[Partition, dict] = defaultdict(dict)
    for (g, lab, ks), cnt in states.items():
        if not _connected(lab):
            continue
        mono: dict[str, int] = {}
        for k in ks:
            mono[f"d{k}"] = mono.get(f"d{k}", 0) + 1
        key = tuple(sorted(mono.items()))
        mu = cycle_type(g)
        out[mu][key] = out[mu].get(key, 0) + cnt
    return {mu: Series({monomial(dict(k)): mpq(c, f) for k, c in terms.items()})
            for mu, terms in sorted(out.items(), key=lambda kv: _sort_key(kv[0]))}


def strict_monotone_counts(n: int) -> dict[tuple, dict[int, int]]:
    """For each permutation, the number of strictly monotone transposition
    factorizations (b_1 < ... < b_k) of each length k."""
    counts: dict[tuple, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    ident = tuple(range(n))
    # choose for each s at most one transposition (a, s)
    options = [[None] + [t for t, a, b in transpositions(n) if b == s] for s in range(n)]
    for choice in itertools.product(*options):
        g = ident
        k = 0
        for t in choice:
            if t is not None:
                g = compose(g, t)
                k += 1
        counts[g][k] += 1
    return {g: dict(v) for g, v in counts.items()}


def double_hurwitz_oracle(n: int, m: int, connected: bool = False,
                          budget: int | None = None) -> dict[tuple[Partition, Partition], mpq]:
    """d°_{m;mu,nu}: tuples (alpha, beta, tau_1..tau_m) with
    alpha o beta o tau_1 o ... o tau_m = id, keyed by (type alpha, type beta)."""
    if n == 0:
        return {} if connected else {(Partition(), Partition()): mpq(1)}
    meter = _Meter(budget)
    trans = [(t, 0) for t, _, _ in transpositions(n)]
    states = _sweep(n, [trans] * m, connected, meter)
    perms = all_permutations(n)
    meter.charge(len(states) * len(perms))
    counts: dict = defaultdict(int)
    inv_cache = {}
    for (pi, lab, _), cnt in states.items():
        pi_inv = inv_cache.setdefault(pi, inverse(pi))
        for alpha in perms:
            if connected and not _connected(_merge_perm(lab, alpha)):
                continue
            beta = compose(inverse(alpha), pi_inv)
            counts[(cycle_type(alpha), cycle_type(beta))] += cnt
    return _normalize(counts, n)


# ---------------------------------------------------------------- class algebra

class ClassElement:
    """Element of the centre of Q[S_n] in the basis of class sums C_mu."""

    def __init__(self, n: int, coeffs: dict | None = None):
        self.n = n
        out = {}
        for mu, c in (coeffs or {}).items():
            mu = Partition(mu)
            if mu.size() != n:
                raise ValueError(f"{mu} is not a partition of {n}")
            c = rational(c)
            if c:
                out[mu] = out.get(mu, 0) + c
        self.coeffs = {k: v for k, v in out.items() if v}

    @classmethod
    def basis(cls, mu) -> "ClassElement":
        mu = Partition(mu)
        return cls(mu.size(), {mu: 1})

    @classmethod
    def identity(cls, n: int) -> "ClassElement":
        return cls(n, {Partition([1] * n): 1})

    @classmethod
    def from_normalized(cls, n: int, values: dict) -> "ClassElement":
        """Build from coefficients a_mu in the basis C_mu / |C_mu|."""
        return cls(n, {mu: rational(a) / class_size(Partition(mu)) for mu, a in values.items()})

    def normalized(self) -> dict[Partition, mpq]:
        """Coefficients a_mu in the basis C_mu / |C_mu|."""
        return {mu: c * class_size(mu) for mu, c in self.coeffs.items()}

    def __add__(self, other: "ClassElement") -> "ClassElement":
        if other.n != self.n:
            raise ValueError("size mismatch")
        out = dict(self.coeffs)
        for mu, c in other.coeffs.items():
            out[mu] = out.get(mu, 0) + c
        return ClassElement(self.n, out)

    def scale(self, c) -> "ClassElement":
        c = rational(c)
        return ClassElement(self.n, {mu: v * c for mu, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, ClassElement):
            return class_multiply(self, other)
        return self.scale(other)

    def __pow__(self, k: int) -> "ClassElement":
        out = ClassElement.identity(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, ClassElement) and self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self):
        body = " + ".join(f"{c}*C{mu}" for mu, c in sorted(self.coeffs.items(),
                                                            key=lambda kv: _sort_key(kv[0])))
        return f"ClassElement(n={self.n}: {body or '0'})"


@lru_cache(maxsize=None)
def _structure_constants(mu: Partition, nu: Partition) -> dict[Partition, mpq]:
    """C_mu C_nu = sum_lambda c^lambda C_lambda."""
    n = mu.size()
    by_type = permutations_by_type(n)
    # enumerate the smaller class fully against one representative of the other
    if class_size(mu) > class_size(nu):
        mu, nu = nu, mu
    rep = by_type[nu][0]
    hits: dict[Partition, int] = defaultdict(int)
    for x in by_type[mu]:
        hits[cycle_type(compose(x, rep))] += 1
    size_nu = class_size(nu)
    return {lam: mpq(size_nu * h, class_size(lam)) for lam, h in hits.items()}


def class_multiply(a: ClassElement, b: ClassElement) -> ClassElement:
    if a.n != b.n:
        raise ValueError(f"size mismatch: S_{a.n} vs S_{b.n}")
    out: dict[Partition, mpq] = defaultdict(lambda: mpq(0))
    for mu, ca in a.coeffs.items():
        for nu, cb in b.coeffs.items():
            for lam, c in _structure_constants(mu, nu).items():
                out[lam] += ca * cb * c
    return ClassElement(a.n, out)


def transposition_class(n: int) -> ClassElement:
    if n < 2:
        return ClassElement(n, {})
    return ClassElement.basis(Partition([2] + [1] * (n - 2)))


def degeneracy_class(n: int, k: int) -> ClassElement:
    """C^(k): the sum of all permutations of degeneracy k."""
    return ClassElement(n, {mu: 1 for mu in partitions(n) if degeneracy(mu) == k})


def monotone_class(n: int, m: int) -> ClassElement:
    """The sum of all weakly monotone transposition products of length m."""
    raw = {mu: v * math.factorial(n) for mu, v in monotonic_oracle(n, m).items()}
    return ClassElement(n, {mu: mpq(c) / class_size(mu) for mu, c in raw.items()})


def multiplication_matrix(a: ClassElement) -> tuple[list[Partition], list[list[mpq]]]:
    """Matrix of x -> a x in the basis C_mu (columns are images of basis vectors)."""
    basis = list(partitions(a.n))
    idx = {mu: i for i, mu in enumerate(basis)}
    mat = [[mpq(0)] * len(basis) for _ in basis]
    for j, nu in enumerate(basis):
        prod = class_multiply(a, ClassElement.basis(nu))
        for lam, c in prod.coeffs.items():
            mat[idx[lam]][j] = c
    return basis, mat


# ---------------------------------------------------------------- Jucys-Murphy eigenvalues

def jm_elementary(k: int, lam: Partition) -> mpq:
    """e_k evaluated on the contents of lam (eigenvalue of C^(k))."""
    e = [mpq(1)] + [mpq(0)] * k
    for c in contents(lam):
        for j in range(k, 0, -1):
            e[j] += c * e[j - 1]
    return e[k]


def jm_complete(m: int, lam: Partition) -> mpq:
    """h_m evaluated on the contents of lam (eigenvalue of the monotone class)."""
    h = [mpq(1)] + [mpq(0)] * m
    for c in contents(lam):
        for j in range(1, m + 1):
            h[j] += c * h[j - 1]
    return h[m]


def jm_power(r: int, lam: Partition) -> mpq:
    return mpq(sum(c ** r for c in contents(lam)))


def jm_product(phi: Callable[[int], object], lam: Partition):
    """prod over cells of phi(content); phi may return rationals or Series."""
    out = None
    for c in contents(lam):
        try:
            val = phi(c)
        except ZeroDivisionError as exc:
            raise PoleError(f"weight has a pole at content {c}") from exc
        if not isinstance(val, Series):
            val = rational(val)
        out = val if out is None else out * val
    return mpq(1) if out is None else out


def jm_symmetric_eval(spec: tuple, lam: Partition):
    """Dispatch on ``("elementary", k)``, ``("complete", m)``, ``("power", r)``
    or ``("product", phi)``."""
    kind, arg = spec
    if kind == "elementary":
        return jm_elementary(arg, lam)
    if kind == "complete":
        return jm_complete(arg, lam)
    if kind == "power":
        return jm_power(arg, lam)
    if kind == "product":
        return jm_product(arg, lam)
    raise ValueError(f"unknown symmetric function kind {kind!r}")


# ---------------------------------------------------------------- Kerov-Olshanski algebra

class KOElement:
    """Element of the Kerov-Olshanski algebra in the basis C_mu (mu of any size)."""

    def __init__(self, coeffs: dict | None = None):
        out = {}
        for mu, c in (coeffs or {}).items():
            mu = Partition(mu)
            c = rational(c)
            if c:
                out[mu] = out.get(mu, 0) + c
        self.coeffs = {k: v for k, v in out.items() if v}

    @classmethod
    def basis(cls, mu) -> "KOElement":
        return cls({Partition(mu): 1})

    def degree(self) -> int:
        return max((mu.size() for mu in self.coeffs), default=0)

    def __mul__(self, other: "KOElement") -> "KOElement":
        return ko_multiply(self, other)

    def __eq__(self, other):
        return isinstance(other, KOElement) and self.coeffs == other.coeffs

    def __repr__(self):
        return "KOElement(" + (" + ".join(
            f"{c}*C{mu}" for mu, c in sorted(self.coeffs.items(), key=lambda kv: _sort_key(kv[0])))
            or "0") + ")"

    def terms(self) -> list[tuple[Partition, mpq]]:
        return sorted(self.coeffs.items(), key=lambda kv: _sort_key(kv[0]))


def phi_n(a: KOElement, n: int) -> ClassElement:
    """Forget supports: C_mu -> binom(n - |mu| + eps, eps) C_{1^{n-|mu|} mu}."""
    out: dict[Partition, mpq] = defaultdict(lambda: mpq(0))
    for mu, c in a.coeffs.items():
        if mu.size() > n:
            continue
        eps = sum(1 for x in mu if x == 1)
        out[mu.add_ones(n - mu.size())] += c * math.comb(n - mu.size() + eps, eps)
    return ClassElement(n, out)


def ko_multiply(a: KOElement, b: KOElement) -> KOElement:
    """Product in the Kerov-Olshanski algebra.

    Computes phi_n(a) phi_n(b) for every n up to deg a + deg b and inverts the
    binomial relation class by class: for a partition rho without ones, the
    coefficient of C_{1^t rho} at n = |rho| + t is sum_j binom(t, j) c_{rho 1^j}.
    """
    top = a.degree() + b.degree()
    products = [class_multiply(phi_n(a, n), phi_n(b, n)) for n in range(top + 1)]
    result: dict[Partition, mpq] = {}
    cores = {mu.strip_ones() for prod in products for mu in prod.coeffs}
    for rho in cores:
        base = rho.size()
        f = [products[base + t].coeffs.get(rho.add_ones(t), mpq(0)) for t in range(top - base + 1)]
        for j in range(len(f)):
            c = sum((mpq((-1) ** (j - i) * math.comb(j, i)) * f[i] for i in range(j + 1)), mpq(0))
            if c:
                result[rho.add_ones(j)] = c
    return KOElement(result)
