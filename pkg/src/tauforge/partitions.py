"""Integer partitions, Young-diagram contents and hook lengths."""

from __future__ import annotations

import math
import re
from collections import Counter
from functools import lru_cache
from typing import Iterator

from gmpy2 import mpq


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    Any iterable of positive integers is accepted and sorted, so
    ``Partition([1, 2, 2])`` is stored as ``(2, 2, 1)``.
    """

    def __new__(cls, parts=()):
        parts = sorted((int(x) for x in parts), reverse=True)
        if parts and parts[-1] <= 0:
            raise ValueError(f"partition parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    def __repr__(self):
        return f"Partition({list(self)})"

    def __str__(self):
        return "[" + ",".join(str(x) for x in self) + "]"

    def size(self) -> int:
        return sum(self)

    def length(self) -> int:
        return len(self)

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self))

    def multiplicative(self) -> str:
        """Render as ``1^2 2^1`` (ascending part values)."""
        m = Counter(self)
        return " ".join(f"{v}^{m[v]}" for v in sorted(m))

    def conjugate(self) -> "Partition":
        if not self:
            return Partition()
        return Partition(sum(1 for x in self if x > j) for j in range(self[0]))

    def cells(self) -> Iterator[tuple[int, int]]:
        """Cells (i, j), 1-based, row-major."""
        for i, row in enumerate(self, start=1):
            for j in range(1, row + 1):
                yield i, j

    def add_ones(self, k: int) -> "Partition":
        return Partition(tuple(self) + (1,) * k)

    def strip_ones(self) -> "Partition":
        return Partition(x for x in self if x > 1)


_MULT_RE = re.compile(r"^(\d+)\^(\d+)$")
_INT_RE = re.compile(r"^[+-]?\d+$")


def parse_partition(text: str) -> Partition:
    """Parse ``"[5,3,3,2]"`` or the multiplicative form ``"2^2 3^1"``."""
    if not isinstance(text, str):
        raise TypeError("partition text must be a string")
    s = text.strip()
    if "^" in s:
        parts: list[int] = []
        for tok in s.replace(",", " ").split():
            m = _MULT_RE.match(tok)
            if m is None:
                raise ValueError(f"malformed partition factor {tok!r} in {text!r}")
            value, mult = int(m.group(1)), int(m.group(2))
            if value <= 0:
                raise ValueError(f"non-positive part in {text!r}")
            parts.extend([value] * mult)
        return Partition(parts)
    if s[:1] in "[(" and s[-1:] in "])":
        s = s[1:-1]
    tokens = [t for t in re.split(r"[,\s]+", s.strip()) if t]
    if not all(_INT_RE.match(t) for t in tokens):
        raise ValueError(f"malformed partition {text!r}")
    values = [int(t) for t in tokens]
    if any(v <= 0 for v in values):
        raise ValueError(f"non-positive part in {text!r}")
    return Partition(values)


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n in reverse-lexicographic order: (n), (n-1,1), ..., (1^n)."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield Partition()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield Partition((first,) + tuple(rest))


@lru_cache(maxsize=None)
def _partition_list(n: int) -> tuple[Partition, ...]:
    return tuple(partitions(n))


def partitions_upto(n: int) -> Iterator[Partition]:
    """All partitions of size 0..n, by size then reverse-lex."""
    for k in range(n + 1):
        yield from _partition_list(k)


def contents(p: Partition) -> list[int]:
    """Contents j - i of the cells, row-major."""
    return [j - i for i, j in p.cells()]


def content_sum(p: Partition) -> int:
    return sum(x * (x - 2 * i + 1) for i, x in enumerate(p, start=1)) // 2


def hook_lengths(p: Partition) -> list[int]:
    conj = p.conjugate()
    return [p[i - 1] - j + conj[j - 1] - i + 1 for i, j in p.cells()]


def dim_ratio(p: Partition, via: str = "hooks") -> mpq:
    """dim_p / |p|! as an exact rational.

    ``via="hooks"`` uses the hook-length formula; ``via="schur"`` evaluates
    s_p at p_1 = 1, p_{i>1} = 0 (slower, kept for cross-validation).
    """
    p = Partition(p)
    if via == "hooks":
        return mpq(1, math.prod(hook_lengths(p)))
    if via == "schur":
        from tauforge.schur import evaluate_at, schur
        return evaluate_at(schur(p), {1: 1})
    raise ValueError(f"unknown method {via!r}")


def dimension(p: Partition) -> int:
    """Dimension of the irreducible S_n representation labelled by p."""
    return math.factorial(p.size()) // math.prod(hook_lengths(p))


def aut_order(p: Partition) -> int:
    return math.prod(math.factorial(m) for m in Counter(p).values())


def z_factor(p: Partition) -> int:
    """Order of the centralizer of a permutation of cycle type p."""
    return math.prod(v ** m * math.factorial(m) for v, m in Counter(p).items())


def class_size(p: Partition) -> int:
    return math.factorial(p.size()) // z_factor(p)


def degeneracy(p: Partition) -> int:
    return p.size() - p.length()
