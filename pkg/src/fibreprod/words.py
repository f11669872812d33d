"""Periods, overlaps and arithmetic-progression decompositions of words.

Words are any sliceable sequence of hashable letters (``str``, ``tuple``,
``list``).  Slicing keeps the input type, so ``rotate("abc", 1)`` is a
string and ``rotate((1, 2, 3), 1)`` a tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional, Sequence

from .errors import InvalidInput

Word = Sequence


@dataclass(frozen=True)
class ArithProg:
    """The set ``{i*q + r : 0 <= i <= p}``."""

    p: int
    q: int
    r: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.r < 0 or (self.p > 0 and self.q < 1):
            raise InvalidInput(f"malformed progression {self!r}")

    def __iter__(self) -> Iterator[int]:
        return (i * self.q + self.r for i in range(self.p + 1))

    def __len__(self) -> int:
        return self.p + 1

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int) or x < self.r:
            return False
        if self.p == 0:
            return x == self.r
        d, m = divmod(x - self.r, self.q)
        return m == 0 and d <= self.p

    @property
    def last(self) -> int:
        return self.p * self.q + self.r

    def clamp(self, lo: int, hi: int) -> Optional["ArithProg"]:
        """Restrict to the half-open range ``[lo, hi)``; ``None`` if empty."""
        items = [x for x in self if lo <= x < hi]
        return _as_prog(items, self.q)

    def to_set(self) -> set:
        return set(self)


def _as_prog(items: list, step_hint: int = 1) -> Optional[ArithProg]:
    """Pack a sorted list that is known to be an AP."""
    if not items:
        return None
    if len(items) == 1:
        return ArithProg(0, step_hint, items[0])
    q = items[1] - items[0]
    if any(b - a != q for a, b in zip(items, items[1:])):
        raise AssertionError(f"not an arithmetic progression: {items}")
    return ArithProg(len(items) - 1, q, items[0])


@dataclass(frozen=True)
class PeriodProfile:
    proper_periods: tuple
    per: int
    ord: int
    primitive: bool


def _nonempty(*words: Word) -> None:
    for w in words:
        if len(w) == 0:
            raise InvalidInput("empty word")


def failure_function(w: Word) -> list:
    """``fail[i]`` is the length of the longest proper border of ``w[:i]``."""
    n = len(w)
    fail = [0] * (n + 1)
    if n:
        fail[0] = -1
    k = -1
    for i in range(n):
        while k >= 0 and w[k] != w[i]:
            k = fail[k]
        k += 1
        fail[i + 1] = k
    if n:
        fail[0] = 0
    return fail


def find_all(text: Word, pattern: Word) -> list:
    """Start indices of every occurrence of ``pattern`` in ``text`` (KMP)."""
    m = len(pattern)
    if m == 0:
        return list(range(len(text) + 1))
    fail = failure_function(pattern)
    out = []
    k = 0
    for i, c in enumerate(text):
        while k > 0 and pattern[k] != c:
            k = fail[k]
        if pattern[k] == c:
            k += 1
        if k == m:
            out.append(i - m + 1)
            k = fail[k]
    return out


def period_profile(w: Word) -> PeriodProfile:
    _nonempty(w)
    n = len(w)
    fail = failure_function(w)
    periods = []
    b = fail[n]
    while b > 0:
        periods.append(n - b)
        b = fail[b]
    periods.sort()
    per = periods[0] if periods else n
    return PeriodProfile(
        proper_periods=tuple(periods),
        per=per,
        ord=n // per,
        primitive=not (per < n and n % per == 0),
    )


def per(w: Word) -> int:
    return period_profile(w).per


def is_primitive(w: Word) -> bool:
    return period_profile(w).primitive


def primitive_root(w: Word) -> Word:
    """The shortest ``u`` with ``w = u^k``."""
    prof = period_profile(w)
    if len(w) % prof.per == 0:
        return w[: prof.per]
    return w


def is_period(w: Word, p: int) -> bool:
    return 0 < p and all(w[i] == w[i + p] for i in range(len(w) - p))


def fine_wilf_collapse(w: Word, p: int, q: int) -> bool:
    _nonempty(w)
    for x in (p, q):
        if not (0 < x < len(w)) or not is_period(w, x):
            raise InvalidInput(f"{x} is not a proper period")
    return is_period(w, gcd(p, q))


def rotate(w: Word, i: int) -> Word:
    _nonempty(w)
    if i < 0:
        raise InvalidInput("negative rotation")
    i %= len(w)
    return w[i:] + w[:i]


def cyclic_conjugate(u: Word, v: Word) -> Optional[Word]:
    """A word ``c`` with ``c + u == v + c``, or ``None`` if none exists."""
    if len(u) != len(v):
        return None
    if len(u) == 0:
        return u[:0]
    hits = find_all(u + u, v)
    if not hits:
        return None
    i = hits[0]
    c = u[i:] if i else u[:0]
    assert c + u == v + c
    return c


def least_rotation(w: Word) -> Word:
    """Lexicographically least rotation (Booth); a canonical cyclic form."""
    n = len(w)
    if n == 0:
        return w
    s = w + w
    fail = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        i = fail[j - k - 1]
        while i != -1 and s[j] != s[k + i + 1]:
            if s[j] < s[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if i == -1 and s[j] != s[k + i + 1]:
            if s[j] < s[k + i + 1]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return w[k:] + w[:k]


def overlap_sets(v: Word, w: Word) -> tuple:
    """Direct scan for (sub, pref, suff) index sets of ``w`` in ``v``."""
    _nonempty(v, w)
    nv, nw = len(v), len(w)
    sub = {i for i in range(nv - nw + 1) if v[i : i + nw] == w}
    pref = {i for i in range(1, min(nv, nw) + 1) if v[:i] == w[nw - i :]}
    suff = {i for i in range(max(0, nv - nw), nv) if v[i:] == w[: nv - i]}
    return sub, pref, suff


def crossing_indices(v: Word, w: Word, j: int) -> Optional[ArithProg]:
    """Occurrences of ``w`` in ``v`` covering position ``j``, as an AP."""
    _nonempty(v, w)
    if not 0 <= j < len(v):
        raise InvalidInput(f"position {j} outside word of length {len(v)}")
    lo = max(0, j - len(w) + 1)
    window = v[lo : j + len(w)]
    hits = [lo + i for i in find_all(window, w)]
    return _as_prog(hits, period_profile(w).per)


def sub_decomposition(v: Word, w: Word) -> list:
    """Cover the occurrences of ``w`` in ``v`` by crossing sets at positions
    at least ``|w|`` apart, then merge neighbours whose union is still a
    progression ``ap(p, q, r)`` with ``p*q <= |w|``."""
    _nonempty(w)
    nw = len(w)
    prof = period_profile(w)
    occ = find_all(v, w)
    groups: list = []
    idx = 0
    while idx < len(occ):
        j = occ[idx] + nw - 1
        group = []
        while idx < len(occ) and occ[idx] <= j:
            group.append(occ[idx])
            idx += 1
        if groups and _mergeable(groups[-1] + group, nw):
            groups[-1] += group
        else:
            groups.append(group)
    return [_as_prog(g, prof.per) for g in groups]


def _mergeable(items: list, nw: int) -> bool:
    q = items[1] - items[0]
    return all(b - a == q for a, b in zip(items, items[1:])) and (len(items) - 1) * q <= nw


def suff_indices(v: Word, w: Word) -> list:
    """Sorted suffix indices via the border chain of ``w # v``."""
    nv = len(v)
    sep = object()
    z = list(w) + [sep] + list(v)
    fail = failure_function(z)
    out = []
    b = fail[len(z)]
    while b > 0:
        out.append(nv - b)
        b = fail[b]
    out.sort()
    return out


def suff_decomposition(v: Word, w: Word) -> list:
    """Decompose the suffix indices of ``w`` in ``v`` into progressions.

    Each step starts at the least uncovered index ``j``, takes ``l`` the
    nearest later suffix index (or ``|v|``), and uses the step ``l - j``.
    Progressions are clamped to ``[max(0,|v|-|w|), |v|)``.
    """
    _nonempty(v, w)
    nv = len(v)
    lo = max(0, nv - len(w))
    todo = suff_indices(v, w)
    targets = todo + [nv]
    out = []
    covered: set = set()
    for j in todo:
        if j in covered:
            continue
        l = next(t for t in targets if t > j)
        q = l - j
        prog = ArithProg((nv - j) // q, q, j).clamp(lo, nv)
        out.append(prog)
        covered.update(prog)
    return out


def pref_decomposition(v: Word, w: Word) -> list:
    """Prefix indices via the identity pref(w, v) = {|v| - i : i in suff(v, w)}.

    Returns progressions for ``pref(w, v)``.
    """
    nv = len(v)
    out = []
    for prog in suff_decomposition(v, w):
        items = sorted(nv - i for i in prog)
        out.append(_as_prog(items, prog.q))
    return out


def good_cyclic_shift(w: Word, xs: Sequence[Word]) -> int:
    """Least rotation of ``w`` whose square is crossed at its midpoint at
    most twice by every word in ``xs``."""
    _nonempty(w)
    if not is_primitive(w):
        raise InvalidInput("word is not primitive")
    for i in range(len(w)):
        w0 = rotate(w, i)
        sq = w0 + w0
        if all(_crossing_count(sq, x, len(w0) - 1) <= 2 for x in xs):
            return i
    raise AssertionError("no qualifying cyclic shift")


def _crossing_count(v: Word, x: Word, j: int) -> int:
    if len(x) == 0:
        return 0
    prog = crossing_indices(v, x, j)
    return 0 if prog is None else len(prog)


def max_w_factorisation(x: Word, w: Word, side: str = "left") -> int:
    """Longest prefix (``left``) or suffix (``right``) of ``x`` that is a
    subword of some power of ``w``."""
    _nonempty(w)
    if not is_primitive(w):
        raise InvalidInput("word is not primitive")
    if side == "right":
        return max_w_factorisation(x[::-1], w[::-1], "left")
    if side != "left":
        raise InvalidInput(f"unknown side {side!r}")
    return max((_aligned_run(x, w, o) for o in range(len(w))), default=0)


def w_offsets(x: Word, w: Word) -> list:
    """All offsets ``o`` with ``x`` a prefix of ``w^inf`` started at ``o``."""
    return [o for o in range(len(w)) if _aligned_run(x, w, o) == len(x)]


def _aligned_run(x: Word, w: Word, offset: int) -> int:
    n = len(w)
    k = 0
    while k < len(x) and x[k] == w[(offset + k) % n]:
        k += 1
    return k
