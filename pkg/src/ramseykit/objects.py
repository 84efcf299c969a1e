"""Finite maps between initial segments and the object classes built from them.

Every object is a total function ``[L] -> [K]`` stored as its value sequence
together with the codomain size.  ``[0]`` is empty, so the empty map is the
unique function ``[0] -> [K]``.

Operations the theory leaves undefined return ``None`` instead of raising;
callers decide whether that is an error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence

from .errors import (
    EmptyInput,
    InvalidObject,
    NotRigid,
    PreconditionViolated,
    SizeMismatch,
)


class FiniteMap:
    """A total function ``[L] -> [K]`` given by its values ``(f(1), ..., f(L))``."""

    __slots__ = ("values", "cod", "_hash")

    def __init__(self, values: Iterable[int], cod: Optional[int] = None, *, check: bool = True):
        values = tuple(values)
        if cod is None:
            cod = max(values, default=0)
        if check:
            if cod < 0:
                raise InvalidObject(f"negative codomain size {cod}")
            for v in values:
                if not isinstance(v, int) or v < 1 or v > cod:
                    raise InvalidObject(f"value {v!r} outside [1, {cod}] in {values}")
        self.values = values
        self.cod = cod
        self._hash = hash((values, cod))

    @property
    def dom(self) -> int:
        return len(self.values)

    def __call__(self, x: int) -> int:
        if x < 1:
            raise IndexError(x)
        return self.values[x - 1]

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMap):
            return NotImplemented
        return self.values == other.values and self.cod == other.cod

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "FiniteMap") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (len(self.values), self.values, self.cod)

    def __repr__(self) -> str:
        return f"FiniteMap({self})"

    def __str__(self) -> str:
        return f"{self.cod}|" + " ".join(map(str, self.values))

    def restrict(self, n: int, cod: Optional[int] = None) -> "FiniteMap":
        """Restriction to ``[n]``; ``cod`` overrides the codomain (unchecked)."""
        if n > len(self.values):
            raise SizeMismatch(f"cannot restrict a map on [{self.dom}] to [{n}]")
        return FiniteMap(self.values[:n], self.cod if cod is None else cod, check=False)

    def image(self) -> frozenset:
        return frozenset(self.values)

    def preimage(self, x: int) -> list[int]:
        return [y for y, v in enumerate(self.values, 1) if v == x]

    @classmethod
    def identity(cls, n: int) -> "FiniteMap":
        return cls(range(1, n + 1), n, check=False)

    @classmethod
    def parse(cls, text: str) -> "FiniteMap":
        """Inverse of ``str``: ``"K|v1 v2 ... vL"``."""
        head, sep, tail = text.strip().partition("|")
        if not sep:
            raise InvalidObject(f"missing '|' in {text!r}")
        try:
            cod = int(head)
            values = [int(tok) for tok in tail.split()]
        except ValueError as exc:
            raise InvalidObject(f"cannot parse {text!r}") from exc
        return cls(values, cod)


def fm(*values: int, cod: Optional[int] = None) -> FiniteMap:
    """Shorthand constructor: ``fm(1, 2, 1)`` is ``(1,2,1): [3] -> [2]``."""
    return FiniteMap(values, cod)


class ObjectClass(str, enum.Enum):
    INCREASING_INJECTION = "increasing-injection"
    SURJECTION = "surjection"
    RIGID_SURJECTION = "rigid-surjection"
    INCREASING_SURJECTION = "increasing-surjection"
    WALK = "walk"


# -- membership predicates ---------------------------------------------------

def is_surjection(f: FiniteMap) -> bool:
    return len(set(f.values)) == f.cod


def is_rigid(f: FiniteMap) -> bool:
    top = 0
    for v in f.values:
        if v > top + 1:
            return False
        if v > top:
            top = v
    return top == f.cod


def is_increasing_injection(f: FiniteMap) -> bool:
    vals = f.values
    return all(vals[k] < vals[k + 1] for k in range(len(vals) - 1))


def is_increasing_surjection(f: FiniteMap) -> bool:
    vals = f.values
    if any(vals[k] > vals[k + 1] for k in range(len(vals) - 1)):
        return False
    return is_surjection(f)


def is_walk(f: FiniteMap) -> bool:
    vals = f.values
    if vals and vals[0] != 1:
        return False
    if any(abs(vals[k] - vals[k + 1]) > 1 for k in range(len(vals) - 1)):
        return False
    return is_surjection(f)


_PREDICATES = {
    ObjectClass.INCREASING_INJECTION: is_increasing_injection,
    ObjectClass.SURJECTION: is_surjection,
    ObjectClass.RIGID_SURJECTION: is_rigid,
    ObjectClass.INCREASING_SURJECTION: is_increasing_surjection,
    ObjectClass.WALK: is_walk,
}


def is_member(f: FiniteMap, cls: ObjectClass | str) -> bool:
    return _PREDICATES[ObjectClass(cls)](f)


# -- enumeration -------------------------------------------------------------

def _rigid_values(L: int, K: int) -> Iterator[tuple[int, ...]]:
    # restricted growth strings, lexicographic; prune when the remaining
    # positions cannot reach K
    if L == 0:
        if K == 0:
            yield ()
        return
    if K == 0 or K > L:
        return
    buf = [0] * L

    def rec(pos: int, top: int):
        if pos == L:
            if top == K:
                yield tuple(buf)
            return
        remaining = L - pos
        for v in range(1, min(top + 1, K) + 1):
            new_top = max(top, v)
            if K - new_top > remaining - 1:
                continue
            buf[pos] = v
            yield from rec(pos + 1, new_top)

    yield from rec(0, 0)


def _increasing_surjection_values(L: int, K: int) -> Iterator[tuple[int, ...]]:
    if L == 0:
        if K == 0:
            yield ()
        return
    if K == 0 or K > L:
        return
    # positions 2..L where the value steps up, chosen lexicographically on values
    buf = [0] * L

    def rec(pos: int, cur: int):
        if pos == L:
            if cur == K:
                yield tuple(buf)
            return
        for v in (cur, cur + 1):
            if v > K or K - v > L - pos - 1:
                continue
            buf[pos] = v
            yield from rec(pos + 1, v)

    buf[0] = 1
    yield from rec(1, 1)


def _walk_values(L: int, K: int) -> Iterator[tuple[int, ...]]:
    if L == 0:
        if K == 0:
            yield ()
        return
    if K == 0 or K > L:
        return
    buf = [0] * L

    def rec(pos: int, cur: int, top: int):
        if pos == L:
            if top == K:
                yield tuple(buf)
            return
        for v in (cur - 1, cur, cur + 1):
            if v < 1 or v > K:
                continue
            new_top = max(top, v)
            if K - new_top > L - pos - 1:
                continue
            buf[pos] = v
            yield from rec(pos + 1, v, new_top)

    buf[0] = 1
    yield from rec(1, 1, 1)


def _surjection_values(L: int, K: int) -> Iterator[tuple[int, ...]]:
    if K > L or (K == 0 and L > 0):
        return
    for vals in product(range(1, K + 1), repeat=L):
        if len(set(vals)) == K:
            yield vals


def iter_class(cls: ObjectClass | str, L: int, K: int) -> Iterator[FiniteMap]:
    """Generate the members of ``cls`` mapping ``[L] -> [K]`` in lexicographic order."""
    cls = ObjectClass(cls)
    if L < 0 or K < 0:
        return
    if cls is ObjectClass.INCREASING_INJECTION:
        gen = combinations(range(1, K + 1), L)
    elif cls is ObjectClass.RIGID_SURJECTION:
        gen = _rigid_values(L, K)
    elif cls is ObjectClass.INCREASING_SURJECTION:
        gen = _increasing_surjection_values(L, K)
    elif cls is ObjectClass.WALK:
        gen = _walk_values(L, K)
    else:
        gen = _surjection_values(L, K)
    for vals in gen:
        yield FiniteMap(vals, K, check=False)


def enumerate_class(cls: ObjectClass | str, L: int, K: int) -> list[FiniteMap]:
    return list(iter_class(cls, L, K))


# -- compositions ------------------------------------------------------------

def compose(v: FiniteMap, s: FiniteMap) -> FiniteMap:
    """Ordinary composition ``v o s``; every value of ``s`` must lie in ``dom(v)``."""
    if s.cod > v.dom and any(x > v.dom for x in s.values):
        raise SizeMismatch(f"cannot compose {v} after {s}")
    vv = v.values
    return FiniteMap(tuple(vv[x - 1] for x in s.values), v.cod, check=False)


def canonical_compose(v: FiniteMap, s: FiniteMap) -> Optional[FiniteMap]:
    """Canonical composition of a surjection ``v: [L] -> [K]`` with a rigid ``s: [N] -> [M]``.

    Defined iff ``L <= M``; the result is ``v`` composed with ``s`` restricted to
    the longest initial segment on which ``s`` stays inside ``[L]``.
    """
    L = v.dom
    if L > s.cod:
        return None
    vv = v.values
    out = []
    for x in s.values:
        if x > L:
            break
        out.append(vv[x - 1])
    return FiniteMap(tuple(out), v.cod, check=False)


def prefix_within(s: FiniteMap, bound: int) -> int:
    """Largest ``N0`` such that ``s(y) <= bound`` for all ``y <= N0``."""
    n = 0
    for x in s.values:
        if x > bound:
            break
        n += 1
    return n


# -- truncations -------------------------------------------------------------

def truncate_forgetful(s: FiniteMap) -> FiniteMap:
    """Forget the largest value: restrict ``s`` to the points before its first ``K``."""
    if not is_rigid(s):
        raise NotRigid(f"{s} is not a rigid surjection")
    if s.cod == 0:
        return s
    first = s.values.index(s.cod)
    return FiniteMap(s.values[:first], s.cod - 1, check=False)


def truncate_confused(v: FiniteMap) -> FiniteMap:
    """Merge the largest value ``K`` into ``max(1, K - 1)``."""
    K = v.cod
    if K == 0:
        raise EmptyInput("confused truncation needs a nonempty codomain")
    low = max(1, K - 1)
    return FiniteMap(tuple(low if x == K else x for x in v.values), low, check=False)


# -- augmented surjections and connections -----------------------------------

@dataclass(frozen=True)
class AugmentedSurjection:
    """A pair ``(s, p)`` with ``p`` increasing, ``s <= p`` and ``s`` hitting ``x`` at ``max p^-1(x)``."""

    s: FiniteMap
    p: FiniteMap

    def __post_init__(self):
        s, p = self.s, self.p
        if s.dom != p.dom or s.cod != p.cod:
            raise InvalidObject(f"augmented pair shapes differ: {s}, {p}")
        if not is_increasing_surjection(p):
            raise InvalidObject(f"{p} is not an increasing surjection")
        if any(a > b for a, b in zip(s.values, p.values)):
            raise InvalidObject(f"{s} is not bounded by {p}")
        last = _last_positions(p)
        if any(s.values[last[x] - 1] != x for x in range(1, p.cod + 1)):
            raise InvalidObject(f"({s}, {p}) misses a value at the end of a p-fibre")

    @property
    def dom(self) -> int:
        return self.s.dom

    @property
    def cod(self) -> int:
        return self.s.cod

    def sort_key(self):
        return (self.s.dom, self.s.values, self.p.values, self.s.cod)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.s};{self.p}"


@dataclass(frozen=True)
class Connection:
    """A pair ``(s, i): [L] <-> [K]`` with ``s(i(x)) = x`` and ``s(y) <= x`` for ``y < i(x)``."""

    s: FiniteMap
    i: FiniteMap

    def __post_init__(self):
        s, i = self.s, self.i
        if i.dom != s.cod or i.cod != s.dom:
            raise InvalidObject(f"connection shapes do not match: {s}, {i}")
        for x in range(1, s.cod + 1):
            ix = i.values[x - 1]
            if s.values[ix - 1] != x:
                raise InvalidObject(f"s(i({x})) != {x} in ({s}, {i})")
            if any(s.values[y - 1] > x for y in range(1, ix)):
                raise InvalidObject(f"i({x}) = {ix} is not visible from {x} in ({s}, {i})")

    @property
    def dom(self) -> int:
        return self.s.dom

    @property
    def cod(self) -> int:
        return self.s.cod

    def sort_key(self):
        return (self.s.dom, self.s.values, self.i.values, self.s.cod)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.s};{self.i}"


def _last_positions(p: FiniteMap) -> dict[int, int]:
    last = {}
    for y, x in enumerate(p.values, 1):
        last[x] = y
    return last


def _make_augmented(s: FiniteMap, p: FiniteMap) -> AugmentedSurjection:
    obj = object.__new__(AugmentedSurjection)
    object.__setattr__(obj, "s", s)
    object.__setattr__(obj, "p", p)
    return obj


def _make_connection(s: FiniteMap, i: FiniteMap) -> Connection:
    obj = object.__new__(Connection)
    object.__setattr__(obj, "s", s)
    object.__setattr__(obj, "i", i)
    return obj


def is_augmented_pair(s: FiniteMap, p: FiniteMap) -> bool:
    try:
        AugmentedSurjection(s, p)
    except InvalidObject:
        return False
    return True


def is_connection_pair(s: FiniteMap, i: FiniteMap) -> bool:
    try:
        Connection(s, i)
    except InvalidObject:
        return False
    return True


def enumerate_augmented(L: int, K: int) -> list[AugmentedSurjection]:
    out = []
    incs = enumerate_class(ObjectClass.INCREASING_SURJECTION, L, K)
    for s in iter_class(ObjectClass.RIGID_SURJECTION, L, K):
        for p in incs:
            if is_augmented_pair(s, p):
                out.append(_make_augmented(s, p))
    return out


def enumerate_connections(L: int, K: int) -> list[Connection]:
    out = []
    injs = enumerate_class(ObjectClass.INCREASING_INJECTION, K, L)
    for s in iter_class(ObjectClass.RIGID_SURJECTION, L, K):
        for i in injs:
            if is_connection_pair(s, i):
                out.append(_make_connection(s, i))
    return out


def connection_compose(tj: Connection, si: Connection) -> Connection:
    """``(t, j) . (s, i) = (s o t, j o i)`` for ``(t, j): [M] <-> [L]``, ``(s, i): [L] <-> [K]``."""
    if tj.cod != si.dom:
        raise SizeMismatch(f"cannot compose [{tj.dom}]<->[{tj.cod}] with [{si.dom}]<->[{si.cod}]")
    return Connection(compose(si.s, tj.s), compose(tj.i, si.i))


def truncate_augmented(sp: AugmentedSurjection) -> AugmentedSurjection:
    p = truncate_forgetful(sp.p)
    return _make_augmented(sp.s.restrict(p.dom, p.cod), p)


def connection_from_augmented(sp: AugmentedSurjection) -> Connection:
    s, p = sp.s, sp.p
    L, K = s.dom, s.cod
    if K < 1 or s.preimage(K) != [L]:
        raise PreconditionViolated(f"s^-1(K) must be {{L}} for ({s}, {p})")
    last = _last_positions(p)
    i = FiniteMap(tuple(last[x] for x in range(1, K)), L - 1, check=False)
    return Connection(s.restrict(L - 1, K - 1), i)


def augmented_from_connection(c: Connection) -> AugmentedSurjection:
    """Inverse of :func:`connection_from_augmented`."""
    s, i = c.s, c.i
    L, K = s.dom, s.cod
    p_vals = []
    x = 1
    for y in range(1, L + 2):
        while x <= K and i.values[x - 1] < y:
            x += 1
        p_vals.append(x)
    return AugmentedSurjection(
        FiniteMap(s.values + (K + 1,), K + 1),
        FiniteMap(p_vals, K + 1),
    )


# -- textual serialization ---------------------------------------------------

def format_obj(obj) -> str:
    """Render any ramseykit object in the ``K|v1 ... vL`` format; pairs join with ``;``."""
    if isinstance(obj, (FiniteMap, AugmentedSurjection, Connection)):
        return str(obj)
    if isinstance(obj, bool):
        return str(obj).lower()
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, tuple):
        if all(isinstance(v, int) for v in obj):
            # raw value sequences (e.g. maps into {0} u [K0]) carry no codomain tag
            return "[" + " ".join(map(str, obj)) + "]"
        return ";".join(format_obj(part) for part in obj)
    if obj is None:
        return "undefined"
    return str(obj)


def parse_pair(text: str) -> tuple[FiniteMap, FiniteMap]:
    left, sep, right = text.partition(";")
    if not sep:
        raise InvalidObject(f"expected two maps joined by ';' in {text!r}")
    return FiniteMap.parse(left), FiniteMap.parse(right)


def sort_key(obj):
    """Total order used for every deterministic listing of heterogeneous objects."""
    if hasattr(obj, "sort_key"):
        return (0, obj.sort_key())
    if isinstance(obj, int):
        return (1, obj)
    if isinstance(obj, tuple):
        return (2, len(obj), tuple(sort_key(o) for o in obj))
    return (3, str(obj))


def sorted_objects(objs: Iterable) -> list:
    return sorted(objs, key=sort_key)


def stirling2(n: int, k: int) -> int:
    """Stirling numbers of the second kind by the usual recurrence."""
    table = [[0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for a in range(1, n + 1):
        for b in range(1, min(a, k) + 1):
            table[a][b] = b * table[a - 1][b] + table[a - 1][b - 1]
    return table[n][k]


def ramp(values: Sequence[int]) -> FiniteMap:
    """An increasing injection as a codomain-free object: codomain is its largest value."""
    return FiniteMap(tuple(values), max(values, default=0), check=False)
