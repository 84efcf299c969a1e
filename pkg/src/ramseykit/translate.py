"""Dictionaries between maps and set systems.

* ``A``-parameter sets on ``n`` correspond to rigid surjections
  ``[A + n] -> [A + l]`` that fix ``[A]`` pointwise.
* Connections ``[L] <-> [K]`` correspond to pairs ``(R, C)``: a partition of
  ``[L]`` into ``K`` blocks and a ``K``-set of representatives.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Optional

from . import objects as ob
from .errors import InvalidObject, NotAnchored
from .objects import Connection, FiniteMap, ObjectClass


def _canon_blocks(blocks) -> tuple:
    bs = [tuple(sorted(b)) for b in blocks]
    return tuple(sorted(bs, key=lambda b: b[0] if b else 0))


@dataclass(frozen=True)
class ParameterSet:
    A: int
    n: int
    blocks: tuple  # tuple of sorted tuples, ordered by minima
    g: tuple       # sorted (position, letter) pairs on the free positions

    def __post_init__(self):
        object.__setattr__(self, "blocks", _canon_blocks(self.blocks))
        g = self.g.items() if isinstance(self.g, dict) else self.g
        object.__setattr__(self, "g", tuple(sorted((int(k), int(v)) for k, v in g)))
        used: set = set()
        for b in self.blocks:
            if not b:
                raise InvalidObject("blocks must be nonempty")
            for x in b:
                if not 1 <= x <= self.n:
                    raise InvalidObject(f"block element {x} outside [{self.n}]")
                if x in used:
                    raise InvalidObject("blocks must be pairwise disjoint")
                used.add(x)
        free = [x for x in range(1, self.n + 1) if x not in used]
        if [x for x, _ in self.g] != free:
            raise InvalidObject("g must be defined exactly off the blocks")
        for _, v in self.g:
            if not 1 <= v <= self.A:
                raise InvalidObject(f"letter {v} outside [{self.A}]")

    @property
    def dim(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> dict:
        return {"A": self.A, "n": self.n, "blocks": [list(b) for b in self.blocks],
                "g": {str(k): v for k, v in self.g}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ParameterSet":
        return cls(int(d["A"]), int(d["n"]), tuple(tuple(b) for b in d["blocks"]),
                   {int(k): int(v) for k, v in d.get("g", {}).items()})


def parameter_to_rigid(V: ParameterSet) -> FiniteMap:
    A = V.A
    vals = list(range(1, A + 1)) + [0] * V.n
    for i, b in enumerate(V.blocks, 1):
        for x in b:
            vals[A + x - 1] = A + i
    for x, v in V.g:
        vals[A + x - 1] = v
    return FiniteMap(tuple(vals), A + V.dim)


def rigid_to_parameter(s: FiniteMap, A: int) -> ParameterSet:
    if s.dom < A or s.values[:A] != tuple(range(1, A + 1)):
        raise NotAnchored(f"{s} does not fix [{A}]")
    if not ob.is_rigid(s):
        raise InvalidObject(f"{s} is not a rigid surjection")
    n = s.dom - A
    l = s.cod - A
    blocks = [[] for _ in range(l)]
    g = {}
    for x in range(1, n + 1):
        v = s(A + x)
        if v > A:
            blocks[v - A - 1].append(x)
        else:
            g[x] = v
    return ParameterSet(A, n, tuple(tuple(b) for b in blocks), g)


def iter_parameter_sets(A: int, n: int, l: Optional[int] = None) -> Iterator[ParameterSet]:
    """All ``A``-parameter sets on ``n`` (of dimension ``l`` if given), via the bijection."""
    dims = range(n + 1) if l is None else [l]
    for k in dims:
        for s in ob.iter_class(ObjectClass.RIGID_SURJECTION, A + n, A + k):
            if s.values[:A] == tuple(range(1, A + 1)):
                yield rigid_to_parameter(s, A)


def is_subobject_direct(U: ParameterSet, V: ParameterSet) -> bool:
    """Each block of ``U`` is a union of blocks of ``V``; ``U.g`` extends ``V.g``;
    ``U.g`` is constant on every block of ``V`` it covers."""
    if U.A != V.A or U.n != V.n:
        return False
    ug = dict(U.g)
    vg = dict(V.g)
    for x, v in vg.items():
        if ug.get(x) != v:
            return False
    vblocks = [set(b) for b in V.blocks]
    for b in U.blocks:
        bs = set(b)
        inside = [vb for vb in vblocks if vb <= bs]
        if set().union(*inside) != bs if inside else True:
            return False
    for vb in vblocks:
        if all(x in ug for x in vb):
            if len({ug[x] for x in vb}) != 1:
                return False
        elif any(x in ug for x in vb):
            return False
    return True


def subobject_check(U: ParameterSet, V: ParameterSet) -> tuple[bool, Optional[FiniteMap]]:
    """Search anchored rigid ``r: [A+l] -> [A+k]`` with ``s_U = r o s_V``."""
    if U.A != V.A or U.n != V.n:
        return False, None
    A = U.A
    sU, sV = parameter_to_rigid(U), parameter_to_rigid(V)
    head = tuple(range(1, A + 1))
    for r in ob.iter_class(ObjectClass.RIGID_SURJECTION, A + V.dim, A + U.dim):
        if r.values[:A] != head:
            continue
        if ob.compose(r, sV) == sU:
            return True, r
    return False, None


# -- connections as partitions with representatives ---------------------------

@dataclass(frozen=True)
class PartitionConnection:
    R: tuple  # blocks ordered by minima
    C: tuple  # ascending

    def __post_init__(self):
        object.__setattr__(self, "R", _canon_blocks(self.R))
        object.__setattr__(self, "C", tuple(sorted(self.C)))
        if len(self.R) != len(self.C):
            raise InvalidObject("R and C must have the same size")
        seen: set = set()
        for b in self.R:
            if not b or seen & set(b):
                raise InvalidObject("R must consist of disjoint nonempty blocks")
            seen |= set(b)
        n = len(seen)
        if seen != set(range(1, n + 1)):
            raise InvalidObject("R must partition an initial segment [n]")
        m = len(self.R)
        for i in range(m):
            if self.C[i] not in self.R[i]:
                raise InvalidObject(f"c_{i + 1} is not in block {i + 1}")
            if i + 1 < m and self.C[i] >= self.R[i + 1][0]:
                raise InvalidObject(f"c_{i + 1} is not below the minimum of block {i + 2}")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.R)

    @property
    def m(self) -> int:
        return len(self.R)

    def to_dict(self) -> dict:
        return {"R": [list(b) for b in self.R], "C": list(self.C)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PartitionConnection":
        return cls(tuple(tuple(b) for b in d["R"]), tuple(d["C"]))


def connection_to_partition(c: Connection) -> PartitionConnection:
    blocks = [tuple(c.s.preimage(x)) for x in range(1, c.cod + 1)]
    return PartitionConnection(tuple(blocks), tuple(c.i.values))


def partition_to_connection(pc: PartitionConnection) -> Connection:
    n, m = pc.n, pc.m
    vals = [0] * n
    for i, b in enumerate(pc.R, 1):
        for x in b:
            vals[x - 1] = i
    return Connection(FiniteMap(tuple(vals), m), FiniteMap(pc.C, n))


def is_subconnection(sub: PartitionConnection, sup: PartitionConnection, *, literal: bool = False) -> bool:
    """``sub`` is reachable from ``sup``: its partition merges blocks of ``sup`` and ``sub.C <= sup.C``.

    With ``literal`` the coarsening direction is reversed (``sup`` coarser than
    ``sub``), which is kept only to compare the two readings.
    """
    if sub.n != sup.n or not set(sub.C) <= set(sup.C):
        return False
    fine, coarse = (sub, sup) if literal else (sup, sub)
    coarse_sets = [set(b) for b in coarse.R]
    return all(any(set(b) <= cb for cb in coarse_sets) for b in fine.R)


def subconnection_by_composition(sub: Connection, sup: Connection) -> bool:
    """Some connection ``c`` with ``sup . c == sub``."""
    if sub.dom != sup.dom:
        return False
    return any(ob.connection_compose(sup, c) == sub for c in ob.enumerate_connections(sup.cod, sub.cod))


def subconnections(sup: PartitionConnection, k: int) -> list[PartitionConnection]:
    """All ``k``-subconnections of ``sup``, by merging blocks and choosing representatives."""
    out = []
    m = sup.m
    for labels in ob.iter_class(ObjectClass.SURJECTION, m, k):
        merged = [[] for _ in range(k)]
        for bi, lab in enumerate(labels.values):
            merged[lab - 1].extend(sup.R[bi])
        for B in itertools.combinations(sup.C, k):
            try:
                pc = PartitionConnection(tuple(tuple(b) for b in merged), B)
            except InvalidObject:
                continue
            out.append(pc)
    return sorted(set(out), key=lambda p: (p.R, p.C))


def identity_connection(m: int) -> PartitionConnection:
    return PartitionConnection(tuple((x,) for x in range(1, m + 1)), tuple(range(1, m + 1)))
