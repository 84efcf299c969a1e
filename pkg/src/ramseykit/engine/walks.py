"""A parity colouring of walks onto [3] that no walk onto [6] makes monochromatic."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import objects as ob
from ..errors import MTooSmall, NotAWalk
from ..objects import FiniteMap, ObjectClass

WALK = ObjectClass.WALK


def _require_walk(u: FiniteMap, K: int) -> None:
    if not ob.is_walk(u) or u.cod != K or (u.dom and max(u.values) != K):
        raise NotAWalk(f"{u} is not a walk onto [{K}]")


def counter(u: FiniteMap) -> int:
    """Number of ascents 1 -> 2 at positions ``y`` before ``u`` first reaches 3."""
    vals = u.values
    n = 0
    for y in range(len(vals) - 1):
        if vals[y] > 2:
            break
        if vals[y] == 1 and vals[y + 1] == 2:
            n += 1
    return n


def walks_color(u: FiniteMap) -> int:
    _require_walk(u, 3)
    return counter(u) % 2


# s1..s4: s(1)=1, s(2)=s(5)=2, s(6)=3 and (s(3), s(4)) ranges over {1,2}^2
S_FAMILY = (
    FiniteMap((1, 2, 1, 1, 2, 3), 3),
    FiniteMap((1, 2, 2, 1, 2, 3), 3),
    FiniteMap((1, 2, 1, 2, 2, 3), 3),
    FiniteMap((1, 2, 2, 2, 2, 3), 3),
)


@dataclass
class Interval:
    lo: int
    hi: int
    kind: str
    count: int  # a_t(I)

    def to_dict(self) -> dict:
        return {"interval": [self.lo, self.hi], "type": self.kind, "a": self.count}


@dataclass
class WalkAnalysis:
    M0: int
    intervals: list
    a_t: int
    predicted: list       # a(s_i o t) from the case formula, i = 1..4
    direct: list          # a(s_i o t) computed from the composition
    counts: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.predicted == self.direct

    def to_dict(self) -> dict:
        return {
            "M0": self.M0,
            "intervals": [i.to_dict() for i in self.intervals],
            "a_t": self.a_t,
            "predicted": self.predicted,
            "direct": self.direct,
            "counts": self.counts,
        }


def analyze_walk6(t: FiniteMap) -> WalkAnalysis:
    _require_walk(t, 6)
    v = t.values
    M0 = v.index(6) + 1

    def at(x):  # 1-indexed
        return v[x - 1]

    intervals = []
    x = 1
    while x <= M0:
        if at(x) in (3, 4):
            lo = x
            while x + 1 <= M0 and at(x + 1) in (3, 4):
                x += 1
            hi = x
            left, right = at(lo - 1), at(hi + 1)
            kind = {(2, 5): "P1", (5, 2): "P2", (2, 2): "Q1", (5, 5): "Q2"}[(left, right)]
            if kind in ("P1", "Q1"):
                cnt = sum(1 for y in range(lo, hi + 1) if at(y) == 3 and at(y + 1) == 4)
            else:
                cnt = sum(1 for y in range(lo, hi + 1) if at(y) == 4 and at(y + 1) == 3)
            intervals.append(Interval(lo, hi, kind, cnt))
        x += 1
    a_t = sum(1 for y in range(1, M0) if at(y) == 1 and at(y + 1) == 2)
    by = {k: [i for i in intervals if i.kind == k] for k in ("P1", "P2", "Q1", "Q2")}
    P = by["P1"] + by["P2"]
    sumP = sum(i.count for i in P)
    pred = [
        a_t + len(intervals),
        a_t + sumP + sum(i.count for i in by["Q1"]) + sum(i.count + 1 for i in by["Q2"]),
        a_t + sumP + sum(i.count + 1 for i in by["Q1"]) + sum(i.count for i in by["Q2"]),
        a_t,
    ]
    direct = [counter(ob.compose(s, t)) for s in S_FAMILY]
    counts = {k: len(by[k]) for k in by}
    return WalkAnalysis(M0, intervals, a_t, pred, direct, counts)


class VacuouslyTrue:
    """No walk onto [6] exists at this length."""

    def __bool__(self):
        return True

    def __repr__(self):
        return "VacuouslyTrue"

    def __eq__(self, other):
        return isinstance(other, VacuouslyTrue)

    def __hash__(self):
        return hash("VacuouslyTrue")


def walks_onto(M: int, K: int) -> list[FiniteMap]:
    return ob.enumerate_class(WALK, M, K)


def verify_T74(M: int, full: bool = True):
    """True iff every walk ``t: [M] -> [6]`` leaves ``{s o t}`` non-monochromatic.

    The four-element family ``S_FAMILY`` is checked for every ``t``; with
    ``full`` the set of all walks ``[6] -> [3]`` is checked as well.
    """
    if M < 3:
        raise MTooSmall(f"M={M} is below 3")
    if M < 6:
        return VacuouslyTrue()
    all_s = walks_onto(6, 3) if full else []
    for t in walks_onto(M, 6):
        if len({walks_color(ob.compose(s, t)) for s in S_FAMILY}) < 2:
            return False
        if full and len({walks_color(ob.compose(s, t)) for s in all_s}) < 2:
            return False
    return True


def parity_facts(t: FiniteMap) -> dict:
    """The parity bookkeeping that rules out a monochromatic ``S_FAMILY o t``."""
    an = analyze_walk6(t)
    c = an.counts
    p_diff = c["P1"] - c["P2"]
    p_sum_odd = (c["P1"] + c["P2"]) % 2 == 1
    # if all four colours agreed, every difference a(s_i o t) - a(s_4 o t) would be even
    diffs = [an.direct[i] - an.direct[3] for i in range(3)]
    all_even = all(x % 2 == 0 for x in diffs)
    return {"P1_minus_P2": p_diff, "P_sum_odd": p_sum_odd, "all_even": all_even}
