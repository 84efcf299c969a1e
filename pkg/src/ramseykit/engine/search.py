"""Bad-colouring search.

A colouring of ``F.S`` is *bad* when no ``f`` in ``F`` makes every
equivalence class of ``S`` monochromatic after acting.  The search either
produces a bad colouring, proves none exists, or runs out of budget.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Hashable, Optional, Sequence

import numpy as np

from ..errors import UndefinedAction
from ..objects import format_obj, sort_key


class Strategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    BACKTRACKING = "backtracking"


@dataclass(frozen=True)
class SearchBudget:
    max_colorings: int = 10**7
    max_seconds: float = 60.0
    strategy: Strategy = Strategy.EXHAUSTIVE

    def __post_init__(self):
        if self.max_colorings <= 0 or self.max_seconds <= 0:
            raise ValueError("budget caps must be positive")
        object.__setattr__(self, "strategy", Strategy(self.strategy))


class Kind(str, Enum):
    RAMSEY_HOLDS = "RamseyHolds"
    BAD_COLORING = "BadColoring"
    PIGEONHOLE_HOLDS = "PigeonholeHolds"
    LPH_WITNESS = "LphWitness"
    INCONCLUSIVE = "Inconclusive"
    LPH_NOT_FOUND = "LphNotFound"


@dataclass
class Coloring:
    domain: list
    d: int
    assignment: dict  # object -> colour in 1..d

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("need at least one colour")
        for x in self.domain:
            c = self.assignment.get(x)
            if c is None or not 1 <= c <= self.d:
                raise ValueError(f"colour of {format_obj(x)} missing or out of range")

    def __call__(self, x) -> int:
        return self.assignment[x]

    @classmethod
    def from_function(cls, domain, d, fn):
        domain = list(domain)
        return cls(domain, d, {x: fn(x) for x in domain})

    def to_dict(self) -> dict:
        return {format_obj(x): self.assignment[x] for x in self.domain}


@dataclass
class Certificate:
    kind: Kind
    problem: dict = field(default_factory=dict)
    coloring: Optional[Coloring] = None
    witness: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.kind in (Kind.PIGEONHOLE_HOLDS, Kind.LPH_WITNESS, Kind.RAMSEY_HOLDS)

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "problem": self.problem, "stats": self.stats}
        if self.coloring is not None:
            out["coloring"] = self.coloring.to_dict()
            out["d"] = self.coloring.d
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_threads() -> int:
    raw = os.environ.get("RAMSEYKIT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


# -- problem compilation -----------------------------------------------------

@dataclass
class Compiled:
    domain: list          # distinct objects of F.S, first-appearance order
    f_list: list
    groups: list          # per f: list of tuples of domain indices (classes with >= 2 images)
    relevant: list        # domain indices that occur in some group
    trivial_f: Optional[int]  # index of an f with no groups, if any


def _members(X) -> list:
    members = getattr(X, "members", X)
    return list(members)


def compile_problem(F, S, act, equiv: Optional[Callable[[Any], Hashable]] = None) -> Compiled:
    f_list = _members(F)
    s_list = _members(S)
    key = equiv if equiv is not None else (lambda x: 0)
    classes: dict = {}
    for x in s_list:
        classes.setdefault(key(x), []).append(x)
    class_lists = [c for c in classes.values() if len(c) >= 2]

    index: dict = {}
    domain: list = []

    def idx(y):
        i = index.get(y)
        if i is None:
            i = index[y] = len(domain)
            domain.append(y)
        return i

    groups = []
    trivial = None
    for fi, f in enumerate(f_list):
        for x in s_list:
            y = act(f, x)
            if y is None:
                raise UndefinedAction(f"{format_obj(f)} . {format_obj(x)} is undefined")
            idx(y)
        gs = []
        for cl in class_lists:
            imgs = sorted({index[act(f, x)] for x in cl})
            if len(imgs) >= 2:
                gs.append(tuple(imgs))
        groups.append(gs)
        if not gs and trivial is None:
            trivial = fi
    rel = sorted({i for gs in groups for g in gs for i in g})
    return Compiled(domain, f_list, groups, rel, trivial)


def stabilizes(groups_f: Sequence[tuple], colour_of: Callable[[int], int]) -> bool:
    return all(len({colour_of(i) for i in g}) == 1 for g in groups_f)


# -- certificates ------------------------------------------------------------

def verify_bad_coloring(F, S, act, coloring: Coloring, equiv=None) -> bool:
    """Naive check, independent of the compiled search: no ``f`` stabilizes ``coloring``."""
    key = equiv if equiv is not None else (lambda x: 0)
    s_list = _members(S)
    for f in _members(F):
        seen: dict = {}
        ok = True
        for x in s_list:
            y = act(f, x)
            if y not in coloring.assignment:
                return False
            c = coloring.assignment[y]
            k = key(x)
            if seen.setdefault(k, c) != c:
                ok = False
                break
        if ok:
            return False
    return True


def _descriptor(F, S, d, equiv, extra=None) -> dict:
    desc = {
        "F": getattr(F, "name", None) or f"<{len(_members(F))} maps>",
        "S": getattr(S, "name", None) or f"<{len(_members(S))} objects>",
        "d": d,
        "equiv": "total" if equiv is None else getattr(equiv, "__name__", "custom"),
    }
    if extra:
        desc.update(extra)
    return desc


# -- exhaustive --------------------------------------------------------------

def _pairs_for(comp: Compiled, pos: dict):
    """Consecutive index pairs per f (positions among relevant variables) and segment starts."""
    us, vs, starts = [], [], []
    for gs in comp.groups:
        starts.append(len(us))
        for g in gs:
            for a, b in zip(g, g[1:]):
                us.append(pos[a])
                vs.append(pos[b])
    return np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(starts, dtype=np.int64)


def _first_bad_in_chunk(lo, hi, R, d, us, vs, starts, nf, powers):
    idx = np.arange(lo, hi, dtype=np.int64)
    digits = (idx[:, None] // powers[None, :]) % d
    eq = digits[:, us] == digits[:, vs]
    # f is stabilizing iff all its pairs are equal; segments are non-empty here
    ok = np.logical_and.reduceat(eq, starts, axis=1)
    bad = ~ok.any(axis=1)
    hits = np.nonzero(bad)[0]
    if len(hits):
        return int(lo + hits[0])
    return None


def _exhaustive(comp: Compiled, d: int, budget: SearchBudget, threads: int, t0: float):
    R = len(comp.relevant)
    total = d ** R
    pos = {v: i for i, v in enumerate(comp.relevant)}
    us, vs, starts = _pairs_for(comp, pos)
    nf = len(comp.groups)
    limit = min(total, budget.max_colorings, 1 << 62)
    # indices stay below ``limit``, so leading digits with a larger place value
    # are always 0; clamping keeps the table inside int64
    powers = np.array([min(d ** (R - 1 - i), 1 << 62) for i in range(R)], dtype=np.int64)
    per_row = max(1, len(us))
    chunk = max(1024, min(1 << 18, (1 << 24) // per_row))
    examined = 0
    lo = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while lo < limit:
            spans = []
            for _ in range(threads):
                if lo >= limit:
                    break
                hi = min(lo + chunk, limit)
                spans.append((lo, hi))
                lo = hi
            args = [(a, b, R, d, us, vs, starts, nf, powers) for a, b in spans]
            if pool is None:
                results = [_first_bad_in_chunk(*a) for a in args]
            else:
                results = list(pool.map(lambda a: _first_bad_in_chunk(*a), args))
            for (a, b), r in zip(spans, results):
                if r is not None:
                    return "bad", r, examined + (r - a) + 1
                examined += b - a
            if time.perf_counter() - t0 > budget.max_seconds and lo < total:
                return "timeout", None, examined
    finally:
        if pool is not None:
            pool.shutdown()
    if limit < total:
        return "cap", None, examined
    return "none", None, examined


def _decode(n: int, R: int, d: int) -> list[int]:
    out = [0] * R
    for i in range(R - 1, -1, -1):
        n, out[i] = divmod(n, d)
    return out


# -- backtracking ------------------------------------------------------------

def _backtracking(comp: Compiled, d: int, budget: SearchBudget, t0: float):
    """Depth-first colouring of the relevant variables.

    A branch dies once some ``f`` is fully coloured without a split class.
    When an unbroken ``f`` has one uncoloured variable left, the colour that
    would keep it stabilizing is forbidden.  Colours are introduced in order
    (symmetry breaking), which is sound because badness is colour-invariant.
    """
    rel = comp.relevant
    R = len(rel)
    pos = {v: i for i, v in enumerate(rel)}
    nf = len(comp.groups)
    fgroups = [[tuple(pos[i] for i in g) for g in gs] for gs in comp.groups]
    fvars = [sorted({v for g in gs for v in g}) for gs in fgroups]
    memb: list[list[tuple[int, int]]] = [[] for _ in range(R)]
    for f, gs in enumerate(fgroups):
        for gi, g in enumerate(gs):
            for v in g:
                memb[v].append((f, gi))
    # static order: most constrained first, ties by index
    order = sorted(range(R), key=lambda v: (-len(memb[v]), v))
    colour = [-1] * R
    gcol = [[-1] * len(gs) for gs in fgroups]
    broken = [False] * nf
    unassigned = [len(vs) for vs in fvars]
    forbidden = [0] * R  # bitmask of colours
    nodes = 0

    def assign(v, k, trail):
        nonlocal nodes
        nodes += 1
        colour[v] = k
        touched = set()
        for f, gi in memb[v]:
            touched.add(f)
            if broken[f]:
                continue
            c = gcol[f][gi]
            if c == -1:
                gcol[f][gi] = k
                trail.append(("g", f, gi))
            elif c != k:
                broken[f] = True
                trail.append(("b", f))
        for f in touched:
            unassigned[f] -= 1
            trail.append(("u", f))
        ok = True
        for f in touched:
            if broken[f]:
                continue
            if unassigned[f] == 0:
                ok = False
                break
            if unassigned[f] == 1:
                u = next(w for w in fvars[f] if colour[w] == -1)
                want = None
                for g2, gi2 in memb[u]:
                    if g2 != f:
                        continue
                    c = gcol[f][gi2]
                    if c == -1:
                        want = -2
                        break
                    if want is None:
                        want = c
                    elif want != c:
                        want = -2
                        break
                if want is not None and want >= 0:
                    bit = 1 << want
                    if not forbidden[u] & bit:
                        forbidden[u] |= bit
                        trail.append(("f", u, bit))
                        if forbidden[u] == (1 << d) - 1:
                            ok = False
                            break
        return ok

    def undo(v, trail):
        for item in reversed(trail):
            tag = item[0]
            if tag == "g":
                gcol[item[1]][item[2]] = -1
            elif tag == "b":
                broken[item[1]] = False
            elif tag == "u":
                unassigned[item[1]] += 1
            else:
                forbidden[item[1]] &= ~item[2]
        colour[v] = -1

    if nf and any(not gs for gs in fgroups):
        return "none", None, 0

    status = {"result": None}
    # explicit stack: (depth, next colour to try, max colour used so far, trail)
    depth = 0
    next_colour = [0] * (R + 1)
    max_used = [-1] * (R + 1)
    trails: list[list] = [[] for _ in range(R + 1)]
    if R == 0:
        return ("bad", [], 0) if nf == 0 else ("none", None, 0)
    while True:
        if depth == R:
            status["result"] = [colour[v] for v in range(R)]
            break
        v = order[depth]
        if next_colour[depth] > 0:
            undo(v, trails[depth])
            trails[depth] = []
        k = next_colour[depth]
        cap = min(d - 1, max_used[depth] + 1)
        while k <= cap and forbidden[v] >> k & 1:
            k += 1
        if k > cap:
            next_colour[depth] = 0
            depth -= 1
            if depth < 0:
                break
            continue
        next_colour[depth] = k + 1
        if assign(v, k, trails[depth]):
            max_used[depth + 1] = max(max_used[depth], k)
            next_colour[depth + 1] = 0
            trails[depth + 1] = []
            depth += 1
        if nodes % 4096 == 0:
            if nodes > budget.max_colorings or time.perf_counter() - t0 > budget.max_seconds:
                return "timeout", None, nodes
    if status["result"] is not None:
        return "bad", status["result"], nodes
    return "none", None, nodes


# -- entry point -------------------------------------------------------------

def find_bad_coloring(
    F,
    S,
    d: int,
    act: Callable,
    equiv: Optional[Callable[[Any], Hashable]] = None,
    budget: Optional[SearchBudget] = None,
    threads: Optional[int] = None,
    problem: Optional[dict] = None,
) -> Certificate:
    """Search for a ``d``-colouring of ``F.S`` that no ``f`` in ``F`` stabilizes.

    ``equiv`` maps each element of ``S`` to its class key; ``None`` means a
    single class.  Elements of the domain that no class constraint touches
    get colour 1.
    """
    if d < 1:
        raise ValueError("d must be positive")
    budget = budget or SearchBudget()
    threads = threads or default_threads()
    t0 = time.perf_counter()
    comp = compile_problem(F, S, act, equiv)
    desc = _descriptor(F, S, d, equiv, problem)
    n = len(comp.domain)
    stats = {
        "strategy": budget.strategy.value,
        "domain_size": n,
        "relevant_size": len(comp.relevant),
        "f_count": len(comp.f_list),
        "deterministic": True,
    }

    def bad_cert(values):
        assign = {y: 1 for y in comp.domain}
        for v, c in zip(comp.relevant, values):
            assign[comp.domain[v]] = c + 1
        col = Coloring(comp.domain, d, assign)
        stats["elapsed_s"] = round(time.perf_counter() - t0, 6)
        return Certificate(Kind.BAD_COLORING, desc, coloring=col, stats=stats)

    if not comp.f_list:
        stats["examined"] = 0
        return bad_cert([0] * len(comp.relevant))
    if comp.trivial_f is not None:
        f = comp.f_list[comp.trivial_f]
        stats["examined"] = 0
        stats["colorings_covered"] = str(d ** n)
        stats["elapsed_s"] = round(time.perf_counter() - t0, 6)
        return Certificate(Kind.PIGEONHOLE_HOLDS, desc, witness={"f": format_obj(f), "reason": "no split class"},
                           stats=stats)

    R = len(comp.relevant)
    if budget.strategy is Strategy.EXHAUSTIVE:
        status, found, examined = _exhaustive(comp, d, budget, threads, t0)
        stats["examined"] = examined
        stats["search_space"] = str(d ** R)
        if status == "bad":
            return bad_cert(_decode(found, R, d))
    else:
        status, values, examined = _backtracking(comp, d, budget, t0)
        stats["nodes"] = examined
        if status == "bad":
            return bad_cert(values)
    stats["elapsed_s"] = round(time.perf_counter() - t0, 6)
    if status == "none":
        # colours of untouched domain elements never matter, so every one of
        # the d^n colourings has been accounted for
        stats["colorings_covered"] = str(d ** n)
        return Certificate(Kind.PIGEONHOLE_HOLDS, desc, stats=stats)
    stats["exhausted"] = status
    return Certificate(Kind.INCONCLUSIVE, desc, stats=stats)


def find_stabilizer(F, S, act, coloring: Callable[[Any], int], equiv=None):
    """Lexicographically first ``f`` in ``F`` making each class monochromatic, or None."""
    key = equiv if equiv is not None else (lambda x: 0)
    s_list = _members(S)
    for f in sorted(_members(F), key=sort_key):
        seen: dict = {}
        if all(seen.setdefault(key(x), coloring(act(f, x))) == coloring(act(f, x)) for x in s_list):
            return f
    return None
