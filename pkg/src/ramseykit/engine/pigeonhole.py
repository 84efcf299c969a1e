"""The pigeonhole conditions: (ph) on whole truncation layers, (lph) on one fiber."""

from __future__ import annotations

from typing import Iterable, Optional

from ..algebra import ActoidInstance, ActoidOfSets, FamilyElement
from ..errors import OracleFailure, UndefinedAction, XNotInTruncatedS
from ..objects import format_obj, sort_key
from .search import Certificate, Kind, SearchBudget, find_bad_coloring


def _sorted(xs: Iterable) -> list:
    return sorted(xs, key=sort_key)


def truncated_layer(inst: ActoidInstance, S: Iterable, t: int) -> list:
    return _sorted(inst.set_trunc(frozenset(S), t))


def fiber(inst: ActoidInstance, S: Iterable, t: int, x) -> list:
    """``(d^t S)_x``: elements of the ``t``-th truncation layer whose truncation is ``x``."""
    return [y for y in truncated_layer(inst, S, t) if inst.trunc(y) == x]


def check_ph(aos: ActoidOfSets, d: int, t: int, S: FamilyElement, F: FamilyElement,
             budget: Optional[SearchBudget] = None, threads: Optional[int] = None) -> Certificate:
    """Search for a colouring of ``F.(d^t S)`` that no ``f`` fixes on every ``d``-fiber."""
    if aos.bullet_act(F, S) is None:
        raise UndefinedAction(f"{F.name} acting on {S.name} is undefined")
    inst = aos.instance
    layer = truncated_layer(inst, S.members, t)
    return find_bad_coloring(
        F.members, layer, d, inst.act, equiv=inst.trunc, budget=budget, threads=threads,
        problem={"check": "ph", "F": F.name, "S": S.name, "t": t},
    )


class Extension:
    """Memoised ``b extends a`` over the instance's finite Z carrier."""

    def __init__(self, inst: ActoidInstance):
        self.inst = inst
        self._dom: dict = {}

    def defined_on(self, a) -> list:
        got = self._dom.get(a)
        if got is None:
            act = self.inst.act
            got = [(x, y) for x in self.inst.z_objects if (y := act(a, x)) is not None]
            self._dom[a] = got
        return got

    def extends(self, b, a) -> bool:
        act = self.inst.act
        return all(act(b, x) == y for x, y in self.defined_on(a))

    def restrict(self, F: Iterable, a) -> list:
        return [b for b in F if self.extends(b, a)]


def check_lph(aos: ActoidOfSets, d: int, t: int, S: FamilyElement, x,
              candidates: Iterable[tuple], budget: Optional[SearchBudget] = None,
              threads: Optional[int] = None, ext: Optional[Extension] = None) -> Certificate:
    """Try each candidate ``(F, a)`` in turn on the fiber of ``x``; the first that verifies wins.

    ``x`` must lie in ``d^(t+1) S``.  A candidate qualifies only if ``F`` acts on
    ``S`` and ``a.x`` is defined; then every colouring of ``F_a`` acting on the
    fiber must be fixed by some member of ``F_a``.
    """
    inst = aos.instance
    if x not in inst.set_trunc(frozenset(S.members), t + 1):
        raise XNotInTruncatedS(f"{format_obj(x)} is not in the {t + 1}-fold truncation of {S.name}")
    ext = ext or Extension(inst)
    cls = fiber(inst, S.members, t, x)
    tried = []
    last = None
    for F, a in candidates:
        if aos.bullet_act(F, S) is None or inst.act(a, x) is None:
            tried.append({"F": F.name, "a": format_obj(a), "skipped": True})
            continue
        Fa = ext.restrict(F.members, a)
        cert = find_bad_coloring(
            Fa, cls, d, inst.act, budget=budget, threads=threads,
            problem={"check": "lph", "F": F.name, "a": format_obj(a), "S": S.name,
                     "x": format_obj(x), "t": t},
        )
        tried.append({"F": F.name, "a": format_obj(a), "result": cert.kind.value,
                      "restricted_size": len(Fa)})
        last = cert
        if cert.kind is Kind.PIGEONHOLE_HOLDS:
            return Certificate(
                Kind.LPH_WITNESS, cert.problem,
                witness={"F": F.name, "F_key": repr(F.key), "a": format_obj(a),
                         "fiber": [format_obj(y) for y in cls], "tried": tried},
                stats=cert.stats,
            )
    problem = {"check": "lph", "S": S.name, "x": format_obj(x), "t": t, "d": d}
    stats = dict(last.stats) if last is not None else {}
    return Certificate(Kind.LPH_NOT_FOUND, problem, witness={"tried": tried}, stats=stats)


# -- oracles built from instance hooks --------------------------------------

class Oracles:
    """Memoised (ph) and (lph) oracles that search an instance's acting families in order."""

    def __init__(self, built, limit: int, budget: Optional[SearchBudget] = None,
                 threads: Optional[int] = None):
        self.built = built
        self.aos: ActoidOfSets = built.aos
        self.limit = limit
        self.budget = budget
        self.threads = threads
        self.ext = Extension(built.instance)
        self._ph: dict = {}
        self._lph: dict = {}
        self.calls = {"ph": 0, "lph": 0, "base": 0}

    def _acting(self, S: FamilyElement) -> list[FamilyElement]:
        return [self.aos.f(k) for k in self.built.acting(S.key, self.limit)]

    def base(self, S: FamilyElement) -> FamilyElement:
        """First non-empty family acting on ``S``: enough for the ``t = 0`` case."""
        self.calls["base"] += 1
        for F in self._acting(S):
            if F.members and self.aos.bullet_act(F, S) is not None:
                return F
        raise OracleFailure(f"nothing acts on {S.name} up to size {self.limit}")

    def ph(self, d: int, t: int, S: FamilyElement) -> FamilyElement:
        key = (d, t, S.key)
        if key in self._ph:
            return self._ph[key]
        self.calls["ph"] += 1
        for F in self._acting(S):
            if not F.members:
                continue
            cert = check_ph(self.aos, d, t, S, F, self.budget, self.threads)
            if cert.kind is Kind.PIGEONHOLE_HOLDS:
                self._ph[key] = F
                return F
        raise OracleFailure(f"no (ph) witness for {S.name} at d={d}, t={t} up to size {self.limit}")

    def lph(self, d: int, t: int, S: FamilyElement, x):
        key = (d, t, S.key, x)
        if key in self._lph:
            return self._lph[key]
        self.calls["lph"] += 1
        anchor = self.built.lph_anchor
        if anchor is None:
            raise OracleFailure(f"{self.built.name} has no compatibility element for (lph)")
        a = anchor(x)
        cands = [(F, a) for F in self._acting(S)]
        cert = check_lph(self.aos, d, t, S, x, cands, self.budget, self.threads, self.ext)
        if cert.kind is not Kind.LPH_WITNESS:
            raise OracleFailure(f"no (lph) witness for {S.name} at {format_obj(x)} up to size {self.limit}")
        F = next(F for F, _ in cands if F.name == cert.witness["F"])
        self._lph[key] = (F, a)
        return F, a
