"""Desk-scale Ramsey statements and their least thresholds."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .. import objects as ob
from ..instances import (
    _ii_compose,
    as_mult,
    binom_members,
    f3_members,
    f_anchored,
    g3_members,
    g_anchored,
    s1_members,
    s2_members,
    t2_members,
)
from ..objects import FiniteMap, ObjectClass, format_obj
from .search import Kind, SearchBudget, find_bad_coloring


class Statement(str, Enum):
    CLASSICAL = "classical"
    DUAL = "dual"
    SELF_DUAL = "self-dual"
    SELF_DUAL_AUGMENTED = "self-dual-augmented"
    SELF_DUAL_PARTIAL = "self-dual-partial"
    HALES_JEWETT = "hales-jewett"
    GRAHAM_ROTHSCHILD = "graham-rothschild"
    GRAHAM_ROTHSCHILD_VOIGT = "graham-rothschild-voigt"


@dataclass
class Instance:
    """One ``M`` of a statement: colour ``F.S``; find ``f`` fixing each class."""

    F: list
    S: list
    act: Callable
    equiv: Optional[Callable] = None
    label: dict = field(default_factory=dict)


def _rs_act(t: FiniteMap, s: FiniteMap):
    return ob.canonical_compose(s, t)


def _anchor(raw) -> FiniteMap:
    return raw if isinstance(raw, FiniteMap) else FiniteMap.parse(raw)


def _dom(v) -> int:
    return v.dom


def statement_instance(stmt: Statement | str, M: int, params: dict) -> Instance:
    stmt = Statement(stmt)
    K, L = params.get("K"), params.get("L")
    if stmt is Statement.CLASSICAL:
        return Instance(binom_members(M, L), binom_members(L, K), _ii_compose)
    if stmt is Statement.DUAL:
        RS = ObjectClass.RIGID_SURJECTION
        return Instance(ob.enumerate_class(RS, M, L), ob.enumerate_class(RS, L, K), _rs_act)
    if stmt is Statement.SELF_DUAL:
        return Instance(ob.enumerate_connections(M, L), ob.enumerate_connections(L, K), ob.connection_compose)
    if stmt is Statement.SELF_DUAL_AUGMENTED:
        return Instance(f3_members(M, L), f3_members(L, K), as_mult)
    if stmt is Statement.SELF_DUAL_PARTIAL:
        return Instance(g3_members(M, L), g3_members(L, K), as_mult)
    if stmt is Statement.HALES_JEWETT:
        v0 = _anchor(params["v0"])
        # colour classes are the maps of one fixed length
        return Instance(f_anchored(M, L, v0.dom), s1_members(L, v0), _rs_act, equiv=_dom)
    if stmt in (Statement.GRAHAM_ROTHSCHILD, Statement.GRAHAM_ROTHSCHILD_VOIGT):
        s0 = _anchor(params["s0"])
        if stmt is Statement.GRAHAM_ROTHSCHILD:
            return Instance(f_anchored(M, L, s0.dom), s2_members(L, K, s0), _rs_act)
        return Instance(g_anchored(M, L, s0.dom), t2_members(L, K, s0), _rs_act)
    raise ValueError(stmt)


def smallest_legal_M(stmt: Statement | str, params: dict) -> int:
    return int(params["L"])


@dataclass
class ThresholdResult:
    statement: str
    params: dict
    threshold: Optional[int]
    certificates: dict  # M -> Certificate
    inconclusive_at: Optional[int] = None

    @property
    def inconclusive(self) -> bool:
        return self.threshold is None

    def to_dict(self) -> dict:
        return {
            "statement": self.statement,
            "params": {k: format_obj(v) if not isinstance(v, (int, str)) else v for k, v in self.params.items()},
            "threshold": self.threshold if self.threshold is not None else "Inconclusive",
            "per_M": {str(M): c.to_dict() for M, c in sorted(self.certificates.items())},
        }


def min_threshold(stmt: Statement | str, params: dict, budget: Optional[SearchBudget] = None,
                  max_M: int = 8, threads: Optional[int] = None) -> ThresholdResult:
    """Least ``M <= max_M`` at which no bad ``d``-colouring exists.

    Every ``M`` from the smallest legal value is searched on its own; the
    certificates for all of them are kept.
    """
    stmt = Statement(stmt)
    d = int(params.get("d", 2))
    certs: dict = {}
    for M in range(smallest_legal_M(stmt, params), max_M + 1):
        inst = statement_instance(stmt, M, params)
        cert = find_bad_coloring(inst.F, inst.S, d, inst.act, equiv=inst.equiv, budget=budget,
                                 threads=threads, problem={"statement": stmt.value, "M": M})
        certs[M] = cert
        if cert.kind is Kind.PIGEONHOLE_HOLDS:
            return ThresholdResult(stmt.value, params, M, certs)
        if cert.kind is Kind.INCONCLUSIVE:
            return ThresholdResult(stmt.value, params, None, certs, inconclusive_at=M)
    return ThresholdResult(stmt.value, params, None, certs, inconclusive_at=max_M + 1)
