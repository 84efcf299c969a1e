"""Witness families built by composing pigeonhole witnesses, plus stabilizer extraction.

Two constructions are provided:

* ``compose_witness_T31`` turns a (ph) oracle into a family whose members fix
  colours on the classes of ``x1 ~ x2 <=> d^t x1 = d^t x2``.  The family for
  depth ``t + 1`` is ``F1 * F0`` with ``F0`` the (ph) witness at depth ``t``
  and ``F1`` built recursively for ``F0 * S``.
* ``compose_witness_T42`` turns an (lph) oracle into a (ph) witness over a
  normed background by treating the points of ``d^(t+1) S`` one at a time in
  order of decreasing norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..algebra import ActoidOfSets, FamilyElement
from ..errors import ConstructionTreeMissing, NormMissing, OracleFailure
from ..objects import format_obj, sort_key
from .pigeonhole import Extension, fiber, truncated_layer


@dataclass
class ComposedWitness:
    """A family together with how it was assembled."""

    family: FamilyElement
    S: FamilyElement
    t: int
    aos: ActoidOfSets
    F0: Optional[FamilyElement] = None
    inner: Optional["ComposedWitness"] = None  # witness for F0 * S at depth t - 1

    @property
    def name(self) -> str:
        return self.family.name

    @property
    def members(self):
        return self.family.members

    def tree(self) -> dict:
        out = {"family": self.family.name, "S": self.S.name, "t": self.t}
        if self.F0 is not None:
            out["F0"] = self.F0.name
            out["F1"] = self.inner.tree()
        return out


def _imp_holds(aos, f, S_members, t, coloring) -> bool:
    inst = aos.instance
    seen: dict = {}
    for x in S_members:
        c = coloring(inst.act(f, x))
        if seen.setdefault(inst.trunc_pow(x, t), c) != c:
            return False
    return True


def compose_witness_T31(aos: ActoidOfSets, d: int, t: int, S: FamilyElement,
                        ph_oracle: Callable[[int, int, FamilyElement], FamilyElement],
                        base_oracle: Optional[Callable[[FamilyElement], FamilyElement]] = None,
                        ) -> ComposedWitness:
    """Build a family ``F`` with ``F * S`` defined whose colourings all admit a stabilizer."""
    if t == 0:
        F = base_oracle(S) if base_oracle is not None else ph_oracle(d, 0, S)
        if aos.bullet_act(F, S) is None or not F.members:
            raise OracleFailure(f"oracle returned {F.name}, which does not act on {S.name}")
        return ComposedWitness(F, S, 0, aos)
    F0 = ph_oracle(d, t - 1, S)
    S1 = aos.bullet_act(F0, S)
    if S1 is None:
        raise OracleFailure(f"oracle returned {F0.name}, which does not act on {S.name}")
    inner = compose_witness_T31(aos, d, t - 1, S1, ph_oracle, base_oracle)
    F = aos.bullet(inner.family, F0)
    if F is None or aos.bullet_act(F, S) is None:
        raise OracleFailure(f"{inner.family.name} * {F0.name} is undefined")
    return ComposedWitness(F, S, t, aos, F0=F0, inner=inner)


def extract_stabilizer(composed, coloring: Callable[[Any], int]):
    """Return ``f`` in the composed family with ``d^t x1 = d^t x2 => c(f.x1) = c(f.x2)``.

    ``coloring`` must be defined on ``composed * S``.  The result is checked
    before it is returned.
    """
    if not isinstance(composed, ComposedWitness):
        raise ConstructionTreeMissing("stabilizer extraction needs the construction tree")
    aos, inst = composed.aos, composed.aos.instance
    S_members = sorted(composed.S.members, key=sort_key)
    if composed.t == 0:
        f = min(composed.family.members, key=sort_key)
    else:
        F0 = composed.F0
        f1 = extract_stabilizer(composed.inner, coloring)
        t = composed.t
        # induced colouring of the (t-1)-truncation of F0 * S
        cbar: dict = {}
        for g in F0.members:
            for x in S_members:
                y = inst.act(g, x)
                cbar.setdefault(inst.trunc_pow(y, t - 1), coloring(inst.act(f1, y)))
        f0 = None
        for g in sorted(F0.members, key=sort_key):
            seen: dict = {}
            if all(seen.setdefault(inst.trunc_pow(x, t), cbar[inst.trunc_pow(inst.act(g, x), t - 1)])
                   == cbar[inst.trunc_pow(inst.act(g, x), t - 1)] for x in S_members):
                f0 = g
                break
        if f0 is None:
            raise OracleFailure(f"{F0.name} has no member fixing the induced colouring")
        f = inst.mult(f1, f0)
        if f is None:
            raise OracleFailure("f1 . f0 is undefined")
    if not _imp_holds(aos, f, S_members, composed.t, coloring):
        raise OracleFailure(f"extracted {format_obj(f)} does not stabilize the colouring")
    return f


# -- localized construction --------------------------------------------------

@dataclass
class LphStep:
    F: FamilyElement
    b: Any
    S_before: FamilyElement   # F_{k-1} ... F_1 S
    point: Any                # b_{k-1} ... b_1 x_k
    x: Any                    # x_k in d^(t+1) S


@dataclass
class LocalizedWitness:
    family: FamilyElement
    S: FamilyElement
    t: int
    aos: ActoidOfSets
    steps: list = field(default_factory=list)
    audit: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.family.name

    @property
    def members(self):
        return self.family.members

    def tree(self) -> dict:
        return {
            "family": self.family.name,
            "S": self.S.name,
            "t": self.t,
            "steps": [
                {"F": s.F.name, "b": format_obj(s.b), "x": format_obj(s.x), "point": format_obj(s.point)}
                for s in self.steps
            ],
            "audit": self.audit,
        }


def _chain_act(inst, fs, x):
    """``f_k . (... (f_1 . x))`` for ``fs = [f_1, ..., f_k]``."""
    for f in fs:
        if x is None:
            return None
        x = inst.act(f, x)
    return x


def _audit_samples(choices: list[list]) -> list[list]:
    """A few deterministic picks ``f_j`` from each restricted family."""
    if not choices or any(not c for c in choices):
        return []
    picks = [[c[0] for c in choices], [c[-1] for c in choices]]
    picks.append([c[j % len(c)] for j, c in enumerate(choices)])
    out = []
    for p in picks:
        if p not in out:
            out.append(p)
    return out


def compose_witness_T42(aos: ActoidOfSets, d: int, t: int, S: FamilyElement,
                        lph_oracle: Callable[[int, int, FamilyElement, Any], tuple],
                        ext: Optional[Extension] = None) -> LocalizedWitness:
    """Chain (lph) witnesses along ``d^(t+1) S`` sorted by decreasing norm."""
    inst = aos.instance
    if not inst.is_normed:
        raise NormMissing(f"{inst.name} has no norm")
    ext = ext or Extension(inst)
    # decreasing norm; ties keep the canonical object order
    top = sorted(sorted(inst.set_trunc(frozenset(S.members), t + 1), key=sort_key),
                 key=inst.norm, reverse=True)
    if not top:
        raise OracleFailure(f"{S.name} is empty")
    steps: list[LphStep] = []
    bs: list = []
    current = S
    audit = {"checked": 0, "violations": 0}
    restricted: list[list] = []
    for k, xk in enumerate(top, 1):
        point = _chain_act(inst, bs, xk)
        if point is None:
            raise OracleFailure(f"b-chain undefined at step {k}")
        F, b = lph_oracle(d, t, current, point)
        nxt = aos.bullet_act(F, current)
        if nxt is None:
            raise OracleFailure(f"{F.name} does not act on {current.name}")
        steps.append(LphStep(F, b, current, point, xk))
        bs.append(b)
        restricted.append(sorted(ext.restrict(F.members, b), key=sort_key))
        current = nxt
        # the remaining points must stay reachable through the b-chain
        for xl in top[k:]:
            if _chain_act(inst, bs, xl) is None:
                raise OracleFailure(f"b-chain undefined on {format_obj(xl)} after step {k}")
        _audit_invariant(inst, S, t, top[k - 1:], bs, restricted, audit)
    # right fold: F_n * (F_{n-1} * (... * F_1))
    family = steps[0].F
    for s in steps[1:]:
        nxt = aos.bullet(s.F, family)
        if nxt is None:
            raise OracleFailure(f"{s.F.name} * {family.name} is undefined")
        family = nxt
    if aos.bullet_act(family, S) is None:
        raise OracleFailure(f"{family.name} does not act on {S.name}")
    return LocalizedWitness(family, S, t, aos, steps, audit)


def _audit_invariant(inst, S, t, pending, bs, restricted, audit):
    """Check ``d^(t+1)(f_k ... f_1 x~) = b_k ... b_1 x_l`` on sampled ``f_j`` extending ``b_j``."""
    for fs in _audit_samples(restricted):
        for xl in pending:
            target = _chain_act(inst, bs, xl)
            for xt in S.members:
                if inst.trunc_pow(xt, t + 1) != xl:
                    continue
                y = _chain_act(inst, fs, xt)
                audit["checked"] += 1
                if y is None or inst.trunc_pow(y, t + 1) != target:
                    audit["violations"] += 1
                    raise OracleFailure(
                        f"invariant broken at {format_obj(xt)}: got "
                        f"{format_obj(None if y is None else inst.trunc_pow(y, t + 1))}, "
                        f"expected {format_obj(target)}")


def extract_localized(witness: LocalizedWitness, coloring: Callable[[Any], int], ext: Optional[Extension] = None):
    """Descend ``k = n .. 1`` picking ``f_k`` in ``(F_k)_{b_k}`` that fixes the colour on the k-th fiber.

    Returns ``(f, [f_1, ..., f_n])`` where ``f = f_n . (f_{n-1} ... f_1)``.
    """
    if not isinstance(witness, LocalizedWitness):
        raise ConstructionTreeMissing("localized extraction needs the construction steps")
    inst, t = witness.aos.instance, witness.t
    ext = ext or Extension(inst)
    n = len(witness.steps)
    chosen: list = [None] * n
    for k in range(n - 1, -1, -1):
        step = witness.steps[k]
        cls = fiber(inst, step.S_before.members, t, step.point)
        later = chosen[k + 1:]
        pick = None
        for f in sorted(ext.restrict(step.F.members, step.b), key=sort_key):
            colours = {coloring(_chain_act(inst, [f] + later, y)) for y in cls}
            if len(colours) <= 1:
                pick = f
                break
        if pick is None:
            raise OracleFailure(f"no member of {step.F.name} extending {format_obj(step.b)} fixes fiber {k + 1}")
        chosen[k] = pick
    f = chosen[0]
    for g in chosen[1:]:
        f = inst.mult(g, f)
        if f is None:
            raise OracleFailure("product of the chosen elements is undefined")
    layer = truncated_layer(inst, witness.S.members, t)
    seen: dict = {}
    for y in layer:
        c = coloring(inst.act(f, y))
        if seen.setdefault(inst.trunc(y), c) != c:
            raise OracleFailure(f"extracted {format_obj(f)} splits a fiber")
    return f, chosen
