"""Local actoids, actoids of sets and backgrounds over finite carriers.

An :class:`ActoidInstance` bundles a carrier pair with partial operations
given as plain callables that return ``None`` where undefined.  Axiom checks
run over compiled integer tables (``-1`` marks an undefined entry) so every
quantifier is exhausted with numpy rather than Python loops.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (
    AlphaOutOfRange,
    CarrierNotClosed,
    EmptyFactorList,
    MissingNorm,
    MissingTruncation,
)
from .objects import format_obj, sort_key

UNDEF = -1
MAX_WITNESSES = 100


@dataclass
class Tables:
    mult: np.ndarray
    act: np.ndarray
    trunc: Optional[np.ndarray] = None
    norm: Optional[np.ndarray] = None


@dataclass
class Report:
    """Outcome of one exhaustive check; ``violations`` keeps the first few witnesses."""

    check: str
    passed: bool = True
    carrier_sizes: dict = field(default_factory=dict)
    violation_count: int = 0
    violations: list = field(default_factory=list)

    def add(self, *witness, count: int = 1):
        self.passed = False
        self.violation_count += count
        if len(self.violations) < MAX_WITNESSES:
            self.violations.append(tuple(format_obj(w) if not isinstance(w, str) else w for w in witness))

    def merge(self, other: "Report") -> "Report":
        self.passed = self.passed and other.passed
        self.violation_count += other.violation_count
        room = MAX_WITNESSES - len(self.violations)
        if room > 0:
            self.violations.extend(other.violations[:room])
        return self

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "pass": self.passed,
            "carrier_sizes": self.carrier_sizes,
            "violation_count": self.violation_count,
            "violations": [list(v) for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __bool__(self) -> bool:
        return self.passed


def _materialize(src) -> list:
    if callable(src):
        src = src()
    return list(src)


class ActoidInstance:
    """A finite local actoid, optionally with truncation (background) and norm.

    ``mult(a, b)`` and ``act(a, z)`` return ``None`` when undefined.  ``trunc``
    and ``norm`` are total on the Z-carrier when present.
    """

    def __init__(
        self,
        name: str,
        a_carrier,
        z_carrier,
        mult: Callable[[Any, Any], Any],
        act: Callable[[Any, Any], Any],
        trunc: Optional[Callable[[Any], Any]] = None,
        norm: Optional[Callable[[Any], int]] = None,
    ):
        self.name = name
        self._a_src = a_carrier
        self._z_src = z_carrier
        self.mult = mult
        self.act = act
        self.trunc = trunc
        self.norm = norm

    def replace(self, **changes) -> "ActoidInstance":
        kw = dict(
            name=self.name,
            a_carrier=self._a_src,
            z_carrier=self._z_src,
            mult=self.mult,
            act=self.act,
            trunc=self.trunc,
            norm=self.norm,
        )
        kw.update(changes)
        return ActoidInstance(**kw)

    @cached_property
    def a_objects(self) -> list:
        return _materialize(self._a_src)

    @cached_property
    def z_objects(self) -> list:
        return _materialize(self._z_src)

    @cached_property
    def a_index(self) -> dict:
        return {a: k for k, a in enumerate(self.a_objects)}

    @cached_property
    def z_index(self) -> dict:
        return {z: k for k, z in enumerate(self.z_objects)}

    @property
    def is_background(self) -> bool:
        return self.trunc is not None

    @property
    def is_normed(self) -> bool:
        return self.norm is not None

    def carrier_sizes(self) -> dict:
        return {"A": len(self.a_objects), "Z": len(self.z_objects)}

    def trunc_pow(self, z, t: int):
        for _ in range(t):
            z = self.trunc(z)
        return z

    # set-level operations ---------------------------------------------------

    def set_mult(self, F: Iterable, G: Iterable) -> Optional[frozenset]:
        out = set()
        G = list(G)
        for f in F:
            for g in G:
                r = self.mult(f, g)
                if r is None:
                    return None
                out.add(r)
        return frozenset(out)

    def set_act(self, F: Iterable, S: Iterable) -> Optional[frozenset]:
        out = set()
        S = list(S)
        for f in F:
            for x in S:
                r = self.act(f, x)
                if r is None:
                    return None
                out.add(r)
        return frozenset(out)

    def set_trunc(self, S: Iterable, t: int = 1) -> frozenset:
        return frozenset(self.trunc_pow(x, t) for x in S)

    # compiled tables --------------------------------------------------------

    @cached_property
    def tables(self) -> Tables:
        return self._compile()

    def _lookup(self, index: dict, obj, what: str) -> int:
        if obj is None:
            return UNDEF
        try:
            return index[obj]
        except KeyError:
            raise CarrierNotClosed(f"{self.name}: {what} produced {format_obj(obj)} outside the carrier") from None

    def _compile(self) -> Tables:
        A, Z = self.a_objects, self.z_objects
        ai, zi = self.a_index, self.z_index
        mult = np.full((len(A), len(A)), UNDEF, dtype=np.int32)
        act = np.full((len(A), len(Z)), UNDEF, dtype=np.int32)
        for p, a in enumerate(A):
            for q, b in enumerate(A):
                mult[p, q] = self._lookup(ai, self.mult(a, b), "multiplication")
            for q, z in enumerate(Z):
                act[p, q] = self._lookup(zi, self.act(a, z), "action")
        trunc = norm = None
        if self.trunc is not None:
            trunc = np.array([self._lookup(zi, self.trunc(z), "truncation") for z in Z], dtype=np.int32)
        if self.norm is not None:
            norm = np.array([self.norm(z) for z in Z], dtype=np.int64)
        return Tables(mult, act, trunc, norm)


# -- products ----------------------------------------------------------------

def _combine(t1: np.ndarray, t2: np.ndarray, n2: int) -> np.ndarray:
    # pairs of table entries -> mixed-radix index, undefined if either side is
    out = t1.reshape(t1.shape + (1,) * t2.ndim) * n2 + t2.reshape((1,) * t1.ndim + t2.shape)
    bad = (t1.reshape(t1.shape + (1,) * t2.ndim) < 0) | (t2.reshape((1,) * t1.ndim + t2.shape) < 0)
    out = np.where(bad, UNDEF, out)
    # interleave axes: (i1, j1, i2, j2) -> (i1, i2, j1, j2)
    if t1.ndim == 2:
        out = out.transpose(0, 2, 1, 3).reshape(t1.shape[0] * t2.shape[0], t1.shape[1] * t2.shape[1])
    else:
        out = out.reshape(-1)
    return out.astype(np.int32)


class ProductInstance(ActoidInstance):
    """Coordinatewise product of backgrounds; objects are tuples of factor objects."""

    def __init__(self, factors: Sequence[ActoidInstance], name: Optional[str] = None):
        factors = list(factors)
        if not factors:
            raise EmptyFactorList("a product needs at least one factor")
        self.factors = factors

        def mult(a, b):
            out = []
            for inst, x, y in zip(factors, a, b):
                r = inst.mult(x, y)
                if r is None:
                    return None
                out.append(r)
            return tuple(out)

        def act(a, z):
            out = []
            for inst, x, y in zip(factors, a, z):
                r = inst.act(x, y)
                if r is None:
                    return None
                out.append(r)
            return tuple(out)

        def coordinatewise(z):
            return tuple(inst.trunc(y) for inst, y in zip(factors, z))

        trunc = coordinatewise if all(f.trunc is not None for f in factors) else None

        super().__init__(
            name or "x".join(f.name for f in factors),
            lambda: list(itertools.product(*(f.a_objects for f in factors))),
            lambda: list(itertools.product(*(f.z_objects for f in factors))),
            mult,
            act,
            trunc,
            None,
        )

    def _compile(self) -> Tables:
        it = iter(self.factors)
        first = next(it)
        T = first.tables
        mult, act, trunc = T.mult, T.act, T.trunc
        nZ = len(first.z_objects)
        for f in it:
            U = f.tables
            mult = _combine(mult, U.mult, len(f.a_objects))
            act = _combine(act, U.act, len(f.z_objects))
            if trunc is not None and U.trunc is not None:
                trunc = _combine(trunc, U.trunc, len(f.z_objects))
            nZ *= len(f.z_objects)
        if self.trunc is None:
            trunc = None
        return Tables(mult, act, trunc, None)


class StarredInstance(ActoidInstance):
    """Product multiplication with a pointer-tagged Z-carrier.

    Z-objects are ``(p, (z_1, ..., z_l))``; truncation advances the pointer
    and truncates only the coordinate it pointed at.
    """

    def __init__(self, factors: Sequence[ActoidInstance], name: Optional[str] = None):
        factors = list(factors)
        if not factors:
            raise EmptyFactorList("a product needs at least one factor")
        self.base = ProductInstance(factors)
        l = len(factors)
        self.l = l
        base = self.base

        def act(a, z):
            p, zs = z
            r = base.act(a, zs)
            return None if r is None else (p, r)

        def trunc(z):
            p, zs = z
            zs = list(zs)
            zs[p] = factors[p].trunc(zs[p])
            return ((p + 1) % l, tuple(zs))

        super().__init__(
            name or "starred(" + base.name + ")",
            lambda: base.a_objects,
            lambda: [(p, zs) for p in range(l) for zs in base.z_objects],
            base.mult,
            act,
            trunc,
            None,
        )

    def _compile(self) -> Tables:
        B = self.base.tables
        nZ = len(self.base.z_objects)
        l = self.l
        act = np.concatenate([np.where(B.act >= 0, B.act + p * nZ, UNDEF) for p in range(l)], axis=1)
        # truncation of a single coordinate, via the factor tables
        sizes = [len(f.z_objects) for f in self.base.factors]
        idx = np.arange(nZ)
        coords = np.unravel_index(idx, sizes)
        trunc = np.empty(l * nZ, dtype=np.int32)
        for p in range(l):
            moved = list(coords)
            moved[p] = self.base.factors[p].tables.trunc[coords[p]]
            flat = np.ravel_multi_index(moved, sizes)
            trunc[p * nZ:(p + 1) * nZ] = ((p + 1) % l) * nZ + flat
        return Tables(B.mult.copy(), act.astype(np.int32), trunc, None)


# -- axiom checks ------------------------------------------------------------

def _sizes(inst: ActoidInstance) -> dict:
    return inst.carrier_sizes()


def _acct_into(inst: ActoidInstance, rep: Report):
    T = inst.tables
    act, mult = T.act, T.mult
    nA, nZ = act.shape
    if nA == 0 or nZ == 0:
        return
    for a in range(nA):
        row = act[a]
        ab = mult[a]
        bs = np.nonzero(ab >= 0)[0]
        if not len(bs):
            continue
        bz = act[bs]
        left = np.where(bz >= 0, row[np.where(bz >= 0, bz, 0)], UNDEF)
        right = act[ab[bs]]
        bad = (left >= 0) & (right >= 0) & (left != right)
        n = int(bad.sum())
        if n:
            for bi, z in zip(*np.nonzero(bad)):
                rep.add(inst.a_objects[a], inst.a_objects[bs[bi]], inst.z_objects[z], count=0)
                if len(rep.violations) >= MAX_WITNESSES:
                    break
            rep.violation_count += n


def check_local_actoid(inst: ActoidInstance) -> Report:
    """``a.(b.z) == (a.b).z`` whenever both sides are defined, over all triples."""
    rep = Report("local-actoid", carrier_sizes=_sizes(inst))
    _acct_into(inst, rep)
    return rep


def check_background(inst: ActoidInstance) -> Report:
    """``a.z`` defined implies ``a.dz`` defined and equal to ``d(a.z)``."""
    if not inst.is_background:
        raise MissingTruncation(f"{inst.name} has no truncation")
    rep = Report("background", carrier_sizes=_sizes(inst))
    T = inst.tables
    act, tr = T.act, T.trunc
    if act.size == 0:
        return rep
    defined = act >= 0
    a_dz = act[:, tr]
    d_az = np.where(defined, tr[np.where(defined, act, 0)], UNDEF)
    bad = defined & ((a_dz < 0) | (a_dz != d_az))
    _collect_pairs(inst, rep, bad)
    return rep


def _collect_pairs(inst, rep, bad):
    n = int(bad.sum())
    if not n:
        return
    for a, z in zip(*np.nonzero(bad)):
        rep.add(inst.a_objects[a], inst.z_objects[z], count=0)
        if len(rep.violations) >= MAX_WITNESSES:
            break
    rep.violation_count += n


def _norm_triples(inst: ActoidInstance, rep: Report, *, need_defined: bool, monotone: bool):
    """Count triples ``(a, x, y)`` with ``|x| <= |y|`` and ``a.y`` defined that break the rule.

    ``need_defined`` demands ``a.x`` be defined; ``monotone`` demands
    ``|a.x| <= |a.y|`` whenever ``a.x`` is defined.
    """
    T = inst.tables
    act, norm = T.act, T.norm
    nA, nZ = act.shape
    if nA == 0 or nZ == 0:
        return
    order = np.argsort(norm, kind="stable")
    sorted_norm = norm[order]
    big = np.iinfo(np.int64).max
    for a in range(nA):
        row = act[a]
        defined = row >= 0
        out = np.where(defined, norm[np.where(defined, row, 0)], big)
        ys = np.nonzero(defined)[0]
        if not len(ys):
            continue
        # for each y: prefix of the norm order with |x| <= |y|
        ends = np.searchsorted(sorted_norm, norm[ys], side="right")
        bad_counts = np.zeros(len(ys), dtype=np.int64)
        out_sorted = out[order]
        def_sorted = defined[order]
        for end in np.unique(ends):
            sel = ends == end
            xs_out = out_sorted[:end]
            xs_def = def_sorted[:end]
            cnt = np.zeros(int(sel.sum()), dtype=np.int64)
            if need_defined:
                cnt += int((~xs_def).sum())
            if monotone:
                vals = np.sort(xs_out[xs_def])
                cnt += len(vals) - np.searchsorted(vals, out[ys[sel]], side="right")
            bad_counts[sel] = cnt
        n = int(bad_counts.sum())
        if not n:
            continue
        rep.violation_count += n
        rep.passed = False
        for y, c in zip(ys, bad_counts):
            if not c or len(rep.violations) >= MAX_WITNESSES:
                continue
            end = np.searchsorted(sorted_norm, norm[y], side="right")
            for x in order[:end]:
                undefined = not defined[x]
                if (need_defined and undefined) or (monotone and not undefined and out[x] > out[y]):
                    rep.violations.append(tuple(format_obj(o) for o in (
                        inst.a_objects[a], inst.z_objects[x], inst.z_objects[y])))
                    break


def check_normed(inst: ActoidInstance) -> Report:
    """``|x| <= |y|`` and ``a.y`` defined imply ``a.x`` defined and ``|a.x| <= |a.y|``."""
    if not inst.is_normed:
        raise MissingNorm(f"{inst.name} has no norm")
    rep = Report("normed", carrier_sizes=_sizes(inst))
    _norm_triples(inst, rep, need_defined=True, monotone=True)
    return rep


def check_conditions_a_to_e(inst: ActoidInstance) -> Report:
    """The five symmetric conditions; witnesses are tagged with the failing letter."""
    if not inst.is_background:
        raise MissingTruncation(f"{inst.name} has no truncation")
    if not inst.is_normed:
        raise MissingNorm(f"{inst.name} has no norm")
    rep = Report("conditions-a-e", carrier_sizes=_sizes(inst))
    T = inst.tables

    sub = Report("a")
    _acct_into(inst, sub)
    _tag(rep, sub, "a")

    sub = Report("b")
    act, tr = T.act, T.trunc
    if act.size:
        defined = act >= 0
        a_dz = act[:, tr]
        d_az = np.where(defined, tr[np.where(defined, act, 0)], UNDEF)
        _collect_pairs(inst, sub, defined & (a_dz >= 0) & (a_dz != d_az))
    _tag(rep, sub, "b")

    sub = Report("c")
    if len(tr):
        bad = T.norm[tr] > T.norm
        for z in np.nonzero(bad)[0][:MAX_WITNESSES]:
            sub.add(inst.z_objects[z], count=0)
        sub.violation_count += int(bad.sum())
        sub.passed = not bad.any()
    _tag(rep, sub, "c")

    sub = Report("d")
    _norm_triples(inst, sub, need_defined=False, monotone=True)
    _tag(rep, sub, "d")

    sub = Report("e")
    _norm_triples(inst, sub, need_defined=True, monotone=False)
    _tag(rep, sub, "e")
    return rep


def _tag(rep: Report, sub: Report, letter: str):
    if sub.passed:
        return
    rep.passed = False
    rep.violation_count += sub.violation_count
    for w in sub.violations:
        if len(rep.violations) < MAX_WITNESSES:
            rep.violations.append((letter,) + tuple(w))


def derive_norm(inst: ActoidInstance) -> ActoidInstance:
    """Replace the norm by ``|z|_1 = min{|y| : d^t y = z for some t}``."""
    if not inst.is_normed:
        raise MissingNorm(f"{inst.name} has no norm")
    T = inst.tables
    tr, norm = T.trunc, T.norm
    best = norm.copy()
    for y in range(len(tr)):
        seen = set()
        z = y
        while z not in seen:
            seen.add(z)
            if norm[y] < best[z]:
                best[z] = norm[y]
            z = int(tr[z])
    lookup = {z: int(best[k]) for k, z in enumerate(inst.z_objects)}
    derived = inst.replace(name=inst.name + "+derived-norm", norm=lookup.__getitem__)
    # the carriers are already materialized; hand them over to avoid recomputation
    derived.__dict__["a_objects"] = inst.a_objects
    derived.__dict__["z_objects"] = inst.z_objects
    derived.__dict__["tables"] = Tables(T.mult, T.act, T.trunc, best)
    return derived


# -- actoids of sets ---------------------------------------------------------

@dataclass(frozen=True)
class FamilyElement:
    """A named finite set of A-side or Z-side objects of one instance."""

    name: str
    key: Any
    side: str
    members: tuple

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def __hash__(self):
        return hash((self.side, self.key))

    def __eq__(self, other):
        return isinstance(other, FamilyElement) and (self.side, self.key) == (other.side, other.key)


class ActoidOfSets:
    """Families of subsets with partial family-level operations.

    Families are addressed by hashable keys; ``f_keys``/``s_keys`` list the
    families inside the size cutoff.  Member generators accept any key, so the
    engine can reach past the cutoff when a search needs bigger families.
    """

    def __init__(
        self,
        instance: ActoidInstance,
        *,
        f_keys: Sequence,
        s_keys: Sequence,
        f_members: Callable[[Any], Iterable],
        s_members: Callable[[Any], Iterable],
        f_bullet: Callable[[Any, Any], Any],
        s_bullet: Callable[[Any, Any], Any],
        f_name: Callable[[Any], str] = str,
        s_name: Callable[[Any], str] = str,
        name: str = "",
    ):
        self.instance = instance
        self.name = name or instance.name
        self.f_keys = list(f_keys)
        self.s_keys = list(s_keys)
        self._f_members = f_members
        self._s_members = s_members
        self._f_bullet = f_bullet
        self._s_bullet = s_bullet
        self._f_name = f_name
        self._s_name = s_name
        self._cache: dict = {}

    def f(self, key) -> FamilyElement:
        return self._family("A", key)

    def s(self, key) -> FamilyElement:
        return self._family("Z", key)

    def _family(self, side, key) -> FamilyElement:
        ck = (side, key)
        fe = self._cache.get(ck)
        if fe is None:
            gen, nm = (self._f_members, self._f_name) if side == "A" else (self._s_members, self._s_name)
            members = tuple(sorted(set(gen(key)), key=sort_key))
            fe = FamilyElement(nm(key), key, side, members)
            self._cache[ck] = fe
        return fe

    @property
    def f_family(self) -> list[FamilyElement]:
        return [self.f(k) for k in self.f_keys]

    @property
    def s_family(self) -> list[FamilyElement]:
        return [self.s(k) for k in self.s_keys]

    def bullet(self, F: FamilyElement, G: FamilyElement) -> Optional[FamilyElement]:
        k = self._f_bullet(F.key, G.key)
        return None if k is None else self.f(k)

    def bullet_act(self, F: FamilyElement, S: FamilyElement) -> Optional[FamilyElement]:
        k = self._s_bullet(F.key, S.key)
        return None if k is None else self.s(k)

    def chain_act(self, Fs: Sequence[FamilyElement], S: FamilyElement) -> Optional[FamilyElement]:
        """``F_n . (... (F_1 . S))`` with ``Fs = [F_1, ..., F_n]``."""
        for F in Fs:
            S = self.bullet_act(F, S)
            if S is None:
                return None
        return S


def check_actoid_of_sets(aos: ActoidOfSets, max_chain: int = 3) -> Report:
    """Pointwise agreement of both bullets, the definedness transfer and chain identities."""
    inst = aos.instance
    rep = Report("actoid-of-sets", carrier_sizes={"F": len(aos.f_keys), "S": len(aos.s_keys)})
    Fs, Ss = aos.f_family, aos.s_family
    f_keys = set(aos.f_keys)
    s_keys = set(aos.s_keys)

    for F in Fs:
        for G in Fs:
            H = aos.bullet(F, G)
            if H is None:
                continue
            pw = inst.set_mult(F.members, G.members)
            if pw is None or pw != H.member_set:
                rep.add("mult-pointwise", F.name, G.name)
            if H.key not in f_keys:
                rep.add("mult-leaves-family", F.name, G.name)

    for F in Fs:
        for S in Ss:
            R = aos.bullet_act(F, S)
            if R is None:
                continue
            pw = inst.set_act(F.members, S.members)
            if pw is None or pw != R.member_set:
                rep.add("act-pointwise", F.name, S.name)
            if R.key not in s_keys:
                rep.add("act-leaves-family", F.name, S.name)

    # definedness transfer and chains: walk every defined left-nested chain
    def walk(chain: list, S0: FamilyElement, cur: FamilyElement):
        n = len(chain)
        if n >= 2:
            _check_chain(aos, rep, chain, S0, cur)
        if n == max_chain:
            return
        for F in Fs:
            nxt = aos.bullet_act(F, cur)
            if nxt is not None:
                walk(chain + [F], S0, nxt)

    for S in Ss:
        walk([], S, S)
    return rep


def _fold_right(aos, Fs):
    # F_n . (F_{n-1} . ... (F_2 . F_1))
    acc = Fs[0]
    for F in Fs[1:]:
        acc = aos.bullet(F, acc)
        if acc is None:
            return None
    return acc


def _fold_left(aos, Fs):
    # ((F_n . F_{n-1}) ... F_2) . F_1
    acc = Fs[-1]
    for F in reversed(Fs[:-1]):
        acc = aos.bullet(acc, F)
        if acc is None:
            return None
    return acc


def _check_chain(aos, rep, chain, S, z1):
    names = [F.name for F in chain]
    for label, fold in (("chain-right", _fold_right), ("chain-left", _fold_left)):
        G = fold(aos, chain)
        if G is None:
            rep.add(label + "-undefined", S.name, *names)
            continue
        z = aos.bullet_act(G, S)
        if z is None:
            rep.add(label + "-undefined", S.name, *names)
        elif z.member_set != z1.member_set:
            rep.add(label + "-differs", S.name, *names)


def check_set_truncation(aos: ActoidOfSets) -> Report:
    """``F.S`` defined implies ``F.dS`` defined and ``d(F.S) == F.(dS)``."""
    inst = aos.instance
    if not inst.is_background:
        raise MissingTruncation(f"{inst.name} has no truncation")
    rep = Report("set-truncation", carrier_sizes={"F": len(aos.f_keys), "S": len(aos.s_keys)})
    for F in aos.f_family:
        for S in aos.s_family:
            FS = inst.set_act(F.members, S.members)
            if FS is None:
                continue
            FdS = inst.set_act(F.members, inst.set_trunc(S.members))
            if FdS is None or FdS != inst.set_trunc(FS):
                rep.add(F.name, S.name)
    return rep


def check_battery(inst: ActoidInstance, aos: Optional[ActoidOfSets] = None) -> list[Report]:
    """Every applicable check for an instance (and its actoid of sets)."""
    out = [check_local_actoid(inst)]
    if inst.is_background:
        out.append(check_background(inst))
    if inst.is_normed:
        out.append(check_normed(inst))
        if inst.is_background:
            out.append(check_conditions_a_to_e(inst))
    if aos is not None:
        out.append(check_actoid_of_sets(aos))
        if inst.is_background:
            out.append(check_set_truncation(aos))
    return out


# -- products of actoids of sets ---------------------------------------------

def make_product(insts: Sequence[ActoidInstance], aoses: Sequence[ActoidOfSets]) -> ActoidOfSets:
    if not insts or not aoses:
        raise EmptyFactorList("a product needs at least one factor")
    if len(insts) != len(aoses):
        raise EmptyFactorList("instances and actoids of sets must pair up")
    prod = ProductInstance(insts)
    return _product_aos(prod, list(aoses), starred=False)


def make_starred(insts: Sequence[ActoidInstance], aoses: Sequence[ActoidOfSets]) -> ActoidOfSets:
    if not insts or not aoses:
        raise EmptyFactorList("a product needs at least one factor")
    if len(insts) != len(aoses):
        raise EmptyFactorList("instances and actoids of sets must pair up")
    star = StarredInstance(insts)
    return _product_aos(star, list(aoses), starred=True)


def _product_aos(inst, aoses, starred: bool) -> ActoidOfSets:
    l = len(aoses)

    def f_members(key):
        return itertools.product(*(a.f(k).members for a, k in zip(aoses, key)))

    def f_bullet(k1, k2):
        out = []
        for a, x, y in zip(aoses, k1, k2):
            r = a._f_bullet(x, y)
            if r is None:
                return None
            out.append(r)
        return tuple(out)

    def plain_s_bullet(fk, sk):
        out = []
        for a, x, y in zip(aoses, fk, sk):
            r = a._s_bullet(x, y)
            if r is None:
                return None
            out.append(r)
        return tuple(out)

    f_keys = list(itertools.product(*(a.f_keys for a in aoses)))
    base_s_keys = list(itertools.product(*(a.s_keys for a in aoses)))

    def f_name(key):
        return " x ".join(a.f(k).name for a, k in zip(aoses, key))

    def plain_s_name(key):
        return " x ".join(a.s(k).name for a, k in zip(aoses, key))

    if not starred:
        return ActoidOfSets(
            inst,
            f_keys=f_keys,
            s_keys=base_s_keys,
            f_members=f_members,
            s_members=lambda key: itertools.product(*(a.s(k).members for a, k in zip(aoses, key))),
            f_bullet=f_bullet,
            s_bullet=plain_s_bullet,
            f_name=f_name,
            s_name=plain_s_name,
            name="product(" + ", ".join(a.name for a in aoses) + ")",
        )

    def s_members(key):
        p, sk = key
        return ((p, zs) for zs in itertools.product(*(a.s(k).members for a, k in zip(aoses, sk))))

    def s_bullet(fk, key):
        p, sk = key
        r = plain_s_bullet(fk, sk)
        return None if r is None else (p, r)

    return ActoidOfSets(
        inst,
        f_keys=f_keys,
        s_keys=[(p, sk) for p in range(l) for sk in base_s_keys],
        f_members=f_members,
        s_members=s_members,
        f_bullet=f_bullet,
        s_bullet=s_bullet,
        f_name=f_name,
        s_name=lambda key: f"{{{key[0]}}} x " + plain_s_name(key[1]),
        name="starred(" + ", ".join(a.name for a in aoses) + ")",
    )


# -- interpretations ---------------------------------------------------------

def check_interpretation(
    source: ActoidOfSets,
    target: ActoidOfSets,
    T: FamilyElement,
    t: int,
    S: FamilyElement,
    s: int,
    alpha: Callable[[Any], Any],
    phi_builder: Callable[[FamilyElement], Optional[tuple]],
    f_candidates: Optional[Iterable[FamilyElement]] = None,
) -> Report:
    """Check that ``(T, t)`` from ``source`` is interpretable in ``target`` via ``alpha``.

    ``phi_builder(F)`` returns ``(G, phi)`` for each ``F`` with ``F . S`` defined
    in ``target``; ``G`` must act on ``T`` in ``source``.
    """
    src, tgt = source.instance, target.instance
    rep = Report("interpretation", carrier_sizes={"T": len(T), "S": len(S)})
    dT = sorted(src.set_trunc(T.members, t), key=sort_key)
    dS = tgt.set_trunc(S.members, s)
    images = {}
    for y in dT:
        img = alpha(y)
        if img not in dS:
            raise AlphaOutOfRange(f"alpha({format_obj(y)}) = {format_obj(img)} is not in the truncated S")
        images[y] = img

    # (i) truncation classes are respected
    classes: dict = {}
    for y in dT:
        classes.setdefault(src.trunc(y), []).append(y)
    for members in classes.values():
        first = members[0]
        ref = tgt.trunc(images[first])
        for y in members[1:]:
            if tgt.trunc(images[y]) != ref:
                rep.add("i", first, y)

    # (ii) every F acting on S comes with a compatible phi
    cands = target.f_family if f_candidates is None else list(f_candidates)
    for F in cands:
        if target.bullet_act(F, S) is None:
            continue
        built = phi_builder(F)
        if built is None:
            rep.add("ii-missing", F.name)
            continue
        G, phi = built
        if source.bullet_act(G, T) is None:
            rep.add("ii-undefined", F.name, G.name)
            continue
        seen: dict = {}
        for f in F.members:
            g = phi(f)
            if g not in G.member_set:
                rep.add("ii-phi-range", F.name, f)
                continue
            for y in dT:
                lhs = tgt.act(f, images[y])
                rhs = src.act(g, y)
                if lhs is None or rhs is None:
                    rep.add("ii-undefined-action", F.name, f, y)
                    continue
                prev = seen.setdefault(lhs, rhs)
                if prev != rhs:
                    rep.add("ii", F.name, f, y)
    return rep
