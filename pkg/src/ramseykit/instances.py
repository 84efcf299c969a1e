"""Concrete size-bounded backgrounds and actoids of sets, addressable by name.

Every carrier is "all objects of domain size at most ``cutoff``"; all shipped
operations shrink domains, so these carriers are closed.  Family generators
accept any key, which lets searches reach beyond the cutoff.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from . import objects as ob
from .algebra import (
    ActoidInstance,
    ActoidOfSets,
    FamilyElement,
    Report,
    make_product,
    make_starred,
)
from .errors import CutoffTooSmall, NotApplicable, UnknownName
from .objects import FiniteMap, ObjectClass, ramp

RS = ObjectClass.RIGID_SURJECTION
IS = ObjectClass.INCREASING_SURJECTION


@dataclass
class InstanceSpec:
    name: str
    cutoff: int = 4
    params: dict = field(default_factory=dict)


@dataclass
class Built:
    """A built instance plus the per-instance hooks the engine relies on."""

    spec: InstanceSpec
    instance: ActoidInstance
    aos: ActoidOfSets
    # F keys acting on a given S key, ascending, with size parameter <= limit
    acting: Callable[[Any, int], list]
    # the compatibility element used for localized pigeonhole checks
    lph_anchor: Optional[Callable[[Any], Any]] = None
    identities: Optional[Callable[[], Report]] = None
    closure: Optional[Report] = None

    @property
    def name(self) -> str:
        return self.spec.name


# -- shared helpers ----------------------------------------------------------

def _maps_up_to(cls, cutoff: int) -> list[FiniteMap]:
    out = []
    for L in range(cutoff + 1):
        for K in range(L + 1):
            out.extend(ob.iter_class(cls, L, K))
    return out


def _identity(n: int) -> FiniteMap:
    return FiniteMap.identity(n)


def _fmt_map(f) -> str:
    return ob.format_obj(f)


def _canon(v: FiniteMap, s: FiniteMap):
    return ob.canonical_compose(v, s)


# -- Example A: increasing injections ---------------------------------------

def _ii_compose(j: FiniteMap, i: FiniteMap) -> Optional[FiniteMap]:
    if i.cod > j.dom:
        return None
    jv = j.values
    return ramp(tuple(jv[x - 1] for x in i.values))


def _ii_trunc(i: FiniteMap) -> FiniteMap:
    return ramp(i.values[:-1])


def binom_members(L: int, K: int) -> list[FiniteMap]:
    return [ramp(c) for c in itertools.combinations(range(1, L + 1), K)]


def build_example_a(spec: InstanceSpec) -> Built:
    c = spec.cutoff

    def carrier():
        return [ramp(v) for k in range(c + 1) for v in itertools.combinations(range(1, c + 1), k)]

    inst = ActoidInstance(
        "example-a", carrier, carrier, _ii_compose, _ii_compose,
        trunc=_ii_trunc, norm=lambda i: i.cod,
    )
    keys = [(L, K) for L in range(c + 1) for K in range(L + 1)]

    def bullet(k1, k2):
        (N, M), (L, K) = k1, k2
        return (N, K) if M == L else None

    def name(k):
        return f"binom({k[0]},{k[1]})"

    aos = ActoidOfSets(
        inst, f_keys=keys, s_keys=keys,
        f_members=lambda k: binom_members(*k), s_members=lambda k: binom_members(*k),
        f_bullet=bullet, s_bullet=bullet, f_name=name, s_name=name, name="example-a",
    )
    return Built(
        spec, inst, aos,
        acting=lambda sk, limit: [(N, sk[0]) for N in range(sk[0], limit + 1)],
        lph_anchor=lambda x: ramp(range(1, x.cod + 1)),
    )


# -- Example B: increasing surjections acting on X_{K0} ----------------------

def _b_act(p: FiniteMap, f: tuple) -> Optional[tuple]:
    L = len(f)
    if p.cod < L:
        return None
    out = []
    for x in p.values:
        if x > L:
            break
        out.append(f[x - 1])
    return tuple(out)


def _b_mult(q: FiniteMap, p: FiniteMap) -> Optional[FiniteMap]:
    return ob.canonical_compose(p, q)


def b_truncate(K0: int):
    low = max(1, K0 - 1)

    def trunc(f: tuple) -> tuple:
        return tuple(low if v == K0 else v for v in f)

    return trunc


def s_k_members(K0: int, K: int) -> list[tuple]:
    """The maps ``[K] -> {0} u [K0]`` of the three-block shape used by Example B."""
    low = max(1, K0 - 1)
    out = set()
    for a in range(1, K):
        for b in range(a, K):
            for c in range(K0 + 1):
                out.add(tuple(K0 if x <= a else (c if x <= b else low) for x in range(1, K + 1)))
    return sorted(out)


def is_family(L: int, K: int) -> list[FiniteMap]:
    return ob.enumerate_class(IS, L, K)


def build_example_b(spec: InstanceSpec) -> Built:
    c = spec.cutoff
    K0 = int(spec.params.get("K0", 2))
    if K0 < 1:
        raise CutoffTooSmall("Example B needs K0 >= 1")
    if c < 2:
        raise CutoffTooSmall("Example B needs cutoff >= 2")

    def z_carrier():
        return [f for L in range(c + 1) for f in itertools.product(range(K0 + 1), repeat=L)]

    inst = ActoidInstance(
        f"example-b(K0={K0})", lambda: _maps_up_to(IS, c), z_carrier,
        _b_mult, _b_act, trunc=b_truncate(K0),
    )
    f_keys = [(L, K) for L in range(1, c + 1) for K in range(1, L + 1)]
    s_keys = list(range(2, c + 1))

    def f_bullet(k1, k2):
        (N, M), (L, K) = k1, k2
        return (N, K) if M == L else None

    def s_bullet(fk, K):
        M, L = fk
        if L != K:
            return None
        # F_{M,2} . S_2 only reaches the two-block part of S_M, so it is left
        # undefined unless M == 2
        if K == 2 and M != 2:
            return None
        return M

    aos = ActoidOfSets(
        inst, f_keys=f_keys, s_keys=s_keys,
        f_members=lambda k: is_family(*k), s_members=lambda K: s_k_members(K0, K),
        f_bullet=f_bullet, s_bullet=s_bullet,
        f_name=lambda k: f"F({k[0]},{k[1]})", s_name=lambda K: f"S({K})",
        name=f"example-b(K0={K0})",
    )

    def acting(K, limit):
        if K == 2:
            return [(2, 2)] if limit >= 2 else []
        return [(M, K) for M in range(K, limit + 1)]

    return Built(spec, inst, aos, acting=acting)


def build_example_b_product(spec: InstanceSpec, starred: bool = False) -> Built:
    l = int(spec.params.get("l", 2))
    factors = [build_example_b(InstanceSpec("example-b", spec.cutoff, dict(spec.params))) for _ in range(l)]
    insts = [f.instance for f in factors]
    aoses = [f.aos for f in factors]
    aos = make_starred(insts, aoses) if starred else make_product(insts, aoses)

    def acting(sk, limit):
        base = sk[1] if starred else sk
        lists = [f.acting(k, limit) for f, k in zip(factors, base)]
        return list(itertools.product(*lists))

    return Built(spec, aos.instance, aos, acting=acting)


# -- (A1, X1): rigid surjections acting on surjections -----------------------

def _rs_mult(s1: FiniteMap, s2: FiniteMap) -> Optional[FiniteMap]:
    # s1 . s2 is the canonical composition s2 o s1
    return ob.canonical_compose(s2, s1)


def _rs_act(s: FiniteMap, v: FiniteMap) -> Optional[FiniteMap]:
    return ob.canonical_compose(v, s)


def f_anchored(N: int, M: int, L0: int) -> list[FiniteMap]:
    """Rigid surjections ``[N] -> [M]`` that are the identity on ``[L0]``."""
    if L0 > M or M > N:
        return []
    head = tuple(range(1, L0 + 1))
    return [s for s in ob.iter_class(RS, N, M) if s.values[:L0] == head]


def g_anchored(N: int, M: int, L0: int) -> list[FiniteMap]:
    """Rigid surjections ``[N'] -> [M]``, ``L0 <= N' <= N``, identity on ``[L0]``."""
    out = []
    for Np in range(L0, N + 1):
        out.extend(f_anchored(Np, M, L0))
    return out


def s1_members(L: int, v0: FiniteMap) -> list[FiniteMap]:
    L0, K0 = v0.dom, v0.cod
    out = []
    for Lp in range(L0, L + 1):
        for tail in itertools.product(range(1, K0 + 1), repeat=Lp - L0):
            vals = v0.values + tail
            if len(set(vals)) == K0:
                out.append(FiniteMap(vals, K0, check=False))
    return out


DEFAULT_A1_ANCHORS = ("1|1", "1|1 1", "2|1 2", "2|2 1")
DEFAULT_A2_ANCHORS = ("1|1", "1|1 1", "2|1 2")


def _anchors(spec: InstanceSpec, default) -> list[FiniteMap]:
    raw = spec.params.get("anchors", default)
    return [a if isinstance(a, FiniteMap) else FiniteMap.parse(a) for a in raw]


def _f1_keys(c: int) -> list:
    return [(N, M, L0) for N in range(1, c + 1) for M in range(1, N + 1) for L0 in range(1, M + 1)
            if f_anchored(N, M, L0)]


def _f1_bullet(k1, k2):
    Q, P, N0 = k1
    M, L, K0 = k2
    return (Q, L, K0) if (K0 == N0 and P == M) else None


def _fname(prefix):
    return lambda k: prefix + "(" + ",".join(str(x) for x in k) + ")"


def build_a1x1(spec: InstanceSpec) -> Built:
    c = spec.cutoff
    anchors = _anchors(spec, DEFAULT_A1_ANCHORS)
    for v0 in anchors:
        if not ob.is_surjection(v0) or v0.dom == 0:
            raise CutoffTooSmall(f"anchor {v0} must be a nonempty surjection")
        if v0.dom > c:
            raise CutoffTooSmall(f"cutoff {c} is below anchor size {v0.dom}")

    def x_carrier():
        return [v for v in _maps_up_to(ObjectClass.SURJECTION, c) if v.dom > 0]

    inst = ActoidInstance(
        "a1x1", lambda: _maps_up_to(RS, c), x_carrier, _rs_mult, _rs_act,
        trunc=ob.truncate_confused, norm=lambda v: v.dom,
    )
    s_keys = [(L, v0) for v0 in anchors for L in range(v0.dom, c + 1)]

    def s_bullet(fk, sk):
        P, N, M0 = fk
        L, v0 = sk
        if v0.dom != M0 or L != N:
            return None
        # with L == L0 every element of the result has full length P
        if L == v0.dom and P != L:
            return None
        return (P, v0)

    aos = ActoidOfSets(
        inst, f_keys=_f1_keys(c), s_keys=s_keys,
        f_members=lambda k: f_anchored(*k), s_members=lambda k: s1_members(*k),
        f_bullet=_f1_bullet, s_bullet=s_bullet,
        f_name=_fname("F"), s_name=lambda k: f"S({k[0]},{k[1]})", name="a1x1",
    )

    def identities() -> Report:
        rep = Report("truncation-identities", carrier_sizes={"S": len(s_keys)})
        for S in aos.s_family:
            L, v0 = S.key
            want = frozenset(s1_members(L, ob.truncate_confused(v0)))
            if inst.set_trunc(S.members) != want:
                rep.add("confused", S.name)
        return rep

    return Built(
        spec, inst, aos,
        acting=lambda sk, limit: [(P, sk[0], sk[1].dom) for P in range(sk[0], limit + 1)
                                  if s_bullet((P, sk[0], sk[1].dom), sk) is not None],
        lph_anchor=lambda x: _identity(x.dom),
        identities=identities,
    )


# -- (A2, X2): rigid surjections acting on rigid surjections ----------------

def s2_members(L: int, K: int, s0: FiniteMap) -> list[FiniteMap]:
    L0 = s0.dom
    if L < L0:
        return []
    return [s for s in ob.iter_class(RS, L, K) if s.values[:L0] == s0.values]


def t2_members(L: int, K: int, s0: FiniteMap) -> list[FiniteMap]:
    out = []
    for Lp in range(s0.dom, L + 1):
        out.extend(s2_members(Lp, K, s0))
    return out


def a2_instance(c: int, name: str = "a2x2") -> ActoidInstance:
    return ActoidInstance(
        name, lambda: _maps_up_to(RS, c), lambda: _maps_up_to(RS, c),
        _rs_mult, _rs_act, trunc=ob.truncate_forgetful, norm=lambda s: s.dom,
    )


def _check_anchor_rigid(anchors, c):
    for s0 in anchors:
        if not ob.is_rigid(s0):
            raise CutoffTooSmall(f"anchor {s0} must be a rigid surjection")
        if s0.dom > c:
            raise CutoffTooSmall(f"cutoff {c} is below anchor size {s0.dom}")


def build_a2x2(spec: InstanceSpec, partial: bool) -> Built:
    c = spec.cutoff
    anchors = _anchors(spec, DEFAULT_A2_ANCHORS)
    _check_anchor_rigid(anchors, c)
    inst = a2_instance(c, "a2x2")
    gen = t2_members if partial else s2_members
    s_keys = [(L, K, s0) for s0 in anchors for L in range(s0.dom, c + 1) for K in range(s0.cod, L + 1)
              if gen(L, K, s0)]

    def s_bullet(fk, sk):
        P, N, M0 = fk
        L, K, s0 = sk
        return (P, K, s0) if (s0.dom == M0 and L == N) else None

    if partial:
        f_keys = [(N, M, L0) for N in range(c + 1) for M in range(N + 1) for L0 in range(M + 1)
                  if g_anchored(N, M, L0)]
        f_members = lambda k: g_anchored(*k)
        prefix, sprefix = "G", "T"
    else:
        f_keys = _f1_keys(c)
        f_members = lambda k: f_anchored(*k)
        prefix, sprefix = "F", "S"

    aos = ActoidOfSets(
        inst, f_keys=f_keys, s_keys=s_keys,
        f_members=f_members, s_members=lambda k: gen(*k),
        f_bullet=_f1_bullet, s_bullet=s_bullet,
        f_name=_fname(prefix), s_name=lambda k: f"{sprefix}({k[0]},{k[1]},{k[2]})",
        name="a2x2-g2t2" if partial else "a2x2-f2s2",
    )

    def identities() -> Report:
        rep = Report("truncation-identities", carrier_sizes={"S": len(s_keys)})
        for S in aos.s_family:
            L, K, s0 = S.key
            if K > s0.cod:
                want = frozenset(t2_members(L - 1, K - 1, s0))
            else:
                want = frozenset([ob.truncate_forgetful(s0)])
            if inst.set_trunc(S.members) != want:
                rep.add("forgetful", S.name)
        return rep

    return Built(
        spec, inst, aos,
        acting=lambda sk, limit: [(P, sk[0], sk[2].dom) for P in range(sk[0], limit + 1)],
        lph_anchor=lambda x: _identity(x.dom),
        identities=identities,
    )


# -- (A3, X3): augmented surjections -----------------------------------------

def as_mult(tq: ob.AugmentedSurjection, sp: ob.AugmentedSurjection) -> Optional[ob.AugmentedSurjection]:
    """``(t, q) . (s, p) = ((s o t) | dom(p o q), p o q)`` with canonical compositions."""
    t, q = tq.s, tq.p
    s, p = sp.s, sp.p
    if q.cod < p.dom:
        return None
    pq = ob.canonical_compose(p, q)
    st = ob.canonical_compose(s, t)
    return ob._make_augmented(st.restrict(pq.dom), pq)


def as_members(L: int, K: int) -> list[ob.AugmentedSurjection]:
    return ob.enumerate_augmented(L, K)


def f3_members(L: int, K: int) -> list[ob.AugmentedSurjection]:
    if K < 1 or L < K:
        return []
    return [a for a in ob.enumerate_augmented(L, K) if a.s.preimage(K) == [L]]


def g3_members(L: int, K: int) -> list[ob.AugmentedSurjection]:
    out = []
    for Lp in range(L + 1):
        out.extend(ob.enumerate_augmented(Lp, K))
    return out


def a3_instance(c: int) -> ActoidInstance:
    def carrier():
        return [a for L in range(c + 1) for K in range(L + 1) for a in ob.enumerate_augmented(L, K)]

    return ActoidInstance(
        "a3x3", carrier, carrier, as_mult, as_mult,
        trunc=ob.truncate_augmented, norm=lambda a: a.dom,
    )


def build_a3x3(spec: InstanceSpec, partial: bool) -> Built:
    c = spec.cutoff
    inst = a3_instance(c)
    gen = g3_members if partial else f3_members
    if partial:
        keys = [(L, K) for L in range(c + 1) for K in range(L + 1) if gen(L, K)]
    else:
        keys = [(L, K) for L in range(1, c + 1) for K in range(1, L + 1) if gen(L, K)]

    def bullet(k1, k2):
        (N, M), (L, K) = k1, k2
        return (N, K) if M == L else None

    prefix = "G" if partial else "F"
    aos = ActoidOfSets(
        inst, f_keys=keys, s_keys=keys,
        f_members=lambda k: gen(*k), s_members=lambda k: gen(*k),
        f_bullet=bullet, s_bullet=bullet,
        f_name=_fname(prefix), s_name=_fname(prefix),
        name="a3x3-g3t3" if partial else "a3x3-f3s3",
    )

    def identities() -> Report:
        rep = Report("truncation-identities", carrier_sizes={"S": len(keys)})
        for S in aos.s_family:
            L, K = S.key
            if K == 0:
                want = frozenset([ob._make_augmented(FiniteMap((), 0), FiniteMap((), 0))])
            else:
                want = frozenset(g3_members(L - 1, K - 1))
            if inst.set_trunc(S.members) != want:
                rep.add("augmented", S.name)
        return rep

    def anchor(x):
        ident = _identity(x.dom)
        return ob._make_augmented(ident, ident)

    return Built(
        spec, inst, aos,
        acting=lambda sk, limit: [(N, sk[0]) for N in range(sk[0], limit + 1) if gen(N, sk[0])],
        lph_anchor=anchor,
        identities=identities,
    )


# -- (A, A) for a composition-closed class: walks and the generic family -----

def h_members(pred, L: int, K: int) -> list[FiniteMap]:
    return [s for s in ob.iter_class(RS, L, K) if pred(s)]


def _class_predicate(cls) -> Callable[[FiniteMap], bool]:
    if callable(cls) and not isinstance(cls, (str, ObjectClass)):
        return cls
    oc = ObjectClass(cls)
    return lambda s: ob.is_member(s, oc)


def build_class_family(spec: InstanceSpec, pred, name: str, check_closure: bool) -> Built:
    c = spec.cutoff
    carrier = [s for s in _maps_up_to(RS, c) if pred(s)]
    inst = ActoidInstance(
        name, carrier, carrier, _rs_mult, _rs_act,
        trunc=ob.truncate_forgetful, norm=lambda s: s.dom,
    )
    keys = [(L, K) for L in range(c + 1) for K in range(L + 1) if h_members(pred, L, K)]

    def bullet(k1, k2):
        (N, M), (L, K) = k1, k2
        return (N, K) if M == L else None

    aos = ActoidOfSets(
        inst, f_keys=keys, s_keys=keys,
        f_members=lambda k: h_members(pred, *k), s_members=lambda k: h_members(pred, *k),
        f_bullet=bullet, s_bullet=bullet,
        f_name=_fname("H"), s_name=_fname("H"), name=name,
    )
    closure = class_closure_report(carrier, pred, c) if check_closure else None
    return Built(
        spec, inst, aos,
        acting=lambda sk, limit: [(N, sk[0]) for N in range(sk[0], limit + 1) if h_members(pred, N, sk[0])],
        lph_anchor=lambda x: _identity(x.dom),
        closure=closure,
    )


def class_closure_report(carrier: Sequence[FiniteMap], pred, cutoff: int) -> Report:
    """Eager check: the class contains IS and is closed under canonical composition and truncation."""
    rep = Report("class-closure", carrier_sizes={"A": len(carrier)})
    for p in _maps_up_to(IS, cutoff):
        if not pred(p):
            rep.add("missing-increasing", p)
    for s in carrier:
        if not pred(ob.truncate_forgetful(s)):
            rep.add("truncation", s)
        for t in carrier:
            r = ob.canonical_compose(s, t)
            if r is not None and not pred(r):
                rep.add("composition", s, t)
    return rep


# -- registry ----------------------------------------------------------------

NAMES = (
    "example-a",
    "example-b",
    "example-b-product",
    "example-b-starred",
    "a1x1",
    "a2x2-f2s2",
    "a2x2-g2t2",
    "a3x3-f3s3",
    "a3x3-g3t3",
    "walks-hw",
    "generic-fa",
)


def build(spec: InstanceSpec | str, cutoff: Optional[int] = None, **params) -> Built:
    if isinstance(spec, str):
        spec = InstanceSpec(spec, 4 if cutoff is None else cutoff, params)
    if spec.cutoff < 0:
        raise CutoffTooSmall("cutoff must be nonnegative")
    n = spec.name
    if n == "example-a":
        return build_example_a(spec)
    if n == "example-b":
        return build_example_b(spec)
    if n == "example-b-product":
        return build_example_b_product(spec)
    if n == "example-b-starred":
        return build_example_b_product(spec, starred=True)
    if n == "a1x1":
        return build_a1x1(spec)
    if n == "a2x2-f2s2":
        return build_a2x2(spec, partial=False)
    if n == "a2x2-g2t2":
        return build_a2x2(spec, partial=True)
    if n == "a3x3-f3s3":
        return build_a3x3(spec, partial=False)
    if n == "a3x3-g3t3":
        return build_a3x3(spec, partial=True)
    if n == "walks-hw":
        return build_class_family(spec, ob.is_walk, "walks-hw", check_closure=False)
    if n == "generic-fa":
        cls = spec.params.get("cls", "increasing-surjection")
        pred = _class_predicate(cls)
        label = cls.value if isinstance(cls, ObjectClass) else (cls if isinstance(cls, str) else "custom")
        return build_class_family(spec, pred, f"generic-fa({label})", check_closure=True)
    raise UnknownName(n)


def truncation_identities(built: Built) -> Report:
    if built.identities is None:
        raise NotApplicable(f"{built.name} has no stated truncation identities")
    return built.identities()


class NotVanishing:
    """Marker: no truncation depth up to the cap collapses the set."""

    def __init__(self, cap: int):
        self.cap = cap

    def __repr__(self):
        return f"NotVanishing(cap={self.cap})"

    def __eq__(self, other):
        return isinstance(other, NotVanishing)

    def __hash__(self):
        return hash("NotVanishing")


def vanishing_depth(S: FamilyElement, built: Built, cap: int = 64):
    """Least ``t`` with ``|d^t S| <= 1``, or :class:`NotVanishing`."""
    inst = built.instance
    cur = frozenset(S.members)
    seen = set()
    for t in range(cap + 1):
        if len(cur) <= 1:
            return t
        if cur in seen:
            return NotVanishing(cap)
        seen.add(cur)
        cur = inst.set_trunc(cur)
    return NotVanishing(cap)


# -- the interpretation of S_{L,v0} in a product of Example B ----------------

def tilde(k: int, K0: int) -> tuple:
    """The three-point map ``(K0, k, max(1, K0 - 1))``."""
    return (K0, k, max(1, K0 - 1))


@dataclass
class Interpretation:
    source: ActoidOfSets
    target: ActoidOfSets
    T: FamilyElement
    t: int
    S: FamilyElement
    s: int
    alpha: Callable
    phi_builder: Callable
    f_candidates: list


def hj_interpretation(v0: FiniteMap, L: int, Ns: Sequence[int], *, alpha_override=None) -> Interpretation:
    """Interpret ``S_{L,v0}`` of (A1, X1) in the ``L - L0``-fold product of Example B.

    ``Ns`` lists the block lengths ``N_i`` of the product families
    ``prod F_{N_i,3}`` that ``phi`` translates into ``F_{L0+N, L, L0}``.
    """
    L0, K0 = v0.dom, v0.cod
    l = L - L0
    if l < 1:
        raise CutoffTooSmall("need L > L0")
    if len(Ns) != l:
        raise CutoffTooSmall(f"need {l} block lengths")
    N = sum(Ns)
    src = build(InstanceSpec("a1x1", L0 + N, {"anchors": [v0]}))
    tgt = build(InstanceSpec("example-b-product", max(3, max(Ns)), {"l": l, "K0": K0}))
    T = src.aos.s((L, v0))
    S = tgt.aos.s(tuple([3] * l))
    low = max(1, K0 - 1)
    l0 = v0.values.index(K0) + 1
    l1 = v0.values.index(low) + 1

    def alpha(v: FiniteMap):
        vals = [tilde(v(L0 + i), K0) for i in range(1, v.dom - L0 + 1)]
        vals += [tilde(0, K0)] * (L - v.dom)
        return tuple(vals)

    def phi(pbar) -> FiniteMap:
        vals = list(range(1, L0 + 1))
        for i, p in enumerate(pbar, 1):
            for x in p.values:
                vals.append(l0 if x == 1 else (L0 + i if x == 2 else l1))
        return FiniteMap(vals, L, check=False)

    def phi_builder(F: FamilyElement):
        Nsum = sum(k[0] for k in F.key)
        G = src.aos.f((L0 + Nsum, L, L0))
        return G, phi

    cands = [tgt.aos.f(tuple((n, 3) for n in Ns))]
    return Interpretation(src.aos, tgt.aos, T, 0, S, 0, alpha_override or alpha, phi_builder, cands)
