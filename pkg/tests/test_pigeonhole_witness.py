import itertools

import pytest

from ramseykit.engine.pigeonhole import Extension, Oracles, check_lph, check_ph, fiber, truncated_layer
from ramseykit.engine.search import Kind, SearchBudget
from ramseykit.engine.witness import (
    compose_witness_T31,
    compose_witness_T42,
    extract_localized,
    extract_stabilizer,
)
from ramseykit.errors import ConstructionTreeMissing, NormMissing, OracleFailure, XNotInTruncatedS
from ramseykit.instances import build
from ramseykit.objects import FiniteMap, ramp, sort_key


def all_colourings(domain, d):
    for cols in itertools.product(range(1, d + 1), repeat=len(domain)):
        yield dict(zip(domain, cols))


def stabilizes(inst, f, S_members, t, colour):
    seen = {}
    for x in S_members:
        c = colour[inst.act(f, x)]
        if seen.setdefault(inst.trunc_pow(x, t), c) != c:
            return False
    return True


# -- (ph) ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def example_b():
    return build("example-b", cutoff=8, K0=2)


def test_example_b_bound_and_below(example_b):
    aos = example_b.aos
    assert check_ph(aos, 2, 0, aos.s(3), aos.f((4, 3))).kind is Kind.PIGEONHOLE_HOLDS
    below = check_ph(aos, 2, 0, aos.s(3), aos.f((3, 3)))
    assert below.kind is Kind.BAD_COLORING


def test_example_b_deeper_layers_are_trivial(example_b):
    aos, inst = example_b.aos, example_b.instance
    for K in (3, 4):
        for t in (1, 2):
            layer = truncated_layer(inst, aos.s(K).members, t)
            # truncation is idempotent, so each fiber of the t-th layer is a single point
            assert all(len(fiber(inst, aos.s(K).members, t, inst.trunc(y))) == 1 for y in layer)
            assert check_ph(aos, 2, t, aos.s(K), aos.f((K, K))).kind is Kind.PIGEONHOLE_HOLDS


def test_check_ph_matches_direct_enumeration(example_b):
    aos, inst = example_b.aos, example_b.instance
    for L in (3, 4):
        F, S = aos.f((L, 3)), aos.s(3)
        domain = sorted({inst.act(f, x) for f in F.members for x in S.members}, key=sort_key)
        holds = all(any(stabilizes(inst, f, S.members, 1, c) for f in F.members)
                    for c in all_colourings(domain, 2))
        got = check_ph(aos, 2, 0, S, F).kind is Kind.PIGEONHOLE_HOLDS
        assert got == holds


# -- (lph) -----------------------------------------------------------------------

def test_lph_singleton_fiber_first_candidate_wins():
    a = build("example-a", cutoff=5)
    S = a.aos.s((2, 1))
    x = ramp(())
    cands = [(a.aos.f((N, 2)), ramp(())) for N in range(2, 5)]
    cert = check_lph(a.aos, 2, 0, S, x, cands)
    assert cert.kind is Kind.LPH_WITNESS
    # fiber of the empty injection in binom(2,1) has two points, so binom(2,2) cannot do it
    assert cert.witness["F"] == "binom(3,2)"
    S1 = a.aos.s((1, 1))
    cert = check_lph(a.aos, 2, 0, S1, x, [(a.aos.f((1, 1)), ramp(()))])
    assert cert.kind is Kind.LPH_WITNESS and cert.witness["F"] == "binom(1,1)"


def test_lph_example_a_length_one_class():
    a = build("example-a", cutoff=6)
    S = a.aos.s((3, 2))
    x = ramp((1,))
    cands = [(a.aos.f((M, 3)), a.lph_anchor(x)) for M in range(3, 7)]
    cert = check_lph(a.aos, 2, 0, S, x, cands)
    assert cert.kind is Kind.LPH_WITNESS
    assert cert.witness["F"] == "binom(4,3)"


def test_lph_rejects_points_outside_the_layer():
    a = build("example-a", cutoff=4)
    with pytest.raises(XNotInTruncatedS):
        check_lph(a.aos, 2, 0, a.aos.s((3, 2)), ramp((1, 2, 3)), [])


def test_lph_walks_has_no_witness_within_cutoff():
    w = build("walks-hw", cutoff=8)
    S = w.aos.s((6, 3))
    x = FiniteMap((1, 2), 2)
    assert x in w.instance.set_trunc(frozenset(S.members), 1)
    cands = [(w.aos.f((M, 6)), w.lph_anchor(x)) for M in range(6, 9)]
    cert = check_lph(w.aos, 2, 0, S, x, cands, budget=SearchBudget(strategy="backtracking"))
    assert cert.kind is Kind.LPH_NOT_FOUND
    # every candidate is refuted by an explicit colouring, not by running out of budget
    assert [t["result"] for t in cert.witness["tried"]] == ["BadColoring"] * 3


def test_extension_relation():
    a = build("example-a", cutoff=4)
    ext = Extension(a.instance)
    ident2 = ramp((1, 2))
    assert ext.extends(ramp((1, 2, 4)), ident2)
    assert not ext.extends(ramp((1, 3, 4)), ident2)


# -- nested stabilizer construction -------------------------------------------------

def replay_T31(w, d):
    aos, inst = w.aos, w.aos.instance
    domain = sorted(aos.bullet_act(w.family, w.S).members, key=sort_key)
    n = 0
    for colour in all_colourings(domain, d):
        f = extract_stabilizer(w, colour.__getitem__)
        assert f in w.family.member_set
        assert stabilizes(inst, f, w.S.members, w.t, colour)
        n += 1
    return n


def test_T31_base_case_uses_the_oracle():
    a = build("example-a", cutoff=5)
    orc = Oracles(a, 5)
    w = compose_witness_T31(a.aos, 2, 0, a.aos.s((2, 1)), orc.ph, orc.base)
    assert w.t == 0 and w.family.name == "binom(2,2)"
    assert replay_T31(w, 2) == 2 ** 2


def test_T31_example_a():
    a = build("example-a", cutoff=5)
    orc = Oracles(a, 5)
    w = compose_witness_T31(a.aos, 2, 1, a.aos.s((2, 1)), orc.ph, orc.base)
    assert w.family.name == "binom(3,2)"
    assert w.tree()["F1"]["t"] == 0
    assert replay_T31(w, 2) == 2 ** 3


def test_T31_example_b():
    b = build("example-b", cutoff=4, K0=2)
    orc = Oracles(b, 4)
    w = compose_witness_T31(b.aos, 2, 1, b.aos.s(2), orc.ph, orc.base)
    assert replay_T31(w, 2) == 2 ** len(b.aos.bullet_act(w.family, b.aos.s(2)).members)


def test_extractor_needs_the_tree():
    a = build("example-a", cutoff=4)
    with pytest.raises(ConstructionTreeMissing):
        extract_stabilizer(a.aos.f((3, 2)), lambda y: 1)


def test_constant_colouring_gives_first_member():
    a = build("example-a", cutoff=5)
    orc = Oracles(a, 5)
    w = compose_witness_T31(a.aos, 2, 1, a.aos.s((2, 1)), orc.ph, orc.base)
    f = extract_stabilizer(w, lambda y: 1)
    assert f == min(w.family.members, key=sort_key)


def test_adversarial_colouring_moves_the_stabilizer():
    a = build("example-a", cutoff=5)
    orc = Oracles(a, 5)
    w = compose_witness_T31(a.aos, 2, 1, a.aos.s((2, 1)), orc.ph, orc.base)
    inst = a.instance
    first = min(w.family.members, key=sort_key)
    domain = sorted(a.aos.bullet_act(w.family, w.S).members, key=sort_key)
    hit = 0
    for colour in all_colourings(domain, 2):
        if stabilizes(inst, first, w.S.members, 1, colour):
            continue
        f = extract_stabilizer(w, colour.__getitem__)
        assert f != first
        hit += 1
    assert hit > 0


def test_oracle_failure_when_limit_too_small():
    a = build("example-a", cutoff=5)
    orc = Oracles(a, 2)
    with pytest.raises(OracleFailure):
        compose_witness_T31(a.aos, 2, 1, a.aos.s((2, 1)), orc.ph, orc.base)


# -- localized chaining construction ------------------------------------------------

def test_T42_example_a():
    a = build("example-a", cutoff=6)
    orc = Oracles(a, 6)
    S = a.aos.s((3, 2))
    w = compose_witness_T42(a.aos, 2, 0, S, orc.lph, orc.ext)
    assert check_ph(a.aos, 2, 0, S, w.family).kind is Kind.PIGEONHOLE_HOLDS
    assert w.audit["checked"] > 0 and w.audit["violations"] == 0
    norms = [a.instance.norm(s.x) for s in w.steps]
    assert norms == sorted(norms, reverse=True)
    inst = a.instance
    layer = truncated_layer(inst, a.aos.bullet_act(w.family, S).members, 0)
    for colour in all_colourings(layer, 2):
        f, chosen = extract_localized(w, colour.__getitem__, orc.ext)
        assert f in w.family.member_set
        assert len(chosen) == len(w.steps)


def test_T42_single_step():
    a = build("example-a", cutoff=5)
    orc = Oracles(a, 5)
    S = a.aos.s((2, 1))
    assert len(a.instance.set_trunc(frozenset(S.members), 1)) == 1
    w = compose_witness_T42(a.aos, 2, 0, S, orc.lph, orc.ext)
    assert len(w.steps) == 1
    assert check_ph(a.aos, 2, 0, S, w.family).kind is Kind.PIGEONHOLE_HOLDS


def test_T42_needs_a_norm():
    b = build("example-b", cutoff=4, K0=2)
    orc = Oracles(b, 4)
    with pytest.raises(NormMissing):
        compose_witness_T42(b.aos, 2, 0, b.aos.s(3), orc.lph, orc.ext)


def test_localized_extractor_needs_steps():
    a = build("example-a", cutoff=4)
    with pytest.raises(ConstructionTreeMissing):
        extract_localized(a.aos.f((3, 2)), lambda y: 1)
