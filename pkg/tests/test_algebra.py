import pytest

from ramseykit import algebra as al
from ramseykit.algebra import ActoidInstance, ActoidOfSets
from ramseykit.errors import AlphaOutOfRange, EmptyFactorList, MissingNorm, MissingTruncation
from ramseykit.instances import _ii_compose, binom_members, build, hj_interpretation
from ramseykit.objects import FiniteMap, ramp


def example_a(cutoff=4):
    return build("example-a", cutoff=cutoff)


def empty_instance(**kw):
    return ActoidInstance("empty", [], [], lambda a, b: None, lambda a, z: None, **kw)


# -- local actoid ----------------------------------------------------------------

def test_empty_carriers_pass():
    assert al.check_local_actoid(empty_instance())
    inst = empty_instance(trunc=lambda z: z, norm=lambda z: 0)
    assert al.check_conditions_a_to_e(inst)


def test_example_a_is_local_actoid():
    rep = al.check_local_actoid(example_a().instance)
    assert rep.passed and rep.violation_count == 0
    assert rep.to_dict()["pass"] is True


def test_flipped_multiplication_is_caught():
    inst = example_a().instance
    mutant = inst.replace(name="flipped", mult=lambda j, i: _ii_compose(i, j))
    rep = al.check_local_actoid(mutant)
    assert not rep.passed
    assert rep.violations and len(rep.violations[0]) == 3


def test_acct_against_naive_loop():
    # the vectorised check must agree with a direct triple loop
    inst = example_a(3).instance
    mutant = inst.replace(name="flipped", mult=lambda j, i: _ii_compose(i, j))
    for candidate in (inst, mutant):
        bad = 0
        for a in candidate.a_objects:
            for b in candidate.a_objects:
                ab = candidate.mult(a, b)
                for z in candidate.z_objects:
                    bz = candidate.act(b, z)
                    left = None if bz is None else candidate.act(a, bz)
                    right = None if ab is None else candidate.act(ab, z)
                    if left is not None and right is not None and left != right:
                        bad += 1
        assert al.check_local_actoid(candidate).violation_count == bad


# -- background and norm -------------------------------------------------------------

def test_background_requires_truncation():
    with pytest.raises(MissingTruncation):
        al.check_background(empty_instance())
    with pytest.raises(MissingNorm):
        al.check_normed(empty_instance())


def test_example_a_background_and_norm():
    inst = example_a().instance
    assert al.check_background(inst)
    assert al.check_normed(inst)
    assert al.check_conditions_a_to_e(inst)


def test_wrong_truncation_reports_a_witness():
    inst = example_a().instance
    # forget the values, keep only the length: not compatible with the action
    mutant = inst.replace(name="shape-only", trunc=lambda i: ramp(range(1, i.dom)))
    rep = al.check_background(mutant)
    assert not rep.passed and rep.violations


def test_negated_norm_fails():
    inst = example_a().instance
    assert not al.check_normed(inst.replace(name="neg", norm=lambda i: -i.cod))
    a3 = build("a3x3-f3s3", cutoff=4).instance
    assert al.check_normed(a3)
    assert not al.check_normed(a3.replace(name="neg", norm=lambda sp: -sp.dom))


@pytest.mark.parametrize("name", ["example-a", "a2x2-f2s2", "a3x3-f3s3", "a3x3-g3t3"])
def test_conditions_a_to_e_imply_background_and_norm(name):
    inst = build(name, cutoff=4).instance
    if al.check_conditions_a_to_e(inst):
        assert al.check_background(inst)
        assert al.check_normed(inst)
        assert al.check_local_actoid(inst)


@pytest.mark.parametrize("name", ["example-a", "a2x2-f2s2", "a3x3-f3s3"])
def test_derived_norm(name):
    inst = build(name, cutoff=4).instance
    der = al.derive_norm(inst)
    assert al.check_conditions_a_to_e(der)
    twice = al.derive_norm(der)
    assert [der.norm(z) for z in der.z_objects] == [twice.norm(z) for z in twice.z_objects]
    for z in der.z_objects:
        assert der.norm(inst.trunc(z)) <= der.norm(z)
        # |z|_1 is a minimum over a set containing |z|
        assert der.norm(z) <= inst.norm(z)


def test_derived_norm_with_identity_truncation_is_unchanged():
    inst = example_a(3).instance.replace(name="id-trunc", trunc=lambda z: z)
    der = al.derive_norm(inst)
    assert all(der.norm(z) == inst.norm(z) for z in inst.z_objects)


# -- actoids of sets -----------------------------------------------------------------

def test_example_a_actoid_of_sets_n5():
    b = build("example-a", cutoff=5)
    assert al.check_actoid_of_sets(b.aos)
    assert len(b.aos.f((5, 2)).members) == 10


def test_bullet_without_pointwise_product_fails():
    b = example_a(4)
    aos = b.aos

    def sloppy(k1, k2):
        (N, M), (L, K) = k1, k2
        # claims binom(N, M) * binom(L, K) = binom(N, K) even when M < L
        return (N, K) if M <= L + 1 else None

    mutant = ActoidOfSets(
        b.instance, f_keys=aos.f_keys, s_keys=aos.s_keys,
        f_members=lambda k: binom_members(*k), s_members=lambda k: binom_members(*k),
        f_bullet=sloppy, s_bullet=aos._s_bullet,
    )
    rep = al.check_actoid_of_sets(mutant)
    assert not rep.passed


def test_example_a_set_products_match_formula():
    inst = example_a(6).instance
    for N in range(0, 7):
        for M in range(0, N + 1):
            for L in range(0, M + 1):
                for K in range(0, L + 1):
                    got = inst.set_mult(binom_members(N, M), binom_members(L, K))
                    assert got == frozenset(binom_members(N - (M - L), K))


# -- products and the starred background --------------------------------------------

def test_product_needs_factors():
    with pytest.raises(EmptyFactorList):
        al.make_product([], [])
    with pytest.raises(EmptyFactorList):
        al.make_starred([], [])


def test_single_factor_product_mirrors_factor():
    b = build("example-b", cutoff=3, K0=2)
    prod = al.make_product([b.instance], [b.aos])
    inst = prod.instance
    assert len(inst.z_objects) == len(b.instance.z_objects)
    for (z,) in inst.z_objects:
        assert inst.trunc((z,)) == (b.instance.trunc(z),)
    assert all(r.passed for r in al.check_battery(inst, prod))


def test_product_truncation_is_coordinatewise():
    b = build("example-b", cutoff=3, K0=2)
    prod = al.make_product([b.instance, b.instance], [b.aos, b.aos])
    tr = b.instance.trunc
    for z1, z2 in prod.instance.z_objects:
        assert prod.instance.trunc((z1, z2)) == (tr(z1), tr(z2))


def test_starred_truncation_cycles_through_coordinates():
    b = build("example-b", cutoff=3, K0=2)
    star = al.make_starred([b.instance, b.instance], [b.aos, b.aos])
    inst, tr = star.instance, b.instance.trunc
    for z1 in b.instance.z_objects:
        for z2 in b.instance.z_objects:
            assert inst.trunc_pow((0, (z1, z2)), 2) == (0, (tr(z1), tr(z2)))
    assert al.check_background(inst)


def test_starred_single_factor():
    b = build("example-b", cutoff=3, K0=2)
    star = al.make_starred([b.instance], [b.aos])
    for z in b.instance.z_objects:
        assert star.instance.trunc((0, (z,))) == (0, (b.instance.trunc(z),))


def test_example_b_product_battery():
    built = build("example-b-product", cutoff=3, K0=2)
    for rep in al.check_battery(built.instance, built.aos):
        assert rep.passed, rep.to_dict()


# -- interpretations ------------------------------------------------------------------

def test_identity_interpretation():
    b = example_a(4)
    S = b.aos.s((3, 2))
    rep = al.check_interpretation(b.aos, b.aos, S, 0, S, 0, lambda y: y, lambda F: (F, lambda f: f))
    assert rep.passed


def _run(interp):
    return al.check_interpretation(interp.source, interp.target, interp.T, interp.t, interp.S, interp.s,
                                   interp.alpha, interp.phi_builder, interp.f_candidates)


@pytest.mark.parametrize("v0,L,Ns", [
    (FiniteMap((1,), 1), 2, [3]),
    (FiniteMap((1,), 1), 2, [4]),
    (FiniteMap((1,), 1), 2, [5]),
    (FiniteMap((1,), 1), 3, [3, 4]),
    (FiniteMap((1, 2), 2), 3, [4]),
])
def test_hales_jewett_interpretation(v0, L, Ns):
    interp = hj_interpretation(v0, L, Ns)
    # F_{N,3} is empty for N < 3, which would make condition (ii) vacuous
    assert all(F.members for F in interp.f_candidates)
    rep = _run(interp)
    assert rep.passed, rep.to_dict()


def test_splitting_alpha_fails_condition_i():
    v0 = FiniteMap((1, 2), 2)
    base = hj_interpretation(v0, 3, [4])
    # 2|1 2 1 and 2|1 2 2 share a truncation; send the second somewhere else
    moved = FiniteMap((1, 2, 2), 2)

    def split(y):
        return base.alpha(v0) if y == moved else base.alpha(y)

    rep = _run(hj_interpretation(v0, 3, [4], alpha_override=split))
    assert not rep.passed
    assert ("i", "2|1 2 1", "2|1 2 2") in rep.violations


def test_collapsing_alpha_fails_condition_ii():
    v0 = FiniteMap((1,), 1)
    base = hj_interpretation(v0, 2, [3])
    const = base.alpha(FiniteMap((1, 1), 1))
    rep = _run(hj_interpretation(v0, 2, [3], alpha_override=lambda y: const))
    assert not rep.passed
    assert rep.violations[0][0] == "ii"


def test_alpha_out_of_range():
    b = example_a(4)
    S = b.aos.s((3, 2))
    T = b.aos.s((2, 1))
    with pytest.raises(AlphaOutOfRange):
        al.check_interpretation(b.aos, b.aos, T, 0, S, 0, lambda y: y, lambda F: (F, lambda f: f))


def test_report_serialization_shape():
    rep = al.check_local_actoid(example_a(2).instance)
    d = rep.to_dict()
    assert set(d) >= {"check", "pass", "carrier_sizes", "violations"}
