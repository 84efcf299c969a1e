import itertools

import pytest

from ramseykit.engine.search import Kind, SearchBudget, verify_bad_coloring
from ramseykit.engine.statements import Statement, min_threshold, statement_instance


# -- independent oracles ----------------------------------------------------------

def graph_has_bad_colouring(M, L, K, d):
    """Some d-colouring of K-subsets of [M] leaves every L-subset non-monochromatic."""
    ksets = list(itertools.combinations(range(M), K))
    lsets = [[ksets.index(k) for k in itertools.combinations(l, K)] for l in itertools.combinations(range(M), L)]
    for cols in itertools.product(range(d), repeat=len(ksets)):
        if all(len({cols[i] for i in idx}) > 1 for idx in lsets):
            return True
    return False


def hj_has_bad_colouring(A, n, d):
    """Some d-colouring of [A]^n has no monochromatic combinatorial line."""
    words = list(itertools.product(range(A), repeat=n))
    index = {w: i for i, w in enumerate(words)}
    lines = []
    for pattern in itertools.product(range(A + 1), repeat=n):  # letter A is the wildcard
        if A not in pattern:
            continue
        lines.append([index[tuple(a if p == A else p for p in pattern)] for a in range(A)])
    for cols in itertools.product(range(d), repeat=len(words)):
        if all(len({cols[i] for i in line}) > 1 for line in lines):
            return True
    return False


@pytest.mark.parametrize("d,K,L", [(2, 1, 2), (3, 1, 2), (2, 2, 3), (2, 1, 3), (2, 3, 3)])
def test_classical_matches_graph_oracle(d, K, L):
    res = min_threshold(Statement.CLASSICAL, {"d": d, "K": K, "L": L}, max_M=6)
    assert res.threshold is not None
    M = res.threshold
    if M <= 5:  # 2^15 colourings of K_6 is slow in pure Python
        assert not graph_has_bad_colouring(M, L, K, d)
    if M > L:
        assert graph_has_bad_colouring(M - 1, L, K, d)


def test_classical_small_values():
    assert min_threshold("classical", {"d": 2, "K": 1, "L": 2}).threshold == 3
    assert min_threshold("classical", {"d": 3, "K": 1, "L": 2}).threshold == 4
    assert min_threshold("classical", {"d": 2, "K": 2, "L": 3}).threshold == 6


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_k_equal_l_is_immediate(L):
    res = min_threshold("classical", {"d": 3, "K": L, "L": L})
    assert res.threshold == L
    assert res.certificates[L].kind is Kind.PIGEONHOLE_HOLDS


@pytest.mark.parametrize("d", [2, 3])
def test_hales_jewett_matches_line_oracle(d):
    res = min_threshold("hales-jewett", {"d": d, "L": 3, "v0": "2|1 2"}, max_M=6)
    n = res.threshold - 2
    assert not hj_has_bad_colouring(2, n, d)
    assert hj_has_bad_colouring(2, n - 1, d)


def test_small_statement_thresholds():
    assert min_threshold("self-dual", {"d": 2, "K": 1, "L": 2}).threshold == 3
    assert min_threshold("dual", {"d": 2, "K": 1, "L": 2}).threshold == 2
    assert min_threshold("self-dual-partial", {"d": 2, "K": 1, "L": 2}).threshold == 3
    assert min_threshold("graham-rothschild", {"d": 2, "K": 1, "L": 2, "s0": "1|1"}).threshold == 2
    assert min_threshold("graham-rothschild-voigt", {"d": 2, "K": 1, "L": 2, "s0": "1|1"}).threshold == 3


def test_bad_certificates_verify():
    params = {"d": 2, "K": 2, "L": 3}
    res = min_threshold("classical", params)
    for M, cert in res.certificates.items():
        if cert.kind is Kind.BAD_COLORING:
            inst = statement_instance("classical", M, params)
            assert verify_bad_coloring(inst.F, inst.S, inst.act, cert.coloring, equiv=inst.equiv)
    assert sorted(res.certificates) == [3, 4, 5, 6]


def test_inconclusive_when_budget_is_tiny():
    res = min_threshold("classical", {"d": 2, "K": 2, "L": 3}, budget=SearchBudget(max_colorings=50))
    assert res.inconclusive and res.inconclusive_at is not None
    assert res.to_dict()["threshold"] == "Inconclusive"


def test_max_m_reached_without_answer():
    res = min_threshold("classical", {"d": 2, "K": 2, "L": 3}, max_M=5)
    assert res.threshold is None and res.inconclusive_at == 6


def test_unknown_statement():
    with pytest.raises(ValueError):
        statement_instance("nonsense", 3, {"L": 2, "K": 1})
