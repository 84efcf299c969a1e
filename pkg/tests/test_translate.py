import itertools
import json

import pytest
from hypothesis import given, strategies as st

from ramseykit import objects as ob
from ramseykit.errors import InvalidObject, NotAnchored
from ramseykit.objects import Connection, FiniteMap
from ramseykit.translate import (
    ParameterSet,
    PartitionConnection,
    connection_to_partition,
    identity_connection,
    is_subconnection,
    is_subobject_direct,
    iter_parameter_sets,
    parameter_to_rigid,
    partition_to_connection,
    rigid_to_parameter,
    subconnection_by_composition,
    subconnections,
    subobject_check,
)


# -- raw generators, independent of the object enumerators --------------------------

def raw_parameter_sets(A, n):
    """Every labelling of [n] by letters or block tags, collapsed to distinct parameter sets."""
    out = set()
    for labels in itertools.product(range(-A, n), repeat=n):  # negatives are letters
        blocks = {}
        g = {}
        for x, lab in enumerate(labels, 1):
            if lab < 0:
                g[x] = -lab
            else:
                blocks.setdefault(lab, []).append(x)
        out.add(ParameterSet(A, n, tuple(tuple(b) for b in blocks.values()), g))
    return out


def raw_connections(L):
    out = []
    for K in range(1, L + 1):
        for s in itertools.product(range(1, K + 1), repeat=L):
            for i in itertools.product(range(1, L + 1), repeat=K):
                if all(s[i[x - 1] - 1] == x and all(s[y - 1] <= x for y in range(1, i[x - 1]))
                       for x in range(1, K + 1)):
                    out.append(Connection(FiniteMap(s, K), FiniteMap(i, L)))
    return out


def instantiate(V, U_blocks, A):
    """All parameter sets obtained from V by sending each block to a letter or to a new block tag."""
    k = len(U_blocks)
    for choice in itertools.product(list(range(-A, 0)) + list(range(k)), repeat=V.dim):
        blocks = {}
        g = dict(V.g)
        for b, c in zip(V.blocks, choice):
            if c < 0:
                for x in b:
                    g[x] = -c
            else:
                blocks.setdefault(c, []).extend(b)
        yield ParameterSet(A, V.n, tuple(tuple(b) for b in blocks.values()), g)


# -- parameter sets ----------------------------------------------------------------------

def test_examples():
    ident = ParameterSet(0, 3, ((1,), (2,), (3,)), {})
    assert parameter_to_rigid(ident) == FiniteMap((1, 2, 3), 3)
    V = ParameterSet(1, 3, ((1, 3),), {2: 1})
    assert parameter_to_rigid(V) == FiniteMap((1, 2, 1, 2), 2)
    assert rigid_to_parameter(FiniteMap((1, 2, 1, 2), 2), 1) == V


def test_json_round_trip():
    V = ParameterSet(1, 3, ((1, 3),), {2: 1})
    assert json.loads(V.to_json()) == {"A": 1, "n": 3, "blocks": [[1, 3]], "g": {"2": 1}}
    assert ParameterSet.from_dict(json.loads(V.to_json())) == V


@pytest.mark.parametrize("A", [0, 1, 2])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_parameter_bijection_is_exhaustive(A, n):
    ours = list(iter_parameter_sets(A, n))
    assert len(ours) == len(set(ours))
    assert set(ours) == raw_parameter_sets(A, n)
    images = set()
    for V in ours:
        s = parameter_to_rigid(V)
        assert ob.is_rigid(s) and s.values[:A] == tuple(range(1, A + 1))
        assert rigid_to_parameter(s, A) == V
        images.add(s)
    assert len(images) == len(ours)


def test_parameter_validation():
    with pytest.raises(InvalidObject):
        ParameterSet(1, 3, ((1, 2), (2, 3)), {})
    with pytest.raises(InvalidObject):
        ParameterSet(1, 3, ((1,),), {2: 1})
    with pytest.raises(InvalidObject):
        ParameterSet(1, 2, ((1,),), {2: 2})
    with pytest.raises(InvalidObject):
        ParameterSet(1, 2, ((),), {1: 1, 2: 1})


def test_unanchored_map_is_rejected():
    with pytest.raises(NotAnchored):
        rigid_to_parameter(FiniteMap((1, 1, 2), 2), 2)


@pytest.mark.parametrize("A,n", [(0, 3), (1, 3), (2, 2), (0, 4), (1, 4), (2, 3)])
def test_subobject_definitions_agree(A, n):
    sets = list(iter_parameter_sets(A, n))
    hits = 0
    for U in sets:
        for V in sets:
            direct = is_subobject_direct(U, V)
            found, r = subobject_check(U, V)
            by_instantiation = U in set(instantiate(V, U.blocks, A))
            assert direct == found == by_instantiation, (U, V)
            if found:
                hits += 1
                assert ob.compose(r, parameter_to_rigid(V)) == parameter_to_rigid(U)
        found, r = subobject_check(U, U)
        assert found and r == ob.ramp(range(1, A + U.dim + 1))
    assert hits > len(sets)


def test_coarser_partitions_when_no_alphabet():
    for n in range(1, 5):
        sets = list(iter_parameter_sets(0, n))
        for U in sets:
            for V in sets:
                coarser = all(any(set(b) <= set(c) for c in U.blocks) for b in V.blocks)
                assert subobject_check(U, V)[0] == coarser


def test_crossing_blocks_are_not_subobjects():
    U = ParameterSet(0, 4, ((1, 2), (3, 4)), {})
    V = ParameterSet(0, 4, ((1, 3), (2, 4)), {})
    assert not is_subobject_direct(U, V)
    assert subobject_check(U, V) == (False, None)


# -- connections -------------------------------------------------------------------------

def test_connection_examples():
    pc = connection_to_partition(Connection(FiniteMap((1, 2, 3), 3), FiniteMap((1, 2, 3), 3)))
    assert pc == identity_connection(3)
    a = connection_to_partition(Connection(FiniteMap((1, 1), 1), FiniteMap((1,), 2)))
    b = connection_to_partition(Connection(FiniteMap((1, 1), 1), FiniteMap((2,), 2)))
    assert a.to_dict() == {"R": [[1, 2]], "C": [1]}
    assert b.to_json() == '{"C": [2], "R": [[1, 2]]}'


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_connection_bijection_is_exhaustive(L):
    ours = [c for K in range(1, L + 1) for c in ob.enumerate_connections(L, K)]
    assert set(ours) == set(raw_connections(L))
    parts = set()
    for c in ours:
        pc = connection_to_partition(c)
        assert partition_to_connection(pc) == c
        assert PartitionConnection.from_dict(json.loads(pc.to_json())) == pc
        parts.add(pc)
    assert len(parts) == len(ours)


def test_partition_validation():
    assert PartitionConnection(((1,), (2, 3)), (1, 3)).n == 3
    with pytest.raises(InvalidObject):
        PartitionConnection(((1, 3), (2,)), (3, 2))  # c_1 = 3 is above min of the next block
    with pytest.raises(InvalidObject):
        PartitionConnection(((1,), (3,)), (1, 3))    # not an initial segment


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_subconnection_matches_composition(L):
    conns = [c for K in range(1, L + 1) for c in ob.enumerate_connections(L, K)]
    literal_disagreements = 0
    for a in conns:
        for b in conns:
            pa, pb = connection_to_partition(a), connection_to_partition(b)
            assert is_subconnection(pa, pb) == subconnection_by_composition(a, b)
            literal_disagreements += is_subconnection(pa, pb, literal=True) != is_subconnection(pa, pb)
    if L >= 2:
        # the other coarsening direction is a genuinely different relation
        assert literal_disagreements > 0


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_subconnections_enumeration(m):
    top = identity_connection(m)
    for k in range(1, m + 1):
        subs = subconnections(top, k)
        assert all(sc.m == k and is_subconnection(sc, top) for sc in subs)
        direct = [connection_to_partition(c) for c in ob.enumerate_connections(m, k)]
        assert sorted(subs, key=lambda p: (p.R, p.C)) == sorted(direct, key=lambda p: (p.R, p.C))


@given(st.integers(1, 5).flatmap(lambda L: st.sampled_from(
    [c for K in range(1, L + 1) for c in ob.enumerate_connections(L, K)])))
def test_round_trip_property(c):
    assert partition_to_connection(connection_to_partition(c)) == c
