import itertools

import pytest

from wms.dividing import (
    UniformSequence,
    check_dividing_witness,
    check_fork_cover,
    check_uniform_sequence,
    max_uniform_length,
    search_k_dividing,
    search_uniform_sequence,
)
from wms.errors import InvalidArgument, OrbitTooLarge
from wms.families import matching, nonisomorphic_graphs
from wms.ideals import FractionIdeal, TrivialIdeal
from wms.logic import PartitionedFormula, complete_graph, path_graph

M6 = matching(3).structure
K3 = complete_graph(3)


def E(S):
    return PartitionedFormula.parse("E(x,y)", S.signature)


def test_check_witness_examples():
    assert check_dividing_witness(M6, TrivialIdeal(), E(M6), (0,), [], [(0,), (2,)], 2)
    taut = PartitionedFormula.parse("x = x & y = y", M6.signature)
    assert not check_dividing_witness(M6, TrivialIdeal(), taut, (0,), [], [(0,), (2,), (4,)], 2)
    # Over the base {0}, vertex 1 (0's partner) and vertex 2 have different types.
    assert not check_dividing_witness(M6, TrivialIdeal(), E(M6), (1,), [0], [(1,), (2,)], 2)


def test_check_witness_rejects_short_sequences():
    with pytest.raises(InvalidArgument):
        check_dividing_witness(M6, TrivialIdeal(), E(M6), (0,), [], [(0,)], 2)


def test_search_examples():
    w = search_k_dividing(M6, TrivialIdeal(), E(M6), (0,), [], 2, 3)
    assert w is not None and w.sequence == ((0,), (1,), (2,))
    assert check_dividing_witness(M6, TrivialIdeal(), E(M6), (0,), [], w.sequence, 2)
    assert search_k_dividing(K3, TrivialIdeal(), E(K3), (0,), [], 2, 3) is None
    P3 = path_graph(3)
    thin = search_k_dividing(P3, FractionIdeal("1/2"), E(P3), (0,), [], 1, 1)
    assert thin is not None and thin.sequence == ((0,),)


def test_search_json_shape():
    w = search_k_dividing(M6, TrivialIdeal(), E(M6), (0,), [], 2, 2)
    assert w.to_json() == {"k": 2, "sequence": [[0], [1]], "base": [], "psi": "E(x,y)"}


def test_orbit_limit_is_enforced():
    with pytest.raises(OrbitTooLarge):
        search_k_dividing(M6, TrivialIdeal(), E(M6), (0,), [], 2, 3, orbit_limit=2)


def test_uniform_sequence_examples():
    delta = [E(M6)]
    assert search_uniform_sequence(M6, TrivialIdeal(), delta, [], 2, 2) is None
    seq = search_uniform_sequence(M6, TrivialIdeal(), delta, [], 2, 1)
    assert seq is not None and len(seq) == 1
    assert check_uniform_sequence(M6, TrivialIdeal(), delta, seq)
    assert max_uniform_length(M6, TrivialIdeal(), delta, [], 2, 3) == 1
    empty = [PartitionedFormula.parse("E(x,y) & !E(x,y)", M6.signature)]
    assert search_uniform_sequence(M6, TrivialIdeal(), empty, [], 2, 1) is None


def test_uniform_subsequence_stays_valid():
    seq = search_uniform_sequence(M6, TrivialIdeal(), [E(M6)], [], 2, 1)
    sub = seq.subsequence(0, 1)
    assert isinstance(sub, UniformSequence)
    assert check_uniform_sequence(M6, TrivialIdeal(), [E(M6)], sub)
    with pytest.raises(InvalidArgument):
        seq.subsequence(0, 1, base=[5])


def test_fork_cover_examples():
    phi = E(M6)
    assert check_fork_cover(M6, TrivialIdeal(), [(phi, (0,), True)], [], [(phi, (0,))], 2)
    assert not check_fork_cover(M6, TrivialIdeal(), [(phi, (0,), True)], [], [(phi, (2,))], 2)
    k3 = E(K3)
    assert not check_fork_cover(K3, TrivialIdeal(), [(k3, (0,), True)], [], [(k3, (0,))], 2)


def test_thin_instances_divide_with_k_equal_one():
    I = FractionIdeal("1/2")
    for m in range(1, 5):
        for S in nonisomorphic_graphs(m):
            phi = E(S)
            table = phi.instances(S)
            for c in table.parameters():
                if I.is_thin(table.instance(c)):
                    w = search_k_dividing(S, I, phi, c, [], 1, 1)
                    assert w is not None and check_dividing_witness(S, I, phi, c, [], w.sequence, 1)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_matching_two_divides(p):
    S = matching(p).structure
    phi = E(S)
    for c in range(S.m):
        w = search_k_dividing(S, TrivialIdeal(), phi, (c,), [], 2, 3)
        assert w is not None
        assert all(not (phi.instances(S).instance(a) & phi.instances(S).instance(b)) for a, b in itertools.combinations(w.sequence, 2))
