import math
import random

import pytest

from parafact import semnet
from parafact.semnet import (
    UNRELATED,
    NetCycleError,
    NetParseError,
    NetReferenceError,
    related_under,
)

from oracles import oracle_nca, oracle_proximity, random_net


MINI_NET = """
node EVENT "event"
node ACQUIRE "acquire"
rel ACQUIRE hypernym EVENT cost 1.0
word "rachat" ACQUIRE
"""


def test_load_minimal_net():
    net = semnet.load_net(MINI_NET)
    assert len(net.nodes) == 2
    assert len(net.relations) == 1
    assert net.lexicon == {"rachat": ("ACQUIRE",)}


def test_cycle_detected():
    text = 'node A "a"\nnode B "b"\nrel A hypernym B cost 1.0\nrel B hypernym A cost 1.0'
    with pytest.raises(NetCycleError):
        semnet.load_net(text)


def test_synonym_pair_is_not_a_cycle():
    text = 'node A "a"\nnode B "b"\nrel A synonym B\nrel B synonym A'
    net = semnet.load_net(text)
    assert len(net.relations) == 2


def test_hypernym_into_synonym_class_is_cyclic():
    text = 'node A "a"\nnode B "b"\nrel A synonym B\nrel A hypernym B'
    with pytest.raises(NetCycleError):
        semnet.load_net(text)


def test_parse_error_carries_line_number():
    with pytest.raises(NetParseError) as err:
        semnet.load_net('node A "a"\nrel A wat B')
    assert "line 2" in str(err.value)


def test_dangling_reference():
    with pytest.raises(NetReferenceError):
        semnet.load_net('node A "a"\nrel A hypernym MISSING')
    with pytest.raises(NetReferenceError):
        semnet.load_net('node A "a"\nword "x" NOPE')


def test_nonzero_synonym_cost_rejected():
    with pytest.raises(NetParseError):
        semnet.load_net('node A "a"\nnode B "b"\nrel A synonym B cost 1.0')


def test_fixture_counts(net):
    assert len(net.nodes) == 7
    assert len(net.relations) == 4
    assert len(net.lexicon) == 17


def test_cone_isolated_node():
    net = semnet.load_net('node N "n"')
    assert semnet.ancestor_cone(net, "N") == {"N": 0.0}


def test_cone_chain_costs():
    text = 'node W "w"\nnode X "x"\nnode Y "y"\nrel W hypernym X cost 1.0\nrel X hypernym Y cost 1.0'
    net = semnet.load_net(text)
    assert semnet.ancestor_cone(net, "W") == {"W": 0.0, "X": 1.0, "Y": 2.0}


def test_cone_fixture_meronym(net):
    cone = semnet.ancestor_cone(net, "BUSINESS_UNIT")
    assert cone == {"BUSINESS_UNIT": 0.0, "ORG": 1.5}


def test_cone_unknown_node(net):
    with pytest.raises(KeyError):
        semnet.ancestor_cone(net, "NOPE")


def test_nca_self_unambiguous(net):
    assert semnet.nearest_common_ancestors(net, "cession", "cession") == {("TRANSFER", 0.0, 0.0)}


def test_nca_fixture_values(net):
    assert semnet.nearest_common_ancestors(net, "rachat", "cession") == {("TRANSFER", 1.0, 0.0)}
    assert semnet.nearest_common_ancestors(net, "société", "activité") == {("ORG", 0.0, 1.5)}


def test_nca_unknown_word(net):
    with pytest.raises(KeyError):
        semnet.nearest_common_ancestors(net, "rachat", "zorglub")


def test_proximity_fixture_values(net):
    assert semnet.proximity(net, "rachat", "reprise") == 0.0
    assert semnet.proximity(net, "cession", "reprise") == 1.0
    assert semnet.proximity(net, "société", "activité") == 1.5


def test_proximity_total_on_unknown_words(net):
    assert semnet.proximity(net, "zorglub", "cession") == UNRELATED
    assert semnet.proximity(net, "cession", "zorglub") == UNRELATED


def test_proximity_unrelated_pair(net):
    assert semnet.proximity(net, "cession", "société") == UNRELATED


def test_unrelated_fails_every_threshold(net):
    value = semnet.proximity(net, "cession", "société")
    for threshold in (0.0, 1.0, 10.0, 1e12):
        assert not related_under(value, threshold)
    assert math.isinf(value)


def test_identity_and_symmetry_on_fixture(net):
    words = sorted(net.lexicon)
    for w in words:
        assert semnet.proximity(net, w, w) == 0.0
    for a in words:
        for b in words:
            assert semnet.proximity(net, a, b) == semnet.proximity(net, b, a)


def test_cone_triangle_rule(net):
    for node in net.nodes:
        cone = semnet.ancestor_cone(net, node)
        for source, cost in cone.items():
            for target, edge_cost in net._out.get(source, ()):
                assert cone[target] <= cost + edge_cost + 1e-12


def test_random_nets_match_enumeration_oracle():
    rng = random.Random(20240511)
    for _ in range(200):
        net = random_net(rng)
        words = sorted(net.lexicon)
        for a in words:
            for b in words:
                got = semnet.nearest_common_ancestors(net, a, b)
                assert got == oracle_nca(net, a, b)
                assert semnet.proximity(net, a, b) == oracle_proximity(net, a, b)


def test_random_nets_identity_and_symmetry():
    rng = random.Random(7)
    for _ in range(50):
        net = random_net(rng)
        words = sorted(net.lexicon)
        for a in words:
            assert semnet.proximity(net, a, a) == 0.0
            for b in words:
                assert semnet.proximity(net, a, b) == semnet.proximity(net, b, a)
