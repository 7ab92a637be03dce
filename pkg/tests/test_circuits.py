"""Rectifier circuits: construction, validation, measures, evaluation,
path queries, serialization, and sampled verification.

Reachability claims are cross-checked against a brute-force DFS oracle
defined here.
"""

from __future__ import annotations

from math import comb

import pytest

from orkit import (
    BooleanMatrix,
    FormatError,
    RectifierCircuit,
    TooLargeError,
    brown_matrix,
    complement,
    depth3_complement_circuit,
    norm_matrix,
    pair_transform,
    random_matrix,
    read_circuit,
    sampled_verify,
    trivial_circuit,
    write_circuit,
)
from orkit.matrices import PairIndexer


def _brute_reachable(n: int, edges, src: int) -> set[int]:
    """Plain DFS reachability, independent of the circuit internals."""
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for w in adj.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _implemented_brute(c: RectifierCircuit) -> BooleanMatrix:
    """Implemented matrix recomputed by per-input DFS."""
    rows = [[0] * len(c.inputs) for _ in c.outputs]
    edges = c.edge_list()
    for j, src in enumerate(c.inputs):
        reach = _brute_reachable(c.node_count, edges, src)
        for i, dst in enumerate(c.outputs):
            if dst in reach:
                rows[i][j] = 1
    return BooleanMatrix.from_rows(rows)


# -- construction and validation --------------------------------------------


def test_single_edge_circuit():
    """One wire from the input to the output implements [[1]]."""
    c = RectifierCircuit(2, [(0, 1)], [0], [1])
    assert c.complexity == 1
    assert c.depth() == 1
    assert c.implemented_matrix() == BooleanMatrix.ones(1, 1)


def test_shared_node_is_zero_length_path():
    """A node serving as both input and output implements 1 with no edges."""
    c = RectifierCircuit(1, [], [0], [0])
    assert c.complexity == 0
    assert c.depth() == 0
    assert c.implemented_matrix() == BooleanMatrix.ones(1, 1)
    assert c.has_path(0, 0)


def test_disconnected_implements_zero():
    """Two isolated nodes implement [[0]]."""
    c = RectifierCircuit(2, [], [0], [1])
    assert c.implemented_matrix() == BooleanMatrix.zeros(1, 1)
    assert not c.has_path(0, 1)


def test_edges_are_canonically_sorted():
    """Edges are stored sorted by (from, to) regardless of input order."""
    c = RectifierCircuit(4, [(2, 3), (0, 1), (0, 3), (1, 2)], [0], [3])
    assert c.edge_list() == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_descending_ids_need_kahn_order():
    """Node ids need not be topological; evaluation still works."""
    c = RectifierCircuit(3, [(2, 1), (1, 0)], [2], [0])
    assert c.depth() == 2
    assert c.implemented_matrix() == BooleanMatrix.ones(1, 1)


def test_cycle_rejected():
    """A directed cycle is invalid."""
    with pytest.raises(ValueError):
        RectifierCircuit(2, [(0, 1), (1, 0)], [0], [1])


def test_self_loop_rejected():
    """A self-loop is invalid."""
    with pytest.raises(ValueError):
        RectifierCircuit(2, [(1, 1)], [0], [1])


def test_duplicate_edge_rejected():
    """The same (from, to) pair may appear only once."""
    with pytest.raises(ValueError):
        RectifierCircuit(3, [(0, 1), (0, 1)], [0], [1])


def test_out_of_range_endpoints_rejected():
    """Edge endpoints and port nodes must lie in [0, node_count)."""
    with pytest.raises(ValueError):
        RectifierCircuit(2, [(0, 2)], [0], [1])
    with pytest.raises(ValueError):
        RectifierCircuit(2, [(0, 1)], [0], [2])
    with pytest.raises(ValueError):
        RectifierCircuit(2, [(0, 1)], [-1], [1])


def test_duplicate_ports_rejected():
    """Input and output lists must be duplicate-free."""
    with pytest.raises(ValueError):
        RectifierCircuit(3, [(0, 1)], [0, 0], [1])
    with pytest.raises(ValueError):
        RectifierCircuit(3, [(0, 1)], [0], [1, 1])


# -- measures ---------------------------------------------------------------


def test_depth_chain_and_diamond():
    """Longest path counts edges: a 3-chain has depth 3, a diamond 2."""
    chain = RectifierCircuit(4, [(0, 1), (1, 2), (2, 3)], [0], [3])
    assert chain.depth() == 3
    diamond = RectifierCircuit(4, [(0, 1), (0, 2), (1, 3), (2, 3)], [0], [3])
    assert diamond.depth() == 2
    assert diamond.complexity == 4


def test_has_path_against_oracle():
    """has_path agrees with DFS reachability on random DAGs."""
    import random

    rnd = random.Random(998)
    for _ in range(60):
        n = rnd.randint(2, 15)
        perm = list(range(n))
        rnd.shuffle(perm)
        edges = [
            (perm[a], perm[b])
            for a in range(n)
            for b in range(a + 1, n)
            if rnd.random() < 0.3
        ]
        if not edges:
            continue
        c = RectifierCircuit(n, edges, [perm[0]], [perm[-1]])
        for src in range(n):
            reach = _brute_reachable(n, edges, src)
            for dst in range(n):
                assert c.has_path(src, dst) == (dst in reach)


def test_has_edge():
    """has_edge looks up exactly the stored pairs."""
    c = RectifierCircuit(4, [(0, 2), (1, 3)], [0, 1], [2, 3])
    assert c.has_edge(0, 2) and c.has_edge(1, 3)
    assert not c.has_edge(0, 3) and not c.has_edge(2, 0)


def test_implemented_matches_brute_on_random():
    """implemented_matrix equals per-input DFS on random circuits."""
    import random

    rnd = random.Random(31337)
    for _ in range(25):
        n = rnd.randint(4, 12)
        edges = [
            (a, b)
            for a in range(n)
            for b in range(a + 1, n)
            if rnd.random() < 0.25
        ]
        ins = sorted(rnd.sample(range(n), rnd.randint(1, n // 2)))
        outs = sorted(rnd.sample(range(n), rnd.randint(1, n // 2)))
        c = RectifierCircuit(n, edges, ins, outs)
        assert c.implemented_matrix() == _implemented_brute(c)


def test_implemented_matrix_cap():
    """More than 2^26 implied entries refuse to materialize."""
    k = 2**13
    c = RectifierCircuit(2 * k + 1, [], range(k + 1), range(k + 1, 2 * k + 1))
    with pytest.raises(TooLargeError):
        c.implemented_matrix()


def test_edges_array_is_read_only():
    """The exposed edge array cannot be mutated."""
    c = RectifierCircuit(2, [(0, 1)], [0], [1])
    with pytest.raises(ValueError):
        c.edges[0, 0] = 1


# -- trivial circuit --------------------------------------------------------


def test_trivial_circuit_identity():
    """One edge per 1-entry; implements A with complexity weight(A)."""
    a = BooleanMatrix.identity(3)
    c = trivial_circuit(a)
    assert c.complexity == 3
    assert c.depth() == 1
    assert c.implemented_matrix() == a


def test_trivial_circuit_zero_matrix():
    """The zero matrix needs no edges at all."""
    a = BooleanMatrix.zeros(2, 3)
    c = trivial_circuit(a)
    assert c.complexity == 0
    assert c.implemented_matrix() == a


def test_trivial_circuit_random():
    """Random matrices round-trip through their trivial circuits."""
    for seed in range(8):
        a = random_matrix(6, 9, 0.4, 700 + seed)
        c = trivial_circuit(a)
        assert c.complexity == a.weight()
        assert c.depth() <= 1
        assert c.implemented_matrix() == a


# -- depth-3 complement construction ----------------------------------------


def test_depth3_identity_example():
    """For A = I_3: Abar has weight 6, so the circuit has 4*3 + 6 = 18
    edges and implements the all-ones 3x3 matrix (T(I) = 0)."""
    a = BooleanMatrix.identity(3)
    c = depth3_complement_circuit(a)
    assert c.complexity == 4 * comb(3, 2) + 6 == 18
    assert c.depth() == 3
    assert c.implemented_matrix() == BooleanMatrix.ones(3, 3)


def test_depth3_all_ones_implements_zero():
    """For A = J the transform is all ones, so its complement is zero; the
    middle layer has no edges and the depth collapses to 1."""
    a = BooleanMatrix.ones(4, 4)
    c = depth3_complement_circuit(a)
    assert c.complexity == 4 * comb(4, 2)
    assert c.implemented_matrix() == BooleanMatrix.zeros(6, 6)
    assert c.depth() == 1


def test_depth3_matches_complement_of_transform_random():
    """The construction implements exactly complement(T(A))."""
    for seed in range(10):
        a = random_matrix(8, 8, 0.55, 800 + seed)
        c = depth3_complement_circuit(a)
        n = comb(8, 2)
        assert c.complexity == 4 * n + complement(a).weight()
        assert c.depth() <= 3
        assert c.implemented_matrix() == complement(pair_transform(a))


def test_depth3_brown_3_exact():
    """Full check on the p=3 construction, including the edge count."""
    a, _ = brown_matrix(3)
    c = depth3_complement_circuit(a)
    n = comb(27, 2)
    assert c.complexity == 4 * n + complement(a).weight() == 1971
    assert c.depth() == 3
    assert c.implemented_matrix() == complement(pair_transform(a))


def test_depth3_node_layout():
    """Ports sit at the documented id ranges: inputs first, outputs last."""
    a = BooleanMatrix.identity(3)
    c = depth3_complement_circuit(a)
    n, m = comb(3, 2), 3
    assert c.node_count == n + 2 * m + n
    assert c.inputs == tuple(range(n))
    assert c.outputs == tuple(range(n + 2 * m, n + 2 * m + n))


def test_depth3_requires_square_and_pairs():
    """Non-square and single-row inputs are rejected."""
    with pytest.raises(Exception):
        depth3_complement_circuit(random_matrix(3, 4, 0.5, 0))
    with pytest.raises(ValueError):
        depth3_complement_circuit(BooleanMatrix.ones(1, 1))


def test_depth3_sampled_verify_norm_family():
    """Sampled comparison against entrywise evaluation of the complement
    of the transform, on a mid-size instance."""
    a = norm_matrix(5, 2)
    c = depth3_complement_circuit(a)
    px = PairIndexer(a.rows)

    def oracle(i, j):
        i1, i2 = px.unrank(i)
        j1, j2 = px.unrank(j)
        full = (
            a.get(i1, j1) and a.get(i1, j2) and a.get(i2, j1) and a.get(i2, j2)
        )
        return 0 if full else 1

    res = sampled_verify(c, oracle, samples=20_000, seed=4)
    assert res.passed
    assert res.checked == 20_000


def test_depth3_sampled_verify_brown_7():
    """The p=7 instance is too large to materialize entrywise; 1e5 sampled
    entries against the defining formula all agree."""
    a, _ = brown_matrix(7)
    c = depth3_complement_circuit(a)
    bits = [a.row_bits(i) for i in range(a.rows)]
    px = PairIndexer(a.rows)

    def oracle(i, j):
        i1, i2 = px.unrank(i)
        j1, j2 = px.unrank(j)
        full = (
            bits[i1] >> j1 & 1 and bits[i1] >> j2 & 1
            and bits[i2] >> j1 & 1 and bits[i2] >> j2 & 1
        )
        return 0 if full else 1

    res = sampled_verify(c, oracle, samples=100_000, seed=0)
    assert res.passed
    assert res.checked == 100_000


# -- sampled verification ---------------------------------------------------


def test_sampled_verify_passes_on_trivial_circuit():
    """The trivial circuit of A agrees with A everywhere."""
    a = random_matrix(6, 6, 0.5, 55)
    c = trivial_circuit(a)
    res = sampled_verify(c, a.get, samples=2000, seed=9)
    assert res.passed
    assert res.counterexample is None


def test_sampled_verify_detects_mutation():
    """Deleting one wire is caught, and the counterexample names it."""
    a = random_matrix(4, 4, 0.7, 12)
    c = trivial_circuit(a)
    edges = c.edge_list()
    dropped = edges[5]
    c2 = RectifierCircuit(c.node_count, edges[:5] + edges[6:], c.inputs, c.outputs)
    res = sampled_verify(c2, a.get, samples=2000, seed=0)
    assert not res.passed
    i, j = res.counterexample
    # the dropped edge ran input j -> output (4 + i)
    assert (dropped[0], dropped[1]) == (c.inputs[j], c.outputs[i])
    assert res.checked <= 2000


def test_sampled_verify_is_deterministic():
    """Same seed, same sample trajectory and counterexample."""
    a = random_matrix(4, 4, 0.7, 12)
    edges = trivial_circuit(a).edge_list()
    c2 = RectifierCircuit(4 + 4, edges[:3] + edges[4:], range(4), range(4, 8))
    r1 = sampled_verify(c2, a.get, samples=500, seed=2)
    r2 = sampled_verify(c2, a.get, samples=500, seed=2)
    assert r1 == r2


# -- serialization ----------------------------------------------------------


def test_json_roundtrip_structural_and_bytes():
    """to_json_text emits one canonical line; from_json_text inverts it."""
    a = random_matrix(5, 5, 0.5, 60)
    c = depth3_complement_circuit(a)
    text = c.to_json_text()
    assert text.endswith("\n") and "\n" not in text[:-1]
    c2 = RectifierCircuit.from_json_text(text)
    assert c2 == c
    assert c2.to_json_text() == text


def test_json_field_order_and_version():
    """The serialized object carries version 1 and the port lists."""
    import json

    c = RectifierCircuit(2, [(0, 1)], [0], [1])
    obj = json.loads(c.to_json_text())
    assert obj["version"] == 1
    assert obj["nodes"] == 2
    assert obj["inputs"] == [0]
    assert obj["outputs"] == [1]
    assert obj["edges"] == [[0, 1]]


@pytest.mark.parametrize(
    "text",
    [
        "not json\n",
        "{}\n",
        '{"version":2,"nodes":1,"inputs":[0],"outputs":[0],"edges":[]}\n',
        '{"version":1,"nodes":1,"inputs":[0],"outputs":[0]}\n',
        '{"version":1,"nodes":2,"inputs":[0],"outputs":[1],"edges":[[0,1],[1,0]]}\n',
        '{"version":1,"nodes":2,"inputs":[5],"outputs":[1],"edges":[]}\n',
    ],
)
def test_from_json_rejects_malformed(text):
    """Bad JSON, wrong version, missing fields, and invalid graphs fail."""
    with pytest.raises(FormatError):
        RectifierCircuit.from_json_text(text)


def test_circuit_file_roundtrip(tmp_path):
    """write_circuit/read_circuit preserve the circuit and the bytes."""
    a, _ = brown_matrix(3)
    c = trivial_circuit(a)
    p1, p2 = tmp_path / "c1.json", tmp_path / "c2.json"
    write_circuit(c, p1)
    write_circuit(c, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert read_circuit(p1) == c


def test_dot_export():
    """DOT output is deterministic and mentions every edge and port shape."""
    c = RectifierCircuit(3, [(0, 1), (1, 2)], [0], [2])
    dot = c.to_dot()
    assert dot == c.to_dot()
    assert "digraph" in dot
    assert "n0 -> n1;" in dot and "n1 -> n2;" in dot
    assert "invtriangle" in dot  # inputs
    assert "doublecircle" in dot  # outputs


def test_dot_marks_shared_nodes():
    """A node that is both input and output gets its own shape."""
    c = RectifierCircuit(1, [], [0], [0])
    assert "Mdiamond" in c.to_dot()
