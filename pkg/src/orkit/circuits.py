"""Rectifier circuits as DAGs.

A circuit implements the matrix M with M[i,j] = 1 iff a directed path runs
from the j-th input node to the i-th output node; zero-length paths count,
so a node listed as both input j and output i contributes M[i,j] = 1.
Complexity is the edge count, depth the longest path.

Edges are held in one (E,2) int64 array sorted by (from, to); that is also
the canonical serialized order.  Builders emit node ids that are already in
topological order, which validation detects (every edge ascends) and uses
to skip the generic Kahn pass.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import FormatError, NonSquareError, TooLargeError
from .matrices import BooleanMatrix
from .rng import SplitMix64

_IMPLEMENT_CAP = 2**26


class RectifierCircuit:
    """Immutable DAG with ordered input and output node lists."""

    __slots__ = (
        "node_count", "inputs", "outputs",
        "_edges", "_topo", "_indptr", "_ckeys", "_rev", "_depth",
    )

    def __init__(self, node_count: int, edges, inputs, outputs):
        if node_count < 0:
            raise ValueError("node count must be non-negative")
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be (from, to) pairs")
        if arr.size and (arr.min() < 0 or arr.max() >= node_count):
            raise ValueError("edge endpoint outside [0, node_count)")
        if arr.size and (arr[:, 0] == arr[:, 1]).any():
            raise ValueError("self-loop edge; circuit must be acyclic")
        order = np.lexsort((arr[:, 1], arr[:, 0]))
        arr = arr[order]
        if arr.shape[0] > 1:
            dup = (np.diff(arr, axis=0) == 0).all(axis=1)
            if dup.any():
                k = int(np.nonzero(dup)[0][0])
                raise ValueError(f"duplicate edge {tuple(arr[k])}")
        arr.flags.writeable = False
        self.node_count = node_count
        self._edges = arr
        self.inputs = tuple(int(v) for v in inputs)
        self.outputs = tuple(int(v) for v in outputs)
        for name, nodes in (("input", self.inputs), ("output", self.outputs)):
            if len(set(nodes)) != len(nodes):
                raise ValueError(f"duplicate {name} node")
            for v in nodes:
                if not 0 <= v < node_count:
                    raise ValueError(f"{name} node {v} out of range")
        self._indptr = np.searchsorted(arr[:, 0], np.arange(node_count + 1))
        self._topo = self._toposort()
        self._ckeys = None
        self._rev = None
        self._depth = None

    def _toposort(self):
        """None when node ids are already topological, else an explicit order."""
        arr = self._edges
        if arr.shape[0] == 0 or (arr[:, 0] < arr[:, 1]).all():
            return None
        indeg = np.bincount(arr[:, 1], minlength=self.node_count)
        targets = arr[:, 1]
        order = []
        dq = deque(np.nonzero(indeg == 0)[0].tolist())
        indeg = indeg.tolist()
        indptr = self._indptr
        while dq:
            u = dq.popleft()
            order.append(u)
            for w in targets[indptr[u] : indptr[u + 1]].tolist():
                indeg[w] -= 1
                if indeg[w] == 0:
                    dq.append(w)
        if len(order) != self.node_count:
            raise ValueError("circuit contains a cycle")
        return order

    # -- measures ----------------------------------------------------------

    @property
    def complexity(self) -> int:
        """Number of edges."""
        return int(self._edges.shape[0])

    @property
    def edges(self):
        """Edges as a read-only (E,2) array, sorted by (from, to)."""
        return self._edges

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self._edges.tolist()]

    def depth(self) -> int:
        """Longest oriented path, in edges; 0 for an edgeless circuit."""
        if self._depth is not None:
            return self._depth
        if self._edges.shape[0] == 0:
            self._depth = 0
            return 0
        dist = [0] * self.node_count
        targets = self._edges[:, 1].tolist()
        indptr = self._indptr.tolist()
        order = range(self.node_count) if self._topo is None else self._topo
        for u in order:
            du = dist[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                w = targets[k]
                if dist[w] < du:
                    dist[w] = du
        self._depth = max(dist)
        return self._depth

    def implemented_matrix(self) -> BooleanMatrix:
        """The matrix this circuit implements, via bitset reachability.

        Entry (i, j) is 1 iff a path (length >= 0) runs from input j to
        output i.  Refuses to materialize more than 2^26 entries.
        """
        n_in, n_out = len(self.inputs), len(self.outputs)
        if n_in == 0 or n_out == 0:
            raise ValueError("circuit needs at least one input and one output")
        if n_in * n_out > _IMPLEMENT_CAP:
            raise TooLargeError(
                f"{n_out}x{n_in} implemented matrix exceeds the 2^26-entry cap; "
                "use sampled_verify"
            )
        reach = [0] * self.node_count
        for j, node in enumerate(self.inputs):
            reach[node] |= 1 << j
        targets = self._edges[:, 1].tolist()
        indptr = self._indptr.tolist()
        order = range(self.node_count) if self._topo is None else self._topo
        for u in order:
            r = reach[u]
            if r:
                for k in range(indptr[u], indptr[u + 1]):
                    w = targets[k]
                    reach[w] |= r
        return BooleanMatrix(n_out, n_in, [reach[node] for node in self.outputs])

    # -- path queries ------------------------------------------------------

    def _edge_keys(self):
        if self._ckeys is None:
            keys = self._edges[:, 0] * np.int64(self.node_count) + self._edges[:, 1]
            self._ckeys = keys  # already sorted: edges are (from, to) lex-sorted
        return self._ckeys

    def has_edge(self, u: int, v: int) -> bool:
        keys = self._edge_keys()
        k = u * self.node_count + v
        i = int(np.searchsorted(keys, k))
        return i < keys.shape[0] and int(keys[i]) == k

    def has_path(self, src: int, dst: int) -> bool:
        """Directed path src -> dst (length >= 0).

        Bidirectional layered search bounded by the circuit depth.  With
        forward BFS layers explored to depth f and backward layers to depth
        b, a shortest path of length <= f + b would already have produced a
        node common to both explored sets, and one of length f + b + 1 an
        edge between the two current frontiers; once f + b reaches the
        circuit depth, absence is certain.
        """
        if src == dst:
            return True
        limit = self.depth()
        targets = self._edges[:, 1]
        indptr = self._indptr
        fcum, bcum = {src}, {dst}
        ffront, bfront = {src}, {dst}
        f = b = 0
        while ffront and bfront:
            if f + b >= limit:
                return False
            if f + b + 1 >= limit and len(ffront) * len(bfront) <= 1024:
                return any(self.has_edge(u, v) for u in ffront for v in bfront)
            if len(ffront) <= len(bfront):
                nxt = set()
                for u in ffront:
                    for w in targets[indptr[u] : indptr[u + 1]].tolist():
                        if w in bcum:
                            return True
                        if w not in fcum:
                            nxt.add(w)
                fcum |= nxt
                ffront = nxt
                f += 1
            else:
                rsources, rindptr = self._reverse_adjacency()
                nxt = set()
                for u in bfront:
                    for w in rsources[rindptr[u] : rindptr[u + 1]].tolist():
                        if w in fcum:
                            return True
                        if w not in bcum:
                            nxt.add(w)
                bcum |= nxt
                bfront = nxt
                b += 1
        return False

    def _reverse_adjacency(self):
        if self._rev is None:
            arr = self._edges
            order = np.lexsort((arr[:, 0], arr[:, 1]))
            by_target = arr[order]
            indptr = np.searchsorted(by_target[:, 1], np.arange(self.node_count + 1))
            self._rev = (by_target[:, 0], indptr)
        return self._rev

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RectifierCircuit)
            and self.node_count == other.node_count
            and self.inputs == other.inputs
            and self.outputs == other.outputs
            and self._edges.shape == other._edges.shape
            and bool((self._edges == other._edges).all())
        )

    def __repr__(self) -> str:
        return (
            f"RectifierCircuit({self.node_count} nodes, {self.complexity} edges, "
            f"{len(self.inputs)} in, {len(self.outputs)} out)"
        )

    # -- serialization -----------------------------------------------------

    def to_json_text(self) -> str:
        obj = {
            "version": 1,
            "nodes": self.node_count,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "edges": self._edges.tolist(),
        }
        return json.dumps(obj, separators=(",", ":")) + "\n"

    @classmethod
    def from_json_text(cls, text: str) -> "RectifierCircuit":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"bad circuit file: {e}") from e
        if not isinstance(obj, dict):
            raise FormatError("circuit file must hold a JSON object")
        for key in ("version", "nodes", "inputs", "outputs", "edges"):
            if key not in obj:
                raise FormatError(f"circuit file missing field {key!r}")
        if obj["version"] != 1:
            raise FormatError(f"unsupported circuit file version {obj['version']!r}")
        if not isinstance(obj["nodes"], int):
            raise FormatError("field 'nodes' must be an integer")
        try:
            return cls(obj["nodes"], obj["edges"], obj["inputs"], obj["outputs"])
        except (ValueError, TypeError) as e:
            raise FormatError(f"invalid circuit: {e}") from e

    def to_dot(self) -> str:
        """Graphviz export (one-way, for visualization only)."""
        in_pos = {v: j for j, v in enumerate(self.inputs)}
        out_pos = {v: i for i, v in enumerate(self.outputs)}
        lines = ["digraph rectifier {", "  rankdir=LR;"]
        for v in range(self.node_count):
            tags = []
            if v in in_pos:
                tags.append(f"in{in_pos[v]}")
            if v in out_pos:
                tags.append(f"out{out_pos[v]}")
            if not tags:
                continue
            if v in in_pos and v in out_pos:
                shape = "Mdiamond"
            elif v in in_pos:
                shape = "invtriangle"
            else:
                shape = "doublecircle"
            label = f"{v} ({'/'.join(tags)})"
            lines.append(f'  n{v} [shape={shape}, label="{label}"];')
        for u, w in self._edges.tolist():
            lines.append(f"  n{u} -> n{w};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def read_circuit(path) -> RectifierCircuit:
    try:
        text = open(path, "rb").read().decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"circuit file is not UTF-8: {e}") from e
    return RectifierCircuit.from_json_text(text)


def write_circuit(c: RectifierCircuit, path) -> None:
    with open(path, "wb") as fh:
        fh.write(c.to_json_text().encode("utf-8"))


# -- builders --------------------------------------------------------------


def trivial_circuit(a: BooleanMatrix) -> RectifierCircuit:
    """Depth-1 circuit: one edge per 1-entry; complexity = weight(a)."""
    cols, rows = a.cols, a.rows
    i_idx, j_idx = np.nonzero(a.to_numpy())
    edges = np.stack([j_idx, cols + i_idx], axis=1)
    return RectifierCircuit(
        cols + rows,
        edges,
        inputs=range(cols),
        outputs=range(cols, cols + rows),
    )


def depth3_complement_circuit(a: BooleanMatrix) -> RectifierCircuit:
    """The 3-layer circuit implementing complement(pair_transform(a)).

    Inputs are column pairs of `a`, outputs are row pairs; two inner layers
    hold one node per column and one per row of `a`.  An input pair fans
    into its two columns, column i feeds row j whenever a[j,i] = 0, and row
    j fans into every output pair containing it.  A path input-a to
    output-b therefore exists iff the a x b submatrix of `a` has a zero,
    i.e. iff the pair-transform entry is 0.  Complexity is exactly
    4*C(m,2) + weight(complement(a)).
    """
    if a.rows != a.cols:
        raise NonSquareError(f"need a square matrix, got {a.rows}x{a.cols}")
    m = a.rows
    if m < 2:
        raise ValueError("need m >= 2")
    n = comb(m, 2)
    first, second = np.triu_indices(m, 1)  # pair lists in rank order
    ranks = np.arange(n)
    layer2 = n
    layer3 = n + m
    out0 = n + 2 * m
    zj, zi = np.nonzero(a.to_numpy() == 0)  # zeros of a: row j, column i
    edges = np.concatenate(
        [
            np.stack([ranks, layer2 + first], axis=1),
            np.stack([ranks, layer2 + second], axis=1),
            np.stack([layer2 + zi, layer3 + zj], axis=1),
            np.stack([layer3 + first, out0 + ranks], axis=1),
            np.stack([layer3 + second, out0 + ranks], axis=1),
        ]
    )
    return RectifierCircuit(
        out0 + n,
        edges,
        inputs=range(n),
        outputs=range(out0, out0 + n),
    )


# -- randomized verification ----------------------------------------------


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of sampled circuit-vs-oracle comparison."""

    passed: bool
    counterexample: tuple[int, int] | None  # (output index i, input index j)
    checked: int


def sampled_verify(c: RectifierCircuit, oracle, samples: int, seed: int) -> VerifyResult:
    """Compare path existence against oracle(i, j) on random (output, input) pairs.

    Per sample the output index is drawn first, then the input index.
    Deterministic per seed; a mismatch stops the run and reports the pair.
    """
    rng = SplitMix64(seed)
    n_out, n_in = len(c.outputs), len(c.inputs)
    if n_out == 0 or n_in == 0:
        raise ValueError("circuit needs at least one input and one output")
    for done in range(samples):
        i = rng.below(n_out)
        j = rng.below(n_in)
        reached = c.has_path(c.inputs[j], c.outputs[i])
        if reached != bool(oracle(i, j)):
            return VerifyResult(False, (i, j), done + 1)
    return VerifyResult(True, None, samples)
