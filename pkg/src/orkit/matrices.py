"""Boolean matrices, the explicit constructions, and rectangle combinatorics.

A BooleanMatrix keeps one Python int per row and uses it as a bitset, so
row intersections are single AND operations and popcounts are cheap even at
a couple thousand columns.  Everything downstream (pair transform,
2-rectangle statistics, k-freeness search, the Brown and norm families)
works on that representation; numpy enters only for the dense counting
kernel and for the construction of sphere tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import (
    BudgetExceededError,
    CountOverflowError,
    FieldOrderError,
    FormatError,
    NonSquareError,
    NoFreeDeltaError,
    NotPrimeError,
    TooLargeError,
)
from .finfield import is_prime, make_field
from .rng import SplitMix64

_COUNT_CAP = 2**63
_BROWN_SIZE_CAP = 2**20
_NORM_ORDER_CAP = 2**12
_MATERIALIZE_CAP = 2**16
_DENSE_COUNT_MAX_COLS = 4096


def _iter_bits(x: int):
    """Indices of set bits, ascending."""
    while x:
        lsb = x & -x
        yield lsb.bit_length() - 1
        x ^= lsb


class BooleanMatrix:
    """Immutable dense 0/1 matrix; bit j of row i is the entry (i, j)."""

    __slots__ = ("rows", "cols", "_bits")

    def __init__(self, rows: int, cols: int, bits):
        if rows < 1 or cols < 1:
            raise ValueError("matrix dimensions must be at least 1x1")
        bits = tuple(bits)
        if len(bits) != rows:
            raise ValueError(f"expected {rows} row bitsets, got {len(bits)}")
        limit = 1 << cols
        for i, b in enumerate(bits):
            if not 0 <= b < limit:
                raise ValueError(f"row {i} has bits outside the {cols} columns")
        self.rows = rows
        self.cols = cols
        self._bits = bits

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BooleanMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def ones(cls, rows: int, cols: int) -> "BooleanMatrix":
        full = (1 << cols) - 1
        return cls(rows, cols, (full,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BooleanMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_rows(cls, rows_of_entries) -> "BooleanMatrix":
        bits = []
        width = None
        for row in rows_of_entries:
            row = list(row)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError("ragged rows")
            b = 0
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise ValueError(f"entry {v!r} is not 0/1")
                if v:
                    b |= 1 << j
            bits.append(b)
        if not bits or width == 0:
            raise ValueError("matrix dimensions must be at least 1x1")
        return cls(len(bits), width, bits)

    @classmethod
    def from_numpy(cls, arr) -> "BooleanMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0/1")
        packed = np.packbits(arr.astype(np.uint8), axis=1, bitorder="little")
        bits = [int.from_bytes(row.tobytes(), "little") for row in packed]
        return cls(arr.shape[0], arr.shape[1], bits)

    # -- basic queries -----------------------------------------------------

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
        return (self._bits[i] >> j) & 1

    def row_bits(self, i: int) -> int:
        return self._bits[i]

    def weight(self) -> int:
        return sum(b.bit_count() for b in self._bits)

    def row_weights(self) -> tuple[int, ...]:
        return tuple(b.bit_count() for b in self._bits)

    def complement(self) -> "BooleanMatrix":
        full = (1 << self.cols) - 1
        return BooleanMatrix(self.rows, self.cols, tuple(b ^ full for b in self._bits))

    def transpose(self) -> "BooleanMatrix":
        out = [0] * self.cols
        for i, b in enumerate(self._bits):
            for j in _iter_bits(b):
                out[j] |= 1 << i
        return BooleanMatrix(self.cols, self.rows, out)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self.transpose()._bits == self._bits

    def to_numpy(self):
        nbytes = (self.cols + 7) // 8
        data = b"".join(b.to_bytes(nbytes, "little") for b in self._bits)
        packed = np.frombuffer(data, dtype=np.uint8).reshape(self.rows, nbytes)
        return np.unpackbits(packed, axis=1, bitorder="little")[:, : self.cols]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BooleanMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._bits == other._bits
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._bits))

    def __repr__(self) -> str:
        return f"BooleanMatrix({self.rows}x{self.cols}, weight {self.weight()})"

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text form: `<rows> <cols>` then one 0/1 line per row, LF-terminated."""
        lines = [f"{self.rows} {self.cols}"]
        for b in self._bits:
            lines.append(format(b, f"0{self.cols}b")[::-1])
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BooleanMatrix":
        if "\r" in text:
            raise FormatError("matrix text must use LF line endings")
        if not text.endswith("\n"):
            raise FormatError("matrix text must end with a newline")
        lines = text[:-1].split("\n")
        header = lines[0].split(" ")
        if len(header) != 2 or not all(h.isdigit() for h in header):
            raise FormatError(f"bad header line {lines[0]!r}")
        rows, cols = int(header[0]), int(header[1])
        if rows < 1 or cols < 1:
            raise FormatError("matrix dimensions must be at least 1x1")
        if len(lines) != rows + 1:
            raise FormatError(f"expected {rows} data lines, found {len(lines) - 1}")
        bits = []
        for i, line in enumerate(lines[1:]):
            if len(line) != cols or set(line) - {"0", "1"}:
                raise FormatError(f"row {i} is not {cols} characters of 0/1")
            bits.append(int(line[::-1], 2) if "1" in line else 0)
        return cls(rows, cols, bits)


def weight(a: BooleanMatrix) -> int:
    return a.weight()


def complement(a: BooleanMatrix) -> BooleanMatrix:
    return a.complement()


def read_matrix(path) -> BooleanMatrix:
    """Load a matrix from the text format; strict, byte-reversible."""
    try:
        text = open(path, "rb").read().decode("ascii")
    except UnicodeDecodeError as e:
        raise FormatError(f"matrix file is not ASCII: {e}") from e
    return BooleanMatrix.from_text(text)


def write_matrix(a: BooleanMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(a.to_text().encode("ascii"))


class PairIndexer:
    """Bijection between 2-subsets {i<j} of [m] and ranks 0..C(m,2)-1, lexicographic."""

    __slots__ = ("m", "size", "_offsets")

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("ground-set size must be non-negative")
        self.m = m
        self.size = comb(m, 2)
        # _offsets[i] = rank of pair (i, i+1)
        self._offsets = [0] * max(m - 1, 0)
        acc = 0
        for i in range(m - 1):
            self._offsets[i] = acc
            acc += m - 1 - i

    def rank(self, i: int, j: int) -> int:
        if not 0 <= i < j < self.m:
            raise ValueError(f"({i},{j}) is not an increasing pair in [{self.m}]")
        return self._offsets[i] + (j - i - 1)

    def unrank(self, r: int) -> tuple[int, int]:
        if not 0 <= r < self.size:
            raise ValueError(f"rank {r} out of range")
        from bisect import bisect_right

        i = bisect_right(self._offsets, r) - 1
        return i, r - self._offsets[i] + i + 1

    def pairs(self):
        """All pairs in rank order."""
        for i in range(self.m):
            for j in range(i + 1, self.m):
                yield i, j


@dataclass(frozen=True)
class RectangleWitness:
    """An all-ones submatrix, given by sorted row and column index tuples."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def verify(self, a: BooleanMatrix) -> bool:
        """Re-check that the witnessed submatrix really is all-ones in `a`."""
        mask = 0
        for j in self.cols:
            mask |= 1 << j
        return all(a.row_bits(i) & mask == mask for i in self.rows)


@dataclass(frozen=True)
class KFreeness:
    """Outcome of is_k_free: truthy iff free; otherwise carries a witness."""

    free: bool
    witness: RectangleWitness | None

    def __bool__(self) -> bool:
        return self.free


@dataclass
class RectangleStats:
    """Sigma / 2-rectangle bookkeeping from the covering-incidence count.

    sigma = sum_i C(a_i,2) = sum_u b_u, where a_i are row weights and b_u is
    the number of rows covering the column pair u.  two_rectangles =
    sum_u C(b_u,2).  pair_cover_counts maps u -> b_u and is only populated
    when requested (it can be large).
    """

    sigma: int
    two_rectangles: int
    row_weights: tuple[int, ...]
    pair_cover_counts: dict[tuple[int, int], int] | None = None


def _check_counter(value: int, what: str) -> int:
    if value >= _COUNT_CAP:
        raise CountOverflowError(f"{what} = {value} exceeds the 63-bit counter range")
    return value


def count_2_rectangles(a: BooleanMatrix, *, pair_counts: bool = False) -> RectangleStats:
    """Exact sigma and 2-rectangle count of `a`.

    Narrow matrices go through an integer Gram-matrix kernel (J = A^T A gives
    every b_u at once); wide ones fall back to sparse per-row accumulation of
    column pairs.  Both routes are exact and cross-check sigma against the
    row-weight formula.
    """
    rw = a.row_weights()
    sigma_rows = sum(w * (w - 1) // 2 for w in rw)
    if a.cols <= _DENSE_COUNT_MAX_COLS:
        arr = a.to_numpy().astype(np.float64)
        gram = (arr.T @ arr).astype(np.int64)
        iu = np.triu_indices(a.cols, 1)
        b = gram[iu]
        sigma_pairs = int(b.sum(dtype=np.int64))
        two = int((b * (b - 1) // 2).sum(dtype=np.int64))
        counts = None
        if pair_counts:
            nz = b > 0
            counts = {
                (int(i), int(j)): int(v)
                for i, j, v in zip(iu[0][nz], iu[1][nz], b[nz])
            }
    else:
        acc: dict[tuple[int, int], int] = {}
        for bitsrow in a._bits:
            idxs = list(_iter_bits(bitsrow))
            for u in combinations(idxs, 2):
                acc[u] = acc.get(u, 0) + 1
        sigma_pairs = sum(acc.values())
        two = sum(v * (v - 1) // 2 for v in acc.values())
        counts = dict(sorted(acc.items())) if pair_counts else None
    if sigma_pairs != sigma_rows:
        raise AssertionError(
            f"sigma mismatch: row formula {sigma_rows}, pair accumulation {sigma_pairs}"
        )
    _check_counter(sigma_rows, "sigma")
    _check_counter(two, "two_rectangles")
    return RectangleStats(sigma_rows, two, rw, counts)


def pair_transform(a: BooleanMatrix, *, stats_only: bool = False):
    """B with rows/cols indexed by row/column pairs of `a`; B[b,u] = 1 iff the
    2x2 submatrix of `a` at rows b, columns u is all-ones.

    With stats_only=True nothing is materialized and the RectangleStats of
    `a` are returned instead (weight(B) = two_rectangles either way).
    """
    if stats_only:
        return count_2_rectangles(a)
    if a.rows != a.cols:
        raise NonSquareError(f"pair transform needs a square matrix, got {a.rows}x{a.cols}")
    m = a.rows
    if m < 2:
        raise ValueError("pair transform needs m >= 2")
    n = comb(m, 2)
    if n > _MATERIALIZE_CAP:
        raise TooLargeError(
            f"B would be {n}x{n} (C({m},2) > {_MATERIALIZE_CAP}); use stats_only"
        )
    indexer = PairIndexer(m)
    offsets = indexer._offsets
    out = []
    for i1 in range(m):
        r1 = a._bits[i1]
        for i2 in range(i1 + 1, m):
            x = r1 & a._bits[i2]
            b = 0
            if x.bit_count() >= 2:
                idxs = list(_iter_bits(x))
                for p in range(len(idxs) - 1):
                    j1 = idxs[p]
                    base = offsets[j1] - j1 - 1
                    for j2 in idxs[p + 1 :]:
                        b |= 1 << (base + j2)
            out.append(b)
    return BooleanMatrix(n, n, out)


def is_k_free(
    a: BooleanMatrix,
    k: int,
    *,
    budget: int | None = None,
    through_row: int | None = None,
) -> KFreeness:
    """Search for a k-rectangle (k x k all-ones submatrix).

    Returns a truthy KFreeness when none exists, otherwise the
    lexicographically first witness.  The search walks row subsets in
    ascending order keeping the AND of the chosen rows, pruning branches
    whose intersection drops below k columns.  `budget` caps the number of
    row-intersection evaluations; exhausting it raises BudgetExceededError
    (an "unknown", never a wrong answer).

    `through_row` restricts the search to rectangles using that row.  For
    translation-symmetric matrices (both constructions here satisfy
    A[x+t, y+t] = A[x, y]) any rectangle shifts onto one through row 0, so
    through_row=0 decides freeness at a fraction of the cost.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    bits = a._bits
    if through_row is not None and not 0 <= through_row < a.rows:
        raise ValueError(f"through_row {through_row} out of range")

    if k == 2 and through_row is None:
        return _is_2_free(a, budget)

    spent = 0

    def charge():
        nonlocal spent
        spent += 1
        if budget is not None and spent > budget:
            raise BudgetExceededError(budget)

    def extend(chosen: list[int], acc: int, cand: list[int]):
        if len(chosen) == k:
            cols = []
            for j in _iter_bits(acc):
                cols.append(j)
                if len(cols) == k:
                    break
            return RectangleWitness(tuple(sorted(chosen)), tuple(cols))
        for pos, r in enumerate(cand):
            charge()
            nxt = acc & bits[r]
            if nxt.bit_count() >= k:
                chosen.append(r)
                w = extend(chosen, nxt, cand[pos + 1 :])
                if w is not None:
                    return w
                chosen.pop()
        return None

    if through_row is None:
        order = range(a.rows)
        for r0 in order:
            charge()
            if bits[r0].bit_count() >= k:
                w = extend([r0], bits[r0], list(range(r0 + 1, a.rows)))
                if w is not None:
                    return KFreeness(False, w)
    else:
        r0 = through_row
        charge()
        if bits[r0].bit_count() >= k:
            cand = [r for r in range(a.rows) if r != r0]
            w = extend([r0], bits[r0], cand)
            if w is not None:
                return KFreeness(False, w)
    return KFreeness(True, None)


def _is_2_free(a: BooleanMatrix, budget: int | None) -> KFreeness:
    """2-freeness in O(sigma): scan column pairs, remembering first covering row."""
    first: dict[tuple[int, int], int] = {}
    spent = 0
    best_i1 = None
    for i, bitsrow in enumerate(a._bits):
        idxs = list(_iter_bits(bitsrow))
        for u in combinations(idxs, 2):
            spent += 1
            if budget is not None and spent > budget:
                raise BudgetExceededError(budget)
            prev = first.get(u)
            if prev is None:
                first[u] = i
            elif best_i1 is None or prev < best_i1:
                best_i1 = prev
    if best_i1 is None:
        return KFreeness(True, None)
    # the minimal first row of any doubly-covered pair is the lex-least i1;
    # its lex-least partner is the next row sharing two columns with it
    r1 = a._bits[best_i1]
    for i2 in range(best_i1 + 1, a.rows):
        x = r1 & a._bits[i2]
        if x.bit_count() >= 2:
            cols = []
            for j in _iter_bits(x):
                cols.append(j)
                if len(cols) == 2:
                    break
            return KFreeness(False, RectangleWitness((best_i1, i2), tuple(cols)))
    raise AssertionError("collision recorded but no partner row found")


# -- explicit families -----------------------------------------------------


def _brown_sphere_table(p: int):
    """Vector digits and the size of every sphere {z in F_p^3 : sum z_i^2 = d}."""
    idx = np.arange(p**3)
    digits = np.stack([idx // (p * p), (idx // p) % p, idx % p], axis=1)
    sq = (np.arange(p) ** 2) % p
    vals = sq[digits].sum(axis=1) % p
    sizes = np.bincount(vals, minlength=p)
    return digits, vals, sizes


def _brown_rows(p: int, digits, vals, delta: int) -> list[int]:
    sphere = digits[vals == delta]
    rows = []
    shift = np.array([p * p, p, 1])
    for x0 in range(p):
        for x1 in range(p):
            for x2 in range(p):
                y = (sphere + (x0, x1, x2)) % p
                b = 0
                for t in (y @ shift).tolist():
                    b |= 1 << t
                rows.append(b)
    return rows


def brown_matrix(p: int, delta: int | None = None) -> tuple[BooleanMatrix, int]:
    """Distance graph on F_p^3: A[x,y] = 1 iff sum (x_i - y_i)^2 = delta (mod p).

    Rows and columns are indexed by vectors in lexicographic digit order.
    When delta is not given, the nonzero residue with the largest sphere
    size among those whose matrix passes a 3-freeness search is chosen,
    ties broken by the smaller residue.  The matrix is symmetric with a
    zero diagonal, and A[x,y] depends only on y - x, so the freeness search
    may be restricted to rectangles through row 0.
    """
    if not is_prime(p) or p == 2:
        raise NotPrimeError(f"p must be an odd prime, got {p}")
    m = p**3
    if m > _BROWN_SIZE_CAP:
        raise FieldOrderError(f"p^3 = {m} exceeds the size cap {_BROWN_SIZE_CAP}")
    digits, vals, sizes = _brown_sphere_table(p)
    if delta is not None:
        if not 1 <= delta < p:
            raise ValueError(f"delta must be a nonzero residue mod {p}")
        return BooleanMatrix(m, m, _brown_rows(p, digits, vals, delta)), delta
    for d in sorted(range(1, p), key=lambda d: (-int(sizes[d]), d)):
        rows = _brown_rows(p, digits, vals, d)
        a = BooleanMatrix(m, m, rows)
        if is_k_free(a, 3, through_row=0):
            return a, d
    raise NoFreeDeltaError(f"no residue gives a 3-free matrix at p={p}")


def norm_matrix(q: int, t: int) -> BooleanMatrix:
    """Norm graph on F_{q^t}: A[x,y] = 1 iff N(x+y) = 1, N the norm to F_q.

    Rows and columns are indexed by field elements in coefficient-lex order.
    Every row has weight (q^t-1)/(q-1): the map y -> x+y is a bijection onto
    the norm-one set.
    """
    if not is_prime(q):
        raise NotPrimeError(f"q must be prime, got {q}")
    if t < 2:
        raise ValueError("t must be at least 2")
    m = q**t
    if m > _NORM_ORDER_CAP:
        raise FieldOrderError(f"q^t = {m} exceeds the size cap {_NORM_ORDER_CAP}")
    field = make_field(q, t)
    one = field.one
    targets = [z.coeffs for z in field.elements() if field.norm(z) == one]
    rows = []
    for x in field.elements():
        xc = x.coeffs
        b = 0
        for zc in targets:
            # y = z - x, so that x + y lands on the norm-one element z
            idx = 0
            for zi, xi in zip(zc, xc):
                idx = idx * q + (zi - xi) % q
            b |= 1 << idx
        rows.append(b)
    return BooleanMatrix(m, m, rows)


# -- randomized instances --------------------------------------------------


def _random_bits(rows: int, cols: int, density: float, rng: SplitMix64) -> list[int]:
    out = []
    for _ in range(rows):
        b = 0
        for j in range(cols):
            if rng.chance(density):
                b |= 1 << j
        out.append(b)
    return out


def random_matrix(rows: int, cols: int, density: float, seed: int) -> BooleanMatrix:
    """IID Bernoulli(density) entries, deterministic per seed (row-major draws)."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = SplitMix64(seed)
    return BooleanMatrix(rows, cols, _random_bits(rows, cols, density, rng))


def random_k_free(rows: int, cols: int, density: float, k: int, seed: int) -> BooleanMatrix:
    """Random matrix repaired to k-freeness.

    While a k-rectangle exists, one uniformly random cell of the witness is
    cleared; the weight strictly decreases, so this terminates.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = SplitMix64(seed)
    bits = _random_bits(rows, cols, density, rng)
    while True:
        a = BooleanMatrix(rows, cols, bits)
        res = is_k_free(a, k)
        if res.free:
            return a
        w = res.witness
        cell = rng.below(k * k)
        bits[w.rows[cell // k]] &= ~(1 << w.cols[cell % k])


# -- spot checking the pair transform at scale -----------------------------


@dataclass(frozen=True)
class SpotCheckResult:
    """Outcome of randomized 2-freeness spot checks on an implicit B."""

    passed: bool
    witness: RectangleWitness | None
    samples: int


def spot_check_pair_transform_2_free(
    a: BooleanMatrix, samples: int, seed: int
) -> SpotCheckResult:
    """Sample 2x2 submatrices of B = pair_transform(a) and test for all-ones.

    B is never materialized: entry B[{i1,i2},{j1,j2}] is the AND of four
    entries of `a`.  A failure returns the witness in B coordinates.
    """
    if a.rows != a.cols:
        raise NonSquareError("spot check needs a square matrix")
    m = a.rows
    if m < 3:
        raise ValueError("need m >= 3 for two distinct pairs")
    rng = SplitMix64(seed)
    bits = a._bits
    indexer = PairIndexer(m)

    def entry(rp, cp):
        x = bits[rp[0]] & bits[rp[1]]
        return (x >> cp[0]) & (x >> cp[1]) & 1

    for done in range(samples):
        b1 = rng.distinct_pair(m)
        while True:
            b2 = rng.distinct_pair(m)
            if b2 != b1:
                break
        a1 = rng.distinct_pair(m)
        while True:
            a2 = rng.distinct_pair(m)
            if a2 != a1:
                break
        if entry(b1, a1) and entry(b1, a2) and entry(b2, a1) and entry(b2, a2):
            rows = tuple(sorted((indexer.rank(*b1), indexer.rank(*b2))))
            cols = tuple(sorted((indexer.rank(*a1), indexer.rank(*a2))))
            return SpotCheckResult(False, RectangleWitness(rows, cols), done + 1)
    return SpotCheckResult(True, None, samples)
