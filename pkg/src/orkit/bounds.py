"""Lower bounds, certificates, and the separation report pipeline.

Three layers live here: the K-freeness lower bound OR(A) >= |A|/K^2 with
its exactness case for 2-free matrices, an exact minimum-cost rectangle
cover solver characterizing depth-2 complexity, and the report generator
that tabulates upper/lower complexity bounds for the complement pairs
produced by the explicit families.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb, factorial

from .circuits import depth3_complement_circuit
from .errors import NotKFreeError
from .matrices import (
    BooleanMatrix,
    brown_matrix,
    count_2_rectangles,
    is_k_free,
    norm_matrix,
    pair_transform,
    spot_check_pair_transform_2_free,
    _iter_bits,
)


@dataclass(frozen=True)
class LowerBoundCertificate:
    """OR(A) >= bound, justified by verified K-freeness.

    For K = 2 the bound is exact: a 2-free matrix has OR(A) = OR_2(A) =
    weight(A), recorded in exact_or.
    """

    k: int
    weight: int
    bound: int
    freeness_verified: bool
    exact_for_2_free: bool
    exact_or: int | None

    def __post_init__(self):
        assert self.bound == -(-self.weight // (self.k * self.k))


def nechiporuk_lower(
    a: BooleanMatrix,
    k: int,
    *,
    budget: int | None = None,
    through_row: int | None = None,
) -> LowerBoundCertificate:
    """Certificate OR(a) >= ceil(weight/k^2), verifying k-freeness first.

    Raises NotKFreeError (witness attached) when the matrix is not k-free,
    and propagates BudgetExceededError from the search.  through_row is the
    symmetry shortcut documented on is_k_free; use it only on matrices
    where every rectangle shifts onto that row.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    res = is_k_free(a, k, budget=budget, through_row=through_row)
    if not res.free:
        raise NotKFreeError(k, res.witness)
    w = a.weight()
    bound = -(-w // (k * k))
    exact = k == 2
    return LowerBoundCertificate(k, w, bound, True, exact, w if exact else None)


# -- exact depth-2 complexity ----------------------------------------------


@dataclass(frozen=True)
class Depth2Cover:
    """A depth-<=2 rectifier circuit in cover form.

    Each rectangle (rowSet, colSet) is a middle node wired from the columns
    and into the rows, costing len(rows)+len(cols) edges; each direct wire
    costs one edge.  Together they must cover the 1-set of the target
    matrix exactly.
    """

    rectangles: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    wires: tuple[tuple[int, int], ...]

    @property
    def cost(self) -> int:
        return sum(len(r) + len(c) for r, c in self.rectangles) + len(self.wires)

    def verify(self, a: BooleanMatrix) -> bool:
        covered = set()
        for rows, cols in self.rectangles:
            for i in rows:
                for j in cols:
                    if not a.get(i, j):
                        return False
                    covered.add((i, j))
        for i, j in self.wires:
            if not a.get(i, j):
                return False
            covered.add((i, j))
        want = {(i, j) for i in range(a.rows) for j in _iter_bits(a.row_bits(i))}
        return covered == want


@dataclass(frozen=True)
class Or2Result:
    cost: int
    cover: Depth2Cover
    optimal: bool


def _enumerate_rectangles(a: BooleanMatrix, cap: int):
    """All (rowSet, colSet) with >= 2 rows, >= 2 cols, all-ones, and
    len(rows)+len(cols) < len(rows)*len(cols) (otherwise wires do as well).

    Returns None when more than `cap` candidates would be generated.
    """
    from itertools import combinations

    bits = a._bits
    rows_avail = [i for i in range(a.rows) if bits[i].bit_count() >= 2]
    out = []

    def grow(chosen: list[int], acc: int, start: int):
        if len(chosen) >= 2:
            support = list(_iter_bits(acc))
            nr = len(chosen)
            for sz in range(2, len(support) + 1):
                if nr + sz >= nr * sz:
                    continue
                for cols in combinations(support, sz):
                    out.append((tuple(chosen), cols))
                    if len(out) > cap:
                        return False
        for pos in range(start, len(rows_avail)):
            r = rows_avail[pos]
            nxt = acc & bits[r]
            if nxt.bit_count() >= 2:
                chosen.append(r)
                if not grow(chosen, nxt, pos + 1):
                    return False
                chosen.pop()
        return True

    if not grow([], (1 << a.cols) - 1, 0):
        return None
    out.sort(key=lambda rc: (len(rc[0]) + len(rc[1]), rc[0], rc[1]))
    return out


def exact_or2(a: BooleanMatrix, node_budget: int | None = None) -> Or2Result:
    """Minimum edge count of any depth-<=2 rectifier circuit for `a`.

    Branch and bound over all-ones rectangles plus singleton wires,
    branching on the uncovered cell with the fewest covering rectangles and
    pruning with an additive per-cell rate bound.  Deterministic.  When the
    node budget runs out the best cover found so far is returned with
    optimal=False (the all-wires cover seeds the search, so the result is
    always a valid upper bound).
    """
    ones = [
        (i, j) for i in range(a.rows) for j in _iter_bits(a.row_bits(i))
    ]
    ncells = len(ones)
    all_wires = Depth2Cover((), tuple(ones))
    if ncells == 0:
        return Or2Result(0, all_wires, True)
    cell_rank = {c: k for k, c in enumerate(ones)}

    cands = _enumerate_rectangles(a, 200_000)
    if cands is None:
        return Or2Result(ncells, all_wires, False)
    if not cands:
        return Or2Result(ncells, all_wires, True)

    cand_cost = []
    cand_mask = []
    for rows, cols in cands:
        cand_cost.append(len(rows) + len(cols))
        msk = 0
        for i in rows:
            for j in cols:
                msk |= 1 << cell_rank[(i, j)]
        cand_mask.append(msk)

    covers: list[list[int]] = [[] for _ in range(ncells)]
    for ci, msk in enumerate(cand_mask):
        for cell in _iter_bits(msk):
            covers[cell].append(ci)

    # admissible per-cell lower bound: cheapest cost-per-cell rate at that cell
    rate = [Fraction(1)] * ncells
    for ci, msk in enumerate(cand_mask):
        r = Fraction(cand_cost[ci], msk.bit_count())
        for cell in _iter_bits(msk):
            if r < rate[cell]:
                rate[cell] = r

    best_cost = ncells
    best_rects: tuple[int, ...] = ()
    best_wires: tuple[int, ...] = tuple(range(ncells))  # the all-wires seed
    nodes = 0
    exhausted = False

    def lower_bound(uncovered: int) -> int:
        s = Fraction(0)
        for cell in _iter_bits(uncovered):
            s += rate[cell]
        return ceil(s)

    def search(uncovered: int, cost: int, rects: list[int], wires: list[int]):
        nonlocal best_cost, best_rects, best_wires, nodes, exhausted
        if exhausted:
            return
        if uncovered == 0:
            if cost < best_cost:
                best_cost = cost
                best_rects = tuple(rects)
                best_wires = tuple(wires)
            return
        if cost + lower_bound(uncovered) >= best_cost:
            return
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            exhausted = True
            return
        branch = -1
        branch_deg = None
        for cell in _iter_bits(uncovered):
            deg = len(covers[cell])
            if branch_deg is None or deg < branch_deg:
                branch, branch_deg = cell, deg
        for ci in covers[branch]:
            rects.append(ci)
            search(uncovered & ~cand_mask[ci], cost + cand_cost[ci], rects, wires)
            rects.pop()
        wires.append(branch)
        search(uncovered & ~(1 << branch), cost + 1, rects, wires)
        wires.pop()

    search((1 << ncells) - 1, 0, [], [])

    cover = Depth2Cover(
        tuple(cands[ci] for ci in best_rects),
        tuple(ones[c] for c in best_wires),
    )
    assert cover.cost == best_cost
    return Or2Result(best_cost, cover, not exhausted)


# -- Lemma 1 certificate ---------------------------------------------------


@dataclass(frozen=True)
class Lemma1Certificate:
    """Exact-integer record of the 2-rectangle counting chain.

    The unconditional inequalities are the convexity steps
    sigma >= w^2/(2n) - w/2 and count >= sigma^2/(n(n-1)) - sigma/2;
    the conditional ones, active when w^2 >= 4n^3 (that is w >= 2n^{3/2},
    compared by squaring), are sigma >= w^2/(4n) and count >= sigma^2/(2n^2).
    All comparisons are done on cleared denominators, no floating point.
    """

    n: int
    weight: int
    sigma: int
    two_rectangles: int
    unconditional_sigma_ok: bool
    unconditional_count_ok: bool
    precondition_met: bool
    conditional_sigma_ok: bool | None
    conditional_count_ok: bool | None

    @property
    def all_ok(self) -> bool:
        if not (self.unconditional_sigma_ok and self.unconditional_count_ok):
            return False
        if self.precondition_met:
            return bool(self.conditional_sigma_ok and self.conditional_count_ok)
        return True


def lemma1_certificate(a: BooleanMatrix) -> Lemma1Certificate:
    from .errors import NonSquareError

    if a.rows != a.cols:
        raise NonSquareError("certificate is defined for square matrices")
    n = a.rows
    stats = count_2_rectangles(a)
    w = sum(stats.row_weights)
    sigma = stats.sigma
    count = stats.two_rectangles
    u_sigma = 2 * n * sigma >= w * w - n * w
    u_count = 2 * n * (n - 1) * count >= 2 * sigma * sigma - sigma * n * (n - 1)
    pre = w * w >= 4 * n**3
    c_sigma = (4 * n * sigma >= w * w) if pre else None
    c_count = (2 * n * n * count >= sigma * sigma) if pre else None
    return Lemma1Certificate(n, w, sigma, count, u_sigma, u_count, pre, c_sigma, c_count)


# -- the separation report -------------------------------------------------

REPORT_CSV_HEADER = (
    "family,param,m,n,weightA,weightAbar,sigma,weightB,K,orUpper,orLower,ratioLB,densityB"
)


@dataclass
class ReportRow:
    """One parameter of the sweep: complexity bounds for B-bar vs its complement B."""

    family: str
    param: str
    m: int
    n: int
    weight_a: int
    weight_abar: int
    sigma: int
    weight_b: int
    a_free_k: int
    a_free_verified: bool
    b_free_k: int
    b_free_mode: str  # "direct" or "lemma2+spot"
    b_free_ok: bool
    or_upper: int
    or_lower: int
    ratio_lb: Fraction
    density_b: float
    delta: int | None = None


def _finish_row(
    family: str,
    param: str,
    a: BooleanMatrix,
    a_free_k: int,
    a_free_verified: bool,
    b_free_k: int,
    delta: int | None,
    direct_limit: int,
    spot_samples: int,
    seed: int,
) -> ReportRow:
    m = a.rows
    n = comb(m, 2)
    stats = count_2_rectangles(a)
    wa = sum(stats.row_weights)
    wabar = m * m - wa
    wb = stats.two_rectangles
    circ = depth3_complement_circuit(a)
    or_upper = circ.complexity
    assert or_upper == 4 * n + wabar

    if n <= direct_limit:
        b = pair_transform(a)
        assert b.weight() == wb
        bres = is_k_free(b, b_free_k)
        mode, ok = "direct", bool(bres.free)
    else:
        sym_free = is_k_free(a, a_free_k, through_row=0)
        spot = spot_check_pair_transform_2_free(a, spot_samples, seed)
        mode, ok = "lemma2+spot", bool(sym_free.free and spot.passed)

    if b_free_k == 2 and ok:
        or_lower = wb
    else:
        or_lower = -(-wb // (b_free_k * b_free_k))
    ratio = Fraction(or_lower, or_upper)
    density = wb / float(n) ** (4.0 / 3.0)
    return ReportRow(
        family,
        param,
        m,
        n,
        wa,
        wabar,
        stats.sigma,
        wb,
        a_free_k,
        a_free_verified,
        b_free_k,
        mode,
        ok,
        or_upper,
        or_lower,
        ratio,
        density,
        delta,
    )


def theorem_report(
    family: str,
    params,
    *,
    seed: int = 0,
    spot_samples: int = 100_000,
    direct_limit: int = 10_000,
) -> list[ReportRow]:
    """Rows of the separation table, one per parameter, in parameter order.

    brown: params are odd primes p; delta is auto-selected, so the
    3-freeness of A is verified during construction.  norm: params are
    (q, t) pairs; Delta = t!+1 freeness of A is verified by full search,
    and a failed verification flags the row instead of aborting.  For both,
    K = C(k-1,2)+1 transfers to B; B's freeness is checked directly up to
    direct_limit rows, beyond that via the transfer plus randomized spot
    checks of 2x2 blocks.
    """
    rows = []
    if family == "brown":
        for p in params:
            a, delta = brown_matrix(int(p))
            rows.append(
                _finish_row(
                    "brown", str(p), a, 3, True, 2, delta,
                    direct_limit, spot_samples, seed,
                )
            )
    elif family == "norm":
        for q, t in params:
            q, t = int(q), int(t)
            a = norm_matrix(q, t)
            wexp = (q**t - 1) // (q - 1)
            if set(a.row_weights()) != {wexp}:
                raise AssertionError("norm matrix row weights are off")
            delta_free = factorial(t) + 1
            res = is_k_free(a, delta_free)
            big_k = comb(delta_free - 1, 2) + 1
            rows.append(
                _finish_row(
                    "norm", f"{q}^{t}", a, delta_free, bool(res.free), big_k, None,
                    direct_limit, spot_samples, seed,
                )
            )
    else:
        raise ValueError(f"unknown family {family!r}")
    return rows


def report_csv_text(rows: list[ReportRow]) -> str:
    lines = [REPORT_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                str(v)
                for v in (
                    r.family,
                    r.param,
                    r.m,
                    r.n,
                    r.weight_a,
                    r.weight_abar,
                    r.sigma,
                    r.weight_b,
                    r.b_free_k,
                    r.or_upper,
                    r.or_lower,
                    format(float(r.ratio_lb), ".6g"),
                    format(r.density_b, ".6g"),
                )
            )
        )
    return "\n".join(lines) + "\n"


def report_json_text(rows: list[ReportRow]) -> str:
    import json

    payload = []
    for r in rows:
        payload.append(
            {
                "family": r.family,
                "param": r.param,
                "m": r.m,
                "n": r.n,
                "weightA": r.weight_a,
                "weightAbar": r.weight_abar,
                "sigma": r.sigma,
                "weightB": r.weight_b,
                "K": r.b_free_k,
                "orUpper": r.or_upper,
                "orLower": r.or_lower,
                "ratioLB": format(float(r.ratio_lb), ".6g"),
                "ratioNum": r.ratio_lb.numerator,
                "ratioDen": r.ratio_lb.denominator,
                "densityB": format(r.density_b, ".6g"),
                "aFreeK": r.a_free_k,
                "aFreeVerified": r.a_free_verified,
                "bFreeMode": r.b_free_mode,
                "bFreeOk": r.b_free_ok,
                "delta": r.delta,
            }
        )
    return json.dumps({"rows": payload}, indent=2) + "\n"
