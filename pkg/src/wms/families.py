"""Parameterized structure families and the ladder-clique ratio experiment.

Large members are kept implicit: parts are labeled index ranges and the
relation is a closed-form predicate.  Counting on implicit members goes
through part-wise formulas, cross-checked against brute force on small n.
"""

from __future__ import annotations

import csv
import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapExceeded, DegenerateUniverse, InvalidArgument
from .ideals import CoverIdeal
from .logic import DefinableSet, FiniteStructure, evaluate, graph
from .logic.structure import RelationSymbol, Signature

MAX_UNIVERSE = 10**6
MAX_EXPLICIT = 10**4
# Stored tuples for an explicit structure; a 2^13 clique alone would need 6.7e7.
MAX_STORED_TUPLES = 2 * 10**6
MAX_EXPLICIT_LADDER = 6
FAMILY_KINDS = ("ladder_clique", "half_graph", "matching", "random_graph", "chain_union")

CHI = "forall y. (E(x,y) -> forall z. ((z != x & E(y,z)) -> E(x,z)))"


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, kind: str, **params: int) -> FamilySpec:
        return cls(kind, tuple(sorted(params.items())))

    def get(self, name: str) -> int:
        return dict(self.params)[name]

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(f'{k}={v}' for k, v in self.params)})"


@dataclass
class Family:
    """A generated member: labeled parts, a relation predicate, and (when small enough) the structure."""

    spec: FamilySpec
    universe_size: int
    relation: str
    holds: Callable[[int, int], bool]
    parts: dict[str, range] = field(default_factory=dict)
    structure: Optional[FiniteStructure] = None

    @property
    def explicit(self) -> bool:
        return self.structure is not None

    def part_set(self, *names: str) -> DefinableSet:
        bits = np.zeros(self.universe_size, dtype=bool)
        for name in names:
            r = self.parts[name]
            bits[r.start : r.stop] = True
        return DefinableSet(1, self.universe_size, bits)


def _check_universe(m: int) -> None:
    if m < 1:
        raise InvalidArgument("a family member needs a nonempty universe")
    if m > MAX_UNIVERSE:
        raise CapExceeded(f"universe of size {m} exceeds the cap {MAX_UNIVERSE}")


def _materialize(m: int, pair_count: int) -> bool:
    return m <= MAX_EXPLICIT and pair_count <= MAX_STORED_TUPLES


def ladder_clique(n: int) -> Family:
    """Clique on 2^n vertices, then the ladder u_0..u_{n-1}, w_0..w_{n-1} with u_i ~ w_j iff i <= j."""
    if n < 0:
        raise InvalidArgument("ladder height must be non-negative")
    clique = 2**n
    m = clique + 2 * n
    _check_universe(m)
    u = range(clique, clique + n)
    w = range(clique + n, m)

    def holds(a: int, b: int) -> bool:
        if a == b:
            return False
        if a < clique and b < clique:
            return True
        if a in u and b in w:
            return a - u.start <= b - w.start
        if a in w and b in u:
            return b - u.start <= a - w.start
        return False

    spec = FamilySpec.of("ladder_clique", n=n)
    structure = None
    if _materialize(m, clique * (clique - 1) // 2 + n * (n + 1) // 2):
        edges = itertools.chain(
            itertools.combinations(range(clique), 2),
            ((u.start + i, w.start + j) for i in range(n) for j in range(i, n)),
        )
        structure = graph(m, edges, f"G{n}")
    return Family(spec, m, "E", holds, {"clique": range(clique), "u": u, "w": w}, structure)


def half_graph(h: int) -> Family:
    """a_i = i and b_j = h + j with a_i ~ b_j iff i < j."""
    if h < 1:
        raise InvalidArgument("half graph needs h >= 1")
    m = 2 * h
    _check_universe(m)

    def holds(x: int, y: int) -> bool:
        if x > y:
            x, y = y, x
        return x < h <= y and x < y - h

    structure = None
    if _materialize(m, h * (h - 1) // 2):
        structure = graph(m, ((i, h + j) for i in range(h) for j in range(i + 1, h)), f"half{h}")
    return Family(FamilySpec.of("half_graph", h=h), m, "E", holds, {"a": range(h), "b": range(h, m)}, structure)


def matching(p: int) -> Family:
    if p < 1:
        raise InvalidArgument("matching needs p >= 1")
    m = 2 * p
    _check_universe(m)

    def holds(x: int, y: int) -> bool:
        return x != y and x // 2 == y // 2

    structure = graph(m, ((2 * i, 2 * i + 1) for i in range(p)), f"match{p}") if _materialize(m, p) else None
    return Family(FamilySpec.of("matching", p=p), m, "E", holds, {"left": range(0, m, 2), "right": range(1, m, 2)}, structure)


def random_graph(m: int, p_num: int, p_den: int, seed: int) -> Family:
    """G(m, p_num/p_den); pairs i < j are drawn in lexicographic order from a seeded generator."""
    if not 0 <= p_num <= p_den or p_den < 1:
        raise InvalidArgument("edge probability must be p_num/p_den with 0 <= p_num <= p_den")
    _check_universe(m)
    if m > MAX_EXPLICIT:
        raise CapExceeded(f"random graphs are only generated up to {MAX_EXPLICIT} vertices")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(m, k=1)
    keep = rng.integers(0, p_den, size=rows.size) < p_num
    adjacency = np.zeros((m, m), dtype=bool)
    adjacency[rows[keep], cols[keep]] = True
    adjacency |= adjacency.T

    def holds(x: int, y: int) -> bool:
        return bool(adjacency[x, y])

    structure = None
    if _materialize(m, int(keep.sum())):
        structure = graph(m, zip(rows[keep].tolist(), cols[keep].tolist()), f"G({m},{p_num}/{p_den},{seed})")
    spec = FamilySpec.of("random_graph", m=m, p_num=p_num, p_den=p_den, seed=seed)
    return Family(spec, m, "E", holds, {"all": range(m)}, structure)


def chain_union(N: int, relation: str = "LEQ") -> Family:
    """Disjoint union of chains of lengths 1..N, ordered within each block by position."""
    if N < 1:
        raise InvalidArgument("chain union needs N >= 1")
    m = N * (N + 1) // 2
    _check_universe(m)
    blocks = {f"block{n}": range(n * (n - 1) // 2, n * (n + 1) // 2) for n in range(1, N + 1)}
    block_of = np.repeat(np.arange(1, N + 1), np.arange(1, N + 1))

    def holds(x: int, y: int) -> bool:
        return bool(block_of[x] == block_of[y]) and x <= y

    structure = None
    if _materialize(m, sum(n * (n + 1) // 2 for n in range(1, N + 1))):
        sig = Signature.of(RelationSymbol(relation, 2))
        leq = frozenset((x, y) for r in blocks.values() for x in r for y in r if x <= y)
        structure = FiniteStructure(sig, m, {relation: leq}, f"chains{N}")
    return Family(FamilySpec.of("chain_union", N=N), m, relation, holds, blocks, structure)


def generate(spec: FamilySpec) -> Family:
    builders = {
        "ladder_clique": ladder_clique,
        "half_graph": half_graph,
        "matching": matching,
        "random_graph": random_graph,
        "chain_union": chain_union,
    }
    if spec.kind not in builders:
        raise InvalidArgument(f"unknown family {spec.kind!r}; expected one of {FAMILY_KINDS}")
    try:
        return builders[spec.kind](**dict(spec.params))
    except TypeError as exc:
        raise InvalidArgument(f"bad parameters for {spec.kind}: {exc}") from exc


def nonisomorphic_graphs(m: int) -> list[FiniteStructure]:
    """One graph per isomorphism class on m vertices, smallest canonical edge list first."""
    if not 1 <= m <= 5:
        raise CapExceeded("isomorphism-class enumeration is limited to 1..5 vertices")
    pairs = list(itertools.combinations(range(m), 2))
    perms = list(itertools.permutations(range(m)))
    seen: dict[tuple, tuple] = {}
    for mask in range(2 ** len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        canon = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges)) for p in perms)
        seen.setdefault(canon, canon)
    return [graph(m, canon, f"g{m}_{i}") for i, canon in enumerate(sorted(seen, key=lambda c: (len(c), c)))]


@dataclass(frozen=True)
class CoarseRatio:
    """|D| against m^k with exact threshold comparisons."""

    size: int
    total: int

    @property
    def ratio(self) -> float:
        if self.size == 0:
            return -math.inf
        return math.log(self.size) / math.log(self.total)

    def at_least(self, alpha) -> bool:
        alpha = Fraction(alpha)
        return self.size > 0 and self.size**alpha.denominator >= self.total**alpha.numerator

    def below(self, alpha) -> bool:
        return not self.at_least(alpha)


def coarse_ratio(S: FiniteStructure, D: DefinableSet) -> CoarseRatio:
    if D.m != S.m:
        raise InvalidArgument("the set does not live on this structure")
    return coarse_ratio_counts(D.size, S.m, D.k)


def coarse_ratio_counts(size: int, m: int, k: int = 1) -> CoarseRatio:
    if m == 1:
        raise DegenerateUniverse("coarse ratio is undefined on a one-element universe")
    return CoarseRatio(size, m**k)


# ---------------------------------------------------------------- chain tree


def _prec(eta: tuple[int, ...], nu: tuple[int, ...]) -> int:
    """Comparator for the tree ordering on binary strings: -1 when eta comes first."""
    if eta == nu:
        return 0
    common = next((i for i, (a, b) in enumerate(zip(eta, nu)) if a != b), None)
    if common is not None:
        return -1 if eta[common] == 1 else 1
    if len(eta) < len(nu):
        return -1 if nu[len(eta)] == 0 else 1
    return 1 if eta[len(nu)] == 0 else -1


def prec_order(n: int) -> list[tuple[int, ...]]:
    """All binary strings of length < n, sorted by the tree ordering."""
    nodes = [s for length in range(n) for s in itertools.product((0, 1), repeat=length)]
    return sorted(nodes, key=functools.cmp_to_key(_prec))


def chain_tree(n: int, offset: int = 0) -> dict[tuple[int, ...], tuple[int]]:
    """Height-n LEQ tree: node s goes to the element at its ordering position, shifted by ``offset``."""
    return {s: (offset + position,) for position, s in enumerate(prec_order(n))}


def chain_union_ideal(family: Family) -> CoverIdeal:
    """Thin iff confined to the largest block: the finite-scale stand-in for the finite part."""
    if family.spec.kind != "chain_union":
        raise InvalidArgument("chain_union_ideal needs a chain_union family")
    largest = max(family.parts, key=lambda name: len(family.parts[name]))
    return CoverIdeal([family.part_set(largest)], [largest])


# ---------------------------------------------------------------- ladder experiment

LADDER_MODES = ("implicit", "explicit", "cross_check")


@dataclass(frozen=True)
class RatioRow:
    n: int
    N: int
    mode: str
    witness: bool
    row_sizes: tuple[int, ...]
    universe: int

    @property
    def prod(self) -> int:
        return math.prod(self.row_sizes)

    @property
    def ratio(self) -> float:
        return coarse_ratio_counts(self.prod, self.universe, self.N).ratio

    @property
    def bound(self) -> float:
        return (self.N - 1) / self.N * math.log(self.n) / math.log(self.universe) + 1 / self.N

    @property
    def relaxed_bound(self) -> float:
        """log n / log(2^n + 2n) + 1/4, which dominates ``bound`` once N >= 4."""
        return math.log(self.n) / math.log(self.universe) + 1 / 4

    @property
    def within_bound(self) -> bool:
        """prod <= n^(N-1) * 2^n, the integer form of the ratio bound."""
        return self.witness and self.prod <= self.n ** (self.N - 1) * 2**self.n

    @property
    def quarter_regime(self) -> bool:
        """log n / log(2^n + 2n) < 1/4, i.e. n^4 < 2^n + 2n."""
        return self.n**4 < self.universe

    @property
    def below_half(self) -> bool:
        return self.witness and coarse_ratio_counts(self.prod, self.universe, self.N).below(Fraction(1, 2))

    @property
    def passed(self) -> bool:
        return self.within_bound and (self.below_half or not self.quarter_regime)


@dataclass
class RatioReport:
    N: int
    mode: str
    rows: list[RatioRow]
    explicit_checks: dict[int, dict] = field(default_factory=dict)

    @property
    def first_quarter_n(self) -> Optional[int]:
        return next((row.n for row in self.rows if row.quarter_regime), None)

    def csv_rows(self) -> Iterator[list]:
        yield ["n", "row_sizes", "prod", "ratio", "bound", "pass"]
        for row in self.rows:
            yield [
                row.n,
                " ".join(map(str, row.row_sizes)),
                row.prod,
                f"{row.ratio:.6f}",
                f"{row.bound:.6f}",
                str(row.passed).lower(),
            ]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(self.csv_rows())

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "mode": self.mode,
            "first_quarter_n": self.first_quarter_n,
            "caveat": "assertions hold for each n in range; no limit along an ultrafilter is taken",
            "rows": [
                {
                    "n": r.n,
                    "witness": r.witness,
                    "row_sizes": list(r.row_sizes),
                    "prod": r.prod,
                    "ratio": None if not r.witness else r.ratio,
                    "bound": r.bound,
                    "pass": r.passed,
                }
                for r in self.rows
            ],
            "explicit_checks": {str(n): v for n, v in sorted(self.explicit_checks.items())},
        }


def canonical_witness(n: int, N: int) -> Optional[tuple[int, ...]]:
    """b_j = w_j for j < N, or None when the ladder has fewer than N levels."""
    if N > n:
        return None
    w_start = 2**n + n
    return tuple(w_start + j for j in range(N))


def closed_form_rows(n: int, N: int) -> tuple[int, ...]:
    """Row sizes |E_i(G_n, b)| for the canonical b, counted part by part.

    Row i asks E(x, w_j) for i <= j < N and not E(x, w_j) for j < i.
    Clique and w-side vertices have no w-neighbours and every row has a
    positive conjunct (j = N - 1), so only u_l can qualify:
    l <= j for all j >= i gives l <= i; l > j for all j < i gives l >= i.
    """
    sizes = []
    for i in range(N):
        low = i if i > 0 else 0
        high = min(i, n - 1)
        sizes.append(max(0, high - low + 1))
    return tuple(sizes)


def _row_formula(i: int, b: Sequence[int]) -> str:
    return " & ".join(f"E(x,#{c})" if i <= j else f"!E(x,#{c})" for j, c in enumerate(b))


def explicit_rows(S: FiniteStructure, b: Sequence[int]) -> tuple[int, ...]:
    return tuple(evaluate(S, _row_formula(i, b), "x").size for i in range(len(b)))


def explicit_h_count(S: FiniteStructure, b: Sequence[int]) -> int:
    """|H_N(G^N, b)| by direct evaluation over G^N, without factoring into rows."""
    N = len(b)
    xs = [f"x{i}" for i in range(N)]
    body = " & ".join(
        f"E({xs[i]},#{c})" if i <= j else f"!E({xs[i]},#{c})" for i in range(N) for j, c in enumerate(b)
    )
    return evaluate(S, body, tuple(xs)).size


def _popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def satisfiable_witness_scan(S: FiniteStructure, N: int) -> dict:
    """Scan every b in M^N and record those whose rows E_0..E_{N-1} are all nonempty.

    Neighbourhoods are packed into uint64 words; the last two coordinates of b
    are handled as a vectorized grid.
    """
    if N < 2:
        raise InvalidArgument("the witness scan needs N >= 2")
    m = S.m
    adjacency = np.ascontiguousarray(S.table("E"))
    packed = np.packbits(adjacency, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    packed = np.pad(packed, ((0, 0), (0, pad)))
    nb = packed.view(np.uint64)
    universe = np.packbits(np.ones(m, dtype=bool), bitorder="little")
    universe = np.pad(universe, (0, pad)).view(np.uint64)
    non = ~nb & universe
    count = 0
    tuples = []
    max_prod = 0
    for prefix in itertools.product(range(m), repeat=N - 2):
        rows = []
        for i in range(N):
            row = universe.copy()
            for j, c in enumerate(prefix):
                row &= nb[c] if i <= j else non[c]
            rows.append(row)
        if not all(r.any() for r in rows):
            continue
        # Row i against the grid of (b_{N-2}, b_{N-1}): b_{N-1} is always positive.
        grid_rows = []
        for i in range(N):
            second = nb if i <= N - 2 else non
            grid_rows.append(rows[i][None, None, :] & second[:, None, :] & nb[None, :, :])
        alive = np.ones((m, m), dtype=bool)
        for g in grid_rows:
            alive &= g.any(axis=-1)
        if not alive.any():
            continue
        sizes = np.stack([_popcount(g) for g in grid_rows])
        prods = np.prod(sizes, axis=0, dtype=np.int64)
        for c2, c3 in zip(*np.nonzero(alive)):
            tuples.append((*prefix, int(c2), int(c3)))
        count += int(alive.sum())
        max_prod = max(max_prod, int(prods[alive].max()))
    return {"count": count, "tuples": tuples, "max_prod": max_prod}


def _explicit_check(n: int, N: int) -> dict:
    fam = ladder_clique(n)
    S = fam.structure
    b = canonical_witness(n, N)
    chi = evaluate(S, CHI, "x")
    scan = satisfiable_witness_scan(S, N) if N >= 2 else {"count": 0, "tuples": [], "max_prod": 0}
    ladder = set(fam.parts["u"]) | set(fam.parts["w"])
    return {
        "rows": explicit_rows(S, b) if b is not None else None,
        "h_count": explicit_h_count(S, b) if b is not None else None,
        "chi_is_clique": chi == fam.part_set("clique"),
        "satisfiable_tuples": scan["count"],
        "all_in_ladder": all(set(t) <= ladder for t in scan["tuples"]),
        "max_prod": scan["max_prod"],
        "max_prod_within_bound": scan["max_prod"] <= n ** (N - 1) * 2**n,
    }


def ladder_row(n: int, N: int, mode: str = "implicit") -> tuple[RatioRow, Optional[dict]]:
    if mode not in LADDER_MODES:
        raise InvalidArgument(f"mode must be one of {LADDER_MODES}")
    if n < 1 or N < 1:
        raise InvalidArgument("n and N must be positive")
    if mode != "implicit" and n > MAX_EXPLICIT_LADDER:
        raise CapExceeded(f"explicit ladder enumeration is limited to n <= {MAX_EXPLICIT_LADDER}")
    universe = 2**n + 2 * n
    b = canonical_witness(n, N)
    closed = closed_form_rows(n, N) if b is not None else tuple(0 for _ in range(N))
    check = _explicit_check(n, N) if mode != "implicit" else None
    sizes = closed
    if mode == "explicit" and b is not None:
        sizes = check["rows"]
    if check is not None:
        check["closed_form_rows"] = list(closed)
        check["rows_agree"] = b is None or (tuple(check["rows"]) == closed and check["h_count"] == math.prod(closed))
    witness = b is not None and all(s > 0 for s in sizes)
    return RatioRow(n, N, mode, witness, tuple(sizes), universe), check


def ladder_experiment(n_range: Iterable[int], N: int = 4, mode: str = "implicit") -> RatioReport:
    """Ratio report for each n; cross_check runs both routes where n is small enough."""
    rows = []
    checks = {}
    for n in sorted(set(n_range)):
        row_mode = mode
        if mode == "cross_check" and n > MAX_EXPLICIT_LADDER:
            row_mode = "implicit"
        row, check = ladder_row(n, N, row_mode)
        rows.append(row)
        if check is not None:
            checks[n] = check
    return RatioReport(N, mode, rows, checks)
