"""Local rank modulo an ideal, tree witnesses, order-type properties and type counts.

Parameter trees are dicts keyed by binary tuples ``s`` (the node address);
at node ``s`` the positive instance continues to ``s + (1,)`` and the
negated one to ``s + (0,)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from ._search import Budget, first_hit, map_ordered
from .errors import CapExceeded, ContextMismatch, InvalidArgument
from .ideals import IdealSchema
from .logic import DefinableSet, FiniteStructure, InstanceTable, PartitionedFormula, delta_partition, tuple_orbits

Tree = dict[tuple[int, ...], tuple[int, ...]]
NEG_INFINITY = "neg_infinity"
EXCEEDS_CAP = "exceeds_cap"
MAX_ORBIT_UNIVERSE = 8


def tree_nodes(n: int) -> Iterator[tuple[int, ...]]:
    """2^{<n} breadth-first, each level in lexicographic order."""
    for depth in range(n):
        yield from itertools.product((0, 1), repeat=depth)


def tree_to_list(tree: Tree, depth: int) -> list[list[int]]:
    return [list(tree[s]) for s in tree_nodes(depth)]


def tree_from_list(items: Sequence[Sequence[int]], depth: int) -> Tree:
    nodes = list(tree_nodes(depth))
    if len(items) != len(nodes):
        raise InvalidArgument(f"a tree of depth {depth} has {len(nodes)} nodes, got {len(items)}")
    return {s: tuple(c) for s, c in zip(nodes, items)}


@dataclass(frozen=True)
class RankResult:
    value: Union[int, str]
    cap: int
    tree: Optional[Tree]
    psi: str = ""
    phi: str = ""

    @property
    def depth(self) -> Optional[int]:
        """Depth of the witness tree: the value, or cap + 1 past the cap."""
        if self.value == NEG_INFINITY:
            return None
        return self.cap + 1 if self.value == EXCEEDS_CAP else self.value

    def at_least(self, n: int) -> bool:
        if self.value == NEG_INFINITY:
            return False
        if self.value == EXCEEDS_CAP:
            if n > self.cap + 1:
                raise CapExceeded(f"rank >= {n} is beyond the computed cap")
            return True
        return self.value >= n

    def to_json(self) -> dict:
        tree = tree_to_list(self.tree, self.depth) if self.tree is not None else None
        return {"value": self.value, "cap": self.cap, "tree": tree, "psi": self.psi, "phi": self.phi}


def _check_phi(S: FiniteStructure, psi: DefinableSet, phi: PartitionedFormula) -> InstanceTable:
    if psi.k != len(phi.x) or psi.m != S.m:
        raise ContextMismatch(f"psi has arity {psi.k} over m={psi.m}; phi has |x|={len(phi.x)} over m={S.m}")
    return phi.instances(S)


class _Rank:
    """Capped rank with memoization on the extension."""

    def __init__(self, I: IdealSchema, table: InstanceTable, cap: int, budget: Budget):
        self.I = I
        self.table = table
        self.cap = cap
        self.params = list(table.parameters())
        self.budget = budget
        self.memo: dict[bytes, int] = {}

    def split(self, D: DefinableSet, c) -> Optional[int]:
        """min of the two halves' capped ranks, or None unless both are wide."""
        inst = self.table.instance(c)
        pos = D & inst
        if self.I.is_thin(pos):
            return None
        neg = D - inst
        if self.I.is_thin(neg):
            return None
        return min(self.value(pos), self.value(neg))

    def value(self, D: DefinableSet, workers: int = 1) -> int:
        """min(rank(D), cap), with -1 standing for negative infinity."""
        hit = self.memo.get(D.key)
        if hit is not None:
            return hit
        self.budget.tick()
        if self.I.is_thin(D):
            best = -1
        elif workers > 1:
            best = 0
            for start in range(0, len(self.params), workers):
                batch = self.params[start : start + workers]
                for split in map_ordered(batch, lambda c: self.split(D, c), workers):
                    if split is not None:
                        best = max(best, split + 1)
                if best >= self.cap:
                    break
            best = min(best, self.cap)
        else:
            best = 0
            for c in self.params:
                inst = self.table.instance(c)
                pos = D & inst
                if self.I.is_thin(pos):
                    continue
                neg = D - inst
                if self.I.is_thin(neg):
                    continue
                vp = self.value(pos)
                if vp < best:
                    continue
                best = max(best, min(vp, self.value(neg)) + 1)
                if best >= self.cap:
                    best = self.cap
                    break
        self.memo[D.key] = best
        return best

    def witness(self, D: DefinableSet, n: int, prefix: tuple[int, ...], tree: Tree) -> None:
        if n == 0:
            return
        for c in self.params:
            s = self.split(D, c)
            if s is not None and s >= n - 1:
                tree[prefix] = c
                inst = self.table.instance(c)
                self.witness(D & inst, n - 1, prefix + (1,), tree)
                self.witness(D - inst, n - 1, prefix + (0,), tree)
                return
        raise AssertionError("rank value without a splitting parameter")


def rank(
    S: FiniteStructure,
    I: IdealSchema,
    psi: DefinableSet,
    phi: PartitionedFormula,
    n_max: int,
    *,
    workers: int = 1,
    budget: Optional[Budget] = None,
    psi_label: str = "",
) -> RankResult:
    if n_max < 0:
        raise InvalidArgument("n_max must be non-negative")
    table = _check_phi(S, psi, phi)
    search = _Rank(I, table, n_max + 1, budget or Budget())
    v = search.value(psi, workers=workers)
    if v < 0:
        return RankResult(NEG_INFINITY, n_max, None, psi_label, str(phi))
    tree: Tree = {}
    search.witness(psi, v, (), tree)
    value = EXCEEDS_CAP if v > n_max else v
    return RankResult(value, n_max, tree, psi_label, str(phi))


def path_set(psi: DefinableSet, table: InstanceTable, tree: Tree, sigma: Sequence[int]) -> DefinableSet:
    """psi intersected with the signed instances along the branch ``sigma``."""
    out = psi
    for i, bit in enumerate(sigma):
        out = out & table.signed(tree[tuple(sigma[:i])], bool(bit))
    return out


def check_tree(S: FiniteStructure, I: IdealSchema, psi: DefinableSet, phi: PartitionedFormula, tree: Tree, n: int) -> bool:
    """Whether every branch of the depth-``n`` tree meets psi in a wide set."""
    table = _check_phi(S, psi, phi)
    if any(s not in tree for s in tree_nodes(n)):
        return False
    return all(I.is_wide(path_set(psi, table, tree, sigma)) for sigma in itertools.product((0, 1), repeat=n))


def tree_witness(
    S: FiniteStructure,
    I: IdealSchema,
    psi: DefinableSet,
    phi: PartitionedFormula,
    n: int,
    *,
    budget: Optional[Budget] = None,
) -> Optional[Tree]:
    """Direct search for a depth-``n`` wide tree, independent of :func:`rank`.

    Nodes are filled in depth-first preorder over one global assignment, with
    no memoization; a node is kept only if both of its signed halves stay wide.
    The result is re-verified branch by branch with :func:`check_tree`.
    """
    if n < 0:
        raise InvalidArgument("tree depth must be non-negative")
    table = _check_phi(S, psi, phi)
    if n == 0:
        return {} if I.is_wide(psi) else None
    budget = budget or Budget()
    params = list(table.parameters())
    order = list(_preorder(n))
    tree: Tree = {}
    regions: dict[tuple[int, ...], DefinableSet] = {(): psi}

    def fill(i: int) -> bool:
        if i == len(order):
            return True
        node = order[i]
        here = regions[node]
        for c in params:
            budget.tick()
            inst = table.instance(c)
            yes, no = here & inst, here - inst
            if I.is_thin(yes) or I.is_thin(no):
                continue
            tree[node] = c
            regions[node + (1,)], regions[node + (0,)] = yes, no
            if fill(i + 1):
                return True
        tree.pop(node, None)
        return False

    if not I.is_wide(psi) or not fill(0):
        return None
    assert check_tree(S, I, psi, phi, tree, n)
    return tree


def _preorder(n: int) -> Iterator[tuple[int, ...]]:
    def walk(s):
        if len(s) < n:
            yield s
            yield from walk(s + (1,))
            yield from walk(s + (0,))

    return walk(())


@dataclass(frozen=True)
class OrderWitness:
    N: int
    a_tuples: list[tuple[int, ...]]
    b_tuples: list[tuple[int, ...]]
    phi: str = ""
    row_mode: str = "listed"

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "a": [list(a) for a in self.a_tuples],
            "b": [list(b) for b in self.b_tuples],
            "phi": self.phi,
            "row_mode": self.row_mode,
        }


ROW_MODES = ("listed", "full")


def _full_type_support(S: FiniteStructure, I: IdealSchema, phi: PartitionedFormula) -> DefinableSet:
    """Union of the wide complete phi-types over all of M."""
    _, _, atoms = delta_partition(S, [phi], range(S.m))
    support = DefinableSet.empty(len(phi.x), S.m)
    for atom in atoms:
        if I.is_wide(atom):
            support = support | atom
    return support


def wide_order_witness(
    S: FiniteStructure,
    I: IdealSchema,
    phi: PartitionedFormula,
    N: int,
    *,
    distinct: bool = False,
    row_mode: str = "listed",
    workers: int = 1,
    budget: Optional[Budget] = None,
) -> Optional[OrderWitness]:
    """Half-graph pattern phi(a_i, b_j) iff i < j with every row wide.

    ``row_mode="listed"`` asks that each row type over the listed b's be wide;
    ``"full"`` further asks that some realization of the row has a wide
    complete phi-type over all of M.
    """
    if N < 1:
        raise InvalidArgument("order witnesses need N >= 1")
    if row_mode not in ROW_MODES:
        raise InvalidArgument(f"row_mode must be one of {ROW_MODES}")
    table = phi.instances(S)
    params = list(table.parameters())
    budget = budget or Budget()
    top = DefinableSet.full(len(phi.x), S.m)
    support = _full_type_support(S, I, phi) if row_mode == "full" else None

    def ok(row: DefinableSet) -> bool:
        return bool(row & support) if support is not None else I.is_wide(row)

    def extend(rows: list[DefinableSet], bs: list[tuple[int, ...]]) -> Optional[list[tuple[int, ...]]]:
        j = len(bs)
        if j == N:
            return bs
        for c in params:
            if distinct and c in bs:
                continue
            budget.tick()
            inst = table.instance(c)
            new_rows = [row & inst if i < j else row - inst for i, row in enumerate(rows)]
            if all(ok(r) for r in new_rows):
                found = extend(new_rows, bs + [c])
                if found is not None:
                    return found
        return None

    def start(c):
        inst = table.instance(c)
        rows = [top - inst] * N
        return extend(rows, [c]) if all(ok(r) for r in rows) else None

    hit = first_hit(params, start, workers)
    if hit is None:
        return None
    bs = hit[1]
    a_tuples = []
    for i in range(N):
        row = top
        for j, c in enumerate(bs):
            row = row & table.signed(c, i < j)
        a_tuples.append((row & support if support is not None else row).first())
    return OrderWitness(N, a_tuples, bs, str(phi), row_mode)


def wide_independence_witness(
    S: FiniteStructure,
    I: IdealSchema,
    phi: PartitionedFormula,
    N: int,
    *,
    distinct: bool = False,
    workers: int = 1,
    budget: Optional[Budget] = None,
) -> Optional[list[tuple[int, ...]]]:
    """b_0..b_{N-1} whose 2^N signed intersections are all wide."""
    if N < 1:
        raise InvalidArgument("independence witnesses need N >= 1")
    table = phi.instances(S)
    params = list(table.parameters())
    budget = budget or Budget()
    top = DefinableSet.full(len(phi.x), S.m)

    def refine(cells: list[DefinableSet], c) -> Optional[list[DefinableSet]]:
        budget.tick()
        inst = table.instance(c)
        out = []
        for cell in cells:
            for half in (cell - inst, cell & inst):
                if I.is_thin(half):
                    return None
                out.append(half)
        return out

    def extend(cells, bs):
        if len(bs) == N:
            return bs
        for c in params:
            if distinct and c in bs:
                continue
            new = refine(cells, c)
            if new is not None:
                found = extend(new, bs + [c])
                if found is not None:
                    return found
        return None

    def start(c):
        cells = refine([top], c)
        return extend(cells, [c]) if cells is not None else None

    hit = first_hit(params, start, workers)
    return hit[1] if hit else None


def wide_strict_order_witness(
    S: FiniteStructure,
    I: IdealSchema,
    phi: PartitionedFormula,
    N: int,
    *,
    distinct: bool = False,
    workers: int = 1,
    budget: Optional[Budget] = None,
) -> Optional[list[tuple[int, ...]]]:
    """b_0..b_{N-1} with !phi(b_i) & phi(b_j) wide and phi(b_i) & !phi(b_j) thin for i < j."""
    if N < 2:
        raise InvalidArgument("strict order witnesses need N >= 2")
    table = phi.instances(S)
    params = list(table.parameters())
    budget = budget or Budget()

    def compatible(earlier, later) -> bool:
        a, b = table.instance(earlier), table.instance(later)
        return I.is_wide(b - a) and I.is_thin(a - b)

    def extend(bs):
        if len(bs) == N:
            return bs
        for c in params:
            if distinct and c in bs:
                continue
            budget.tick()
            if all(compatible(b, c) for b in bs):
                found = extend(bs + [c])
                if found is not None:
                    return found
        return None

    hit = first_hit(params, lambda c: extend([c]), workers)
    return hit[1] if hit else None


@dataclass
class TypeCount:
    total: int
    wide: int
    types: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"total": self.total, "wide": self.wide, "types": self.types}


def count_wide_types(
    S: FiniteStructure,
    I: IdealSchema,
    delta: Optional[Sequence[PartitionedFormula]],
    A: Sequence[int],
    *,
    k: Optional[int] = None,
) -> TypeCount:
    """Count realized complete types over ``A`` and how many are wide.

    With ``delta`` given, types are the atoms generated by the Delta-instances;
    with ``delta=None`` (full language) they are Aut(S/A)-orbits on M^k.
    """
    if delta is None:
        if k is None:
            raise InvalidArgument("full-language type counts need the context arity k")
        if S.m > MAX_ORBIT_UNIVERSE:
            raise CapExceeded(f"full-language types are limited to universes of size <= {MAX_ORBIT_UNIVERSE}")
        records = []
        for orb in tuple_orbits(S, k, A):
            records.append({"representative": list(orb.first()), "size": orb.size, "wide": I.is_wide(orb)})
    else:
        _, patterns, atoms = delta_partition(S, delta, A)
        if k is not None and atoms[0].k != k:
            raise ContextMismatch("k disagrees with the Delta context")
        records = [
            {"pattern": "".join("1" if s else "0" for s in pattern), "size": atom.size, "wide": I.is_wide(atom)}
            for pattern, atom in zip(patterns, atoms)
        ]
    return TypeCount(len(records), sum(r["wide"] for r in records), records)
