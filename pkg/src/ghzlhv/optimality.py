"""Executable witnesses that n-2 bits of communication are necessary.

Any protocol limited to n-3 bits leaves the qubits split into at least
three communication-disconnected groups.  Treating each group as one
party, six X/Y-type products A..F on the three groups generate four
stabilizer elements (ACE, -ADF, -BCF, -BDE) whose definite outcomes force
deterministic local values with ace = -1, contradicting the +1 the state
assigns ACE.  Equivalently, the combination ACE - ADF - BCF - BDE is
bounded by 2 for any local assignment but takes the value 4 on the state.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

from .pauli import PauliProduct, format_pauli, from_letters, multiply
from .prediction import PredictionKind
from .stabilizer import ghz_classify


@dataclass(frozen=True)
class SubsetOperators:
    """Six products on three contiguous blocks of k, l, m qubits: each
    block gets an all-X product and an X...XY product (Y on its last
    qubit)."""

    k: int
    l: int
    m: int
    A: PauliProduct
    B: PauliProduct
    C: PauliProduct
    D: PauliProduct
    E: PauliProduct
    F: PauliProduct

    @property
    def n(self) -> int:
        return self.k + self.l + self.m


def _block_ops(n: int, start: int, size: int) -> tuple[PauliProduct, PauliProduct]:
    letters_x = ["I"] * n
    letters_y = ["I"] * n
    for pos in range(start, start + size):
        letters_x[pos] = "X"
        letters_y[pos] = "X"
    letters_y[start + size - 1] = "Y"
    return from_letters(letters_x), from_letters(letters_y)


def build_subset_operators(k: int, l: int, m: int) -> SubsetOperators:
    for name, size in (("k", k), ("l", l), ("m", m)):
        if size < 1:
            raise ValueError(f"block size {name} must be positive, got {size}")
    n = k + l + m
    a, b = _block_ops(n, 0, k)
    c, d = _block_ops(n, k, l)
    e, f = _block_ops(n, k + l, m)
    return SubsetOperators(k, l, m, a, b, c, d, e, f)


def mermin_lhv_values() -> set[int]:
    """Values of ace - adf - bcf - bde over all 64 deterministic +/-1
    assignments; always exactly {-2, +2}."""
    values = set()
    for a, b, c, d, e, f in iter_product((1, -1), repeat=6):
        values.add(a * c * e - a * d * f - b * c * f - b * d * e)
    return values


def mermin_terms(ops: SubsetOperators) -> dict[str, PauliProduct]:
    return {
        "ACE": multiply(multiply(ops.A, ops.C), ops.E),
        "ADF": multiply(multiply(ops.A, ops.D), ops.F),
        "BCF": multiply(multiply(ops.B, ops.C), ops.F),
        "BDE": multiply(multiply(ops.B, ops.D), ops.E),
    }


def mermin_quantum_value(ops: SubsetOperators, classify=ghz_classify) -> int:
    """<ACE> - <ADF> - <BCF> - <BDE> on the GHZ state, each expectation
    read off the stabilizer classification."""
    terms = mermin_terms(ops)
    return (
        classify(terms["ACE"]).expectation
        - classify(terms["ADF"]).expectation
        - classify(terms["BCF"]).expectation
        - classify(terms["BDE"]).expectation
    )


@dataclass(frozen=True)
class CommGraph:
    """Qubits as nodes; an edge means at least one bit flows between the
    endpoints.  Simple and undirected."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one node, got {self.n}")
        canonical = []
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u}, {v}) leaves 1..{self.n}")
            edge = (min(u, v), max(u, v))
            if edge in seen:
                raise ValueError(f"duplicate edge {edge}")
            seen.add(edge)
            canonical.append(edge)
        object.__setattr__(self, "edges", tuple(canonical))


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def components(g: CommGraph) -> tuple[tuple[int, ...], ...]:
    """Connected components as sorted tuples, ordered by smallest member."""
    uf = _UnionFind(g.n + 1)
    for u, v in g.edges:
        uf.union(u, v)
    groups: dict[int, list[int]] = {}
    for q in range(1, g.n + 1):
        groups.setdefault(uf.find(q), []).append(q)
    return tuple(sorted((tuple(sorted(c)) for c in groups.values())))


def component_count(g: CommGraph) -> int:
    return len(components(g))


@dataclass(frozen=True)
class InsufficiencyWitness:
    """The full contradiction for one communication graph."""

    n: int
    edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...]
    qubit_order: tuple[int, ...]
    operators: SubsetOperators
    classifications: dict[str, PredictionKind]
    epr_constraints: dict[str, int]
    forced_ace: int
    quantum_ace: int
    lhv_values: tuple[int, ...]
    lhv_bound: int
    quantum_mermin: int

    @property
    def contradiction(self) -> bool:
        return self.forced_ace != self.quantum_ace


def insufficiency_witness(n: int, g: CommGraph) -> InsufficiencyWitness:
    """Contradiction report for any graph with at most n-3 edges.

    Components are merged smallest-first down to exactly three blocks
    (merging only grants the communication more reach than it has), the
    qubits are relabeled so the blocks are contiguous, and the four
    stabilizer elements are classified on the relabeled state.
    """
    if n < 3:
        raise ValueError(f"need at least 3 qubits, got {n}")
    if g.n != n:
        raise ValueError(f"graph has {g.n} nodes, expected {n}")
    if len(g.edges) > n - 3:
        raise ValueError(
            f"{len(g.edges)} edges can connect too much: at most {n - 3} "
            "allowed for a three-block witness"
        )
    comps = [list(c) for c in components(g)]
    while len(comps) > 3:
        comps.sort(key=lambda c: (len(c), c[0]))
        comps[1] = sorted(comps[0] + comps[1])
        comps.pop(0)
    blocks = tuple(sorted((tuple(c) for c in comps), key=lambda c: c[0]))
    qubit_order = tuple(q for block in blocks for q in block)
    k, l, m = (len(b) for b in blocks)

    ops = build_subset_operators(k, l, m)
    terms = mermin_terms(ops)
    classifications = {name: ghz_classify(term) for name, term in terms.items()}
    epr = {
        name.lower(): classifications[name].expectation
        for name in ("ADF", "BCF", "BDE")
    }
    forced_ace = epr["adf"] * epr["bcf"] * epr["bde"]
    quantum_ace = classifications["ACE"].expectation
    return InsufficiencyWitness(
        n=n,
        edges=g.edges,
        components=components(g),
        blocks=blocks,
        qubit_order=qubit_order,
        operators=ops,
        classifications=classifications,
        epr_constraints=epr,
        forced_ace=forced_ace,
        quantum_ace=quantum_ace,
        lhv_values=tuple(sorted(mermin_lhv_values())),
        lhv_bound=max(abs(v) for v in mermin_lhv_values()),
        quantum_mermin=mermin_quantum_value(ops),
    )


def operator_strings(ops: SubsetOperators) -> dict[str, str]:
    return {
        name: format_pauli(getattr(ops, name)) for name in "ABCDEF"
    }
