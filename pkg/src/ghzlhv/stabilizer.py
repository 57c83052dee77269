"""Independent quantum ground truth for Pauli measurements on stabilizer states.

Two deliberately separate classification paths are provided and are
cross-checked against each other by the verifier:

* :func:`ghz_classify` -- a closed form special to the n-qubit GHZ state.
  The state's stabilizer group consists of the products that are (i) all
  I's and Z's with an even number of Z's (sign +), or (ii) X's and Y's on
  every qubit with an even number of Y's, carrying a minus sign exactly
  when that number is not a multiple of 4.

* :class:`StabilizerTableau` -- n phase-tracked generator rows for an
  arbitrary H/CNOT circuit state, queried by Gaussian elimination over
  GF(2) on the letter masks with the sign reconstructed by exact
  multiplication of the selected generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product

from .circuits import Gate, check_indices
from .pauli import DimensionError, PauliProduct, identity, multiply, commutes, support
from .prediction import PredictionKind, definite_kind


def _require_hermitian(p: PauliProduct) -> None:
    if not p.is_hermitian:
        raise ValueError(f"measurable products must have sign +/-1, got i^{p.phase_exp}")


def ghz_classify(p: PauliProduct) -> PredictionKind:
    """Classify a signed product measured on the n-qubit GHZ state."""
    _require_hermitian(p)
    full = (1 << p.n) - 1
    if p.x_mask == 0:
        # I/Z pattern: in the group iff the number of Z's is even.
        if p.z_mask.bit_count() % 2 != 0:
            return PredictionKind.RANDOM
        intrinsic = 1
    elif p.x_mask == full:
        # X/Y pattern on every qubit: Y's sit where the z bit is also set.
        y_count = p.z_mask.bit_count()
        if y_count % 2 != 0:
            return PredictionKind.RANDOM
        intrinsic = 1 if y_count % 4 == 0 else -1
    else:
        return PredictionKind.RANDOM
    return definite_kind(p.sign * intrinsic)


def ghz_generators(n: int) -> tuple[PauliProduct, ...]:
    """X on every qubit, plus Z1 Zj for j = 2..n."""
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    full = (1 << n) - 1
    rows = [PauliProduct(n, full, 0, 0)]
    for j in range(2, n + 1):
        rows.append(PauliProduct(n, 0, 1 | (1 << (j - 1)), 0))
    return tuple(rows)


@dataclass(frozen=True)
class StabilizerTableau:
    """n independent, commuting, Hermitian generator rows.

    Immutable after construction; the row-reduction used by
    :meth:`classify` is built once up front.
    """

    n: int
    generators: tuple[PauliProduct, ...]
    # (pivot bit, reduced 2n-bit letter vector, generator-subset mask) rows
    _pivots: tuple[tuple[int, int, int], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if len(self.generators) != self.n:
            raise ValueError(
                f"need {self.n} generators, got {len(self.generators)}"
            )
        for g in self.generators:
            if g.n != self.n:
                raise DimensionError(f"generator {g} is not on {self.n} qubits")
            _require_hermitian(g)
        for i, g in enumerate(self.generators):
            for other in self.generators[i + 1:]:
                if not commutes(g, other):
                    raise ValueError(f"generators {g} and {other} anticommute")
        object.__setattr__(self, "_pivots", self._reduce())

    def _reduce(self) -> tuple[tuple[int, int, int], ...]:
        # Echelon form over GF(2) of the generators' letter vectors
        # (x_mask | z_mask << n), remembering which subset built each row.
        pivots: list[tuple[int, int, int]] = []
        for idx, g in enumerate(self.generators):
            vec = g.x_mask | (g.z_mask << self.n)
            sel = 1 << idx
            for bit, pvec, psel in pivots:
                if (vec >> bit) & 1:
                    vec ^= pvec
                    sel ^= psel
            if vec == 0:
                raise ValueError(
                    "generators are not independent: a nonempty subset "
                    "multiplies to the identity up to sign"
                )
            pivots.append((vec.bit_length() - 1, vec, sel))
        return tuple(pivots)

    def member_product(self, subset_mask: int) -> PauliProduct:
        """Phase-exact product of the generators selected by a bit mask."""
        acc = identity(self.n)
        for idx in range(self.n):
            if (subset_mask >> idx) & 1:
                acc = multiply(acc, self.generators[idx])
        return acc

    def classify(self, p: PauliProduct) -> PredictionKind:
        """DefinitePlus / DefiniteMinus / Random for a signed product."""
        if p.n != self.n:
            raise DimensionError(f"product on {p.n} qubits, tableau on {self.n}")
        _require_hermitian(p)
        vec = p.x_mask | (p.z_mask << self.n)
        sel = 0
        for bit, pvec, psel in self._pivots:
            if (vec >> bit) & 1:
                vec ^= pvec
                sel ^= psel
        if vec != 0:
            return PredictionKind.RANDOM
        member = self.member_product(sel)
        # Same letters, both Hermitian: phases agree or differ by i^2.
        return definite_kind(p.sign * member.sign)


def ghz_tableau(n: int) -> StabilizerTableau:
    return StabilizerTableau(n, ghz_generators(n))


def conjugate_hadamard(p: PauliProduct, q: int) -> PauliProduct:
    """H X H = Z, H Y H = -Y, H Z H = X on qubit q."""
    if not 1 <= q <= p.n:
        raise IndexError(f"qubit {q} out of range 1..{p.n}")
    b = 1 << (q - 1)
    xb, zb = p.x_mask & b, p.z_mask & b
    phase = p.phase_exp + (2 if (xb and zb) else 0)
    x_mask = (p.x_mask & ~b) | (b if zb else 0)
    z_mask = (p.z_mask & ~b) | (b if xb else 0)
    return PauliProduct(p.n, x_mask, z_mask, phase % 4)


def conjugate_cnot(p: PauliProduct, c: int, t: int) -> PauliProduct:
    """C (XI) C = XX, C (IZ) C = ZZ etc., with the exact sign.

    The sign flips precisely for the XZ -> -YY and YZ -> -XY families,
    i.e. when the control has an x bit, the target a z bit, and
    x_t == z_c.
    """
    if c == t:
        raise ValueError("CNOT control and target must differ")
    for q in (c, t):
        if not 1 <= q <= p.n:
            raise IndexError(f"qubit {q} out of range 1..{p.n}")
    cb, tb = 1 << (c - 1), 1 << (t - 1)
    xc = 1 if p.x_mask & cb else 0
    zc = 1 if p.z_mask & cb else 0
    xt = 1 if p.x_mask & tb else 0
    zt = 1 if p.z_mask & tb else 0
    x_mask = p.x_mask ^ (tb if xc else 0)
    z_mask = p.z_mask ^ (cb if zt else 0)
    phase = p.phase_exp + (2 if xc and zt and (xt ^ zc ^ 1) else 0)
    return PauliProduct(p.n, x_mask, z_mask, phase % 4)


def conjugate_gate(p: PauliProduct, gate: Gate) -> PauliProduct:
    if gate.kind == "H":
        return conjugate_hadamard(p, gate.qubits[0])
    return conjugate_cnot(p, gate.qubits[0], gate.qubits[1])


def tableau_from_circuit(n: int, circuit: tuple[Gate, ...] | list[Gate]) -> StabilizerTableau:
    """Stabilizer of the state the circuit prepares from |0...0>.

    Starts from <Z1, ..., Zn> and conjugates every row through every gate.
    """
    check_indices(circuit, n)
    rows = [PauliProduct(n, 0, 1 << (j - 1), 0) for j in range(1, n + 1)]
    for gate in circuit:
        rows = [conjugate_gate(r, gate) for r in rows]
    return StabilizerTableau(n, tuple(rows))


def tableau_classify(t: StabilizerTableau, p: PauliProduct) -> PredictionKind:
    return t.classify(p)


def joint_distribution(
    t: StabilizerTableau, products: list[PauliProduct] | tuple[PauliProduct, ...]
) -> dict[tuple[int, ...], Fraction]:
    """Exact joint outcome distribution for commuting product measurements.

    The products must have pairwise disjoint supports (which guarantees
    commutation).  Every subset whose phase-tracked operator product is
    definite imposes a parity constraint on the outcome vector; the result
    is uniform over the vectors satisfying all constraints.
    """
    l = len(products)
    seen: set[int] = set()
    for p in products:
        if p.n != t.n:
            raise DimensionError(f"product on {p.n} qubits, tableau on {t.n}")
        _require_hermitian(p)
        sup = {q for q in support(p)}
        if seen & sup:
            raise ValueError("products must have pairwise disjoint supports")
        seen |= sup

    # Operator product for every subset, built incrementally.
    subset_product: dict[int, PauliProduct] = {0: identity(t.n)}
    constraints: list[tuple[int, int]] = []  # (subset mask, required sign)
    for mask in range(1, 1 << l):
        low = mask & -mask
        prod = multiply(subset_product[mask ^ low], products[low.bit_length() - 1])
        subset_product[mask] = prod
        kind = t.classify(prod)
        if kind.is_definite:
            constraints.append((mask, kind.expectation))

    admissible = []
    for bits in range(1 << l):
        # bit k set <=> outcome s_k = -1
        ok = all(
            (-1 if (bits & mask).bit_count() % 2 else 1) == sign
            for mask, sign in constraints
        )
        if ok:
            admissible.append(
                tuple(-1 if (bits >> k) & 1 else 1 for k in range(l))
            )
    weight = Fraction(1, len(admissible))
    return {outcome: weight for outcome in admissible}


def census(n: int, classify=ghz_classify) -> dict[PredictionKind, int]:
    """Count all 2*4^n signed products by classification."""
    counts = {kind: 0 for kind in PredictionKind}
    for x_mask, z_mask, phase in iter_product(
        range(1 << n), range(1 << n), (0, 2)
    ):
        counts[classify(PauliProduct(n, x_mask, z_mask, phase))] += 1
    return counts
