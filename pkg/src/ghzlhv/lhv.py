"""The local-hidden-variable table and its evolution through H and CNOT.

Each qubit row holds one entry per measurement basis (X, Y, Z).  An entry
is ``i**phase_exp`` times a product of the +/-1 random variables R_j
selected by a bit mask (R_j squares to 1, so masks combine by XOR).  The Y
entries are imaginary: the i is not an imaginary outcome but a flag that
controls how Y values combine across qubits in a joint measurement.  When
a product of entries is evaluated, a leftover factor of i is discarded:

    +1 -> +1    +i -> +1    -1 -> -1    -i -> -1

Evaluated values are represented as exponents of i (mod 4), never as
complex numbers: 0 = +1, 1 = +i, 2 = -1, 3 = -i.

Tables are immutable values; gate application returns a new table.  The
CNOT update rules are only faithful when, on both the control and target
rows, X and Z are real, Y is imaginary, the per-row product X*Y*Z is a
bare +/-i (no random variables), and both rows carry the *same* sign of i.
``apply_cnot`` checks this and raises :class:`CnotConsistencyError` rather
than producing a corrupted table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .circuits import Gate
from .pauli import DimensionError, PauliProduct
from .prediction import PredictionKind, definite_kind

BASES = "XYZ"
_COL = {"X": 0, "Y": 1, "Z": 2}


class CnotConsistencyError(ValueError):
    """The affected rows are not correlated the way the CNOT rules need."""


class LhvEntry(NamedTuple):
    """i**phase_exp times the product of the R_j's in the mask."""

    phase_exp: int
    r_mask: int

    @property
    def is_imaginary(self) -> bool:
        return self.phase_exp % 2 == 1


Row = tuple[LhvEntry, LhvEntry, LhvEntry]


def entry_mul(a: LhvEntry, b: LhvEntry) -> LhvEntry:
    """Multiply two entries: phases add mod 4, masks XOR (R_j^2 = 1)."""
    return LhvEntry((a.phase_exp + b.phase_exp) % 4, a.r_mask ^ b.r_mask)


def entry_eval(e: LhvEntry, sample: Sequence[int]) -> int:
    """Value of the entry at a +/-1 sample, as an exponent of i (mod 4)."""
    prod = 1
    mask = e.r_mask
    while mask:
        low = mask & -mask
        prod *= sample[low.bit_length() - 1]
        mask ^= low
    return (e.phase_exp + (0 if prod == 1 else 2)) % 4


def discard_i(value: int) -> int:
    """Strip one factor of i from an evaluated value (exponent mod 4).

    +1 and -1 pass through; +i becomes +1 and -i becomes -1.  The -i case
    is a convention: it never shows up in a definite prediction (imaginary
    products are always random), but a fixed choice keeps per-sample traces
    reproducible.
    """
    return 1 if value % 4 < 2 else -1


def value_str(value: int) -> str:
    return ("+1", "+i", "-1", "-i")[value % 4]


def format_entry(e: LhvEntry) -> str:
    """Render an entry the way the tables are usually written: iR1R2."""
    prefix = ("", "i", "-", "-i")[e.phase_exp % 4]
    if e.r_mask == 0:
        return {"": "1", "-": "-1", "i": "i", "-i": "-i"}[prefix]
    body = "".join(
        f"R{b + 1}" for b in range(e.r_mask.bit_length()) if (e.r_mask >> b) & 1
    )
    return prefix + body


@dataclass(frozen=True, slots=True)
class LhvTable:
    """n rows (qubit 1 first) of (X, Y, Z) entries."""

    n: int
    rows: tuple[Row, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError(f"need {self.n} rows, got {len(self.rows)}")

    def entry(self, q: int, basis: str) -> LhvEntry:
        """Entry for qubit q (1-based) and basis X, Y, or Z."""
        if not 1 <= q <= self.n:
            raise IndexError(f"qubit {q} out of range 1..{self.n}")
        return self.rows[q - 1][_COL[basis.upper()]]


def initial_table(n: int) -> LhvTable:
    """The table for |0...0>: X_j = R_j, Z_j = 1, Y_j = i R_j except that
    qubit 1 gets -i R_1 (so the fan-out CNOTs find matching row signs
    after the Hadamard flips qubit 1's)."""
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    rows = []
    for j in range(1, n + 1):
        bit = 1 << (j - 1)
        y_phase = 3 if j == 1 else 1
        rows.append((LhvEntry(0, bit), LhvEntry(y_phase, bit), LhvEntry(0, 0)))
    return LhvTable(n, tuple(rows))


def xyz_phase(t: LhvTable, q: int) -> int | None:
    """Sign s with X*Y*Z = s*i on row q, or None if the row is not in
    canonical form (X, Z real; Y imaginary; no leftover random variables)."""
    x, y, z = t.rows[q - 1]
    if x.is_imaginary or z.is_imaginary or not y.is_imaginary:
        return None
    combined = entry_mul(entry_mul(x, y), z)
    if combined.r_mask != 0:
        return None
    return 1 if combined.phase_exp == 1 else -1


def apply_hadamard(t: LhvTable, q: int) -> LhvTable:
    """Row update X -> Z, Y -> -Y, Z -> X; other rows untouched."""
    if not 1 <= q <= t.n:
        raise IndexError(f"qubit {q} out of range 1..{t.n}")
    x, y, z = t.rows[q - 1]
    new_row = (z, LhvEntry((y.phase_exp + 2) % 4, y.r_mask), x)
    rows = t.rows[:q - 1] + (new_row,) + t.rows[q:]
    return LhvTable(t.n, rows)


def apply_cnot(t: LhvTable, c: int, target: int) -> LhvTable:
    """Control row gains the target's X; target row gains the control's Z.

    Checks the consistency condition first (see module docstring) and
    raises :class:`CnotConsistencyError` when it fails.
    """
    if c == target:
        raise ValueError("CNOT control and target must differ")
    for q in (c, target):
        if not 1 <= q <= t.n:
            raise IndexError(f"qubit {q} out of range 1..{t.n}")
    sc, st = xyz_phase(t, c), xyz_phase(t, target)
    if sc is None or st is None or sc != st:
        raise CnotConsistencyError(
            f"C-NOT consistency condition violated for control {c}, "
            f"target {target}: rows must both satisfy X*Y*Z = i or both "
            f"X*Y*Z = -i (control: {_phase_desc(sc)}, target: {_phase_desc(st)})"
        )
    xc, yc, zc = t.rows[c - 1]
    xt, yt, zt = t.rows[target - 1]
    new_c = (entry_mul(xc, xt), entry_mul(yc, xt), zc)
    new_t = (xt, entry_mul(zc, yt), entry_mul(zc, zt))
    rows = list(t.rows)
    rows[c - 1] = new_c
    rows[target - 1] = new_t
    out = LhvTable(t.n, tuple(rows))
    assert xyz_phase(out, c) == sc and xyz_phase(out, target) == st
    return out


def _phase_desc(s: int | None) -> str:
    return "not canonical" if s is None else f"XYZ={'i' if s == 1 else '-i'}"


def apply_gate(t: LhvTable, gate: Gate) -> LhvTable:
    if gate.kind == "H":
        return apply_hadamard(t, gate.qubits[0])
    return apply_cnot(t, gate.qubits[0], gate.qubits[1])


def apply_circuit(t: LhvTable, gates: Sequence[Gate]) -> LhvTable:
    for gate in gates:
        t = apply_gate(t, gate)
    return t


def ghz_table(n: int) -> LhvTable:
    """The GHZ table: evolve |0...0> through H(1), CNOT(1,2), ..., CNOT(1,n).

    Qubit 1 ends up with (R_2...R_n, i R_1...R_n, R_1) and every other
    qubit j with (R_j, i R_1 R_j, R_1).
    """
    if n < 2:
        raise ValueError(f"GHZ table needs n >= 2, got {n}")
    t = apply_hadamard(initial_table(n), 1)
    for target in range(2, n + 1):
        t = apply_cnot(t, 1, target)
    return t


@dataclass(frozen=True, slots=True)
class ModelPrediction:
    """What the table says about one signed Pauli product.

    Definite predictions have an empty ``r_mask``; random ones expose the
    per-sample outcome as ``sign`` times the product of the masked R_j's.
    """

    kind: PredictionKind
    sign: int
    r_mask: int


def predict_joint(t: LhvTable, p: PauliProduct) -> ModelPrediction:
    """Multiply the entries selected by the product's letters (identity
    letters contribute 1), fold in the product's sign, discard any i."""
    if p.n != t.n:
        raise DimensionError(f"product on {p.n} qubits, table on {t.n}")
    if not p.is_hermitian:
        raise ValueError(f"measurable products must have sign +/-1, got i^{p.phase_exp}")
    phase = p.phase_exp
    mask = 0
    for b in range(p.n):
        xb = (p.x_mask >> b) & 1
        zb = (p.z_mask >> b) & 1
        if not (xb or zb):
            continue
        e = t.rows[b][2 if not xb else (1 if zb else 0)]
        phase += e.phase_exp
        mask ^= e.r_mask
    sign = discard_i(phase % 4)
    if mask == 0:
        return ModelPrediction(definite_kind(sign), sign, 0)
    return ModelPrediction(PredictionKind.RANDOM, sign, mask)


def local_outcome(t: LhvTable, q: int, basis: str, sample: Sequence[int]) -> int:
    """Raw (pre-protocol) +/-1 value a single-qubit measurement returns."""
    return discard_i(entry_eval(t.entry(q, basis), sample))


def sample_from_index(n: int, index: int) -> tuple[int, ...]:
    """Sample number ``index``: r_j = -1 iff bit j-1 of index is set."""
    return tuple(-1 if (index >> b) & 1 else 1 for b in range(n))


def hidden_samples(n: int) -> Iterator[tuple[int, ...]]:
    """All 2^n samples, in index order."""
    for index in range(1 << n):
        yield sample_from_index(n, index)
