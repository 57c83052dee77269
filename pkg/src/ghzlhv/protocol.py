"""Alice's sign-correction protocol on top of the LHV table.

Raw per-qubit values multiply to the joint prediction only up to discarded
factors of i, so the model needs classical communication to make composite
local predictions agree with joint ones.  Every qubit except Alice's
(qubit 1) and the last one reports whether Y was measured there (n-2 bits).
Writing r1 = 1 when Alice measures X or Y and q_j = i when Y is measured
on qubit j, Alice flips her local outcome iff r1 * q_1 ... q_{n-1} is i
or -1.  The same rule runs over l disjoint sets of qubits with per-set
imaginary flags and l-2 communicated bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lhv import LhvTable, discard_i, entry_eval, entry_mul, LhvEntry, local_outcome
from .pauli import PauliProduct, format_pauli, from_letters, support

SETTING_LETTERS = "XYZI"


def parse_settings(text: str, n: int | None = None) -> str:
    """Validate a settings string (one of X/Y/Z/I per qubit; I = unmeasured)."""
    settings = text.upper()
    for i, ch in enumerate(settings):
        if ch not in SETTING_LETTERS:
            raise ValueError(f"invalid setting {ch!r} at position {i}")
    if n is not None and len(settings) != n:
        raise ValueError(f"expected {n} settings, got {len(settings)}")
    return settings


def measured_qubits(settings: str) -> tuple[int, ...]:
    return tuple(j for j in range(1, len(settings) + 1) if settings[j - 1] != "I")


def induced_product(settings: str, subset: Sequence[int] | None = None) -> PauliProduct:
    """The (positive) Pauli product measured jointly on the given qubits."""
    chosen = set(subset) if subset is not None else set(measured_qubits(settings))
    letters = [
        settings[j - 1] if j in chosen else "I" for j in range(1, len(settings) + 1)
    ]
    return from_letters(letters)


def flip_decision(settings: str) -> bool:
    """True iff Alice flips: she measured X or Y and the number of Y's on
    qubits 1..n-1 is 1 or 2 mod 4 (i.e. r1 q_1...q_{n-1} is i or -1).
    Qubit n's setting is deliberately ignored; flips it would have vetoed
    only touch products that are random anyway."""
    if settings[0] not in "XY":
        return False
    return settings[:-1].count("Y") % 4 in (1, 2)


@dataclass
class TrialRecord:
    """One protocol run for single-qubit measurements."""

    settings: str
    sample: tuple[int, ...]
    raw_local: dict[int, int]
    flip_applied: bool
    corrected_local: dict[int, int]
    bits_communicated: int
    messages: tuple[tuple[int, int], ...] | None = None


def run_protocol(
    t: LhvTable, settings: str, sample: Sequence[int], trace: bool = False
) -> TrialRecord:
    """Evaluate raw local outcomes, apply Alice's flip, count the bits."""
    n = t.n
    if len(settings) != n:
        raise ValueError(f"settings for {len(settings)} qubits, table on {n}")
    raw = {
        q: local_outcome(t, q, settings[q - 1], sample)
        for q in measured_qubits(settings)
    }
    flip = flip_decision(settings)
    corrected = dict(raw)
    if flip:
        corrected[1] = -raw[1]
    messages = None
    if trace:
        # Everyone but Alice (qubit 1) and the last qubit sends a Y-flag.
        messages = tuple(
            (j, 1 if settings[j - 1] == "Y" else 0) for j in range(2, n)
        )
    return TrialRecord(
        settings=settings,
        sample=tuple(sample),
        raw_local=raw,
        flip_applied=flip,
        corrected_local=corrected,
        bits_communicated=max(n - 2, 0),
        messages=messages,
    )


@dataclass(frozen=True)
class SubsetSettings:
    """A partition of the qubits into l disjoint sets (Alice's first), each
    measuring one Pauli product supported inside the set."""

    n: int
    blocks: tuple[tuple[int, ...], ...]
    products: tuple[PauliProduct, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.products) or not self.blocks:
            raise ValueError("need one product per block, at least one block")
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValueError("blocks must be nonempty")
            if seen & set(block):
                raise ValueError("blocks must be disjoint")
            seen |= set(block)
        if seen != set(range(1, self.n + 1)):
            raise ValueError(f"blocks must partition 1..{self.n}")
        for block, p in zip(self.blocks, self.products):
            if p.n != self.n:
                raise ValueError(f"product {p} is not on {self.n} qubits")
            if not p.is_hermitian:
                raise ValueError("measured products must have sign +/-1")
            if not support(p) <= set(block):
                raise ValueError(
                    f"product {format_pauli(p)} leaves its block {block}"
                )

    @property
    def l(self) -> int:
        return len(self.blocks)


def subset_settings(n: int, partition: str, products: str) -> SubsetSettings:
    """Build from CLI-style strings: partition "1,2|3|4", products "XY|X|Y"
    (block-local letters, in block order)."""
    blocks = []
    for part in partition.split("|"):
        qubits = tuple(int(s) for s in part.split(","))
        blocks.append(qubits)
    specs = products.split("|")
    if len(specs) != len(blocks):
        raise ValueError(
            f"{len(blocks)} blocks but {len(specs)} products"
        )
    full_products = []
    for block, spec in zip(blocks, specs):
        body = spec
        sign = 1
        if body[:1] in "+-":
            sign = 1 if body[0] == "+" else -1
            body = body[1:]
        if len(body) != len(block):
            raise ValueError(
                f"product {spec!r} has {len(body)} letters for block {block}"
            )
        letters = ["I"] * n
        for q, ch in zip(block, body):
            if not 1 <= q <= n:
                raise ValueError(f"qubit {q} out of range 1..{n}")
            letters[q - 1] = ch
        full_products.append(from_letters(letters, sign))
    return SubsetSettings(n, tuple(blocks), tuple(full_products))


def set_entry_product(t: LhvTable, p: PauliProduct) -> LhvEntry:
    """Product of the table entries selected by one set's Pauli product,
    with the product's own sign folded in."""
    acc = LhvEntry(p.phase_exp, 0)
    for b in range(p.n):
        xb = (p.x_mask >> b) & 1
        zb = (p.z_mask >> b) & 1
        if not (xb or zb):
            continue
        acc = entry_mul(acc, t.rows[b][2 if not xb else (1 if zb else 0)])
    return acc


def alice_set_active(ss: SubsetSettings) -> bool:
    """r1 for subset mode: 0 when Alice's set measures nothing at all or
    has a Z anywhere in its product, 1 otherwise."""
    p = ss.products[0]
    letters = [p.letter(q) for q in ss.blocks[0]]
    if all(ch == "I" for ch in letters):
        return False
    if any(ch == "Z" for ch in letters):
        return False
    return True


def subset_flip_decision(ss: SubsetSettings, q_flags: Sequence[bool]) -> bool:
    """Alice flips her set's outcome iff her set is active and the number
    of imaginary flags among sets 1..l-1 is 1 or 2 mod 4 (the last set's
    flag is never communicated)."""
    if len(q_flags) != ss.l:
        raise ValueError(f"need {ss.l} flags, got {len(q_flags)}")
    if not alice_set_active(ss):
        return False
    return sum(1 for f in q_flags[: ss.l - 1] if f) % 4 in (1, 2)


@dataclass
class SubsetTrialRecord:
    """One protocol run in l-set mode."""

    subsets: SubsetSettings
    sample: tuple[int, ...]
    q_flags: tuple[bool, ...]
    raw_outcomes: tuple[int, ...]
    flip_applied: bool
    corrected_outcomes: tuple[int, ...]
    bits_communicated: int
    messages: tuple[tuple[int, int], ...] | None = None


def run_subset_protocol(
    t: LhvTable, ss: SubsetSettings, sample: Sequence[int], trace: bool = False
) -> SubsetTrialRecord:
    if ss.n != t.n:
        raise ValueError(f"settings on {ss.n} qubits, table on {t.n}")
    entries = [set_entry_product(t, p) for p in ss.products]
    q_flags = tuple(e.is_imaginary for e in entries)
    raw = tuple(discard_i(entry_eval(e, sample)) for e in entries)
    flip = subset_flip_decision(ss, q_flags)
    corrected = ((-raw[0] if flip else raw[0]),) + raw[1:]
    messages = None
    if trace:
        messages = tuple(
            (k, 1 if q_flags[k - 1] else 0) for k in range(2, ss.l)
        )
    return SubsetTrialRecord(
        subsets=ss,
        sample=tuple(sample),
        q_flags=q_flags,
        raw_outcomes=raw,
        flip_applied=flip,
        corrected_outcomes=corrected,
        bits_communicated=max(ss.l - 2, 0),
        messages=messages,
    )
