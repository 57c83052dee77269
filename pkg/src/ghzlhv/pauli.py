"""Exact, phase-tracked algebra of signed n-qubit Pauli products.

A product is stored in symplectic form: two n-bit masks plus a power of i.
Qubit 1 is the leftmost letter of the string form ("XYZ" puts X on qubit 1)
and maps to the lowest-order mask bit.  Bit j-1 of ``x_mask`` is set when
qubit j carries X or Y; bit j-1 of ``z_mask`` when it carries Z or Y:

    (x, z) = (0, 0) -> I    (1, 0) -> X    (1, 1) -> Y    (0, 1) -> Z

The operator equals ``i**phase_exp`` times the tensor product of the
letters.  Phases are kept as integer exponents mod 4 -- no complex
arithmetic anywhere.  Hermitian (measurable) products have ``phase_exp``
0 or 2, i.e. sign +1 or -1; exponents 1 and 3 arise only as intermediate
multiplication results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

LETTERS = "IXYZ"

_XZ_BY_LETTER = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_LETTER_BY_XZ = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}


class PauliParseError(ValueError):
    """Malformed Pauli string.  ``position`` is the 0-based index of the
    offending character, or None when the problem is the overall length."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


@dataclass(frozen=True, slots=True)
class PauliProduct:
    """A signed (or, transiently, i-phased) product of Pauli letters."""

    n: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits at positions >= n")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1; only Hermitian products carry a sign."""
        if not self.is_hermitian:
            raise ValueError("non-Hermitian product has no real sign")
        return 1 if self.phase_exp == 0 else -1

    def letter(self, q: int) -> str:
        """Letter on qubit q (1-based)."""
        if not 1 <= q <= self.n:
            raise IndexError(f"qubit {q} out of range 1..{self.n}")
        b = q - 1
        return _LETTER_BY_XZ[(self.x_mask >> b) & 1, (self.z_mask >> b) & 1]

    def letters(self) -> str:
        """The unsigned letter string, qubit 1 first."""
        return "".join(self.letter(q) for q in range(1, self.n + 1))

    def __mul__(self, other: "PauliProduct") -> "PauliProduct":
        return multiply(self, other)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.letters()


def identity(n: int) -> PauliProduct:
    return PauliProduct(n, 0, 0, 0)


def from_letters(letters: Iterable[str], sign: int = 1) -> PauliProduct:
    """Build a product from per-qubit letters (qubit 1 first)."""
    x = z = 0
    count = 0
    for i, ch in enumerate(letters):
        xb, zb = _XZ_BY_LETTER[ch.upper()]
        x |= xb << i
        z |= zb << i
        count += 1
    phase = 0 if sign == 1 else 2
    return PauliProduct(count, x, z, phase)


def parse_pauli(text: str, n: int) -> PauliProduct:
    """Parse ``sign? [IXYZixyz]{n}`` into a PauliProduct.

    The optional sign is "+" or "-"; anything else (notably an "i" phase
    prefix) is rejected.
    """
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    body = text
    offset = 0
    phase = 0
    if body[:1] in ("+", "-"):
        phase = 0 if body[0] == "+" else 2
        body = body[1:]
        offset = 1
    if len(body) != n:
        if len(body) == n + 1 and body[0] in "iI" and all(
            c.upper() in LETTERS for c in body[1:]
        ):
            raise PauliParseError(
                f"imaginary phase prefix at position {offset}: only '+'/'-' "
                "signs are allowed",
                position=offset,
            )
        raise PauliParseError(
            f"expected {n} Pauli letters, got {len(body)}", position=None
        )
    x = z = 0
    for i, ch in enumerate(body):
        up = ch.upper()
        if up not in _XZ_BY_LETTER:
            raise PauliParseError(
                f"invalid Pauli letter {ch!r} at position {offset + i}",
                position=offset + i,
            )
        xb, zb = _XZ_BY_LETTER[up]
        x |= xb << i
        z |= zb << i
    return PauliProduct(n, x, z, phase)


def multiply(p: PauliProduct, q: PauliProduct) -> PauliProduct:
    """Operator product p*q with the exact accumulated power of i.

    Writing each letter as i^(x*z) X^x Z^z and commuting X's past Z's gives,
    per qubit, an i-exponent of  x1*z1 + x2*z2 - x*z + 2*z1*x2  for the
    product letter (x, z) = (x1^x2, z1^z2); the masks sum those via
    popcounts.
    """
    if p.n != q.n:
        raise DimensionError(f"qubit counts differ: {p.n} != {q.n}")
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    phase = (
        p.phase_exp
        + q.phase_exp
        + (p.x_mask & p.z_mask).bit_count()
        + (q.x_mask & q.z_mask).bit_count()
        - (x & z).bit_count()
        + 2 * (p.z_mask & q.x_mask).bit_count()
    )
    return PauliProduct(p.n, x, z, phase % 4)


def commutes(p: PauliProduct, q: PauliProduct) -> bool:
    """True iff the symplectic inner product of p and q has even parity."""
    if p.n != q.n:
        raise DimensionError(f"qubit counts differ: {p.n} != {q.n}")
    parity = (
        (p.x_mask & q.z_mask).bit_count() + (p.z_mask & q.x_mask).bit_count()
    ) & 1
    return parity == 0


def support(p: PauliProduct) -> frozenset[int]:
    """1-based qubit indices where the letter is not I."""
    mask = p.x_mask | p.z_mask
    return frozenset(b + 1 for b in range(p.n) if (mask >> b) & 1)


def format_pauli(p: PauliProduct) -> str:
    """Canonical string form of a Hermitian product ("+": omitted)."""
    if not p.is_hermitian:
        raise ValueError(
            f"non-Hermitian product (phase i^{p.phase_exp}) has no string form"
        )
    return ("-" if p.phase_exp == 2 else "") + p.letters()
