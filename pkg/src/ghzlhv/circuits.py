"""Circuit description shared by the tableau oracle and the LHV table.

File format: one gate per line, ``H <q>`` or ``CNOT <c> <t>`` with 1-based
qubit indices; ``#`` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


class CircuitParseError(ValueError):
    """Bad gate line; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class Gate:
    """An H or CNOT gate on 1-based qubit indices."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind == "H":
            if len(self.qubits) != 1:
                raise ValueError("H takes exactly one qubit")
        elif self.kind == "CNOT":
            if len(self.qubits) != 2:
                raise ValueError("CNOT takes control and target")
            if self.qubits[0] == self.qubits[1]:
                raise ValueError("CNOT control and target must differ")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if any(q < 1 for q in self.qubits):
            raise ValueError("qubit indices are 1-based")

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.qubits)])


def h(q: int) -> Gate:
    return Gate("H", (q,))


def cnot(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def ghz_circuit(n: int) -> tuple[Gate, ...]:
    """Hadamard on qubit 1 followed by CNOTs fanning out to qubits 2..n."""
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got {n}")
    return (h(1), *(cnot(1, t) for t in range(2, n + 1)))


def parse_circuit(text: str) -> tuple[Gate, ...]:
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].upper()
        try:
            args = [int(p) for p in parts[1:]]
        except ValueError:
            raise CircuitParseError(f"non-integer qubit index in {line!r}", lineno)
        try:
            gates.append(Gate(kind, tuple(args)))
        except ValueError as exc:
            raise CircuitParseError(str(exc), lineno)
    return tuple(gates)


def read_circuit(path: str | Path) -> tuple[Gate, ...]:
    return parse_circuit(Path(path).read_text())


def format_circuit(gates: Iterable[Gate]) -> str:
    return "\n".join(str(g) for g in gates) + "\n"


def check_indices(gates: Iterable[Gate], n: int) -> None:
    """Raise if any gate touches a qubit outside 1..n."""
    for i, g in enumerate(gates, start=1):
        for q in g.qubits:
            if q > n:
                raise ValueError(
                    f"gate {i} ({g}) uses qubit {q} but the register has {n}"
                )
