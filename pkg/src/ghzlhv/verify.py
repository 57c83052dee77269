"""Exhaustive and sampling sweeps tying the hidden-variable model to the
stabilizer oracle.

Exhaustive modes iterate complete spaces (all signed products, all
settings x samples x subsets, all partitions x per-block products) and
demand exact agreement -- the model is deterministic given the hidden
sample, so balance checks are exact counts, not statistics.  The sampling
mode exists for qubit counts beyond the exhaustive caps and is fully
reproducible from its seed.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
from typing import Iterator, Sequence

from scipy.stats import binomtest

from .lhv import (
    LhvTable,
    discard_i,
    entry_eval,
    ghz_table,
    hidden_samples,
    predict_joint,
    sample_from_index,
)
from .pauli import PauliProduct, format_pauli
from .prediction import PredictionKind
from .protocol import (
    SubsetSettings,
    induced_product,
    measured_qubits,
    parse_settings,
    run_protocol,
    run_subset_protocol,
    set_entry_product,
    subset_flip_decision,
)
from .stabilizer import ghz_classify, ghz_tableau, joint_distribution

MAX_COUNTEREXAMPLES = 32
RNG_ALGORITHM = "mt19937"

DEFAULT_CAP_PRODUCTS = 8
DEFAULT_CAP_CORRELATIONS = 6
DEFAULT_CAP_SUBSETS = 5


@dataclass
class VerificationReport:
    """Outcome of one sweep; ``counterexamples`` keeps at most
    MAX_COUNTEREXAMPLES entries while ``mismatches`` counts all of them."""

    mode: str
    n: int
    params: dict
    cases: int = 0
    mismatches: int = 0
    counterexamples: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def record(self, counterexample: dict) -> None:
        self.mismatches += 1
        if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
            self.counterexamples.append(counterexample)

    def to_dict(self, include_wall_time: bool = True) -> dict:
        out = {
            "mode": self.mode,
            "n": self.n,
            "params": self.params,
            "cases": self.cases,
            "mismatches": self.mismatches,
            "counterexamples": self.counterexamples,
            "details": self.details,
            "passed": self.passed,
        }
        if include_wall_time:
            out["wall_time_s"] = self.wall_time_s
        return out


def _check_cap(n: int, cap: int, mode: str) -> None:
    if not 2 <= n <= cap:
        raise ValueError(f"{mode} sweep supports 2 <= n <= {cap}, got {n}")


def _parity_patterns(n: int) -> list[int]:
    """patterns[b] has bit ``idx`` set iff sample ``idx`` gives R_{b+1} = -1,
    so XORing patterns over a mask evaluates the masked product of R's on
    every sample at once."""
    patterns = [0] * n
    for idx in range(1 << n):
        for b in range(n):
            if (idx >> b) & 1:
                patterns[b] |= 1 << idx
    return patterns


def _outcome_vector(patterns: list[int], sign: int, r_mask: int, n: int) -> int:
    """Bit ``idx`` set iff sign * prod(R in mask) is -1 > on sample idx."""
    vec = 0
    mask = r_mask
    while mask:
        low = mask & -mask
        vec ^= patterns[low.bit_length() - 1]
        mask ^= low
    if sign == -1:
        vec ^= (1 << (1 << n)) - 1
    return vec


def verify_products(n: int, cap: int = DEFAULT_CAP_PRODUCTS) -> VerificationReport:
    """Classify all 2*4^n signed products via the closed form, the tableau,
    and the table; demand three-way agreement, the 2^n/2^n/rest census, and
    exact +/- balance of every random product over all 2^n samples."""
    _check_cap(n, cap, "products")
    start = time.perf_counter()
    report = VerificationReport("products", n, {"cap": cap})
    table = ghz_table(n)
    tableau = ghz_tableau(n)
    patterns = _parity_patterns(n)
    half = 1 << (n - 1)
    census = {kind: 0 for kind in PredictionKind}
    for x_mask, z_mask, phase in iter_product(
        range(1 << n), range(1 << n), (0, 2)
    ):
        p = PauliProduct(n, x_mask, z_mask, phase)
        report.cases += 1
        closed = ghz_classify(p)
        via_tableau = tableau.classify(p)
        model = predict_joint(table, p)
        if not (closed is via_tableau is model.kind):
            report.record(
                {
                    "product": format_pauli(p),
                    "closed_form": closed.value,
                    "tableau": via_tableau.value,
                    "model": model.kind.value,
                }
            )
            continue
        census[closed] += 1
        if model.kind is PredictionKind.RANDOM:
            vec = _outcome_vector(patterns, model.sign, model.r_mask, n)
            plus = (1 << n) - vec.bit_count()
            if plus != half:
                report.record(
                    {
                        "product": format_pauli(p),
                        "mismatch": "random product not exactly balanced",
                        "plus_count": plus,
                        "samples": 1 << n,
                    }
                )
    expected = {
        PredictionKind.DEFINITE_PLUS: 1 << n,
        PredictionKind.DEFINITE_MINUS: 1 << n,
        PredictionKind.RANDOM: 2 * 4**n - (1 << (n + 1)),
    }
    report.details["census"] = {kind.value: census[kind] for kind in PredictionKind}
    if census != expected:
        report.record(
            {
                "mismatch": "census",
                "expected": {k.value: v for k, v in expected.items()},
                "got": {k.value: v for k, v in census.items()},
            }
        )
    report.wall_time_s = time.perf_counter() - start
    return report


def verify_correlations(n: int, cap: int = DEFAULT_CAP_CORRELATIONS) -> VerificationReport:
    """Run the protocol for every settings vector and every hidden sample;
    check every qubit subset's corrected product against the oracle,
    per-sample for definite products and as an exact half/half count for
    random ones.  Also checks the n-2 bit count on every trial."""
    _check_cap(n, cap, "correlations")
    start = time.perf_counter()
    report = VerificationReport("correlations", n, {"cap": cap})
    table = ghz_table(n)
    nsamples = 1 << n
    all_minus = (1 << nsamples) - 1
    half = nsamples >> 1
    expected_bits = max(n - 2, 0)
    for combo in iter_product("IXYZ", repeat=n):
        settings = "".join(combo)
        measured = measured_qubits(settings)
        vectors = dict.fromkeys(measured, 0)
        for idx in range(nsamples):
            rec = run_protocol(table, settings, sample_from_index(n, idx))
            if rec.bits_communicated != expected_bits:
                report.record(
                    {
                        "settings": settings,
                        "mismatch": "bit count",
                        "expected": expected_bits,
                        "got": rec.bits_communicated,
                    }
                )
            for q in measured:
                if rec.corrected_local[q] == -1:
                    vectors[q] |= 1 << idx
        for subset_mask in range(1 << n):
            subset = [q for q in range(1, n + 1) if (subset_mask >> (q - 1)) & 1]
            active = [q for q in subset if q in vectors]
            vec = 0
            for q in active:
                vec ^= vectors[q]
            kind = ghz_classify(induced_product(settings, active))
            report.cases += 1
            if kind is PredictionKind.DEFINITE_PLUS:
                ok = vec == 0
            elif kind is PredictionKind.DEFINITE_MINUS:
                ok = vec == all_minus
            else:
                ok = vec.bit_count() == half
            if not ok:
                bad = _first_offender(vec, kind, nsamples)
                report.record(
                    {
                        "settings": settings,
                        "subset": subset,
                        "expected": kind.value,
                        "sample": list(sample_from_index(n, bad)) if bad is not None else None,
                        "plus_count": nsamples - vec.bit_count(),
                        "samples": nsamples,
                    }
                )
    report.details["settings_swept"] = 4**n
    report.details["samples_per_settings"] = nsamples
    report.wall_time_s = time.perf_counter() - start
    return report


def _first_offender(vec: int, kind: PredictionKind, nsamples: int) -> int | None:
    """Index of a sample violating a definite prediction, if any."""
    if kind is PredictionKind.DEFINITE_PLUS and vec:
        return (vec & -vec).bit_length() - 1
    if kind is PredictionKind.DEFINITE_MINUS:
        flipped = vec ^ ((1 << nsamples) - 1)
        if flipped:
            return (flipped & -flipped).bit_length() - 1
    return None


def _set_partitions(n: int, max_blocks: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Partitions of 1..n in restricted-growth order: the block containing
    qubit 1 comes first and blocks are ordered by smallest member."""
    labels = [0] * n

    def rec(i: int, used: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(used)]
            for q, lab in enumerate(labels, start=1):
                blocks[lab].append(q)
            yield tuple(tuple(b) for b in blocks)
            return
        for lab in range(min(used + 1, max_blocks)):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab + 1))

    yield from rec(1, 1)


def subset_outcome_distribution(
    t: LhvTable, ss: SubsetSettings
) -> dict[tuple[int, ...], Fraction]:
    """Joint distribution of the corrected per-set outcomes over all 2^n
    hidden samples (the protocol's flip depends only on the settings, so it
    is hoisted out of the sample loop)."""
    entries = [set_entry_product(t, p) for p in ss.products]
    flags = [e.is_imaginary for e in entries]
    flip = subset_flip_decision(ss, flags)
    counts: Counter = Counter()
    for sample in hidden_samples(t.n):
        raw = [discard_i(entry_eval(e, sample)) for e in entries]
        if flip:
            raw[0] = -raw[0]
        counts[tuple(raw)] += 1
    total = 1 << t.n
    return {outcome: Fraction(c, total) for outcome, c in counts.items()}


def verify_subsets(
    n: int,
    max_l: int | None = None,
    cap: int = DEFAULT_CAP_SUBSETS,
    alphabet: str = "IXYZ",
) -> VerificationReport:
    """For every partition into at most max_l sets and every per-block
    product over the alphabet, the corrected-outcome distribution must equal
    the oracle's joint distribution exactly, and each trial must cost
    max(l-2, 0) bits."""
    _check_cap(n, cap, "subsets")
    max_l = n if max_l is None else min(max_l, n)
    start = time.perf_counter()
    report = VerificationReport(
        "subsets", n, {"cap": cap, "max_l": max_l, "alphabet": alphabet}
    )
    table = ghz_table(n)
    tableau = ghz_tableau(n)
    probe = sample_from_index(n, 0)
    for blocks in _set_partitions(n, max_l):
        l = len(blocks)
        per_block = [iter_product(alphabet, repeat=len(b)) for b in blocks]
        for combo in iter_product(*per_block):
            letters = ["I"] * n
            for block, block_letters in zip(blocks, combo):
                for q, ch in zip(block, block_letters):
                    letters[q - 1] = ch
            products = tuple(
                induced_product("".join(letters), block) for block in blocks
            )
            ss = SubsetSettings(n, blocks, products)
            report.cases += 1
            rec = run_subset_protocol(table, ss, probe)
            model = subset_outcome_distribution(table, ss)
            oracle = joint_distribution(tableau, products)
            problems = []
            if rec.bits_communicated != max(l - 2, 0):
                problems.append(
                    f"bit count {rec.bits_communicated} != {max(l - 2, 0)}"
                )
            if model.get(rec.corrected_outcomes, Fraction(0)) == 0:
                problems.append("probe trial outside the model distribution")
            if model != oracle:
                problems.append("distribution differs from oracle")
            if problems:
                report.record(
                    {
                        "partition": "|".join(
                            ",".join(map(str, b)) for b in blocks
                        ),
                        "products": "|".join(format_pauli(p) for p in products),
                        "problems": problems,
                        "model": _dist_json(model),
                        "oracle": _dist_json(oracle),
                    }
                )
    report.wall_time_s = time.perf_counter() - start
    return report


def _dist_json(dist: dict[tuple[int, ...], Fraction]) -> dict[str, str]:
    return {
        ",".join(f"{v:+d}" for v in outcome): str(weight)
        for outcome, weight in sorted(dist.items())
    }


@dataclass
class TargetStats:
    """Empirical record for one subset product in a sampled run."""

    qubits: tuple[int, ...]
    product: str
    classification: str
    plus_count: int
    trials: int
    frequency: float
    ci_low: float
    ci_high: float
    consistent: bool | None  # None for random targets: nothing exact to check


@dataclass
class SampleReport:
    """Reproducible summary of a sampled protocol run (no wall time, so the
    same seed gives byte-identical output)."""

    n: int
    settings: str
    trials: int
    seed: int
    rng_algorithm: str
    bits_communicated: int
    targets: list[TargetStats]

    @property
    def passed(self) -> bool:
        return all(t.consistent is not False for t in self.targets)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "settings": self.settings,
            "trials": self.trials,
            "seed": self.seed,
            "rng_algorithm": self.rng_algorithm,
            "bits_communicated": self.bits_communicated,
            "targets": [vars(t) | {"qubits": list(t.qubits)} for t in self.targets],
            "passed": self.passed,
        }


def sample_trials(
    n: int, settings: str, trials: int, seed: int
) -> SampleReport:
    """Monte-Carlo mode for n beyond the exhaustive caps: seeded samples,
    exact-binomial (Clopper-Pearson) 95% intervals on every frequency, and a
    hard consistency check on definite products only."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    settings = parse_settings(settings, n)
    table = ghz_table(n)
    measured = measured_qubits(settings)
    targets: list[tuple[int, ...]] = [(q,) for q in measured]
    if len(measured) > 1:
        targets.append(measured)
    rng = random.Random(seed)
    plus_counts = [0] * len(targets)
    bits = max(n - 2, 0)
    for _ in range(trials):
        sample = sample_from_index(n, rng.getrandbits(n))
        rec = run_protocol(table, settings, sample)
        bits = rec.bits_communicated
        for i, target in enumerate(targets):
            value = 1
            for q in target:
                value *= rec.corrected_local[q]
            if value == 1:
                plus_counts[i] += 1
    stats = []
    for target, plus in zip(targets, plus_counts):
        product = induced_product(settings, target)
        kind = ghz_classify(product)
        ci = binomtest(plus, trials).proportion_ci(
            confidence_level=0.95, method="exact"
        )
        if kind.is_definite:
            consistent = plus == (trials if kind.expectation == 1 else 0)
        else:
            consistent = None
        stats.append(
            TargetStats(
                qubits=target,
                product=format_pauli(product),
                classification=kind.value,
                plus_count=plus,
                trials=trials,
                frequency=plus / trials,
                ci_low=float(ci.low),
                ci_high=float(ci.high),
                consistent=consistent,
            )
        )
    return SampleReport(
        n=n,
        settings=settings,
        trials=trials,
        seed=seed,
        rng_algorithm=RNG_ALGORITHM,
        bits_communicated=bits,
        targets=stats,
    )


def settings_sweep(n: int, settings: str, subset_limit: int = 6) -> dict:
    """Exhaustive single-settings table for the CLI: every subset of the
    measured qubits (all of them when there are at most ``subset_limit``,
    otherwise singletons plus the full set), with exact counts over all 2^n
    samples and the oracle verdicts."""
    if n > 16:
        raise ValueError("exhaustive sweep capped at n = 16; use sampling")
    settings = parse_settings(settings, n)
    table = ghz_table(n)
    measured = measured_qubits(settings)
    nsamples = 1 << n
    vectors = dict.fromkeys(measured, 0)
    bits = max(n - 2, 0)
    for idx in range(nsamples):
        rec = run_protocol(table, settings, sample_from_index(n, idx))
        bits = rec.bits_communicated
        for q in measured:
            if rec.corrected_local[q] == -1:
                vectors[q] |= 1 << idx
    if len(measured) <= subset_limit:
        subsets: list[tuple[int, ...]] = [
            tuple(q for i, q in enumerate(measured) if (mask >> i) & 1)
            for mask in range(1, 1 << len(measured))
        ]
        truncated = False
    else:
        subsets = [(q,) for q in measured]
        subsets.append(tuple(measured))
        truncated = True
    rows = []
    all_ok = True
    for subset in subsets:
        vec = 0
        for q in subset:
            vec ^= vectors[q]
        plus = nsamples - vec.bit_count()
        kind = ghz_classify(induced_product(settings, subset))
        if kind is PredictionKind.DEFINITE_PLUS:
            ok = plus == nsamples
        elif kind is PredictionKind.DEFINITE_MINUS:
            ok = plus == 0
        else:
            ok = plus == nsamples // 2
        all_ok = all_ok and ok
        rows.append(
            {
                "qubits": list(subset),
                "product": format_pauli(induced_product(settings, subset)),
                "classification": kind.value,
                "plus_count": plus,
                "samples": nsamples,
                "consistent": ok,
            }
        )
    return {
        "n": n,
        "settings": settings,
        "samples": nsamples,
        "bits_communicated": bits,
        "subsets_truncated": truncated,
        "rows": rows,
        "passed": all_ok,
    }
