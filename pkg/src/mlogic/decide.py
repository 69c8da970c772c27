"""The end-to-end decision pipeline.

A closed sentence is translated to a quantifier-free counting tree; if it
is pure (no free predicate symbols) the tree mentions only whole-domain
counts, so its truth depends on the domain size alone.  Evaluating at
sizes 1..N for N = largest bound + 1 determines the whole spectrum,
because every atom is constant beyond its bound.  The sentence is valid
exactly when the spectrum is all of [1, oo), unsatisfiable when it is
empty, and size-contingent otherwise.  Sentences with free predicate
symbols get the first-order resultant instead of a verdict.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass

from .elimination import Trace, eliminate_all
from .errors import ContractError, OutOfScopeError, ResourceLimitError
from .limits import DEFAULT_LIMITS, Limits
from .normal import (CountingFormula, counting_leaves, counting_max_bound,
                     eval_counting_at_size, render_counting, CountAtom, CBool)
from .syntax import Formula, FormulaClass, classify, format_formula, free_symbols


@dataclass(frozen=True)
class Spectrum:
    """Domain sizes on which a pure sentence holds: disjoint, non-adjacent,
    ascending intervals; hi is None only on the last (unbounded) interval."""

    intervals: tuple[tuple[int, int | None], ...]

    @classmethod
    def normalize(cls, intervals) -> "Spectrum":
        items = sorted(((lo, hi) for lo, hi in intervals if hi is None or hi >= lo),
                       key=lambda iv: iv[0])
        merged: list[list] = []
        for lo, hi in items:
            if merged and (merged[-1][1] is None or lo <= merged[-1][1] + 1):
                if merged[-1][1] is not None:
                    merged[-1][1] = hi if hi is None else max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def from_values(cls, values: list[bool], tail: bool) -> "Spectrum":
        """Membership at sizes 1..len(values); `tail` is the constant truth
        value from len(values)+1 on."""
        intervals = []
        start = None
        for idx, v in enumerate(values, start=1):
            if v and start is None:
                start = idx
            elif not v and start is not None:
                intervals.append((start, idx - 1))
                start = None
        if tail:
            intervals.append((start if start is not None else len(values) + 1, None))
        elif start is not None:
            intervals.append((start, len(values)))
        return cls.normalize(intervals)

    @classmethod
    def empty(cls) -> "Spectrum":
        return cls(())

    @classmethod
    def all_sizes(cls) -> "Spectrum":
        return cls(((1, None),))

    def contains(self, n: int) -> bool:
        for lo, hi in self.intervals:
            if lo <= n and (hi is None or n <= hi):
                return True
        return False

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_all(self) -> bool:
        return self.intervals == ((1, None),)

    def complement(self) -> "Spectrum":
        """Complement within [1, oo)."""
        out = []
        next_lo = 1
        for lo, hi in self.intervals:
            if lo > next_lo:
                out.append((next_lo, lo - 1))
            if hi is None:
                return Spectrum.normalize(out)
            next_lo = hi + 1
        out.append((next_lo, None))
        return Spectrum.normalize(out)

    def __str__(self) -> str:
        if not self.intervals:
            return "∅"
        parts = []
        for lo, hi in self.intervals:
            if hi is None:
                parts.append(f"[{lo},∞)")
            elif hi == lo:
                parts.append(f"{{{lo}}}")
            elif hi == lo + 1:
                parts.append(f"{{{lo},{hi}}}")
            else:
                parts.append(f"[{lo},{hi}]")
        return " ∪ ".join(parts)


class VerdictKind(enum.Enum):
    VALID = "valid"
    UNSATISFIABLE = "unsat"
    SIZE_CONTINGENT = "contingent"
    RESULTANT_ONLY = "resultant"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    spectrum: Spectrum | None = None
    resultant: CountingFormula | None = None

    def __str__(self) -> str:
        if self.kind is VerdictKind.VALID:
            return "Valid"
        if self.kind is VerdictKind.UNSATISFIABLE:
            return "Unsatisfiable"
        if self.kind is VerdictKind.SIZE_CONTINGENT:
            return f"SizeContingent: {self.spectrum}"
        return f"Resultant: {render_counting(self.resultant)}"


def spectrum_of(cf: CountingFormula) -> Spectrum:
    """Exact spectrum of a pure counting tree.

    Evaluates at sizes 1..N with N = largest bound + 1; beyond N every
    atom, hence the tree, is constant, so the value at N is the tail.
    """
    for leaf in counting_leaves(cf):
        if isinstance(leaf, CBool):
            continue
        if not (isinstance(leaf, CountAtom) and not leaf.region.signature):
            raise ContractError(f"not a pure counting tree: leaf {leaf}")
    n_stable = counting_max_bound(cf) + 1
    values = [eval_counting_at_size(cf, n) for n in range(1, n_stable + 1)]
    return Spectrum.from_values(values[:-1], values[-1])


def verdict_from_spectrum(spectrum: Spectrum) -> Verdict:
    if spectrum.is_all:
        return Verdict(VerdictKind.VALID, spectrum)
    if spectrum.is_empty:
        return Verdict(VerdictKind.UNSATISFIABLE, spectrum)
    return Verdict(VerdictKind.SIZE_CONTINGENT, spectrum)


@dataclass(frozen=True)
class DecisionReport:
    input_text: str
    formula_class: FormulaClass
    trace: tuple[tuple[str, str], ...]
    resultant: CountingFormula
    verdict: Verdict
    steps: int
    max_atoms: int
    millis: int

    def to_dict(self) -> dict:
        verdict: dict = {"kind": self.verdict.kind.value}
        if self.verdict.spectrum is not None:
            verdict["spectrum"] = [[lo, hi] for lo, hi in self.verdict.spectrum.intervals]
        if self.verdict.kind is VerdictKind.RESULTANT_ONLY:
            verdict["resultant"] = render_counting(self.verdict.resultant)
        return {
            "input": self.input_text,
            "class": self.formula_class.value,
            "verdict": verdict,
            "trace": [{"rule": rule, "result": result} for rule, result in self.trace],
            "stats": {"steps": self.steps, "max_atoms": self.max_atoms,
                      "millis": self.millis},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def decide(f: Formula, source: str | None = None,
           limits: Limits = DEFAULT_LIMITS) -> DecisionReport:
    """Classify, eliminate, and judge a sentence.

    The input must have no free individual names.  A pure sentence gets a
    Valid / Unsatisfiable / SizeContingent verdict with its exact spectrum;
    free predicate symbols demote the verdict to the first-order resultant,
    since validity is only meaningful without predicate constants.
    """
    started = time.monotonic()
    free_preds, free_inds = free_symbols(f)
    if free_inds:
        raise OutOfScopeError(
            f"free individual names {sorted(free_inds)} are not decidable input")
    cls = classify(f)
    trace = Trace()
    trace.record("classify", cls.value)
    try:
        cf = eliminate_all(f, limits, trace)
    except ResourceLimitError as exc:
        exc.partial_trace = tuple(trace.entries)
        raise
    if free_preds:
        verdict = Verdict(VerdictKind.RESULTANT_ONLY, resultant=cf)
    else:
        spectrum = spectrum_of(cf)
        trace.record("spectrum", spectrum)
        verdict = verdict_from_spectrum(spectrum)
    millis = int((time.monotonic() - started) * 1000)
    return DecisionReport(
        input_text=source if source is not None else format_formula(f),
        formula_class=cls,
        trace=tuple(trace.entries),
        resultant=cf,
        verdict=verdict,
        steps=len(trace.entries),
        max_atoms=trace.max_atoms,
        millis=millis,
    )
