import json

import pytest
from hypothesis import given, settings, strategies as st

from mlogic.decide import (Spectrum, VerdictKind, decide, spectrum_of,
                           verdict_from_spectrum)
from mlogic.errors import ContractError, OutOfScopeError
from mlogic.models import GeneratorParams, random_formula, spectrum_bruteforce
from mlogic.normal import (Constituent, CountAtom, C_FALSE, C_TRUE,
                           RegionAtom, c_and, c_not)
from mlogic.parser import parse
from mlogic.syntax import Not

WHOLE = Constituent((), ())


def at_least(n):
    return CountAtom(WHOLE, n)


# --- spectra ---------------------------------------------------------------

def test_spectrum_of_atoms():
    assert str(spectrum_of(at_least(2))) == "[2,∞)"
    assert str(spectrum_of(C_TRUE)) == "[1,∞)"
    assert spectrum_of(C_FALSE).is_empty


def test_spectrum_shape_excluding_1_and_4():
    cf = c_and(c_not(c_and(at_least(1), c_not(at_least(2)))),
               c_not(c_and(at_least(4), c_not(at_least(5)))))
    assert str(spectrum_of(cf)) == "{2,3} ∪ [5,∞)"


def test_spectrum_rejects_impure():
    with pytest.raises(ContractError):
        spectrum_of(RegionAtom(Constituent(("P",), (True,)), "a"))
    with pytest.raises(ContractError):
        spectrum_of(CountAtom(Constituent(("P",), (True,)), 1))


def test_spectrum_normalization():
    s = Spectrum.normalize([(5, 7), (1, 2), (3, 4), (9, None)])
    assert s.intervals == ((1, 7), (9, None))
    assert s.contains(6) and not s.contains(8)


def test_spectrum_complement():
    s = Spectrum.normalize([(2, 3), (5, None)])
    assert s.complement().intervals == ((1, 1), (4, 4))
    assert Spectrum.all_sizes().complement().is_empty
    assert Spectrum.empty().complement().is_all


def test_spectrum_tail_stability():
    cf = c_not(c_and(at_least(4), c_not(at_least(5))))  # false exactly at 4
    s = spectrum_of(cf)
    for n in (5, 15, 50):
        assert s.contains(n)
    assert not s.contains(4)


def test_verdict_from_spectrum():
    assert verdict_from_spectrum(Spectrum.all_sizes()).kind is VerdictKind.VALID
    assert verdict_from_spectrum(Spectrum.empty()).kind is VerdictKind.UNSATISFIABLE
    s = Spectrum.normalize([(2, 3), (5, None)])
    assert verdict_from_spectrum(s).kind is VerdictKind.SIZE_CONTINGENT


# --- decide ------------------------------------------------------------------

def test_decide_paper_validity_example():
    report = decide(parse("all X. all y. (X(y) | ~X(y))"))
    assert report.verdict.kind is VerdictKind.VALID


def test_decide_two_element_statement():
    report = decide(parse("ex x. ex y. x ~= y"))
    assert report.verdict.kind is VerdictKind.SIZE_CONTINGENT
    assert str(report.verdict.spectrum) == "[2,∞)"


def test_decide_barbara(barbara):
    assert decide(barbara).verdict.kind is VerdictKind.VALID


def test_decide_witness_pair_not_trivially_satisfiable():
    report = decide(parse("ex X. ((ex x. X(x)) & (ex x. ~X(x)))"))
    assert report.verdict.spectrum.intervals == ((2, None),)


def test_decide_unsatisfiable():
    report = decide(parse("ex x. x ~= x"))
    assert report.verdict.kind is VerdictKind.UNSATISFIABLE


def test_decide_free_predicates_resultant_only():
    report = decide(parse("all x. (P(x) | ~P(x))"))
    assert report.verdict.kind is VerdictKind.RESULTANT_ONLY
    assert report.verdict.spectrum is None


def test_decide_rejects_free_individuals():
    with pytest.raises(OutOfScopeError):
        decide(parse("P(a)"))


def test_decide_resource_error_carries_partial_trace():
    from mlogic.errors import ResourceLimitError
    from mlogic.limits import Limits
    f = parse("ex X. ex Y. ((ex a. ex b. (a ~= b & X(a) & Y(b)))"
              " & (ex c. ex d. (c ~= d & ~X(c) & ~Y(d))))")
    with pytest.raises(ResourceLimitError) as exc:
        decide(f, limits=Limits(max_conjuncts=2))
    assert exc.value.partial_trace[0][0] == "classify"


def test_decide_deterministic_reports(barbara):
    a = decide(barbara).to_dict()
    b = decide(barbara).to_dict()
    a["stats"]["millis"] = b["stats"]["millis"] = 0
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_report_json_schema(barbara):
    data = decide(barbara).to_dict()
    assert set(data) == {"input", "class", "verdict", "trace", "stats"}
    assert data["class"] == "DomainB"
    assert data["verdict"]["kind"] == "valid"
    assert data["verdict"]["spectrum"] == [[1, None]]
    assert all(set(step) == {"rule", "result"} for step in data["trace"])
    assert set(data["stats"]) == {"steps", "max_atoms", "millis"}
    contingent = decide(parse("ex x. ex y. x ~= y")).to_dict()
    assert contingent["verdict"]["spectrum"] == [[2, None]]
    resultant = decide(parse("ex x. P(x)")).to_dict()
    assert resultant["verdict"]["kind"] == "resultant"
    assert resultant["verdict"]["resultant"] == "#[+P] >= 1"


def test_trace_records_elimination_steps(barbara):
    report = decide(barbara)
    rules = [rule for rule, _ in report.trace]
    assert rules[0] == "classify"
    assert "nnf" in rules
    assert any(rule.startswith("eliminate all R") for rule in rules)
    assert rules[-1] == "spectrum"
    assert report.steps == len(report.trace)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_spectrum_agrees_with_oracle(seed):
    f = random_formula(GeneratorParams(seed=seed, max_free_preds=0))
    report = decide(f)
    truth = spectrum_bruteforce(f, 5)
    for size, value in enumerate(truth, start=1):
        assert report.verdict.spectrum.contains(size) == value


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_spectrum_complement_law(seed):
    f = random_formula(GeneratorParams(seed=seed, max_free_preds=0,
                                       max_ind_quantifiers=2, max_depth=3))
    s = decide(f).verdict.spectrum
    assert decide(Not(f)).verdict.spectrum == s.complement()
