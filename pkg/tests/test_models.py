import pytest
from hypothesis import given, settings, strategies as st

from mlogic.errors import EvaluationError, ResourceLimitError
from mlogic.limits import Limits
from mlogic.models import (FiniteModel, GeneratorParams, equiv_check,
                           evaluate, find_countermodel, random_formula,
                           spectrum_bruteforce)
from mlogic.parser import parse
from mlogic.syntax import (ExistsInd, ExistsPred, Equal, ForallInd,
                           ForallPred, classify, format_formula,
                           free_symbols, subformulas, validate)


def test_evaluate_basics():
    m = FiniteModel.build(2, preds={"P": {0}})
    assert evaluate(m, parse("ex x. P(x)")) is True
    assert evaluate(m, parse("all x. P(x)")) is False


def test_evaluate_empty_extension_edge():
    # the empty subset falsifies on a one-element domain
    assert evaluate(FiniteModel(1), parse("all X. ex x. X(x)")) is False


def test_evaluate_barbara_size_3(barbara):
    assert evaluate(FiniteModel(3), barbara) is True


def test_evaluate_nullary_and_individuals():
    m = FiniteModel.build(2, props={"p": True}, individuals={"a": 1})
    assert evaluate(m, parse("p & ex x. x = a")) is True
    assert evaluate(m, parse("~p | a = a")) is True


def test_evaluate_missing_interpretation():
    with pytest.raises(EvaluationError):
        evaluate(FiniteModel(2), parse("ex x. P(x)"))
    with pytest.raises(EvaluationError):
        evaluate(FiniteModel(2), parse("p"))
    with pytest.raises(EvaluationError):
        evaluate(FiniteModel(2), parse("a = a"))


def test_evaluate_budget():
    f = parse("all X. all Y. all Z. ex x. (X(x) | Y(x) | Z(x))")
    with pytest.raises(ResourceLimitError):
        evaluate(FiniteModel(10), f, limits=Limits(eval_ops=1000))


def test_model_printing():
    m = FiniteModel.build(2, preds={"P": {0}, "Q": set()}, individuals={"a": 1})
    assert str(m) == "size=2; P={0}; Q={}; a=1"


def test_find_countermodel_smallest():
    cm = find_countermodel(parse("all x. P(x)"), 2)
    assert cm is not None and cm.size == 1
    assert str(cm) == "size=1; P={}"


def test_find_countermodel_bound_attained():
    cm = find_countermodel(parse("(all x. P(x)) | (all x. ~P(x))"), 2)
    assert cm is not None and cm.size == 2
    assert cm.pred("P") in (frozenset({0}), frozenset({1}))


def test_find_countermodel_none_for_barbara(barbara):
    assert find_countermodel(barbara, 8) is None


def test_find_countermodel_interprets_free_predicates():
    cm = find_countermodel(parse("ex x. (P(x) & ~Q(x))"), 3)
    assert cm is not None and cm.size == 1
    assert cm.pred("P") is not None and cm.pred("Q") is not None


def test_spectrum_bruteforce_examples(barbara):
    assert spectrum_bruteforce(parse("ex x. ex y. x ~= y"), 3) == [False, True, True]
    assert spectrum_bruteforce(parse("all X. all y. (X(y) | ~X(y))"), 3) == \
        [True, True, True]
    assert spectrum_bruteforce(barbara, 4) == [True] * 4


def test_spectrum_bruteforce_shape_sentence():
    f = parse("""
        (ex x1. ex x2. x1 ~= x2)
        & ~( (ex x1. ex x2. ex x3. ex x4.
               (x1 ~= x2 & x1 ~= x3 & x1 ~= x4 & x2 ~= x3 & x2 ~= x4 & x3 ~= x4))
           & ~(ex x1. ex x2. ex x3. ex x4. ex x5.
               (x1 ~= x2 & x1 ~= x3 & x1 ~= x4 & x1 ~= x5 & x2 ~= x3
                & x2 ~= x4 & x2 ~= x5 & x3 ~= x4 & x3 ~= x5 & x4 ~= x5)) )
    """)
    assert spectrum_bruteforce(f, 6) == [False, True, True, False, True, True]


def test_spectrum_bruteforce_requires_pure():
    with pytest.raises(EvaluationError):
        spectrum_bruteforce(parse("ex x. P(x)"), 3)


def test_equiv_check_witness():
    w = equiv_check(parse("ex x. P(x)"), parse("all x. P(x)"), 2)
    assert w is not None and w.size == 2


def test_equiv_check_subset_chain():
    lhs = parse("ex R. ((all x. (~A(x) | R(x))) & (all x. (~R(x) | B(x))))")
    rhs = parse("all x. (~A(x) | B(x))")
    assert equiv_check(lhs, rhs, 4) is None


def test_equiv_check_signature_union():
    # right side mentions no predicate at all
    assert equiv_check(parse("all x. (P(x) | ~P(x))"), parse("true"), 3) is None


def test_evaluate_isomorphism_invariance():
    import random
    rng = random.Random(5)
    f = parse("ex x. ex y. (P(x) & ~P(y) & x ~= y) | (p & all z. Q(z))")
    for _ in range(20):
        size = rng.randint(1, 4)
        perm = list(range(size))
        rng.shuffle(perm)
        p_ext = {e for e in range(size) if rng.random() < 0.5}
        q_ext = {e for e in range(size) if rng.random() < 0.5}
        props = {"p": rng.random() < 0.5}
        m1 = FiniteModel.build(size, preds={"P": p_ext, "Q": q_ext}, props=props)
        m2 = FiniteModel.build(size, preds={"P": {perm[e] for e in p_ext},
                                            "Q": {perm[e] for e in q_ext}},
                               props=props)
        assert evaluate(m1, f) == evaluate(m2, f)


# --- generator -------------------------------------------------------------------

GOLDEN_SEED_1 = "(all X1. true) & all x1. x1 = x1"


def test_random_formula_golden():
    params = GeneratorParams(seed=1, max_pred_quantifiers=1,
                             max_ind_quantifiers=1, max_free_preds=0,
                             max_depth=2)
    assert format_formula(random_formula(params)) == GOLDEN_SEED_1


def test_random_formula_deterministic():
    for seed in (0, 7, 123):
        params = GeneratorParams(seed=seed)
        assert random_formula(params) == random_formula(params)


def test_random_formula_zero_caps_is_constant():
    from mlogic.syntax import TruthConst
    params = GeneratorParams(seed=3, max_pred_quantifiers=0,
                             max_ind_quantifiers=0, max_free_preds=0,
                             max_depth=0)
    assert isinstance(random_formula(params), TruthConst)


@settings(max_examples=500, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_random_formula_well_formed_and_in_scope(seed):
    f = random_formula(GeneratorParams(seed=seed))
    validate(f)
    classify(f)  # never raises, never OutOfScope
    from mlogic.syntax import FormulaClass
    assert classify(f) is not FormulaClass.OUT_OF_SCOPE


def test_random_formula_respects_caps():
    for seed in range(200):
        params = GeneratorParams(seed=seed, max_pred_quantifiers=2,
                                 max_ind_quantifiers=3, max_free_preds=0,
                                 allow_identity=False)
        f = random_formula(params)
        n_so = sum(1 for g in subformulas(f)
                   if isinstance(g, (ForallPred, ExistsPred)))
        n_fo = sum(1 for g in subformulas(f)
                   if isinstance(g, (ForallInd, ExistsInd)))
        assert n_so <= 2 and n_fo <= 3
        assert not any(isinstance(g, Equal) for g in subformulas(f))
        preds, inds = free_symbols(f)
        assert not preds and not inds
