import pytest
from hypothesis import given, settings, strategies as st

from mlogic.errors import ContractError, ResourceLimitError, WellFormednessError
from mlogic.limits import Limits
from mlogic.models import GeneratorParams, equiv_check, random_formula
from mlogic.normal import (BlockForm, CBool, CountAtom, Constituent,
                           C_TRUE, RegionAtom, c_and, c_not, c_or,
                           constituents, count_atom, counting_to_formula,
                           eval_counting_at_size, miniscope, refine_counting,
                           render_counting, to_block_form, to_ccnf, to_nnf)
from mlogic.parser import parse
from mlogic.syntax import (FormulaClass, Not, classify, format_formula,
                           free_symbols, subformulas)

WHOLE = Constituent((), ())
P_IN = Constituent(("P",), (True,))


def nnf_text(s):
    return format_formula(to_nnf(parse(s)))


def test_nnf_examples():
    assert nnf_text("~(all x. P(x))") == "ex x. ~P(x)"
    assert nnf_text("~~p") == "p"
    assert nnf_text("~(p & q)") == "~p | ~q"
    assert nnf_text("~(ex X. all y. X(y))") == "all X. ex y. ~X(y)"
    assert nnf_text("~true") == "false"
    assert nnf_text("p -> q") == "~p | q"


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_nnf_shape_and_equivalence(seed):
    f = random_formula(GeneratorParams(seed=seed, max_depth=3,
                                       max_ind_quantifiers=2,
                                       max_pred_quantifiers=1))
    g = to_nnf(f)
    for sub in subformulas(g):
        if isinstance(sub, Not):
            assert not isinstance(sub.body, (Not,)) and \
                type(sub.body).__name__ in ("PredApp", "Equal")
    assert equiv_check(f, g, 3) is None


def test_miniscope_merges_foralls():
    f = to_nnf(parse("(all x. F(x)) & (all x. G(x))"))
    assert format_formula(miniscope(f)) == "all x. (F(x) & G(x))"


def test_miniscope_absorbs_constant_disjunct():
    f = to_nnf(parse("(all x. F(x)) | p"))
    assert format_formula(miniscope(f)) == "all x. (F(x) | p)"


def test_miniscope_extracts_constant_conjunct():
    f = to_nnf(parse("all x. (F(x) & p)"))
    assert format_formula(miniscope(f)) == "(all x. F(x)) & p"


def test_miniscope_merges_renaming():
    f = to_nnf(parse("(all x. F(x)) & (all y. G(y))"))
    assert format_formula(miniscope(f)) == "all x. (F(x) & G(y))".replace("y", "x")


def test_miniscope_drops_vacuous():
    f = to_nnf(parse("all x. p"))
    assert format_formula(miniscope(f)) == "p"


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_miniscope_equivalence(seed):
    f = to_nnf(random_formula(GeneratorParams(seed=seed, max_depth=4,
                                              max_pred_quantifiers=0,
                                              max_free_preds=2)))
    assert equiv_check(f, miniscope(f), 3) is None


# --- constituents and counting trees -----------------------------------------

def test_constituent_invariants():
    with pytest.raises(WellFormednessError):
        Constituent(("B", "A"), (True, False))
    with pytest.raises(WellFormednessError):
        Constituent(("A",), (True, False))
    assert str(Constituent(("P", "Q"), (True, False))) == "[+P -Q]"
    assert str(WHOLE) == "[]"


def test_constituents_enumeration():
    cells = constituents(["Q", "P"])
    assert len(cells) == 4
    assert all(cell.signature == ("P", "Q") for cell in cells)


def test_count_atom_canonicalization():
    assert count_atom(P_IN, 0) == C_TRUE
    assert count_atom(WHOLE, 1) == C_TRUE
    assert c_and(CountAtom(P_IN, 2), CountAtom(P_IN, 3)) == CountAtom(P_IN, 3)
    assert c_or(CountAtom(P_IN, 2), CountAtom(P_IN, 3)) == CountAtom(P_IN, 2)
    with pytest.raises(ResourceLimitError):
        count_atom(P_IN, 100, Limits(max_bound=64))


def test_rendering():
    cf = c_and(CountAtom(Constituent(("P", "Q"), (True, False)), 2),
               c_not(CountAtom(WHOLE, 5)))
    assert render_counting(cf) == "#[+P -Q] >= 2 & ~(#[] >= 5)"


# --- counting normal form ------------------------------------------------------

def test_ccnf_nonempty_region():
    assert to_ccnf(parse("ex x. P(x)")) == CountAtom(P_IN, 1)


def test_ccnf_two_distinct_witnesses():
    cf = to_ccnf(parse("ex x. ex y. (x ~= y & P(x) & P(y))"))
    assert cf == CountAtom(P_IN, 2)


def test_ccnf_pure_size_statement():
    assert to_ccnf(parse("ex x. ex y. x ~= y")) == CountAtom(WHOLE, 2)


def test_ccnf_rejects_predicate_quantifiers():
    with pytest.raises(ContractError):
        to_ccnf(parse("ex X. ex x. X(x)"))


def test_ccnf_closed_output_is_pure_counting():
    for text in ["ex x. ex y. (P(x) & ~P(y))",
                 "all x. (P(x) -> ex y. (y ~= x & P(y)))",
                 "(ex x. P(x)) <-> (all y. Q(y))"]:
        cf = to_ccnf(parse(text))
        from mlogic.normal import counting_leaves, counting_names
        assert counting_names(cf) == ()
        preds, _ = free_symbols(parse(text))
        for leaf in counting_leaves(cf):
            assert isinstance(leaf, (CountAtom, CBool))
            assert set(leaf.region.signature) == set(preds) or not isinstance(leaf, CountAtom)


def test_ccnf_full_signature_for_closed_input():
    cf = to_ccnf(parse("(ex x. P(x)) & (ex y. Q(y))"))
    from mlogic.normal import counting_leaves
    for leaf in counting_leaves(cf):
        if isinstance(leaf, CountAtom):
            assert leaf.region.signature == ("P", "Q")


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_ccnf_oracle_equivalence(seed):
    f = random_formula(GeneratorParams(seed=seed, max_pred_quantifiers=0,
                                       max_ind_quantifiers=3, max_free_preds=2,
                                       max_depth=4))
    cf = to_ccnf(f)
    assert equiv_check(f, counting_to_formula(cf), 4) is None


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_ccnf_duality(seed):
    f = random_formula(GeneratorParams(seed=seed, max_pred_quantifiers=0,
                                       max_ind_quantifiers=2, max_free_preds=2,
                                       max_depth=3))
    lhs = counting_to_formula(to_ccnf(Not(f)))
    rhs = Not(counting_to_formula(to_ccnf(f)))
    assert equiv_check(lhs, rhs, 3) is None


def test_ccnf_coincident_partners():
    # inequations against two names that may denote the same element
    f = parse("all z1. all z2. (P(z1) -> ex y. (P(y) & y ~= z1 & y ~= z2))")
    assert equiv_check(f, counting_to_formula(to_ccnf(f)), 4) is None


def test_refine_splits_counts():
    cf = refine_counting(CountAtom(P_IN, 2), ("P", "Q"))
    # two cells inside P; the bound 2 splits as 2+0, 1+1, 0+2
    assert equiv_check(counting_to_formula(cf),
                       counting_to_formula(CountAtom(P_IN, 2)), 4) is None


def test_refine_rejects_smaller_signature():
    with pytest.raises(ContractError):
        refine_counting(CountAtom(P_IN, 1), ())


# --- block form ------------------------------------------------------------------

def test_block_form_identity_rejected():
    with pytest.raises(ContractError):
        to_block_form(parse("ex x. ex y. x ~= y"))


def test_block_form_free_names_rejected():
    with pytest.raises(ContractError):
        to_block_form(parse("P(a)"))


def test_block_form_single_block_unchanged():
    bf = to_block_form(parse("all x. (F(x) | G(x))"))
    assert str(bf) == "all x. (F(x) | G(x))"
    blocks = bf.blocks()
    assert len(blocks) == 1 and blocks[0].is_forall
    assert blocks[0].literals == (("F", True), ("G", True))


def test_block_form_distributes_exists():
    bf = to_block_form(parse("ex x. (F(x) & (G(x) | H(x)))"))
    assert str(bf) == "(ex x. (F(x) & G(x))) | ex x. (F(x) & H(x))"
    f = parse("ex x. (F(x) & (G(x) | H(x)))")
    assert equiv_check(f, bf.formula, 4) is None


def test_block_form_two_variable_decomposition():
    f = parse("ex x. ex y. (F(x) & H(x) & G(y) & K(y))")
    bf = to_block_form(f)
    blocks = bf.blocks()
    assert len(blocks) == 2
    assert {b.literals for b in blocks} == \
        {(("F", True), ("H", True)), (("G", True), ("K", True))}
    assert equiv_check(f, bf.formula, 3) is None


def test_block_form_shape_validation():
    with pytest.raises(WellFormednessError):
        BlockForm(parse("all x. ex y. (P(x) | Q(y))"))
    BlockForm(parse("(all x. (F(x) | ~G(x))) & p"))


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_block_form_oracle_equivalence(seed):
    f = random_formula(GeneratorParams(seed=seed, max_pred_quantifiers=0,
                                       max_ind_quantifiers=3, max_free_preds=2,
                                       max_depth=4, allow_identity=False))
    if classify(f) not in (FormulaClass.PROPOSITIONAL, FormulaClass.DOMAIN_A):
        return
    bf = to_block_form(f)
    assert equiv_check(f, bf.formula, 4) is None
    for block in bf.blocks():
        assert all(name[0].isupper() for name, _ in block.literals)


def test_eval_counting_at_size():
    cf = c_and(CountAtom(WHOLE, 2), c_not(CountAtom(WHOLE, 4)))
    assert [eval_counting_at_size(cf, n) for n in (1, 2, 3, 4)] == \
        [False, True, True, False]
    with pytest.raises(ContractError):
        eval_counting_at_size(RegionAtom(P_IN, "a"), 2)
