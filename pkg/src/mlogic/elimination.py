"""Second-order (predicate) quantifier elimination.

The general engine is the counting path: translate the quantifier's body
into the counting language, refine every region to the full signature
including the quantified predicate, and remove the predicate by interval
reasoning on cell cardinalities.  `eliminate_barbara` and
`eliminate_main_form` are kept as verified special cases: the first is the
subset-chain base case, the second the existential form with lower bound,
upper bound, and witness blocks whose resultant needs identity (one
element cannot witness membership and non-membership at once, so two
witnesses force a domain of at least two).

Elimination order is innermost first; a universal predicate quantifier is
handled as the negation of an existential one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ContractError, ResourceLimitError
from .limits import DEFAULT_LIMITS, Limits
from .normal import (CAnd, CBool, CNot, COr, Constituent, CountAtom,
                     CountingFormula, EqAtom, LetterAtom, RegionAtom,
                     C_FALSE, c_and, c_conj, c_disj, c_eq, c_not, c_or,
                     conjunct_formula, constituents, count_atom, counting_dnf,
                     counting_atom_count, counting_leaves, counting_names,
                     counting_signature, dnf_rebuild, refine_counting,
                     region_atom, subst_letter, translate_to_counting, to_nnf,
                     _set_partitions)
from .syntax import (And, ExistsInd, ExistsPred, Formula, ForallInd,
                     ForallPred, Not, Or, PredApp, conj, disj,
                     free_symbols, subformulas)

# --- distribution of predicate quantifiers ------------------------------------

def _mentions_pred(f: Formula, name: str) -> bool:
    return any(isinstance(g, PredApp) and g.name == name for g in subformulas(f))


def distribute_so(f: Formula) -> Formula:
    """Distribute predicate quantifiers on an NNF formula: an existential
    one over disjuncts, a universal one over conjuncts; parts that do not
    mention the quantified predicate move out of its scope."""

    def flatten(g, node):
        if isinstance(g, node):
            return flatten(g.left, node) + flatten(g.right, node)
        return [g]

    def go(g: Formula) -> Formula:
        if isinstance(g, (And, Or)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (ForallInd, ExistsInd)):
            return type(g)(g.var, go(g.body))
        if isinstance(g, (ForallPred, ExistsPred)):
            body = go(g.body)
            if not _mentions_pred(body, g.var):
                return body
            outer, inner = (Or, ExistsPred) if isinstance(g, ExistsPred) else (And, ForallPred)
            parts = flatten(body, outer)
            out = []
            for part in parts:
                if not _mentions_pred(part, g.var):
                    out.append(part)
                else:
                    out.append(inner(g.var, part))
            return disj(out) if outer is Or else conj(out)
        return g

    return go(f)


# --- the historical special cases ----------------------------------------------

@dataclass(frozen=True)
class MainEliminationForm:
    """exists X of a conjunction of four block kinds over a region each:

        forall v (lower v | X v)        lower bound: complement(lower) inside X
        forall v (upper v | ~X v)       upper bound: X inside upper
        exists v (pos_i v & X v)        positive witnesses
        exists v (neg_j v & ~X v)       negative witnesses

    Regions are formulas in the block variable and must not mention the
    eliminated predicate or any predicate quantifier.
    """

    pred: str
    var: str
    lower: Formula
    upper: Formula
    pos_witnesses: tuple[Formula, ...] = ()
    neg_witnesses: tuple[Formula, ...] = ()

    def __post_init__(self):
        for region in (self.lower, self.upper) + self.pos_witnesses + self.neg_witnesses:
            for g in subformulas(region):
                if isinstance(g, PredApp) and g.name == self.pred:
                    raise ContractError("region mentions the eliminated predicate")
                if isinstance(g, (ForallPred, ExistsPred)):
                    raise ContractError("region contains a predicate quantifier")

    def body(self) -> Formula:
        x, v = self.pred, self.var
        parts = [ForallInd(v, Or(self.lower, PredApp(x, v))),
                 ForallInd(v, Or(self.upper, Not(PredApp(x, v))))]
        parts += [ExistsInd(v, And(r, PredApp(x, v))) for r in self.pos_witnesses]
        parts += [ExistsInd(v, And(r, Not(PredApp(x, v)))) for r in self.neg_witnesses]
        return conj(parts)

    def formula(self) -> Formula:
        return ExistsPred(self.pred, self.body())


def eliminate_barbara(m: MainEliminationForm) -> Formula:
    """Witness-free case: exists X (forall v (A|Xv) & forall v (B|~Xv))
    collapses to forall v (A|B).  Taking X as the complement of A (or as B)
    realizes the subset chain in both directions."""
    if m.pos_witnesses or m.neg_witnesses:
        raise ContractError("the witness-free elimination needs no witness blocks")
    return ForallInd(m.var, Or(m.lower, m.upper))


def eliminate_main_form(m: MainEliminationForm,
                        limits: Limits = DEFAULT_LIMITS) -> CountingFormula:
    """Counting resultant of the existential main form; equivalent to the
    quantified formula on every finite domain."""
    cf = translate_to_counting(to_nnf(m.body()), limits)
    return eliminate_exists_pred(m.pred, cf, limits)


# --- the counting eliminator ------------------------------------------------------

class BoundsTable:
    """Per-cell interval constraints on |cell & X| and |cell & ~X|.

    Rows are keyed by (cell over the remaining signature, inside X?); each
    holds [lower, upper] with upper None for unbounded.  A row whose lower
    bound exceeds its upper bound marks the whole conjunct infeasible.
    """

    def __init__(self):
        self.rows: dict[tuple[Constituent, bool], list] = {}

    def row(self, cell: Constituent, inside: bool) -> list:
        return self.rows.setdefault((cell, inside), [0, None])

    def raise_lower(self, cell: Constituent, inside: bool, bound: int) -> None:
        row = self.row(cell, inside)
        row[0] = max(row[0], bound)

    def cut_upper(self, cell: Constituent, inside: bool, bound: int) -> None:
        row = self.row(cell, inside)
        row[1] = bound if row[1] is None else min(row[1], bound)

    def interval(self, cell: Constituent, inside: bool,
                 pinned: dict[tuple[Constituent, bool], int]) -> tuple[int, int | None] | None:
        lo, up = self.rows.get((cell, inside), (0, None))
        lo = max(lo, pinned.get((cell, inside), 0))
        if up is not None and lo > up:
            return None
        return lo, up


def _conjunct_resultant(x: str, lits, sig_p: tuple[str, ...],
                        pinned: dict[tuple[Constituent, bool], int],
                        limits: Limits) -> CountingFormula:
    """Interval reasoning for one DNF conjunct.

    Each cell s over the remaining signature splits into s&X and s&~X.
    Count atoms give lower bounds, negated ones upper bounds; `pinned`
    raises the lower bounds by the number of named elements known to sit in
    a half.  A split |s&X| = a, |s&~X| = b with a in [lo+, up+] and b in
    [lo-, up-] exists iff |s| lies in [lo+ + lo-, up+ + up-], independently
    for every cell.
    """
    table = BoundsTable()
    residue: list = []
    for leaf, pos in lits:
        if isinstance(leaf, CountAtom) and x in leaf.region.signature:
            inside = leaf.region.sign_of(x)
            cell = leaf.region.without(x)
            if pos:
                table.raise_lower(cell, inside, leaf.bound)
            else:
                table.cut_upper(cell, inside, leaf.bound - 1)
        else:
            residue.append((leaf, pos))

    parts: list[CountingFormula] = [conjunct_formula(residue)]
    for cell in constituents(sig_p):
        iv_in = table.interval(cell, True, pinned)
        iv_out = table.interval(cell, False, pinned)
        if iv_in is None or iv_out is None:
            return C_FALSE
        lo_in, up_in = iv_in
        lo_out, up_out = iv_out
        parts.append(count_atom(cell, lo_in + lo_out, limits))
        if up_in is not None and up_out is not None:
            parts.append(c_not(count_atom(cell, up_in + up_out + 1, limits)))
    return c_conj(parts)


def eliminate_counting(x: str, body: CountingFormula,
                       limits: Limits = DEFAULT_LIMITS,
                       pinned: dict[tuple[Constituent, bool], int] | None = None,
                       sig_p: tuple[str, ...] | None = None) -> CountingFormula:
    """Remove `exists x` from a counting tree whose count atoms carry the
    full signature including x.  Literals that do not mention x (letters,
    count atoms over other signatures after refinement, residue guards)
    pass through untouched."""
    if sig_p is None:
        sig_p = tuple(p for p in counting_signature(body) if p != x)
    pinned = pinned or {}
    out = []
    for lits in counting_dnf(body, limits):
        out.append(_conjunct_resultant(x, lits, sig_p, pinned, limits))
        if len(out) > limits.max_conjuncts:
            raise ResourceLimitError("conjunct cap exceeded during elimination")
    return dnf_rebuild(c_disj(out), limits)


def _pred_arity_in(cf: CountingFormula, x: str) -> int | None:
    unary = x in counting_signature(cf)
    nullary = any(isinstance(leaf, LetterAtom) and leaf.name == x
                  for leaf in counting_leaves(cf))
    if unary:
        return 1
    if nullary:
        return 0
    return None


def eliminate_exists_pred(x: str, cf: CountingFormula,
                          limits: Limits = DEFAULT_LIMITS) -> CountingFormula:
    """Remove `exists X` from a counting tree.

    A nullary predicate variable ranges over two truth values and expands
    by substitution.  For a unary one, free individual names are first
    settled by a case split: group the names by equality, place each
    representative in a cell of the remaining signature and on one side of
    X.  Under such a diagram every region literal and equality becomes a
    constant, and the chosen placements pin minimum cell occupancies for
    the interval step.
    """
    arity = _pred_arity_in(cf, x)
    if arity is None:
        return cf
    if arity == 0:
        return c_or(subst_letter(cf, x, True), subst_letter(cf, x, False))

    sig_p = tuple(p for p in counting_signature(cf) if p != x)
    sig_full = tuple(sorted(sig_p + (x,)))
    cf = refine_counting(cf, sig_full, limits)
    names = counting_names(cf)
    if not names:
        return eliminate_counting(x, cf, limits, sig_p=sig_p)

    cells = constituents(sig_p)
    out = []
    for partition in _set_partitions(sorted(names)):
        blocks = sorted([sorted(b) for b in partition])
        reps = [b[0] for b in blocks]
        guards: list[CountingFormula] = []
        for block in blocks:
            guards += [c_eq(block[0], other) for other in block[1:]]
        guards += [c_not(c_eq(a, b)) for i, a in enumerate(reps) for b in reps[i + 1:]]
        rep_of = {name: b[0] for b in blocks for name in b}
        for placing in itertools.product(
                itertools.product(cells, (True, False)), repeat=len(reps)):
            diagram = dict(zip(reps, placing))
            pinned: dict[tuple[Constituent, bool], int] = {}
            for cell, inside in placing:
                pinned[(cell, inside)] = pinned.get((cell, inside), 0) + 1
            fixed = _apply_diagram(cf, x, diagram, rep_of)
            res = eliminate_counting(x, fixed, limits, pinned, sig_p)
            if res == C_FALSE:
                continue
            placement_guards = [region_atom(cell, rep)
                                for rep, (cell, _) in diagram.items()]
            out.append(c_conj(guards + placement_guards + [res]))
            if len(out) > limits.max_conjuncts:
                raise ResourceLimitError("diagram cap exceeded during elimination")
    return dnf_rebuild(c_disj(out), limits)


def _apply_diagram(cf: CountingFormula, x: str,
                   diagram: dict[str, tuple[Constituent, bool]],
                   rep_of: dict[str, str]) -> CountingFormula:
    """Evaluate region literals and equalities under a diagram."""
    if isinstance(cf, RegionAtom):
        cell, inside = diagram[rep_of[cf.name]]
        sign_x = cf.region.sign_of(x)
        if sign_x is not None and sign_x != inside:
            return C_FALSE
        return CBool(cell.extends(cf.region.without(x)))
    if isinstance(cf, EqAtom):
        return CBool(rep_of[cf.left] == rep_of[cf.right])
    if isinstance(cf, CNot):
        return c_not(_apply_diagram(cf.body, x, diagram, rep_of))
    if isinstance(cf, CAnd):
        return c_and(_apply_diagram(cf.left, x, diagram, rep_of),
                     _apply_diagram(cf.right, x, diagram, rep_of))
    if isinstance(cf, COr):
        return c_or(_apply_diagram(cf.left, x, diagram, rep_of),
                    _apply_diagram(cf.right, x, diagram, rep_of))
    return cf


# --- full pipeline -----------------------------------------------------------------

class Trace:
    """Collects (rule, rendering) steps and the peak count-atom width."""

    def __init__(self):
        self.entries: list[tuple[str, str]] = []
        self.max_atoms = 0

    def record(self, rule: str, result) -> None:
        self.entries.append((rule, str(result)))
        if isinstance(result, CountingFormula):
            self.max_atoms = max(self.max_atoms, counting_atom_count(result))


def eliminate_all(f: Formula, limits: Limits = DEFAULT_LIMITS,
                  trace: Trace | None = None) -> CountingFormula:
    """Remove every quantifier from a closed formula, innermost predicate
    quantifier first, yielding a counting tree over the free predicates."""
    _, free_inds = free_symbols(f)
    if free_inds:
        raise ContractError(
            "elimination requires a formula without free individual names")

    def elim_pred(g: Formula, translate) -> CountingFormula:
        body = translate(g.body)
        if isinstance(g, ExistsPred):
            result = eliminate_exists_pred(g.var, body, limits)
            if trace:
                trace.record(f"eliminate ex {g.var}", result)
            return result
        result = c_not(eliminate_exists_pred(g.var, c_not(body), limits))
        if trace:
            trace.record(f"eliminate all {g.var}", result)
        return result

    nnf = to_nnf(f)
    if trace:
        trace.record("nnf", nnf)
    cf = translate_to_counting(nnf, limits, elim_pred)
    if trace:
        trace.record("resultant", cf)
    return cf
