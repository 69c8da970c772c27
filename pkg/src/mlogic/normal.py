"""Equivalence-preserving normal forms.

Three layers live here:

* formula-level rewrites: connective expansion, negation normal form,
  scope adjustment (merging same-kind quantifiers, extracting or absorbing
  parts that do not mention the bound variable), and the one-variable block
  normal form for first-order monadic input;
* the counting language: constituents (cells of the Venn diagram of a
  predicate signature), "region contains at least n elements" atoms, and
  boolean trees over them;
* conversion of identity-carrying monadic first-order formulas into
  quantifier-free counting trees, by eliminating the innermost individual
  quantifier with a case split on equalities.

Simplification is conservative throughout: dualization is De Morgan plus
quantifier flipping, the smart constructors fold constants and merge
idempotent or interval-ordered atoms, and pruning deletes subsumed
conjuncts.  Nothing attempts minimal normal forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import CaptureError, ContractError, ResourceLimitError, WellFormednessError
from .limits import DEFAULT_LIMITS, Limits
from .syntax import (And, Equal, ExistsInd, ExistsPred, ForallInd, ForallPred,
                     Formula, FormulaClass, Iff, Implies, Not, Or, PredApp,
                     TruthConst, TRUE, FALSE, classify, conj, disj,
                     format_formula, free_symbols, subformulas, substitute)

# --- negation normal form -----------------------------------------------------

def to_nnf(f: Formula) -> Formula:
    """Push negations onto atoms, expanding -> and <-> on the way.

    Double negations cancel; De Morgan flips & and |; a negated quantifier
    becomes the dual quantifier over the negated body (for individual and
    predicate quantifiers alike).  Constants fold.
    """

    def go(g: Formula, neg: bool) -> Formula:
        if isinstance(g, TruthConst):
            return TruthConst(g.value != neg)
        if isinstance(g, (PredApp, Equal)):
            return Not(g) if neg else g
        if isinstance(g, Not):
            return go(g.body, not neg)
        if isinstance(g, And):
            parts = (go(g.left, neg), go(g.right, neg))
            return Or(*parts) if neg else And(*parts)
        if isinstance(g, Or):
            parts = (go(g.left, neg), go(g.right, neg))
            return And(*parts) if neg else Or(*parts)
        if isinstance(g, Implies):
            return go(Or(Not(g.left), g.right), neg)
        if isinstance(g, Iff):
            return go(And(Or(Not(g.left), g.right), Or(Not(g.right), g.left)), neg)
        if isinstance(g, ForallInd):
            return ExistsInd(g.var, go(g.body, True)) if neg else ForallInd(g.var, go(g.body, False))
        if isinstance(g, ExistsInd):
            return ForallInd(g.var, go(g.body, True)) if neg else ExistsInd(g.var, go(g.body, False))
        if isinstance(g, ForallPred):
            return ExistsPred(g.var, go(g.body, True)) if neg else ForallPred(g.var, go(g.body, False))
        if isinstance(g, ExistsPred):
            return ForallPred(g.var, go(g.body, True)) if neg else ExistsPred(g.var, go(g.body, False))
        raise AssertionError(f"unknown node {g!r}")

    return go(f, False)


def _flatten(f: Formula, node) -> list[Formula]:
    if isinstance(f, node):
        return _flatten(f.left, node) + _flatten(f.right, node)
    return [f]


def _mentions(f: Formula, name: str) -> bool:
    for g in subformulas(f):
        if isinstance(g, PredApp) and (g.name == name or g.arg == name):
            return True
        if isinstance(g, Equal) and name in (g.left, g.right):
            return True
        if isinstance(g, (ForallInd, ExistsInd, ForallPred, ExistsPred)) and g.var == name:
            return True
    return False


def _quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, (ForallInd, ExistsInd, ForallPred, ExistsPred))
                   for g in subformulas(f))


def miniscope(f: Formula) -> Formula:
    """Adjust individual-quantifier scopes on a formula in NNF.

    Same-kind quantifiers merge across their connective (forall over &,
    exists over |); parts of a quantifier's body that do not mention its
    variable are extracted (conjuncts under forall, disjuncts under
    exists); quantifier-free siblings that do not mention the variable are
    absorbed the other way around (disjuncts into a forall, conjuncts into
    an exists); vacuous quantifiers drop.  Equivalence holds on every
    domain of size >= 1.
    """

    def merge(parts: list[Formula], quant) -> list[Formula]:
        merged = None
        out: list[Formula] = []
        slot = -1
        for p in parts:
            if isinstance(p, quant):
                if merged is None:
                    merged = p
                    slot = len(out)
                    out.append(p)
                else:
                    body = p.body
                    if p.var != merged.var:
                        try:
                            body = substitute(body, p.var, merged.var)
                        except CaptureError:
                            out.append(p)
                            continue
                    joined = And if quant is ForallInd else Or
                    merged = quant(merged.var, joined(merged.body, body))
                    out[slot] = merged
            else:
                out.append(p)
        return out

    def absorb(parts: list[Formula], quant, connective) -> list[Formula]:
        target = next((i for i, p in enumerate(parts) if isinstance(p, quant)), None)
        if target is None:
            return parts
        host = parts[target]
        kept = []
        for i, p in enumerate(parts):
            if i == target:
                continue
            if _quantifier_free(p) and not _mentions(p, host.var):
                host = quant(host.var, connective(host.body, p))
            else:
                kept.append(p)
        kept.insert(target if target <= len(kept) else len(kept), host)
        return kept

    def go(g: Formula) -> Formula:
        if isinstance(g, And):
            parts = [go(p) for p in _flatten(g, And)]
            parts = merge(parts, ForallInd)
            parts = absorb(parts, ExistsInd, And)
            return conj(parts)
        if isinstance(g, Or):
            parts = [go(p) for p in _flatten(g, Or)]
            parts = merge(parts, ExistsInd)
            parts = absorb(parts, ForallInd, Or)
            return disj(parts)
        if isinstance(g, ForallInd):
            body = go(g.body)
            if not _mentions(body, g.var):
                return body
            parts = _flatten(body, And)
            inside = [p for p in parts if _mentions(p, g.var)]
            outside = [p for p in parts if not _mentions(p, g.var)]
            if not outside:
                return ForallInd(g.var, body)
            return conj([ForallInd(g.var, conj(inside))] + outside)
        if isinstance(g, ExistsInd):
            body = go(g.body)
            if not _mentions(body, g.var):
                return body
            parts = _flatten(body, Or)
            inside = [p for p in parts if _mentions(p, g.var)]
            outside = [p for p in parts if not _mentions(p, g.var)]
            if not outside:
                return ExistsInd(g.var, body)
            return disj([ExistsInd(g.var, disj(inside))] + outside)
        if isinstance(g, (ForallPred, ExistsPred)):
            return type(g)(g.var, go(g.body))
        return g

    return go(f)


# --- constituents and counting atoms -------------------------------------------

@dataclass(frozen=True)
class Constituent:
    """One cell of the Venn diagram over an ordered predicate signature.

    `signature` is sorted; `signs[i]` tells whether the cell lies inside
    (True) or outside (False) the i-th predicate.  The empty signature is
    the whole domain.
    """

    signature: tuple[str, ...]
    signs: tuple[bool, ...]

    def __post_init__(self):
        if len(self.signature) != len(self.signs):
            raise WellFormednessError("constituent signs do not match its signature")
        if tuple(sorted(self.signature)) != self.signature:
            raise WellFormednessError("constituent signature must be sorted")

    def sign_of(self, name: str) -> bool | None:
        try:
            return self.signs[self.signature.index(name)]
        except ValueError:
            return None

    def extends(self, other: "Constituent") -> bool:
        """True when this cell lies inside the (coarser) region `other`."""
        for name, sign in zip(other.signature, other.signs):
            if self.sign_of(name) != sign:
                return False
        return True

    def without(self, name: str) -> "Constituent":
        pairs = [(p, s) for p, s in zip(self.signature, self.signs) if p != name]
        return Constituent(tuple(p for p, _ in pairs), tuple(s for _, s in pairs))

    def __str__(self) -> str:
        inner = " ".join(("+" if s else "-") + p for p, s in zip(self.signature, self.signs))
        return f"[{inner}]"


WHOLE_DOMAIN = Constituent((), ())


def constituents(signature) -> tuple[Constituent, ...]:
    sig = tuple(sorted(signature))
    return tuple(Constituent(sig, signs)
                 for signs in itertools.product((True, False), repeat=len(sig)))


def region_of(pred: str, positive: bool) -> Constituent:
    return Constituent((pred,), (positive,))


# --- counting formulas ----------------------------------------------------------

@dataclass(frozen=True)
class CountingFormula:
    def __str__(self) -> str:
        return render_counting(self)


@dataclass(frozen=True)
class CBool(CountingFormula):
    value: bool


@dataclass(frozen=True)
class CountAtom(CountingFormula):
    """The region holds at least `bound` elements; bound 0 is the constant
    true and is folded away by the `count_atom` constructor."""

    region: Constituent
    bound: int


@dataclass(frozen=True)
class RegionAtom(CountingFormula):
    """A free individual name lies inside the region."""

    region: Constituent
    name: str


@dataclass(frozen=True)
class EqAtom(CountingFormula):
    left: str
    right: str


@dataclass(frozen=True)
class LetterAtom(CountingFormula):
    name: str


@dataclass(frozen=True)
class CNot(CountingFormula):
    body: CountingFormula


@dataclass(frozen=True)
class CAnd(CountingFormula):
    left: CountingFormula
    right: CountingFormula


@dataclass(frozen=True)
class COr(CountingFormula):
    left: CountingFormula
    right: CountingFormula


C_TRUE = CBool(True)
C_FALSE = CBool(False)


def count_atom(region: Constituent, bound: int,
               limits: Limits = DEFAULT_LIMITS) -> CountingFormula:
    if bound > limits.max_bound:
        raise ResourceLimitError(f"count bound {bound} exceeds cap {limits.max_bound}")
    if bound <= 0:
        return C_TRUE
    if bound == 1 and not region.signature:
        return C_TRUE  # domains have at least one element
    return CountAtom(region, bound)


def region_atom(region: Constituent, name: str) -> CountingFormula:
    if not region.signature:
        return C_TRUE  # every element lies in the whole domain
    return RegionAtom(region, name)


def c_eq(left: str, right: str) -> CountingFormula:
    if left == right:
        return C_TRUE
    return EqAtom(min(left, right), max(left, right))


def c_not(cf: CountingFormula) -> CountingFormula:
    if isinstance(cf, CBool):
        return CBool(not cf.value)
    if isinstance(cf, CNot):
        return cf.body
    return CNot(cf)


def c_and(a: CountingFormula, b: CountingFormula) -> CountingFormula:
    if isinstance(a, CBool):
        return b if a.value else C_FALSE
    if isinstance(b, CBool):
        return a if b.value else C_FALSE
    if a == b:
        return a
    if isinstance(a, CountAtom) and isinstance(b, CountAtom) and a.region == b.region:
        return CountAtom(a.region, max(a.bound, b.bound))
    return CAnd(a, b)


def c_or(a: CountingFormula, b: CountingFormula) -> CountingFormula:
    if isinstance(a, CBool):
        return C_TRUE if a.value else b
    if isinstance(b, CBool):
        return C_TRUE if b.value else a
    if a == b:
        return a
    if isinstance(a, CountAtom) and isinstance(b, CountAtom) and a.region == b.region:
        return CountAtom(a.region, min(a.bound, b.bound))
    return COr(a, b)


def c_conj(parts) -> CountingFormula:
    out = C_TRUE
    for p in parts:
        out = c_and(out, p)
    return out


def c_disj(parts) -> CountingFormula:
    out = C_FALSE
    for p in parts:
        out = c_or(out, p)
    return out


def counting_leaves(cf: CountingFormula) -> Iterator[CountingFormula]:
    if isinstance(cf, (CNot,)):
        yield from counting_leaves(cf.body)
    elif isinstance(cf, (CAnd, COr)):
        yield from counting_leaves(cf.left)
        yield from counting_leaves(cf.right)
    else:
        yield cf


def counting_signature(cf: CountingFormula) -> tuple[str, ...]:
    """Union of predicate names mentioned in regions."""
    preds: set[str] = set()
    for leaf in counting_leaves(cf):
        if isinstance(leaf, (CountAtom, RegionAtom)):
            preds.update(leaf.region.signature)
    return tuple(sorted(preds))


def counting_names(cf: CountingFormula) -> tuple[str, ...]:
    names: set[str] = set()
    for leaf in counting_leaves(cf):
        if isinstance(leaf, RegionAtom):
            names.add(leaf.name)
        elif isinstance(leaf, EqAtom):
            names.update((leaf.left, leaf.right))
    return tuple(sorted(names))


def counting_letters(cf: CountingFormula) -> tuple[str, ...]:
    return tuple(sorted({leaf.name for leaf in counting_leaves(cf)
                         if isinstance(leaf, LetterAtom)}))


def counting_max_bound(cf: CountingFormula) -> int:
    return max((leaf.bound for leaf in counting_leaves(cf)
                if isinstance(leaf, CountAtom)), default=0)


def counting_atom_count(cf: CountingFormula) -> int:
    return sum(1 for leaf in counting_leaves(cf) if isinstance(leaf, CountAtom))


def subst_counting_name(cf: CountingFormula, old: str, new: str) -> CountingFormula:
    if isinstance(cf, RegionAtom):
        return region_atom(cf.region, new if cf.name == old else cf.name)
    if isinstance(cf, EqAtom):
        return c_eq(new if cf.left == old else cf.left,
                    new if cf.right == old else cf.right)
    if isinstance(cf, CNot):
        return c_not(subst_counting_name(cf.body, old, new))
    if isinstance(cf, CAnd):
        return c_and(subst_counting_name(cf.left, old, new),
                     subst_counting_name(cf.right, old, new))
    if isinstance(cf, COr):
        return c_or(subst_counting_name(cf.left, old, new),
                    subst_counting_name(cf.right, old, new))
    return cf


def subst_letter(cf: CountingFormula, name: str, value: bool) -> CountingFormula:
    if isinstance(cf, LetterAtom) and cf.name == name:
        return CBool(value)
    if isinstance(cf, CNot):
        return c_not(subst_letter(cf.body, name, value))
    if isinstance(cf, CAnd):
        return c_and(subst_letter(cf.left, name, value),
                     subst_letter(cf.right, name, value))
    if isinstance(cf, COr):
        return c_or(subst_letter(cf.left, name, value),
                    subst_letter(cf.right, name, value))
    return cf


# --- rendering ------------------------------------------------------------------

def render_counting(cf: CountingFormula) -> str:
    def atom(leaf) -> str:
        if isinstance(leaf, CBool):
            return "true" if leaf.value else "false"
        if isinstance(leaf, CountAtom):
            return f"#{leaf.region} >= {leaf.bound}"
        if isinstance(leaf, RegionAtom):
            return f"{leaf.name} in {leaf.region}"
        if isinstance(leaf, EqAtom):
            return f"{leaf.left} = {leaf.right}"
        if isinstance(leaf, LetterAtom):
            return leaf.name
        raise AssertionError(leaf)

    def go(g: CountingFormula, prec: int) -> str:
        if isinstance(g, CNot):
            if isinstance(g.body, EqAtom):
                return f"{g.body.left} ~= {g.body.right}"
            if isinstance(g.body, (LetterAtom, CBool)):
                return "~" + atom(g.body)
            if isinstance(g.body, (CountAtom, RegionAtom)):
                return "~(" + atom(g.body) + ")"
            return "~(" + go(g.body, 0) + ")"
        if isinstance(g, COr):
            text = go(g.left, 1) + " | " + go(g.right, 2)
            return text if prec <= 1 else "(" + text + ")"
        if isinstance(g, CAnd):
            text = go(g.left, 2) + " & " + go(g.right, 3)
            return text if prec <= 2 else "(" + text + ")"
        return atom(g)

    return go(cf, 0)


# --- DNF over counting literals --------------------------------------------------

def _c_nnf(cf: CountingFormula, neg: bool = False) -> CountingFormula:
    if isinstance(cf, CBool):
        return CBool(cf.value != neg)
    if isinstance(cf, CNot):
        return _c_nnf(cf.body, not neg)
    if isinstance(cf, CAnd):
        l, r = _c_nnf(cf.left, neg), _c_nnf(cf.right, neg)
        return c_or(l, r) if neg else c_and(l, r)
    if isinstance(cf, COr):
        l, r = _c_nnf(cf.left, neg), _c_nnf(cf.right, neg)
        return c_and(l, r) if neg else c_or(l, r)
    return c_not(cf) if neg else cf


_LEAF_RANK = {CBool: 0, LetterAtom: 1, EqAtom: 2, RegionAtom: 3, CountAtom: 4}


def _leaf_key(leaf: CountingFormula):
    if isinstance(leaf, CBool):
        return (0, leaf.value)
    if isinstance(leaf, LetterAtom):
        return (1, leaf.name)
    if isinstance(leaf, EqAtom):
        return (2, leaf.left, leaf.right)
    if isinstance(leaf, RegionAtom):
        return (3, leaf.name, leaf.region.signature, leaf.region.signs)
    if isinstance(leaf, CountAtom):
        return (4, leaf.region.signature, leaf.region.signs, leaf.bound)
    raise AssertionError(leaf)


Literal = tuple[CountingFormula, bool]
Conjunct = frozenset[Literal]


def _merge_conjuncts(a: Conjunct, b: Conjunct) -> Conjunct | None:
    out = a | b
    for leaf, pos in out:
        if (leaf, not pos) in out:
            return None
    return out


def _normalize_conjunct(lits: Conjunct,
                        limits: Limits = DEFAULT_LIMITS) -> Conjunct | None:
    """Merge count literals per region into one interval; None when the
    conjunct is contradictory (crossed interval, or an upper bound of zero
    on the whole domain)."""
    lower: dict[Constituent, int] = {}
    upper: dict[Constituent, int] = {}
    others: set[Literal] = set()
    for leaf, pos in lits:
        if isinstance(leaf, CountAtom):
            region = leaf.region
            if pos:
                lower[region] = max(lower.get(region, 0), leaf.bound)
            else:
                cap = leaf.bound - 1
                upper[region] = min(upper.get(region, cap), cap)
        else:
            if (leaf, not pos) in lits:
                return None
            others.add((leaf, pos))
    out = set(others)
    for region, lo in lower.items():
        if region in upper and lo > upper[region]:
            return None
        atom = count_atom(region, lo, limits)
        if atom != C_TRUE:
            out.add((atom, True))
    for region, up in upper.items():
        atom = count_atom(region, up + 1, limits)
        if atom == C_TRUE:
            return None  # the region can never hold so few elements
        out.add((atom, False))
    return frozenset(out)


_SUBSUME_THRESHOLD = 2000


def _prune_conjuncts(items: list[Conjunct],
                     limits: Limits = DEFAULT_LIMITS) -> list[Conjunct]:
    """Normalize, deduplicate, and (when affordable) drop conjuncts that
    are supersets of another — the disjunction already covers them."""
    seen = set()
    out = []
    for it in items:
        norm = _normalize_conjunct(it, limits)
        if norm is not None and norm not in seen:
            seen.add(norm)
            out.append(norm)
    if len(out) <= _SUBSUME_THRESHOLD:
        by_size = sorted(out, key=lambda c: (len(c), sorted((_leaf_key(l), p) for l, p in c)))
        kept: list[Conjunct] = []
        for cand in by_size:
            if not any(prev <= cand for prev in kept):
                kept.append(cand)
        survivors = set(kept)
        out = [c for c in out if c in survivors]
    return out


def counting_dnf(cf: CountingFormula, limits: Limits = DEFAULT_LIMITS) -> list[Conjunct]:
    """Disjunctive normal form as a list of contradiction-free literal sets."""

    def go(g: CountingFormula) -> list[Conjunct]:
        if isinstance(g, CBool):
            return [frozenset()] if g.value else []
        if isinstance(g, COr):
            return _prune_conjuncts(go(g.left) + go(g.right), limits)
        if isinstance(g, CAnd):
            left, right = go(g.left), go(g.right)
            if len(left) * len(right) > limits.max_conjuncts:
                raise ResourceLimitError("conjunct cap exceeded while distributing")
            out = []
            for a in left:
                for b in right:
                    merged = _merge_conjuncts(a, b)
                    if merged is not None:
                        out.append(merged)
            return _prune_conjuncts(out, limits)
        if isinstance(g, CNot):
            return [frozenset({(g.body, False)})]
        return [frozenset({(g, True)})]

    return go(_c_nnf(cf))


def dnf_rebuild(cf: CountingFormula, limits: Limits = DEFAULT_LIMITS) -> CountingFormula:
    """Flatten to pruned disjunctive normal form and rebuild the tree."""
    return c_disj(conjunct_formula(c) for c in counting_dnf(cf, limits))


def conjunct_formula(conj_lits) -> CountingFormula:
    ordered = sorted(conj_lits, key=lambda lit: (_leaf_key(lit[0]), lit[1]))
    return c_conj(leaf if pos else c_not(leaf) for leaf, pos in ordered)


# --- refinement to a full signature ----------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def refine_counting(cf: CountingFormula, signature,
                    limits: Limits = DEFAULT_LIMITS) -> CountingFormula:
    """Rewrite every region to the full constituents of `signature`.

    A coarse region is a disjoint union of full cells, so a region literal
    becomes a disjunction of cell literals and a count atom becomes a
    disjunction over the ways its bound can be split among the cells.
    """
    sig = tuple(sorted(signature))
    if len(sig) > limits.max_signature:
        raise ResourceLimitError(
            f"signature of {len(sig)} predicates exceeds cap {limits.max_signature}")
    cells = constituents(sig)

    def split(leaf: CountAtom) -> CountingFormula:
        if leaf.region.signature == sig:
            return leaf
        if not set(leaf.region.signature) <= set(sig):
            raise ContractError("cannot refine to a smaller signature")
        fine = [cell for cell in cells if cell.extends(leaf.region)]
        if len(fine) == 1:
            return count_atom(fine[0], leaf.bound, limits)
        n_ways = math.comb(leaf.bound + len(fine) - 1, len(fine) - 1)
        if n_ways > limits.max_conjuncts:
            raise ResourceLimitError("count refinement blowup")
        return c_disj(
            c_conj(count_atom(cell, k, limits) for cell, k in zip(fine, way) if k)
            for way in _compositions(leaf.bound, len(fine)))

    def go(g: CountingFormula) -> CountingFormula:
        if isinstance(g, CountAtom):
            return split(g)
        if isinstance(g, RegionAtom):
            if g.region.signature == sig:
                return g
            if not set(g.region.signature) <= set(sig):
                raise ContractError("cannot refine to a smaller signature")
            fine = [cell for cell in cells if cell.extends(g.region)]
            return c_disj(region_atom(cell, g.name) for cell in fine)
        if isinstance(g, CNot):
            return c_not(go(g.body))
        if isinstance(g, CAnd):
            return c_and(go(g.left), go(g.right))
        if isinstance(g, COr):
            return c_or(go(g.left), go(g.right))
        return g

    return go(cf)


# --- individual-quantifier elimination --------------------------------------------

def _set_partitions(items: list[str]) -> Iterator[list[list[str]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield part + [[first]]


def _eliminate_exists_ind(var: str, cf: CountingFormula,
                          limits: Limits) -> CountingFormula:
    """Replace (exists var. cf) by an equivalent quantifier-free tree.

    Per DNF conjunct: a positive equality lets the variable be renamed
    away; otherwise the conjunct's region literals on the variable pick a
    set of candidate cells, and for each cell the inequations against other
    names are settled by case-splitting first on the equality pattern of
    those names (so the representatives denote distinct elements) and then
    on which representatives fall inside the cell — if k of them do, a
    fresh witness exists exactly when the cell holds at least k+1 elements.
    """
    disjuncts: list[CountingFormula] = []
    for conj_lits in counting_dnf(cf, limits):
        disjuncts.extend(_eliminate_conjunct(var, conj_lits, limits))
        if len(disjuncts) > limits.max_conjuncts:
            raise ResourceLimitError("conjunct cap exceeded during elimination")
    return dnf_rebuild(c_disj(disjuncts), limits)


def _eliminate_conjunct(var: str, lits: Conjunct, limits: Limits) -> list[CountingFormula]:
    pos_regions: list[Constituent] = []
    neg_regions: list[Constituent] = []
    pos_eqs: list[str] = []
    partners: list[str] = []
    residue: list[Literal] = []
    for leaf, pos in lits:
        if isinstance(leaf, RegionAtom) and leaf.name == var:
            (pos_regions if pos else neg_regions).append(leaf.region)
        elif isinstance(leaf, EqAtom) and var in (leaf.left, leaf.right):
            other = leaf.right if leaf.left == var else leaf.left
            (pos_eqs if pos else partners).append(other)
        else:
            residue.append((leaf, pos))

    if pos_eqs:
        target = sorted(pos_eqs)[0]
        out: list[Literal] = []
        for leaf, pos in lits:
            sub = subst_counting_name(leaf if pos else c_not(leaf), var, target)
            if sub == C_TRUE:
                continue
            if sub == C_FALSE:
                return []
            if isinstance(sub, CNot):
                out.append((sub.body, False))
            else:
                out.append((sub, True))
        merged = _merge_conjuncts(frozenset(out), frozenset())
        return [] if merged is None else [conjunct_formula(merged)]

    sig = sorted({p for r in pos_regions + neg_regions for p in r.signature})
    cells = [cell for cell in constituents(sig)
             if all(cell.extends(r) for r in pos_regions)
             and not any(cell.extends(r) for r in neg_regions)]
    if not cells:
        return []

    residue_cf = conjunct_formula(residue)
    out = []
    for partition in _set_partitions(sorted(partners)):
        blocks = sorted([sorted(b) for b in partition])
        reps = [b[0] for b in blocks]
        guards: list[CountingFormula] = []
        for block in blocks:
            guards += [c_eq(block[0], other) for other in block[1:]]
        guards += [c_not(c_eq(a, b))
                   for i, a in enumerate(reps) for b in reps[i + 1:]]
        cases = []
        for cell in cells:
            for picks in itertools.product((True, False), repeat=len(reps)):
                inside = [r for r, inc in zip(reps, picks) if inc]
                case = c_conj(
                    [region_atom(cell, r) if inc else c_not(region_atom(cell, r))
                     for r, inc in zip(reps, picks)]
                    + [count_atom(cell, len(inside) + 1, limits)])
                cases.append(case)
        out.append(c_conj([residue_cf] + guards + [c_disj(cases)]))
    return out


# --- counting normal form ----------------------------------------------------------

def translate_to_counting(f: Formula, limits: Limits = DEFAULT_LIMITS,
                          elim_pred=None) -> CountingFormula:
    """Quantifier-free counting tree for an NNF formula.

    Individual quantifiers are eliminated innermost first.  Predicate
    quantifiers are handed to `elim_pred` (used by the second-order
    eliminator); without one they are a contract violation.
    """

    def go(g: Formula) -> CountingFormula:
        if isinstance(g, TruthConst):
            return CBool(g.value)
        if isinstance(g, PredApp):
            return LetterAtom(g.name) if g.arg is None else \
                RegionAtom(region_of(g.name, True), g.arg)
        if isinstance(g, Equal):
            return c_eq(g.left, g.right)
        if isinstance(g, Not):
            body = g.body
            if isinstance(body, PredApp):
                return c_not(LetterAtom(body.name)) if body.arg is None else \
                    RegionAtom(region_of(body.name, False), body.arg)
            if isinstance(body, Equal):
                return c_not(c_eq(body.left, body.right))
            if isinstance(body, TruthConst):
                return CBool(not body.value)
            raise ContractError("negation on a non-atom: input must be in NNF")
        if isinstance(g, And):
            return c_and(go(g.left), go(g.right))
        if isinstance(g, Or):
            return c_or(go(g.left), go(g.right))
        if isinstance(g, ExistsInd):
            return _eliminate_exists_ind(g.var, go(g.body), limits)
        if isinstance(g, ForallInd):
            return c_not(_eliminate_exists_ind(g.var, c_not(go(g.body)), limits))
        if isinstance(g, (ForallPred, ExistsPred)):
            if elim_pred is None:
                raise ContractError("predicate quantifier outside the supported fragment")
            return elim_pred(g, go)
        raise ContractError("connective not in NNF (expand -> and <-> first)")

    return go(f)


def to_ccnf(f: Formula, limits: Limits = DEFAULT_LIMITS) -> CountingFormula:
    """Counting normal form of a formula without predicate quantifiers.

    The result is quantifier-free and equivalent to f on every finite
    domain; for closed f every count atom's constituent carries the full
    free unary signature of f, and for closed f the leaves are count atoms
    and constants only.
    """
    cls = classify(f)
    if cls not in (FormulaClass.PROPOSITIONAL, FormulaClass.DOMAIN_A,
                   FormulaClass.DOMAIN_A_STAR):
        raise ContractError(f"counting normal form is defined below predicate "
                            f"quantification; got {cls.value}")
    cf = translate_to_counting(to_nnf(f), limits)
    preds, _ = free_symbols(f)
    unary = sorted(p for p in preds
                   if any(isinstance(g, PredApp) and g.name == p and g.arg is not None
                          for g in subformulas(f)))
    return refine_counting(cf, unary, limits)


# --- reflection back into the surface language --------------------------------------

def region_formula(region: Constituent, name: str) -> Formula:
    parts = [PredApp(p, name) if s else Not(PredApp(p, name))
             for p, s in zip(region.signature, region.signs)]
    return conj(parts)


def counting_to_formula(cf: CountingFormula) -> Formula:
    """Equivalent surface formula; count atoms become chains of distinct
    existential witnesses.  Used to put counting results in front of the
    finite-model oracle."""
    used = set(counting_names(cf))
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"w{next(counter)}"
            if name not in used:
                used.add(name)
                return name

    def go(g: CountingFormula) -> Formula:
        if isinstance(g, CBool):
            return TruthConst(g.value)
        if isinstance(g, CountAtom):
            names = [fresh() for _ in range(g.bound)]
            parts = [Not(Equal(a, b))
                     for i, a in enumerate(names) for b in names[i + 1:]]
            parts += [region_formula(g.region, v) for v in names]
            body = conj(parts)
            for v in reversed(names):
                body = ExistsInd(v, body)
            return body
        if isinstance(g, RegionAtom):
            return region_formula(g.region, g.name)
        if isinstance(g, EqAtom):
            return Equal(g.left, g.right)
        if isinstance(g, LetterAtom):
            return PredApp(g.name)
        if isinstance(g, CNot):
            return Not(go(g.body))
        if isinstance(g, CAnd):
            return And(go(g.left), go(g.right))
        if isinstance(g, COr):
            return Or(go(g.left), go(g.right))
        raise AssertionError(g)

    return go(cf)


def eval_counting_at_size(cf: CountingFormula, size: int) -> bool:
    """Truth value of a pure counting tree (empty-signature atoms only)."""
    if isinstance(cf, CBool):
        return cf.value
    if isinstance(cf, CountAtom):
        if cf.region.signature:
            raise ContractError("not a pure counting tree")
        return size >= cf.bound
    if isinstance(cf, CNot):
        return not eval_counting_at_size(cf.body, size)
    if isinstance(cf, CAnd):
        return eval_counting_at_size(cf.left, size) and eval_counting_at_size(cf.right, size)
    if isinstance(cf, COr):
        return eval_counting_at_size(cf.left, size) or eval_counting_at_size(cf.right, size)
    raise ContractError("not a pure counting tree")


# --- one-variable block normal form --------------------------------------------------

@dataclass(frozen=True)
class Block:
    """forall x (L1 | ... | Ln) or exists x (L1 & ... & Ln) with unary
    literals over the block's own variable."""

    is_forall: bool
    var: str
    literals: tuple[tuple[str, bool], ...]

    def formula(self) -> Formula:
        lits = [PredApp(p, self.var) if s else Not(PredApp(p, self.var))
                for p, s in self.literals]
        if self.is_forall:
            return ForallInd(self.var, disj(lits))
        return ExistsInd(self.var, conj(lits))


def _literal_of(f: Formula, var: str) -> tuple[str, bool] | None:
    if isinstance(f, PredApp) and f.arg == var:
        return (f.name, True)
    if isinstance(f, Not) and isinstance(f.body, PredApp) and f.body.arg == var:
        return (f.body.name, False)
    return None


def _block_of(f: Formula) -> Block | None:
    if not isinstance(f, (ForallInd, ExistsInd)):
        return None
    is_forall = isinstance(f, ForallInd)
    parts = _flatten(f.body, Or if is_forall else And)
    lits = []
    for p in parts:
        lit = _literal_of(p, f.var)
        if lit is None:
            return None
        lits.append(lit)
    return Block(is_forall, f.var, tuple(lits))


@dataclass(frozen=True)
class BlockForm:
    """Boolean combination of one-variable blocks, letters, and constants."""

    formula: Formula

    def __post_init__(self):
        def check(g: Formula) -> None:
            if isinstance(g, (And, Or)):
                check(g.left)
                check(g.right)
                return
            if isinstance(g, TruthConst):
                return
            if isinstance(g, PredApp) and g.arg is None:
                return
            if isinstance(g, Not) and isinstance(g.body, PredApp) and g.body.arg is None:
                return
            if _block_of(g) is not None:
                return
            raise WellFormednessError(f"not in block shape: {format_formula(g)}")

        check(self.formula)

    def blocks(self) -> tuple[Block, ...]:
        out = []
        for g in subformulas(self.formula):
            b = _block_of(g)
            if b is not None:
                out.append(b)
        return tuple(out)

    def __str__(self) -> str:
        return format_formula(self.formula)


def _formula_units_dnf(f: Formula, limits: Limits) -> list[frozenset[Formula]]:
    """DNF of an NNF formula treating quantified subformulas as atoms."""

    def go(g: Formula) -> list[frozenset[Formula]]:
        if isinstance(g, TruthConst):
            return [frozenset()] if g.value else []
        if isinstance(g, Or):
            return go(g.left) + go(g.right)
        if isinstance(g, And):
            left, right = go(g.left), go(g.right)
            if len(left) * len(right) > limits.max_conjuncts:
                raise ResourceLimitError("conjunct cap exceeded while distributing")
            return [a | b for a in left for b in right]
        return [frozenset({g})]

    return go(f)


def _block_key(f: Formula) -> str:
    return format_formula(f)


def to_block_form(f: Formula, limits: Limits = DEFAULT_LIMITS) -> BlockForm:
    """One-variable block normal form for identity-free monadic input.

    The input must classify as propositional or first-order monadic and
    contain no free individual names (rewrite singular statements into
    quantified form first; that rewriting needs identity and therefore
    leaves this fragment).
    """
    cls = classify(f)
    if cls not in (FormulaClass.PROPOSITIONAL, FormulaClass.DOMAIN_A):
        raise ContractError(f"block form is defined for identity-free first-order "
                            f"monadic formulas; got {cls.value}")
    _, free_inds = free_symbols(f)
    if free_inds:
        raise ContractError("block form requires a formula without free individual names")

    def build_exists(var: str, body: Formula) -> Formula:
        disjuncts = []
        for units in _formula_units_dnf(body, limits):
            lits: dict[str, bool] = {}
            residue: list[Formula] = []
            dead = False
            for u in sorted(units, key=_block_key):
                lit = _literal_of(u, var)
                if lit is None:
                    residue.append(u)
                    continue
                name, sign = lit
                if lits.setdefault(name, sign) != sign:
                    dead = True
                    break
            if dead:
                continue
            if lits:
                block = Block(False, var, tuple(sorted(lits.items()))).formula()
                residue.append(block)
            disjuncts.append(conj(residue) if residue else TRUE)
        return disj(disjuncts)

    def go(g: Formula) -> Formula:
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Or):
            return Or(go(g.left), go(g.right))
        if isinstance(g, ExistsInd):
            return build_exists(g.var, go(g.body))
        if isinstance(g, ForallInd):
            # dualize: forall x B  <->  ~ exists x ~B
            inner = to_nnf(Not(build_exists(g.var, to_nnf(Not(go(g.body))))))
            return inner
        return g

    out = go(to_nnf(f))
    return BlockForm(_fold_constants(out))


def _fold_constants(f: Formula) -> Formula:
    if isinstance(f, And):
        l, r = _fold_constants(f.left), _fold_constants(f.right)
        if l == FALSE or r == FALSE:
            return FALSE
        if l == TRUE:
            return r
        if r == TRUE:
            return l
        return And(l, r)
    if isinstance(f, Or):
        l, r = _fold_constants(f.left), _fold_constants(f.right)
        if l == TRUE or r == TRUE:
            return TRUE
        if l == FALSE:
            return r
        if r == FALSE:
            return l
        return Or(l, r)
    if isinstance(f, Not):
        body = _fold_constants(f.body)
        if isinstance(body, TruthConst):
            return TruthConst(not body.value)
        return Not(body)
    return f
