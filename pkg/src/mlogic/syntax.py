"""Abstract syntax for monadic second-order logic with identity.

Name discipline: a name starting with an uppercase letter can only be a
predicate symbol; lowercase names serve as individual names, except that a
lowercase name standing alone as an atom is a nullary predicate letter.
Within one formula a name must play a single role: predicate names and
individual names are disjoint, and a predicate is used either always bare
(nullary) or always applied to a term (unary).  Binders never shadow an
enclosing binder of the same name, and a name bound somewhere never occurs
outside that binder's scope.  `validate` enforces all of this.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

from .errors import CaptureError, WellFormednessError

# A term is exactly one individual name; the language has no function symbols.
Term = str


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class TruthConst(Formula):
    value: bool


@dataclass(frozen=True)
class PredApp(Formula):
    """Predicate atom: unary application P(x), or a bare letter when arg is None."""

    name: str
    arg: Term | None = None


@dataclass(frozen=True)
class Equal(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForallInd(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsInd(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallPred(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsPred(Formula):
    var: str
    body: Formula


TRUE = TruthConst(True)
FALSE = TruthConst(False)

_BINARY = (And, Or, Implies, Iff)
_IND_QUANT = (ForallInd, ExistsInd)
_PRED_QUANT = (ForallPred, ExistsPred)
_QUANT = _IND_QUANT + _PRED_QUANT


def is_predicate_name(name: str) -> bool:
    return name[0].isupper()


def conj(parts) -> Formula:
    """Left-associated conjunction of the given formulas; TRUE when empty."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, _QUANT):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, including f itself."""
    yield f
    for c in children(f):
        yield from subformulas(c)


class FormulaClass(enum.Enum):
    """Smallest fragment a formula falls into.

    The lattice is ordered by feature inclusion: PROPOSITIONAL below
    DOMAIN_A below DOMAIN_A_STAR and DOMAIN_B, which both sit below
    DOMAIN_B_STAR.  OUT_OF_SCOPE is unreachable in the current surface
    language (no syntax builds a formula outside B*); it is reserved for
    future syntax extensions.
    """

    PROPOSITIONAL = "Propositional"
    DOMAIN_A = "DomainA"
    DOMAIN_A_STAR = "DomainAStar"
    DOMAIN_B = "DomainB"
    DOMAIN_B_STAR = "DomainBStar"
    OUT_OF_SCOPE = "OutOfScope"

    @property
    def features(self) -> frozenset[str]:
        return _CLASS_FEATURES[self]

    def includes(self, other: "FormulaClass") -> bool:
        """Lattice order: does this class contain every formula of `other`?"""
        return other.features <= self.features


_CLASS_FEATURES = {
    FormulaClass.PROPOSITIONAL: frozenset(),
    FormulaClass.DOMAIN_A: frozenset({"fo"}),
    FormulaClass.DOMAIN_A_STAR: frozenset({"fo", "id"}),
    FormulaClass.DOMAIN_B: frozenset({"fo", "so"}),
    FormulaClass.DOMAIN_B_STAR: frozenset({"fo", "id", "so"}),
}


def classify(f: Formula) -> FormulaClass:
    """Smallest class containing f."""
    has_id = False
    has_so = False
    has_fo = False
    for g in subformulas(f):
        if isinstance(g, Equal):
            has_id = has_fo = True
        elif isinstance(g, _PRED_QUANT):
            has_so = has_fo = True
        elif isinstance(g, _IND_QUANT):
            has_fo = True
        elif isinstance(g, PredApp) and g.arg is not None:
            has_fo = True
    if has_so:
        return FormulaClass.DOMAIN_B_STAR if has_id else FormulaClass.DOMAIN_B
    if has_id:
        return FormulaClass.DOMAIN_A_STAR
    if has_fo:
        return FormulaClass.DOMAIN_A
    return FormulaClass.PROPOSITIONAL


def free_symbols(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """(free predicate names, free individual names); bound names excluded."""
    preds: set[str] = set()
    inds: set[str] = set()

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, PredApp):
            if g.name not in bound:
                preds.add(g.name)
            if g.arg is not None and g.arg not in bound:
                inds.add(g.arg)
        elif isinstance(g, Equal):
            for t in (g.left, g.right):
                if t not in bound:
                    inds.add(t)
        elif isinstance(g, _QUANT):
            walk(g.body, bound | {g.var})
        else:
            for c in children(g):
                walk(c, bound)

    walk(f, frozenset())
    return frozenset(preds), frozenset(inds)


def all_names(f: Formula) -> frozenset[str]:
    """Every name occurring in f, free or bound."""
    names: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, PredApp):
            names.add(g.name)
            if g.arg is not None:
                names.add(g.arg)
        elif isinstance(g, Equal):
            names.update((g.left, g.right))
        elif isinstance(g, _QUANT):
            names.add(g.var)
    return frozenset(names)


def substitute(f: Formula, old: str, new: str) -> Formula:
    """Rename every occurrence of `old` (free or bound) to `new`.

    `new` must not occur anywhere in f, which makes capture impossible.
    """
    if new in all_names(f):
        raise CaptureError(f"cannot rename {old!r} to {new!r}: {new!r} already occurs")
    if is_predicate_name(old) != is_predicate_name(new):
        raise CaptureError(f"cannot rename {old!r} to {new!r}: names live in different namespaces")

    def walk(g: Formula) -> Formula:
        if isinstance(g, PredApp):
            name = new if g.name == old else g.name
            arg = new if g.arg == old else g.arg
            return PredApp(name, arg)
        if isinstance(g, Equal):
            return Equal(new if g.left == old else g.left, new if g.right == old else g.right)
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, _BINARY):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, _QUANT):
            return type(g)(new if g.var == old else g.var, walk(g.body))
        return g

    return walk(f)


def validate(f: Formula) -> Formula:
    """Check well-formedness; returns f unchanged or raises WellFormednessError."""
    roles: dict[str, str] = {}  # name -> "pred0" | "pred1" | "ind"
    bound_names: set[str] = set()
    free_names: set[str] = set()

    def note(name: str, role: str) -> None:
        prev = roles.setdefault(name, role)
        if prev == role:
            return
        if {prev, role} == {"pred0", "pred1"}:
            raise WellFormednessError(
                f"predicate {name!r} used both as a letter and applied to a term")
        raise WellFormednessError(f"name {name!r} used both as predicate and individual")

    def walk(g: Formula, scope: frozenset[str]) -> None:
        if isinstance(g, PredApp):
            note(g.name, "pred0" if g.arg is None else "pred1")
            (bound_names if g.name in scope else free_names).add(g.name)
            if g.arg is not None:
                note(g.arg, "ind")
                (bound_names if g.arg in scope else free_names).add(g.arg)
        elif isinstance(g, Equal):
            for t in (g.left, g.right):
                note(t, "ind")
                (bound_names if t in scope else free_names).add(t)
        elif isinstance(g, _QUANT):
            if g.var in scope:
                raise WellFormednessError(f"binder for {g.var!r} shadows an enclosing binder")
            expected = "ind" if isinstance(g, _IND_QUANT) else None
            if expected == "ind":
                note(g.var, "ind")
            bound_names.add(g.var)
            walk(g.body, scope | {g.var})
        else:
            for c in children(g):
                walk(c, scope)

    walk(f, frozenset())
    mixed = bound_names & free_names
    if mixed:
        name = sorted(mixed)[0]
        raise WellFormednessError(f"name {name!r} occurs both bound and outside its binder")
    for name, role in roles.items():
        if is_predicate_name(name) and role == "ind":
            raise WellFormednessError(f"uppercase name {name!r} used as an individual")
        if not is_predicate_name(name) and role == "pred1":
            raise WellFormednessError(f"lowercase name {name!r} applied to a term")
    return f


# --- printing ----------------------------------------------------------------

_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4, 5

# node type -> (own precedence, required precedence left/right, operator text).
# <-> is left-associative, -> right-associative, | and & left-associative.
_BINARY_LEVELS: dict = {}


def _is_atom(f: Formula) -> bool:
    return isinstance(f, (TruthConst, PredApp, Equal))


def _atom_text(f: Formula) -> str:
    if isinstance(f, TruthConst):
        return "true" if f.value else "false"
    if isinstance(f, PredApp):
        return f.name if f.arg is None else f"{f.name}({f.arg})"
    if isinstance(f, Equal):
        return f"{f.left} = {f.right}"
    raise AssertionError(f)


def format_formula(f: Formula) -> str:
    """Render in the surface grammar with minimal parentheses.

    A quantifier's scope extends maximally rightward, so a quantified (or
    negated-quantified) subformula is parenthesized unless it is the last
    thing before a closing parenthesis or the end of the text.  Quantifier
    bodies that are binary connectives are parenthesized for readability.
    """

    def go(g: Formula, prec: int, rightmost: bool) -> str:
        if _is_atom(g):
            return _atom_text(g)
        if isinstance(g, Not):
            if isinstance(g.body, Equal):
                return f"{g.body.left} ~= {g.body.right}"
            if isinstance(g.body, (TruthConst, PredApp, Not)):
                return "~" + go(g.body, _PREC_UNARY, rightmost)
            if isinstance(g.body, _QUANT) and rightmost:
                return "~" + go(g.body, _PREC_UNARY, True)
            return "~(" + go(g.body, 0, True) + ")"
        if isinstance(g, _QUANT):
            kw = "all" if isinstance(g, (ForallInd, ForallPred)) else "ex"
            body = g.body
            if isinstance(body, _BINARY):
                inner = "(" + go(body, 0, True) + ")"
            else:
                inner = go(body, 0, True)
            text = f"{kw} {g.var}. {inner}"
            return text if rightmost else "(" + text + ")"
        own, lprec, rprec, op = _BINARY_LEVELS[type(g)]
        wrap = prec > own
        inner_rightmost = True if wrap else rightmost
        text = go(g.left, lprec, False) + op + go(g.right, rprec, inner_rightmost)
        return "(" + text + ")" if wrap else text

    return go(f, 0, True)


_BINARY_LEVELS.update({
    Iff: (_PREC_IFF, _PREC_IFF, _PREC_IMP, " <-> "),
    Implies: (_PREC_IMP, _PREC_OR, _PREC_IMP, " -> "),
    Or: (_PREC_OR, _PREC_OR, _PREC_AND, " | "),
    And: (_PREC_AND, _PREC_AND, _PREC_UNARY, " & "),
})
