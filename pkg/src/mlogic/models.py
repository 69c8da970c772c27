"""Independent semantics: explicit finite models, countermodel search,
brute-force spectra, equivalence checking, and a seeded formula generator.

This module deliberately knows nothing about the rewrite engine.  Predicate
quantifiers are evaluated by enumerating all 2^n subsets of the domain, so
everything here is exhaustive and only usable at desk scale; the Budget
guard turns runaway searches into ResourceLimitError.

Internally a formula is compiled once into nested closures over a slot
array; predicate extensions are bitmasks, and a quantifier whose body is
quantifier-free and mentions no individual variable other than its own is
evaluated bit-parallel over the whole domain at once.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .errors import EvaluationError
from .limits import DEFAULT_LIMITS, Budget, Limits
from .syntax import (And, Equal, ExistsInd, ExistsPred, ForallInd, ForallPred,
                     Formula, Iff, Implies, Not, Or, PredApp, TruthConst,
                     conj, free_symbols, subformulas)


@dataclass(frozen=True)
class FiniteModel:
    """Domain {0..size-1} with extensions for every free symbol in play.

    `preds` maps unary predicate names to subsets, `props` maps nullary
    letters to truth values, `individuals` maps free individual names to
    elements.  Subsets are kept sorted so witnesses print deterministically.
    """

    size: int
    preds: tuple[tuple[str, frozenset[int]], ...] = ()
    props: tuple[tuple[str, bool], ...] = ()
    individuals: tuple[tuple[str, int], ...] = ()

    @classmethod
    def build(cls, size, preds=None, props=None, individuals=None) -> "FiniteModel":
        return cls(
            size,
            tuple(sorted((k, frozenset(v)) for k, v in (preds or {}).items())),
            tuple(sorted((props or {}).items())),
            tuple(sorted((individuals or {}).items())),
        )

    def pred(self, name: str) -> frozenset[int] | None:
        for k, v in self.preds:
            if k == name:
                return v
        return None

    def prop(self, name: str) -> bool | None:
        for k, v in self.props:
            if k == name:
                return v
        return None

    def individual(self, name: str) -> int | None:
        for k, v in self.individuals:
            if k == name:
                return v
        return None

    def __str__(self) -> str:
        parts = [f"size={self.size}"]
        for name, ext in self.preds:
            parts.append(f"{name}={{{','.join(str(e) for e in sorted(ext))}}}")
        for name, val in self.props:
            parts.append(f"{name}={'true' if val else 'false'}")
        for name, elem in self.individuals:
            parts.append(f"{name}={elem}")
        return "; ".join(parts)


# --- compiled evaluation ------------------------------------------------------

def _arities(f: Formula) -> dict[str, int]:
    out: dict[str, int] = {}
    for g in subformulas(f):
        if isinstance(g, PredApp):
            out[g.name] = 0 if g.arg is None else 1
        elif isinstance(g, (ForallPred, ExistsPred)):
            out.setdefault(g.var, 0)  # unused predicate variable: nullary
    return out


class _Compiler:
    """Compiles a formula to fn(env) -> bool over a slot array."""

    def __init__(self, f: Formula, size: int, budget: Budget):
        self.size = size
        self.full = (1 << size) - 1
        self.budget = budget
        self.arity = _arities(f)
        self.slot: dict[str, int] = {}
        for g in subformulas(f):
            if isinstance(g, PredApp):
                self._intern(g.name)
                if g.arg is not None:
                    self._intern(g.arg)
            elif isinstance(g, Equal):
                self._intern(g.left)
                self._intern(g.right)
            elif isinstance(g, (ForallInd, ExistsInd, ForallPred, ExistsPred)):
                self._intern(g.var)
        self.fn = self._compile(f)

    def _intern(self, name: str) -> int:
        return self.slot.setdefault(name, len(self.slot))

    def new_env(self) -> list:
        return [None] * len(self.slot)

    # bit-parallel fast path: body quantifier-free, only individual variable
    # is `var`; returns fn(env) -> bitmask of elements satisfying the body.
    def _mask_fn(self, g: Formula, var: str) -> Callable | None:
        full = self.full
        if isinstance(g, TruthConst):
            val = full if g.value else 0
            return lambda env: val
        if isinstance(g, PredApp):
            s = self.slot[g.name]
            if g.arg is None:
                return lambda env: full if env[s] else 0
            if g.arg == var:
                return lambda env: env[s]
            sa = self.slot[g.arg]
            return lambda env: full if env[s] >> env[sa] & 1 else 0
        if isinstance(g, Equal):
            if g.left == var and g.right == var:
                return lambda env: full
            if g.left == var:
                sa = self.slot[g.right]
                return lambda env: 1 << env[sa]
            if g.right == var:
                sa = self.slot[g.left]
                return lambda env: 1 << env[sa]
            sl, sr = self.slot[g.left], self.slot[g.right]
            return lambda env: full if env[sl] == env[sr] else 0
        if isinstance(g, Not):
            sub = self._mask_fn(g.body, var)
            return None if sub is None else (lambda env: sub(env) ^ full)
        if isinstance(g, (And, Or, Implies, Iff)):
            lf = self._mask_fn(g.left, var)
            rf = self._mask_fn(g.right, var)
            if lf is None or rf is None:
                return None
            if isinstance(g, And):
                return lambda env: lf(env) & rf(env)
            if isinstance(g, Or):
                return lambda env: lf(env) | rf(env)
            if isinstance(g, Implies):
                return lambda env: (lf(env) ^ full) | rf(env)
            return lambda env: (lf(env) ^ rf(env)) ^ full
        return None  # quantifier inside: no fast path

    def _compile(self, g: Formula) -> Callable:
        if isinstance(g, TruthConst):
            val = g.value
            return lambda env: val
        if isinstance(g, PredApp):
            s = self.slot[g.name]
            if g.arg is None:
                return lambda env: env[s]
            sa = self.slot[g.arg]
            return lambda env: env[s] >> env[sa] & 1 != 0
        if isinstance(g, Equal):
            sl, sr = self.slot[g.left], self.slot[g.right]
            return lambda env: env[sl] == env[sr]
        if isinstance(g, Not):
            sub = self._compile(g.body)
            return lambda env: not sub(env)
        if isinstance(g, And):
            lf, rf = self._compile(g.left), self._compile(g.right)
            return lambda env: lf(env) and rf(env)
        if isinstance(g, Or):
            lf, rf = self._compile(g.left), self._compile(g.right)
            return lambda env: lf(env) or rf(env)
        if isinstance(g, Implies):
            lf, rf = self._compile(g.left), self._compile(g.right)
            return lambda env: rf(env) if lf(env) else True
        if isinstance(g, Iff):
            lf, rf = self._compile(g.left), self._compile(g.right)
            return lambda env: lf(env) == rf(env)
        if isinstance(g, (ForallInd, ExistsInd)):
            want = isinstance(g, ExistsInd)
            mask = self._mask_fn(g.body, g.var)
            if mask is not None:
                full = self.full
                tick = self.budget.tick
                if want:
                    return lambda env: (tick(), mask(env) != 0)[1]
                return lambda env: (tick(), mask(env) == full)[1]
            s = self.slot[g.var]
            sub = self._compile(g.body)
            size = self.size
            tick = self.budget.tick

            def fo(env, want=want, s=s, sub=sub, size=size, tick=tick):
                tick(size)
                for e in range(size):
                    env[s] = e
                    if sub(env) == want:
                        return want
                return not want

            return fo
        if isinstance(g, (ForallPred, ExistsPred)):
            want = isinstance(g, ExistsPred)
            s = self.slot[g.var]
            sub = self._compile(g.body)
            tick = self.budget.tick
            if self.arity.get(g.var, 0) == 0:
                def so0(env, want=want, s=s, sub=sub, tick=tick):
                    tick(2)
                    for v in (False, True):
                        env[s] = v
                        if sub(env) == want:
                            return want
                    return not want

                return so0
            count = 1 << self.size

            def so1(env, want=want, s=s, sub=sub, count=count, tick=tick):
                tick(count)
                for bits in range(count):
                    env[s] = bits
                    if sub(env) == want:
                        return want
                return not want

            return so1
        raise AssertionError(f"unknown node {g!r}")


def _load_model(comp: _Compiler, model: FiniteModel, f: Formula) -> list:
    env = comp.new_env()
    pred_names, ind_names = free_symbols(f)
    for name in pred_names:
        if comp.arity.get(name, 0) == 1:
            ext = model.pred(name)
            if ext is None:
                raise EvaluationError(f"no interpretation for predicate {name!r}")
            bits = 0
            for e in ext:
                bits |= 1 << e
            env[comp.slot[name]] = bits
        else:
            val = model.prop(name)
            if val is None:
                raise EvaluationError(f"no interpretation for letter {name!r}")
            env[comp.slot[name]] = val
    for name in ind_names:
        e = model.individual(name)
        if e is None:
            raise EvaluationError(f"no interpretation for individual {name!r}")
        env[comp.slot[name]] = e
    return env


def evaluate(model: FiniteModel, f: Formula, budget: Budget | None = None,
             limits: Limits = DEFAULT_LIMITS) -> bool:
    """Truth value of f in the model; raises EvaluationError on missing symbols."""
    comp = _Compiler(f, model.size, budget or Budget.from_limits(limits))
    return bool(comp.fn(_load_model(comp, model, f)))


def _free_slots(comp: _Compiler, f: Formula):
    """(unary pred slots, nullary pred slots, individual slots) sorted by name."""
    pred_names, ind_names = free_symbols(f)
    unary = [comp.slot[p] for p in sorted(pred_names) if comp.arity.get(p, 0) == 1]
    nullary = [comp.slot[p] for p in sorted(pred_names) if comp.arity.get(p, 0) == 0]
    inds = [comp.slot[i] for i in sorted(ind_names)]
    return unary, nullary, inds


def _assignments(env, slots_unary, slots_nullary, slots_ind, size, budget):
    """Drive every combination of free-symbol values into env."""
    def rec(i):
        if i < len(slots_unary):
            for bits in range(1 << size):
                env[slots_unary[i]] = bits
                yield from rec(i + 1)
        elif i < len(slots_unary) + len(slots_nullary):
            s = slots_nullary[i - len(slots_unary)]
            for v in (False, True):
                env[s] = v
                yield from rec(i + 1)
        elif i < len(slots_unary) + len(slots_nullary) + len(slots_ind):
            s = slots_ind[i - len(slots_unary) - len(slots_nullary)]
            for e in range(size):
                env[s] = e
                yield from rec(i + 1)
        else:
            budget.tick()
            yield None

    yield from rec(0)


def _witness(f: Formula, comp: _Compiler, env, size: int) -> FiniteModel:
    pred_names, ind_names = free_symbols(f)
    preds, props, inds = {}, {}, {}
    for p in pred_names:
        v = env[comp.slot[p]]
        if comp.arity.get(p, 0) == 1:
            preds[p] = frozenset(e for e in range(size) if v >> e & 1)
        else:
            props[p] = bool(v)
    for i in ind_names:
        inds[i] = env[comp.slot[i]]
    return FiniteModel.build(size, preds, props, inds)


def find_countermodel(f: Formula, max_size: int,
                      limits: Limits = DEFAULT_LIMITS) -> FiniteModel | None:
    """Smallest model falsifying f within max_size, or None.

    Free predicate symbols are enumerated as part of the model.  For an
    identity-free sentence with k predicate symbols, None at max_size >= 2^k
    certifies validity (small-model property); with identity in play no such
    certificate is claimed and max_size is just a search bound.
    """
    budget = Budget.from_limits(limits)
    for size in range(1, max_size + 1):
        comp = _Compiler(f, size, budget)
        env = comp.new_env()
        slots = _free_slots(comp, f)
        for _ in _assignments(env, *slots, size, budget):
            if not comp.fn(env):
                return _witness(f, comp, env, size)
    return None


def spectrum_bruteforce(f: Formula, max_size: int,
                        limits: Limits = DEFAULT_LIMITS) -> list[bool]:
    """Truth value of a pure sentence at each domain size 1..max_size."""
    preds, inds = free_symbols(f)
    if preds or inds:
        raise EvaluationError("spectrum_bruteforce requires a pure sentence")
    budget = Budget.from_limits(limits)
    out = []
    for size in range(1, max_size + 1):
        comp = _Compiler(f, size, budget)
        out.append(bool(comp.fn(comp.new_env())))
    return out


def equiv_check(f: Formula, g: Formula, max_size: int,
                limits: Limits = DEFAULT_LIMITS) -> FiniteModel | None:
    """Exhaustive equivalence check up to max_size; a differing model or None.

    The two formulas are evaluated over the union of their free signatures,
    so one side may mention fewer symbols than the other.
    """
    budget = Budget.from_limits(limits)
    probe = And(f, g)  # carries the union signature
    for size in range(1, max_size + 1):
        comp = _Compiler(probe, size, budget)
        f_fn = comp._compile(f)
        g_fn = comp._compile(g)
        env = comp.new_env()
        slots = _free_slots(comp, probe)
        for _ in _assignments(env, *slots, size, budget):
            if f_fn(env) != g_fn(env):
                return _witness(probe, comp, env, size)
    return None


@dataclass(frozen=True)
class GeneratorParams:
    """Caps for the seeded random-formula generator; the same params and
    seed always produce the same formula."""

    seed: int
    max_pred_quantifiers: int = 2
    max_ind_quantifiers: int = 3
    max_free_preds: int = 2
    max_depth: int = 4
    allow_identity: bool = True
    count_bound_cap: int = 2


_FREE_PRED_POOL = ("A", "B", "C", "D")


@dataclass
class _GenState:
    rng: random.Random
    so_left: int
    fo_left: int
    ind_counter: int = 0
    pred_counter: int = 0


def random_formula(params: GeneratorParams) -> Formula:
    """Well-formed closed formula within the caps (free predicates allowed)."""
    rng = random.Random(params.seed)
    n_free = rng.randint(0, params.max_free_preds) if params.max_free_preds else 0
    free_preds = list(_FREE_PRED_POOL[:n_free])
    state = _GenState(rng, params.max_pred_quantifiers, params.max_ind_quantifiers)

    def leaf(ind_scope, pred_scope) -> Formula:
        # pred_scope entries are (name, arity)
        options = ["const"]
        unary = [p for p, a in pred_scope if a == 1] + free_preds
        nullary = [p for p, a in pred_scope if a == 0]
        if unary and ind_scope:
            options += ["app"] * 4
        if nullary:
            options += ["letter"] * 2
        if params.allow_identity and ind_scope:
            options += ["eq"] * 2
        pick = rng.choice(options)
        if pick == "app":
            return PredApp(rng.choice(unary), rng.choice(ind_scope))
        if pick == "letter":
            return PredApp(rng.choice(nullary))
        if pick == "eq":
            return Equal(rng.choice(ind_scope), rng.choice(ind_scope))
        return TruthConst(rng.random() < 0.5)

    def gen(depth, ind_scope, pred_scope) -> Formula:
        if depth <= 0:
            return leaf(ind_scope, pred_scope)
        options = ["leaf", "not", "and", "or", "imp", "iff"]
        if state.fo_left > 0:
            options += ["qind"] * 3
        if state.so_left > 0:
            options += ["qpred"] * 3
        if params.allow_identity and params.count_bound_cap >= 2 and state.fo_left >= 2:
            options += ["atleast"]
        pick = rng.choice(options)
        if pick == "leaf":
            return leaf(ind_scope, pred_scope)
        if pick == "not":
            return Not(gen(depth - 1, ind_scope, pred_scope))
        if pick in ("and", "or", "imp", "iff"):
            node = {"and": And, "or": Or, "imp": Implies, "iff": Iff}[pick]
            return node(gen(depth - 1, ind_scope, pred_scope),
                        gen(depth - 1, ind_scope, pred_scope))
        if pick == "qind":
            state.fo_left -= 1
            state.ind_counter += 1
            var = f"x{state.ind_counter}"
            body = gen(depth - 1, ind_scope + [var], pred_scope)
            return (ForallInd if rng.random() < 0.5 else ExistsInd)(var, body)
        if pick == "qpred":
            state.so_left -= 1
            state.pred_counter += 1
            var = f"X{state.pred_counter}"
            arity = 1 if rng.random() < 0.85 else 0
            body = gen(depth - 1, ind_scope, pred_scope + [(var, arity)])
            return (ForallPred if rng.random() < 0.5 else ExistsPred)(var, body)
        if pick == "atleast":
            # "at least m distinct elements satisfy a literal" gadget
            m = rng.randint(2, min(params.count_bound_cap, state.fo_left))
            state.fo_left -= m
            names = []
            for _ in range(m):
                state.ind_counter += 1
                names.append(f"x{state.ind_counter}")
            unary = [p for p, a in pred_scope if a == 1] + free_preds
            if unary:
                p = rng.choice(unary)
                if rng.random() < 0.7:
                    mk = lambda v: PredApp(p, v)
                else:
                    mk = lambda v: Not(PredApp(p, v))
            else:
                mk = lambda v: TruthConst(True)
            parts = [Not(Equal(a, b)) for i, a in enumerate(names) for b in names[i + 1:]]
            parts += [mk(v) for v in names]
            body = conj(parts)
            for var in reversed(names):
                body = ExistsInd(var, body)
            return body
        raise AssertionError(pick)

    return gen(params.max_depth, [], [])
