"""Finite counterpart harness.

Box abstractions are encoded as fresh classical predicates, so modal
formulas can be read in ordinary finite first-order structures.  Families
of relations between such structures are checked against the conditions a
counterpart (modal transformation) map must meet, closed under function
application, or computed as the greatest family meeting them.  Finally the
structures and families are assembled into one relational G-set per sort,
whose counterpart diamond is compared against the stored diamonds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Hashable, Iterable, Mapping

from . import core
from .core import Graph, ModalCatError, make_gset
from .semantics import Interpretation, interpret_formula
from .syntax import (
    App,
    Atom,
    BoxApp,
    BoxPred,
    Bottom,
    Eq,
    Forall,
    Formula,
    FormulaInContext,
    Implies,
    Signature,
    Term,
    Var,
    box,
    boxed_closure,
    free_vars,
    instantiate,
    neg,
)


class UnknownBoxSymbol(ModalCatError):
    pass


class SignatureMismatch(ModalCatError):
    pass


class EdgeNotVerified(ModalCatError):
    pass


class NotSupported(ModalCatError):
    pass


# --------------------------------------------------------------------------
# de-modalization


@dataclass(frozen=True)
class Demodalized:
    base: Signature
    boxes: tuple[tuple[BoxPred, str], ...]

    @property
    def signature(self) -> Signature:
        return self.base.extend({name: b.sorts for b, name in self.boxes})

    def symbol(self, b: BoxPred) -> str:
        for c, name in self.boxes:
            if c == b:
                return name
        raise UnknownBoxSymbol("box abstraction has no symbol")


def diamond(fic: FormulaInContext) -> Formula:
    """``◇φ:x̄`` encoded as ``¬(□{x̄|¬φ})(x̄)``."""
    return neg(BoxApp(box(fic.context, neg(fic.formula)), tuple(fic.context)))


def demodalize(sig: Signature, formulas: Iterable) -> Demodalized:
    """One fresh predicate ``B1, B2, ...`` per box abstraction, inner first."""
    taken = set(sig.sorts) | set(sig.preds) | set(sig.funcs)
    boxes = []
    k = 0
    for b in boxed_closure(formulas):
        k += 1
        while f"B{k}" in taken:
            k += 1
        boxes.append((b, f"B{k}"))
    return Demodalized(sig, tuple(boxes))


def probe_closure(probes: Iterable[FormulaInContext]) -> list[Formula]:
    """Formulas whose boxes a model must interpret to answer every probe."""
    out = []
    for p in probes:
        out.append(p.formula)
        out.append(diamond(p))
    return out


# --------------------------------------------------------------------------
# classical models


@dataclass(frozen=True, eq=False)
class ClassicalModel:
    name: str
    demod: Demodalized
    carriers: Mapping[str, tuple]
    funcs: Mapping[str, Mapping[tuple, Hashable]] = field(default_factory=dict)
    preds: Mapping[str, frozenset] = field(default_factory=dict)  # includes box symbols

    def __post_init__(self):
        sig = self.demod.signature
        for s in sig.sorts:
            if s not in self.carriers:
                raise SignatureMismatch(f"{self.name}: no carrier for sort {s!r}")
        for f, (dom, cod) in sig.funcs.items():
            table = self.funcs.get(f)
            if table is None:
                raise SignatureMismatch(f"{self.name}: no table for {f!r}")
            for args in cartesian(*(self.carriers[s] for s in dom)):
                if args not in table:
                    raise SignatureMismatch(f"{self.name}: {f}{args} undefined")
                if table[args] not in self.carriers[cod]:
                    raise SignatureMismatch(f"{self.name}: {f}{args} outside {cod}")
        for p, dom in sig.preds.items():
            for tup in self.preds.get(p, ()):
                if len(tup) != len(dom) or any(a not in self.carriers[s] for a, s in zip(tup, dom)):
                    raise SignatureMismatch(f"{self.name}: {p}{tup} outside the carriers")

    @property
    def signature(self) -> Signature:
        return self.demod.base

    def value(self, t: Term, env: Mapping[Var, Hashable]):
        match t:
            case Var():
                return env[t]
            case App(f, args):
                return self.funcs[f][tuple(self.value(a, env) for a in args)]
        raise ModalCatError(f"cannot evaluate {t!r}")

    def holds(self, phi: Formula, env: Mapping[Var, Hashable]) -> bool:
        match phi:
            case Bottom():
                return False
            case Atom(p, args):
                return tuple(self.value(a, env) for a in args) in self.preds.get(p, frozenset())
            case Eq(l, r):
                return self.value(l, env) == self.value(r, env)
            case Implies(l, r):
                return not self.holds(l, env) or self.holds(r, env)
            case Forall(s, body):
                y = Var(f"#{len(env)}", s)
                opened = instantiate(body, (y,))
                return all(self.holds(opened, {**env, y: a}) for a in self.carriers[s])
            case BoxApp(b, args):
                name = self.demod.symbol(b)
                return tuple(self.value(a, env) for a in args) in self.preds.get(name, frozenset())
        raise TypeError(phi)

    def tuples(self, ctx) -> Iterable[tuple]:
        return cartesian(*(self.carriers[v.sort] for v in ctx))

    def extension(self, phi: Formula, ctx) -> frozenset:
        ctx = tuple(ctx)
        return frozenset(t for t in self.tuples(ctx) if self.holds(phi, dict(zip(ctx, t))))


def eval_classical(M: ClassicalModel, phi) -> frozenset:
    """Tuples of context values satisfying ``phi``; boxes are looked up."""
    if isinstance(phi, FormulaInContext):
        return M.extension(phi.formula, phi.context)
    ctx = sorted(free_vars(phi), key=lambda v: v.name)
    return M.extension(phi, ctx)


# --------------------------------------------------------------------------
# counterpart families


@dataclass(frozen=True, eq=False)
class CounterpartFamily:
    left: ClassicalModel
    right: ClassicalModel
    relations: Mapping[str, frozenset]
    name: str = "r"

    def __post_init__(self):
        if self.left.demod != self.right.demod:
            raise SignatureMismatch("models use different de-modalized signatures")
        for s, pairs in self.relations.items():
            for a, b in pairs:
                if a not in self.left.carriers[s] or b not in self.right.carriers[s]:
                    raise SignatureMismatch(f"pair {(a, b)} of sort {s} outside the carriers")

    def rel(self, s: str) -> frozenset:
        return self.relations.get(s, frozenset())

    def related_tuples(self, sorts) -> Iterable[tuple[tuple, tuple]]:
        """Componentwise related tuple pairs (derived, never stored)."""
        for combo in cartesian(*(sorted(self.rel(s), key=repr) for s in sorts)):
            yield tuple(a for a, _ in combo), tuple(b for _, b in combo)


def family(left: ClassicalModel, right: ClassicalModel, relations: Mapping[str, Iterable], name: str = "r"):
    sorts = left.signature.sorts
    rels = {s: frozenset(tuple(p) for p in relations.get(s, ())) for s in sorts}
    return CounterpartFamily(left, right, rels, name)


@dataclass
class CounterpartReport:
    ok: bool
    failures: list[dict]

    def first(self, kind: str) -> dict | None:
        return next((f for f in self.failures if f["kind"] == kind), None)


def _function_failures(R: CounterpartFamily) -> list[dict]:
    out = []
    M, N = R.left, R.right
    for f, (dom, cod) in M.signature.funcs.items():
        for a, b in R.related_tuples(dom):
            fa, fb = M.funcs[f][a], N.funcs[f][b]
            if (fa, fb) not in R.rel(cod):
                out.append({"kind": "function", "func": f, "left": a, "right": b, "image": (fa, fb)})
    return out


def _probe_failures(R: CounterpartFamily, probes) -> list[dict]:
    out = []
    M, N = R.left, R.right
    for p in probes:
        ctx = tuple(p.context)
        dia_p = diamond(p)
        for a, b in R.related_tuples([v.sort for v in ctx]):
            if N.holds(p.formula, dict(zip(ctx, b))) and not M.holds(dia_p, dict(zip(ctx, a))):
                out.append({"kind": "probe", "probe": p, "left": a, "right": b})
    return out


def _has_lift(R: CounterpartFamily, q: str, a, b) -> bool:
    M, N = R.left, R.right
    (src,), _ = M.signature.funcs[q]
    return any(
        M.funcs[q][(a2,)] == a and N.funcs[q][(b2,)] == b
        for a2, b2 in R.rel(src)
    )


def _quotient_failures(R: CounterpartFamily, quotients) -> list[dict]:
    out = []
    sig = R.left.signature
    for q in quotients:
        if q not in sig.funcs or len(sig.funcs[q][0]) != 1:
            raise SignatureMismatch(f"quotient symbol {q!r} must be a unary function")
        cod = sig.funcs[q][1]
        for a, b in sorted(R.rel(cod), key=repr):
            if not _has_lift(R, q, a, b):
                out.append({"kind": "quotient", "func": q, "left": a, "right": b})
    return out


def counterpart_check(R: CounterpartFamily, probes: Iterable[FormulaInContext] = (),
                      quotients: Iterable[str] = ()) -> CounterpartReport:
    """(a) functions preserved, (b) every probe true at a counterpart is
    possible at the source, (c) declared quotient symbols are respected."""
    probes = tuple(probes)
    for p in probes:
        for b in boxed_closure([diamond(p)]):
            R.left.demod.symbol(b)
    fails = _function_failures(R) + _probe_failures(R, probes) + _quotient_failures(R, tuple(quotients))
    return CounterpartReport(not fails, fails)


def close_counterpart(seed: CounterpartFamily) -> CounterpartFamily:
    """Least family containing ``seed`` closed under every function symbol.

    Nullary symbols force the pair of their values.
    """
    M, N = seed.left, seed.right
    sig = M.signature
    rels = {s: set(seed.rel(s)) for s in sig.sorts}
    changed = True
    while changed:
        changed = False
        for f, (dom, cod) in sig.funcs.items():
            for combo in list(cartesian(*(sorted(rels[s], key=repr) for s in dom))):
                a = tuple(x for x, _ in combo)
                b = tuple(y for _, y in combo)
                pair = (M.funcs[f][a], N.funcs[f][b])
                if pair not in rels[cod]:
                    rels[cod].add(pair)
                    changed = True
    return CounterpartFamily(M, N, {s: frozenset(r) for s, r in rels.items()}, seed.name)


def maximal_counterpart(M: ClassicalModel, N: ClassicalModel, probes: Iterable[FormulaInContext] = (),
                        quotients: Iterable[str] = (), name: str = "r") -> CounterpartFamily:
    """Greatest family meeting (a), (b), (c).

    Computed by deleting offending pairs until nothing changes.  Restricted
    to unary (and nullary) functions and single-variable probes, where the
    conditions are per pair and so a greatest family exists.
    """
    probes = tuple(probes)
    quotients = tuple(quotients)
    sig = M.signature
    for f, (dom, _) in sig.funcs.items():
        if len(dom) > 1:
            raise NotSupported(f"function {f!r} has arity {len(dom)} > 1")
    for p in probes:
        if len(p.context) != 1:
            raise NotSupported("probes must have exactly one free variable")
    rels = {s: {(a, b) for a in M.carriers[s] for b in N.carriers[s]} for s in sig.sorts}
    for p in probes:
        (x,) = p.context
        dia_p = diamond(p)
        rels[x.sort] = {
            (a, b) for a, b in rels[x.sort]
            if not N.holds(p.formula, {x: b}) or M.holds(dia_p, {x: a})
        }
    forced = {(f, cod): (M.funcs[f][()], N.funcs[f][()]) for f, (dom, cod) in sig.funcs.items() if not dom}
    changed = True
    while changed:
        changed = False
        current = CounterpartFamily(M, N, {s: frozenset(r) for s, r in rels.items()}, name)
        for f, (dom, cod) in sig.funcs.items():
            if not dom:
                continue
            (s,) = dom
            for a, b in list(rels[s]):
                if (M.funcs[f][(a,)], N.funcs[f][(b,)]) not in rels[cod]:
                    rels[s].discard((a, b))
                    changed = True
        for q in quotients:
            cod = sig.funcs[q][1]
            for a, b in list(rels[cod]):
                if not _has_lift(current, q, a, b):
                    rels[cod].discard((a, b))
                    changed = True
    for (f, cod), pair in forced.items():
        if pair not in rels[cod]:
            raise NotSupported(f"no family satisfies the conditions: constant {f!r} forces {pair}")
    return CounterpartFamily(M, N, {s: frozenset(r) for s, r in rels.items()}, name)


def is_maximal(R: CounterpartFamily, probes=(), quotients=()) -> tuple[bool, list]:
    """Single-pair-addition probe: every absent pair must break a condition.

    Returns the verdict and the absent pairs that could be added safely.
    """
    M, N = R.left, R.right
    addable = []
    for s in M.signature.sorts:
        for a in M.carriers[s]:
            for b in N.carriers[s]:
                if (a, b) in R.rel(s):
                    continue
                bigger = dict(R.relations)
                bigger[s] = R.rel(s) | {(a, b)}
                if counterpart_check(CounterpartFamily(M, N, bigger, R.name), probes, quotients).ok:
                    addable.append((s, a, b))
    return not addable, addable


# --------------------------------------------------------------------------
# evaluation functor


def build_evaluation(models: list[ClassicalModel], edges: list[CounterpartFamily],
                     probes: Iterable[FormulaInContext] = (), quotients: Iterable[str] = ()) -> Interpretation:
    """One vertex per model, one edge per family; each sort becomes a
    relational G-set with the model carriers and the family relations."""
    probes = tuple(probes)
    names = [M.name for M in models]
    if len(set(names)) != len(names):
        raise ModalCatError("model names must be distinct")
    by_name = {M.name: M for M in models}
    for R in edges:
        if by_name.get(R.left.name) is not R.left or by_name.get(R.right.name) is not R.right:
            raise ModalCatError(f"family {R.name!r} connects models outside the list")
        rep = counterpart_check(R, probes, quotients)
        if not rep.ok:
            raise EdgeNotVerified(f"family {R.name!r} fails the counterpart check: {rep.failures[0]}")
    graph = Graph(tuple(names), tuple((R.name, R.left.name, R.right.name) for R in edges))
    sig = models[0].signature
    sorts = {
        s: make_gset(graph, {M.name: M.carriers[s] for M in models}, {R.name: R.rel(s) for R in edges})
        for s in sig.sorts
    }
    products = {}

    def product(dom):
        if dom not in products:
            products[dom] = core.product_n([sorts[x] for x in dom], graph)
        return products[dom]

    preds = {}
    for p, dom in sig.preds.items():
        P = product(dom)
        preds[p] = core.subobject(P.obj, {M.name: [P.pack(t) for t in M.preds.get(p, ())] for M in models})
    funcs = {}
    for f, (dom, cod) in sig.funcs.items():
        P = product(dom)
        comps = {M.name: {P.pack(args): val for args, val in M.funcs[f].items()} for M in models}
        funcs[f] = core.make_morphism(P.obj, sorts[cod], comps)
    return Interpretation(sig, graph, sorts, preds, funcs)


@dataclass
class ProbeComparison:
    probe: FormulaInContext
    model: str
    counterpart: frozenset
    stored: frozenset

    @property
    def violations(self) -> frozenset:
        return self.counterpart - self.stored

    @property
    def gaps(self) -> frozenset:
        return self.stored - self.counterpart


@dataclass
class RepresentationReport:
    comparisons: list[ProbeComparison]

    @property
    def ok(self) -> bool:
        return all(not c.violations for c in self.comparisons)

    @property
    def gaps(self) -> list[ProbeComparison]:
        return [c for c in self.comparisons if c.gaps]


def representation_report(models: list[ClassicalModel], edges: list[CounterpartFamily],
                          probes: Iterable[FormulaInContext], quotients: Iterable[str] = ()) -> RepresentationReport:
    """Counterpart-computed ◇ against stored ◇ for every probe and model.

    The first must be contained in the second; the difference lists the
    stored possibilities with no realizing counterpart at this scale.
    """
    probes = tuple(probes)
    I = build_evaluation(models, edges, probes, quotients)
    out = []
    for p in probes:
        ctx = tuple(p.context)
        S = interpret_formula(I, diamond(p), ctx)
        P = I.context_product(ctx)
        parts = S.parts
        for M in models:
            counter = frozenset(P.unpack(e) for e in parts[M.name])
            stored = M.extension(diamond(p), ctx)
            out.append(ProbeComparison(p, M.name, counter, stored))
    return RepresentationReport(out)
