"""Evaluation of formulae-in-context in an interpretation of a signature
into relational G-sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import core
from .core import Graph, ModalCatError, Morphism, MSubobject, Product, RelGSet, product_n
from .syntax import (
    App,
    Atom,
    BoxApp,
    Bottom,
    Bound,
    Eq,
    Forall,
    Formula,
    FormulaInContext,
    Implies,
    Signature,
    Term,
    Var,
    box_vars,
    instantiate,
    open_box,
)


class UnknownSymbol(ModalCatError):
    pass


class SignatureMismatch(ModalCatError):
    pass


@dataclass(frozen=True)
class Theory:
    name: str
    signature: Signature
    axioms: Mapping[str, FormulaInContext] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Interpretation:
    """Sorts to objects, predicates to subobjects of their arity products,
    functions to morphisms out of their arity products."""

    signature: Signature
    graph: Graph
    sorts: Mapping[str, RelGSet]
    preds: Mapping[str, MSubobject] = field(default_factory=dict)
    funcs: Mapping[str, Morphism] = field(default_factory=dict)
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        sig = self.signature
        for s in sig.sorts:
            if s not in self.sorts:
                raise SignatureMismatch(f"sort {s!r} is not interpreted")
            if self.sorts[s].graph != self.graph:
                raise core.GraphMismatch(f"sort {s!r} lives over another graph")
        for p, dom in sig.preds.items():
            if p not in self.preds:
                raise SignatureMismatch(f"predicate {p!r} is not interpreted")
            if self.preds[p].ambient != self.product(dom).obj:
                raise SignatureMismatch(f"predicate {p!r} is not a subobject of its arity product")
        for f, (dom, cod) in sig.funcs.items():
            if f not in self.funcs:
                raise SignatureMismatch(f"function {f!r} is not interpreted")
            m = self.funcs[f]
            if m.dom != self.product(dom).obj or m.cod != self.sorts[cod]:
                raise SignatureMismatch(f"function {f!r} has the wrong domain or codomain")

    def product(self, sorts) -> Product:
        key = ("product", tuple(sorts))
        if key not in self.cache:
            self.cache[key] = product_n([self.sorts[s] for s in key[1]], self.graph)
        return self.cache[key]

    def context_product(self, ctx) -> Product:
        return self.product(tuple(v.sort for v in ctx))


def _projection(I: Interpretation, ctx, i: int) -> Morphism:
    P = I.context_product(ctx)
    return P.projections[i]


def _tuple(I: Interpretation, ctx, terms, sorts) -> Morphism:
    """``⟨I(t1), ..., I(tn)⟩`` from the context product into the arity product."""
    target = I.product(sorts)
    if not terms:
        return core.terminal_map(I.context_product(ctx).obj)
    return target.tupling([interpret_term(I, t, ctx) for t in terms])


def interpret_term(I: Interpretation, t: Term, ctx) -> Morphism:
    ctx = tuple(ctx)
    key = ("term", ctx, t)
    if key in I.cache:
        return I.cache[key]
    match t:
        case Var():
            if t not in ctx:
                raise UnknownSymbol(f"variable {t.name!r} not in context")
            m = _projection(I, ctx, ctx.index(t))
        case App(f, args):
            if f not in I.funcs:
                raise UnknownSymbol(f"function {f!r}")
            dom, _ = I.signature.funcs[f]
            m = core.compose(_tuple(I, ctx, args, dom), I.funcs[f])
        case Bound():
            raise ModalCatError("cannot interpret a dangling bound variable")
        case _:
            raise TypeError(t)
    I.cache[key] = m
    return m


def _fresh(ctx, sort: str) -> Var:
    return Var(f"#{len(ctx)}", sort)


def _diagonal(X: RelGSet) -> MSubobject:
    P = product_n((X, X))
    return core.image(P.tupling((core.identity(X), core.identity(X))))


def interpret_formula(I: Interpretation, phi, ctx=None) -> MSubobject:
    """``⟦φ:x̄⟧`` as a subobject of the product of the context sorts."""
    if isinstance(phi, FormulaInContext):
        phi, ctx = phi.formula, phi.context
    ctx = tuple(ctx or ())
    key = ("formula", ctx, phi)
    if key in I.cache:
        return I.cache[key]
    P = I.context_product(ctx).obj
    match phi:
        case Bottom():
            out = core.bot(P)
        case Atom(p, args):
            if p not in I.preds:
                raise UnknownSymbol(f"predicate {p!r}")
            out = core.pullback_sub(_tuple(I, ctx, args, I.signature.preds[p]), I.preds[p])
        case Eq(l, r):
            s = _term_sort(I, l)
            out = core.pullback_sub(_tuple(I, ctx, (l, r), (s, s)), _diagonal(I.sorts[s]))
        case Implies(l, r):
            out = core.implies(interpret_formula(I, l, ctx), interpret_formula(I, r, ctx))
        case Forall(s, body):
            y = _fresh(ctx, s)
            wider = ctx + (y,)
            inner = interpret_formula(I, instantiate(body, (y,)), wider)
            drop = _drop_last(I, wider)
            out = core.neg(core.direct_image(drop, core.neg(inner)))
        case BoxApp(b, args):
            ys = box_vars(b)
            inner = interpret_formula(I, open_box(b, ys), ys)
            out = core.pullback_sub(_tuple(I, ctx, args, b.sorts), core.box(inner))
        case _:
            raise TypeError(phi)
    I.cache[key] = out
    return out


def _term_sort(I: Interpretation, t: Term) -> str:
    match t:
        case Var(_, s) | Bound(_, s):
            return s
        case App(f, _):
            return I.signature.funcs[f][1]
    raise TypeError(t)


def _drop_last(I: Interpretation, ctx) -> Morphism:
    """Projection from the context product forgetting the last variable."""
    short = ctx[:-1]
    P = I.context_product(ctx)
    if not short:
        return core.terminal_map(P.obj)
    return I.context_product(short).tupling(P.projections[:-1])


def validates(I: Interpretation, fic: FormulaInContext) -> bool:
    S = interpret_formula(I, fic)
    return S.mask == S.ambient.full_mask


@dataclass
class ModelReport:
    ok: bool
    failures: list[tuple[str, tuple]]  # (axiom name, first element outside)


def is_model(I: Interpretation, T: Theory) -> ModelReport:
    failures = []
    for name, fic in T.axioms.items():
        S = interpret_formula(I, fic)
        missing = S.ambient.full_mask & ~S.mask
        if missing:
            i = (missing & -missing).bit_length() - 1
            failures.append((name, S.ambient.elements[i]))
    return ModelReport(not failures, failures)
