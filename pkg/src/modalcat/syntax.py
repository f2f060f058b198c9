"""Many-sorted modal first-order syntax with box abstraction.

Binders are locally nameless: a bound variable is ``Bound(i)``, counting
binders outward from the occurrence; free variables are ``Var(name, sort)``.
A box abstraction ``□{x1..xn | φ}`` binds its whole context at once, with
``xn`` at index 0 and ``x1`` at index ``n-1``, and its body is closed.
Surface names survive only as non-compared hints, so alpha-equivalence is
plain structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class FormulaError(ValueError):
    pass


class SortMismatch(FormulaError):
    pass


class PartialSubstitution(FormulaError):
    pass


class UnboundVariable(FormulaError):
    pass


# --------------------------------------------------------------------------
# signatures and contexts


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    preds: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    funcs: Mapping[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "preds", {p: tuple(a) for p, a in self.preds.items()})
        object.__setattr__(self, "funcs", {f: (tuple(a), c) for f, (a, c) in self.funcs.items()})
        names = list(self.sorts) + list(self.preds) + list(self.funcs)
        if len(names) != len(set(names)):
            raise FormulaError("sort, predicate and function names must be distinct")
        for p, args in self.preds.items():
            self._known(args, p)
        for f, (args, cod) in self.funcs.items():
            self._known((*args, cod), f)

    def _known(self, sorts, who):
        for s in sorts:
            if s not in self.sorts:
                raise FormulaError(f"{who}: unknown sort {s!r}")

    def extend(self, preds: Mapping[str, Iterable[str]]) -> "Signature":
        return Signature(self.sorts, {**self.preds, **{p: tuple(a) for p, a in preds.items()}}, self.funcs)


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


Context = tuple[Var, ...]


def context(*pairs) -> Context:
    """``context(("x", "U"), ("y", "U"))`` or ``context(Var(...), ...)``."""
    out = tuple(p if isinstance(p, Var) else Var(*p) for p in pairs)
    if len({v.name for v in out}) != len(out):
        raise FormulaError("context repeats a variable")
    return out


# --------------------------------------------------------------------------
# terms and formulas


@dataclass(frozen=True)
class Bound:
    index: int
    sort: str
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App:
    func: str
    args: tuple = ()


Term = Union[Var, Bound, App]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    sort: str
    body: "Formula"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class BoxPred:
    sorts: tuple[str, ...]
    body: "Formula"
    hints: tuple[str, ...] = field(default=(), compare=False)

    @property
    def arity(self) -> int:
        return len(self.sorts)


@dataclass(frozen=True)
class BoxApp:
    box: BoxPred
    args: tuple = ()


Formula = Union[Atom, Eq, Bottom, Implies, Forall, BoxApp]
BOTTOM = Bottom()


@dataclass(frozen=True)
class FormulaInContext:
    context: Context
    formula: Formula

    def __str__(self):
        from .grammar import print_fic

        return print_fic(self)


# --------------------------------------------------------------------------
# binder plumbing


def _map_term(t: Term, var, bound, depth: int) -> Term:
    match t:
        case Var():
            return var(t, depth)
        case Bound():
            return bound(t, depth)
        case App(f, args):
            return App(f, tuple(_map_term(a, var, bound, depth) for a in args))
    raise TypeError(f"not a term: {t!r}")


def _map_formula(phi: Formula, var, bound, depth: int = 0) -> Formula:
    """Rebuild ``phi`` rewriting leaves; never enters box bodies."""
    match phi:
        case Atom(p, args):
            return Atom(p, tuple(_map_term(a, var, bound, depth) for a in args))
        case Eq(l, r):
            return Eq(_map_term(l, var, bound, depth), _map_term(r, var, bound, depth))
        case Bottom():
            return phi
        case Implies(l, r):
            return Implies(_map_formula(l, var, bound, depth), _map_formula(r, var, bound, depth))
        case Forall(s, body, hint):
            return Forall(s, _map_formula(body, var, bound, depth + 1), hint)
        case BoxApp(box, args):
            return BoxApp(box, tuple(_map_term(a, var, bound, depth) for a in args))
    raise TypeError(f"not a formula: {phi!r}")


def _keep(t, depth):
    return t


def abstract(phi: Formula, vars_: tuple[Var, ...], depth: int = 0) -> Formula:
    """Turn free occurrences of ``vars_`` into bound indices; the last
    variable gets the innermost index."""
    n = len(vars_)
    pos = {v: n - 1 - i for i, v in enumerate(vars_)}

    def var(t, d):
        j = pos.get(t)
        return t if j is None else Bound(j + d, t.sort, t.name)

    return _map_formula(phi, var, _keep, depth)


def instantiate(phi: Formula, terms: tuple[Term, ...], depth: int = 0) -> Formula:
    """Inverse of :func:`abstract`: replace the outermost ``len(terms)``
    binders' indices by ``terms`` (which must be locally closed)."""
    n = len(terms)

    def bound(t, d):
        j = t.index - d
        if 0 <= j < n:
            return terms[n - 1 - j]
        if j >= n:
            return Bound(t.index - n, t.sort, t.hint)
        return t

    return _map_formula(phi, _keep, bound, depth)


def forall(v: Var, body: Formula) -> Forall:
    return Forall(v.sort, abstract(body, (v,)), v.name)


def box(vars_: Iterable[Var], body: Formula) -> BoxPred:
    vars_ = tuple(vars_)
    stray = free_vars(body) - set(vars_)
    if stray:
        raise UnboundVariable(f"box body mentions {sorted(v.name for v in stray)} outside its context")
    return BoxPred(tuple(v.sort for v in vars_), abstract(body, vars_), tuple(v.name for v in vars_))


def open_box(b: BoxPred, vars_: Iterable[Var]) -> Formula:
    """The body with its binders replaced by ``vars_``."""
    vars_ = tuple(vars_)
    if len(vars_) != b.arity:
        raise FormulaError("wrong number of variables for box abstraction")
    return instantiate(b.body, vars_)


def box_vars(b: BoxPred) -> tuple[Var, ...]:
    """Canonical names for the box's binders, unique among themselves."""
    names: list[str] = []
    for i, h in enumerate(b.hints or tuple(f"x{i}" for i in range(b.arity))):
        while h in names:
            h += "'"
        names.append(h)
    return tuple(Var(n, s) for n, s in zip(names, b.sorts))


def open_forall(phi: Forall, v: Term) -> Formula:
    return instantiate(phi.body, (v,))


def term_vars(t: Term) -> Iterator[Var]:
    match t:
        case Var():
            yield t
        case App(_, args):
            for a in args:
                yield from term_vars(a)


def free_vars(phi: Formula) -> set[Var]:
    out: set[Var] = set()

    def var(t, d):
        out.add(t)
        return t

    _map_formula(phi, var, _keep)
    return out


def term_sort(t: Term, sig: Signature) -> str:
    match t:
        case Var(_, s) | Bound(_, s):
            return s
        case App(f, _):
            if f not in sig.funcs:
                raise FormulaError(f"unknown function {f!r}")
            return sig.funcs[f][1]
    raise TypeError(t)


# --------------------------------------------------------------------------
# substitution


def substitute(phi: Formula, sigma: Mapping[Var, Term]) -> Formula:
    """Replace free variables; box bodies are closed and never entered.

    Capture cannot happen since bound variables carry no names.
    """
    return _map_formula(phi, lambda t, d: sigma.get(t, t), _keep)


def substitute_term(t: Term, sigma: Mapping[Var, Term]) -> Term:
    return _map_term(t, lambda v, d: sigma.get(v, v), _keep, 0)


def substitute_in_context(fic: FormulaInContext, sigma: Mapping[Var, Term], target: Context,
                          sig: Signature | None = None) -> FormulaInContext:
    """``φ:ȳ`` with ``σ(yi) = ui:x̄`` gives ``φ[ū/ȳ]:x̄``."""
    missing = [y.name for y in fic.context if y not in sigma]
    if missing:
        raise PartialSubstitution(f"no term for {missing}")
    allowed = set(target)
    for y in fic.context:
        u = sigma[y]
        stray = set(term_vars(u)) - allowed
        if stray:
            raise UnboundVariable(f"{sorted(v.name for v in stray)} not in the target context")
        if sig is not None and term_sort(u, sig) != y.sort:
            raise SortMismatch(f"{y.name}: expected {y.sort}, got {term_sort(u, sig)}")
    return FormulaInContext(target, substitute(fic.formula, {y: sigma[y] for y in fic.context}))


def alpha_eq(a, b) -> bool:
    return a == b


# --------------------------------------------------------------------------
# derived connectives


def neg(phi: Formula) -> Formula:
    return Implies(phi, BOTTOM)


def conj(phi: Formula, psi: Formula) -> Formula:
    return neg(Implies(phi, neg(psi)))


def disj(phi: Formula, psi: Formula) -> Formula:
    return Implies(neg(phi), psi)


def exists(v: Var, body: Formula) -> Formula:
    return neg(forall(v, neg(body)))


def dia(vars_: Iterable[Var], body: Formula, args: Iterable[Term]) -> Formula:
    return neg(BoxApp(box(vars_, neg(body)), tuple(args)))


def box_whole(fic: FormulaInContext) -> FormulaInContext:
    """``□φ:x̄`` abbreviating ``(□{x̄|φ})(x̄):x̄``."""
    return FormulaInContext(fic.context, BoxApp(box(fic.context, fic.formula), fic.context))


def sugar(kind: str, *args) -> Formula:
    match kind:
        case "not":
            return neg(*args)
        case "and":
            return conj(*args)
        case "or":
            return disj(*args)
        case "exists":
            return exists(*args)
        case "dia":
            return dia(*args)
    raise ValueError(f"unknown connective {kind!r}")


# --------------------------------------------------------------------------
# well-formedness


def _term_diags(t: Term, sig: Signature, ctx: set[Var], binders: list[str], out: list[str]) -> str | None:
    """Append problems to ``out``; return the sort when determinable."""
    match t:
        case Var(name, s):
            if t not in ctx:
                out.append(f"unbound variable {name!r}")
            return s
        case Bound(i, s):
            if i >= len(binders):
                out.append(f"dangling bound index {i}")
            elif binders[-1 - i] != s:
                out.append(f"bound index {i} has sort {s}, binder has {binders[-1 - i]}")
            return s
        case App(f, args):
            if f not in sig.funcs:
                out.append(f"unknown function {f!r}")
                return None
            dom, cod = sig.funcs[f]
            if len(dom) != len(args):
                out.append(f"{f} expects {len(dom)} arguments, got {len(args)}")
            for a, s in zip(args, dom):
                got = _term_diags(a, sig, ctx, binders, out)
                if got is not None and got != s:
                    out.append(f"{f}: argument of sort {got} where {s} expected")
            return cod
    out.append(f"not a term: {t!r}")
    return None


def _args_diags(who: str, sorts, args, sig, ctx, binders, out):
    if len(sorts) != len(args):
        out.append(f"{who} expects {len(sorts)} arguments, got {len(args)}")
    for a, s in zip(args, sorts):
        got = _term_diags(a, sig, ctx, binders, out)
        if got is not None and got != s:
            out.append(f"{who}: argument of sort {got} where {s} expected")


def _formula_diags(phi, sig, ctx, binders, out):
    match phi:
        case Atom(p, args):
            if p not in sig.preds:
                out.append(f"unknown predicate {p!r}")
            else:
                _args_diags(p, sig.preds[p], args, sig, ctx, binders, out)
        case Eq(l, r):
            a = _term_diags(l, sig, ctx, binders, out)
            b = _term_diags(r, sig, ctx, binders, out)
            if a is not None and b is not None and a != b:
                out.append(f"equation between sorts {a} and {b}")
        case Bottom():
            pass
        case Implies(l, r):
            _formula_diags(l, sig, ctx, binders, out)
            _formula_diags(r, sig, ctx, binders, out)
        case Forall(s, body):
            if s not in sig.sorts:
                out.append(f"unknown sort {s!r}")
            _formula_diags(body, sig, ctx, binders + [s], out)
        case BoxApp(b, args):
            for s in b.sorts:
                if s not in sig.sorts:
                    out.append(f"unknown sort {s!r}")
            _formula_diags(b.body, sig, set(), list(b.sorts), out)
            _args_diags("box", b.sorts, args, sig, ctx, binders, out)
        case _:
            out.append(f"not a formula: {phi!r}")


def well_formed(item, sig: Signature) -> list[str]:
    """Diagnostics for a term, formula or formula-in-context (empty if fine).

    Bare terms and formulas are checked as if in the context of their own
    free variables.
    """
    out: list[str] = []
    match item:
        case FormulaInContext(ctx, phi):
            names = [v.name for v in ctx]
            if len(names) != len(set(names)):
                out.append("context repeats a variable")
            for v in ctx:
                if v.sort not in sig.sorts:
                    out.append(f"unknown sort {v.sort!r}")
            _formula_diags(phi, sig, set(ctx), [], out)
        case Var() | Bound() | App():
            _term_diags(item, sig, set(term_vars(item)), [], out)
        case _:
            _formula_diags(item, sig, free_vars(item), [], out)
    return out


# --------------------------------------------------------------------------
# boxes


def _boxes(phi: Formula, out: list[BoxPred]) -> None:
    match phi:
        case Implies(l, r):
            _boxes(l, out)
            _boxes(r, out)
        case Forall(_, body):
            _boxes(body, out)
        case BoxApp(b, _):
            _boxes(b.body, out)
            if b not in out:
                out.append(b)


def boxed_closure(formulas: Iterable) -> list[BoxPred]:
    """Every box abstraction occurring in ``formulas``, inner ones first,
    without alpha-duplicates, in order of first occurrence."""
    out: list[BoxPred] = []
    for phi in formulas:
        if isinstance(phi, FormulaInContext):
            phi = phi.formula
        _boxes(phi, out)
    return out


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk, not entering box bodies."""
    yield phi
    match phi:
        case Implies(l, r):
            yield from subformulas(l)
            yield from subformulas(r)
        case Forall(_, body):
            yield from subformulas(body)
