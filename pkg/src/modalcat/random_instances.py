"""Seeded random graphs, relational G-sets and interpretations."""

from __future__ import annotations

import random
from itertools import product as cartesian

from . import core
from .core import Graph, RelGSet, make_gset
from .semantics import Interpretation
from .syntax import Signature


def random_graph(rng: random.Random, max_vertices: int = 3, max_edges: int = 4) -> Graph:
    n = rng.randint(1, max_vertices)
    vertices = tuple(f"v{i}" for i in range(n))
    m = rng.randint(0, max_edges)
    edges = tuple((f"k{j}", rng.choice(vertices), rng.choice(vertices)) for j in range(m))
    return Graph(vertices, edges)


def random_gset(rng: random.Random, graph: Graph, max_carrier: int = 3, density: float = 0.4,
                min_carrier: int = 0) -> RelGSet:
    carriers = {v: list(range(rng.randint(min_carrier, max_carrier))) for v in graph.vertices}
    relations = {
        e.name: [(a, b) for a in carriers[e.src] for b in carriers[e.dst] if rng.random() < density]
        for e in graph.edges
    }
    return make_gset(graph, carriers, relations)


def random_interpretation(rng: random.Random, sig: Signature, graph: Graph, max_carrier: int = 2,
                          density: float = 0.4, pred_density: float = 0.5) -> Interpretation:
    """Random carriers (nonempty), predicates and function tables; sort
    relations are then closed so that every function preserves them."""
    carriers = {s: {v: list(range(rng.randint(1, max_carrier))) for v in graph.vertices} for s in sig.sorts}
    tables = {}
    for f, (dom, cod) in sig.funcs.items():
        tables[f] = {
            v: {args: rng.choice(carriers[cod][v]) for args in cartesian(*(carriers[s][v] for s in dom))}
            for v in graph.vertices
        }
    rels = {
        s: {e.name: {(a, b) for a in carriers[s][e.src] for b in carriers[s][e.dst] if rng.random() < density}
            for e in graph.edges}
        for s in sig.sorts
    }
    changed = True
    while changed:
        changed = False
        for f, (dom, cod) in sig.funcs.items():
            for e in graph.edges:
                for combo in list(cartesian(*(sorted(rels[s][e.name]) for s in dom))):
                    a = tuple(x for x, _ in combo)
                    b = tuple(y for _, y in combo)
                    pair = (tables[f][e.src][a], tables[f][e.dst][b])
                    if pair not in rels[cod][e.name]:
                        rels[cod][e.name].add(pair)
                        changed = True
    sorts = {s: make_gset(graph, carriers[s], rels[s]) for s in sig.sorts}
    preds = {}
    for p, dom in sig.preds.items():
        P = core.product_n([sorts[s] for s in dom], graph)
        mask = sum(1 << i for i in range(P.obj.size) if rng.random() < pred_density)
        preds[p] = core.MSubobject(P.obj, mask)
    funcs = {}
    for f, (dom, cod) in sig.funcs.items():
        P = core.product_n([sorts[s] for s in dom], graph)
        comps = {v: {P.pack(args): val for args, val in tables[f][v].items()} for v in graph.vertices}
        funcs[f] = core.make_morphism(P.obj, sorts[cod], comps)
    return Interpretation(sig, graph, sorts, preds, funcs)


def model_battery(rng: random.Random, theory, count: int, max_tries: int = 5000, **kwargs) -> list[Interpretation]:
    """``count`` random interpretations that are models of ``theory``."""
    from .semantics import is_model

    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"only {len(out)} models of {theory.name!r} after {max_tries} tries")
        graph = random_graph(rng, kwargs.get("max_vertices", 2), kwargs.get("max_edges", 3))
        I = random_interpretation(rng, theory.signature, graph, kwargs.get("max_carrier", 2))
        if is_model(I, theory).ok:
            out.append(I)
    return out


# --------------------------------------------------------------------------
# formulas

_NAMES = ("x", "y", "z", "w")


def random_term(rng: random.Random, sig: Signature, ctx, sort: str, depth: int = 2):
    from .syntax import App

    vars_ = [v for v in ctx if v.sort == sort]
    funcs = [f for f, (_, cod) in sig.funcs.items() if cod == sort]
    if vars_ and (depth <= 0 or not funcs or rng.random() < 0.6):
        return rng.choice(vars_)
    if not funcs:
        raise ValueError(f"no term of sort {sort!r} over this context")
    f = rng.choice(funcs)
    dom, _ = sig.funcs[f]
    return App(f, tuple(random_term(rng, sig, ctx, s, depth - 1) for s in dom))


def random_formula(rng: random.Random, sig: Signature, ctx, depth: int = 3):
    """A random formula over ``ctx``; binder names are drawn from a small
    pool so that shadowing and clashes are common."""
    from . import syntax as S

    ctx = tuple(ctx)

    def has_terms(s):
        return any(v.sort == s for v in ctx) or any(cod == s and not dom for dom, cod in sig.funcs.values())

    atoms = [p for p, dom in sig.preds.items() if all(has_terms(s) for s in dom)]
    eq_sorts = [s for s in sig.sorts if has_terms(s)]
    kind = rng.choice(["atom", "atom", "eq", "false"] if depth <= 0 else
                      ["atom", "imp", "imp", "forall", "box", "not", "and", "or", "exists", "dia"])
    if kind == "atom" and not atoms:
        kind = "eq" if eq_sorts else "false"
    if kind == "eq" and not eq_sorts:
        kind = "false"
    match kind:
        case "false":
            return S.BOTTOM
        case "atom":
            p = rng.choice(atoms)
            return S.Atom(p, tuple(random_term(rng, sig, ctx, s) for s in sig.preds[p]))
        case "eq":
            s = rng.choice(eq_sorts)
            return S.Eq(random_term(rng, sig, ctx, s), random_term(rng, sig, ctx, s))
        case "imp" | "and" | "or":
            a, b = random_formula(rng, sig, ctx, depth - 1), random_formula(rng, sig, ctx, depth - 1)
            return {"imp": S.Implies, "and": S.conj, "or": S.disj}[kind](a, b)
        case "not":
            return S.neg(random_formula(rng, sig, ctx, depth - 1))
        case "forall" | "exists":
            v = S.Var(rng.choice(_NAMES), rng.choice(sig.sorts))
            inner = tuple(u for u in ctx if u.name != v.name) + (v,)
            body = random_formula(rng, sig, inner, depth - 1)  # a same-named outer variable is shadowed
            return (S.forall if kind == "forall" else S.exists)(v, body)
        case "box" | "dia":
            n = rng.randint(0, 2)
            names = rng.sample(_NAMES, n)
            bvars = tuple(S.Var(nm, rng.choice(sig.sorts)) for nm in names)
            body = random_formula(rng, sig, bvars, depth - 1)
            if not all(has_terms(v.sort) for v in bvars):
                return body if not S.free_vars(body) - set(ctx) else S.BOTTOM
            args = tuple(random_term(rng, sig, ctx, v.sort) for v in bvars)
            if kind == "box":
                return S.BoxApp(S.box(bvars, body), args)
            return S.dia(bvars, body, args)
    raise AssertionError(kind)


def random_fic(rng: random.Random, sig: Signature, max_vars: int = 2, depth: int = 3):
    from .syntax import FormulaInContext, Var

    n = rng.randint(0, max_vars)
    ctx = tuple(Var(nm, rng.choice(sig.sorts)) for nm in rng.sample(_NAMES, n))
    return FormulaInContext(ctx, random_formula(rng, sig, ctx, depth))
