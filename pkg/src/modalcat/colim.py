"""Quotients by equivalence relations, disjoint unions, and the finite
certificates that go with them (quotient axiom, complementary summands,
open injections, copairing, mediation, triple factorization)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from . import core
from .core import (
    GraphMismatch,
    ModalCatError,
    Morphism,
    MSubobject,
    RelGSet,
    binary_product,
    is_epi_e,
    make_gset,
)
from .laws import (
    DEFAULT_OPS,
    LawConfig,
    LawReport,
    Operators,
    ZBattery,
    _Collector,
    _rng,
    _Space,
    _stabilize,
    open_report,
)


class AmbientNotSquare(ModalCatError):
    pass


class NotEquivalence(ModalCatError):
    pass


class CodomainMismatch(ModalCatError):
    pass


class KernelNotContained(ModalCatError):
    pass


@dataclass(frozen=True)
class QuotientResult:
    Q: RelGSet
    q: Morphism
    classes: dict[tuple[str, Hashable], Hashable]  # (vertex, element) -> representative


def _square_factor(R: MSubobject) -> RelGSet:
    fs = R.ambient.factors
    if not fs or len(fs) != 2 or fs[0] != fs[1]:
        raise AmbientNotSquare("relation must live on X × X")
    return fs[0]


def is_equivalence(R: MSubobject) -> bool:
    X = _square_factor(R)
    parts = R.parts
    for v in X.graph.vertices:
        rel = parts[v]
        carrier = X.carrier(v)
        if any((a, a) not in rel for a in carrier):
            return False
        if any((b, a) not in rel for a, b in rel):
            return False
        succ: dict = {}
        for a, b in rel:
            succ.setdefault(a, set()).add(b)
        if any(c not in succ.get(a, ()) for a, b in rel for c in succ.get(b, ())):
            return False
    return True


def relation_on(X: RelGSet, parts) -> MSubobject:
    """A binary relation on ``X`` given per vertex as pairs."""
    return core.subobject(binary_product(X, X).obj, parts)


def diagonal(X: RelGSet) -> MSubobject:
    return relation_on(X, {v: [(a, a) for a in X.carrier(v)] for v in X.graph.vertices})


def quotient(X: RelGSet, R: MSubobject) -> QuotientResult:
    """``X/R``; each class is named by its least element in carrier order."""
    if _square_factor(R) != X:
        raise core.AmbientMismatch("relation is not on X")
    if not is_equivalence(R):
        raise NotEquivalence("relation is not an equivalence")
    parts = R.parts
    classes = {}
    for v in X.graph.vertices:
        for a in X.carrier(v):
            classes[v, a] = next(b for b in X.carrier(v) if (a, b) in parts[v])
    carriers = {v: [a for a in X.carrier(v) if classes[v, a] == a] for v in X.graph.vertices}
    relations = {
        e.name: [(classes[e.src, a], classes[e.dst, b]) for a, b in X.relation(e.name)]
        for e in X.graph.edges
    }
    Q = make_gset(X.graph, carriers, relations)
    q = Morphism(X, Q, tuple(Q.index[v, classes[v, a]] for v, a in X.elements))
    return QuotientResult(Q, q, classes)


def kernel(f: Morphism) -> MSubobject:
    X = f.dom
    return relation_on(
        X,
        {v: [(a, b) for a in X.carrier(v) for b in X.carrier(v) if f(v, a) == f(v, b)] for v in X.graph.vertices},
    )


def is_quotient_map(q: Morphism) -> LawReport:
    """Pointwise surjective, and every codomain pair has a related preimage pair."""
    col = _Collector("quotient-map", "q")
    X, Y = q.dom, q.cod
    hit = set(q.table)
    for i, (v, b) in enumerate(Y.elements):
        col.checked += 1
        if i not in hit:
            col.fail({"reason": "not surjective", "element": (v, b)})
    for e in Y.graph.edges:
        lifted = {(q(e.src, a), q(e.dst, b)) for a, b in X.relation(e.name)}
        for pair in sorted(Y.relation(e.name) - lifted, key=repr):
            col.checked += 1
            col.fail({"reason": "pair does not lift", "edge": e.name, "pair": pair, "element": (e.src, pair[0])})
        col.checked += len(lifted)
    return col.report()


def check_quotient_axiom(q: Morphism, battery: ZBattery, config: LawConfig = LawConfig(),
                         ops: Operators = DEFAULT_OPS) -> LawReport:
    """``◇S ≤ ∃_{q×1_Z} ◇ (q×1_Z)* S`` for ``S ≤ Y×Z``, ``Z`` in the battery."""
    col = _Collector("quotient-axiom", "q")
    rng = _rng(config)
    for zi, Z in enumerate(battery):
        qz = _stabilize(q, Z)
        space = _Space(qz.cod, config, rng)
        col.sampled |= not space.exhaustive
        for S in space:
            col.compare(ops.dia(S), ops.exists(qz, ops.dia(ops.pullback(qz, S))), "<=", S=S, Z=zi)
    return col.report()


def coequalizer(f: Morphism, g: Morphism) -> QuotientResult:
    """Quotient of the codomain by the equivalence generated by ``f(x) ~ g(x)``."""
    if f.dom != g.dom or f.cod != g.cod:
        raise core.NotParallel("coequalizer needs a parallel pair")
    Y = f.cod
    parent = list(range(Y.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in zip(f.table, g.table):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    parts = {v: [] for v in Y.graph.vertices}
    for i, (v, a) in enumerate(Y.elements):
        for j, (w, b) in enumerate(Y.elements):
            if v == w and find(i) == find(j):
                parts[v].append((a, b))
    return quotient(Y, relation_on(Y, parts))


# --------------------------------------------------------------------------
# disjoint unions


@dataclass(frozen=True)
class DisjointUnion:
    obj: RelGSet
    inl: Morphism
    inr: Morphism
    report: tuple[LawReport, ...]

    @property
    def certified(self) -> bool:
        return all(r.holds for r in self.report)


def disjoint_union(A: RelGSet, B: RelGSet, config: LawConfig = LawConfig()) -> DisjointUnion:
    if A.graph != B.graph:
        raise GraphMismatch("summands over different graphs")
    G = A.graph
    carriers = {v: [("L", a) for a in A.carrier(v)] + [("R", b) for b in B.carrier(v)] for v in G.vertices}
    relations = {
        e.name: [(("L", a), ("L", b)) for a, b in A.relation(e.name)]
        + [(("R", a), ("R", b)) for a, b in B.relation(e.name)]
        for e in G.edges
    }
    AB = make_gset(G, carriers, relations)
    inl = core.make_morphism(A, AB, {v: (lambda a: ("L", a)) for v in G.vertices})
    inr = core.make_morphism(B, AB, {v: (lambda b: ("R", b)) for v in G.vertices})
    return DisjointUnion(AB, inl, inr, tuple(disjoint_union_report(inl, inr, config)))


def disjoint_union_report(inl: Morphism, inr: Morphism, config: LawConfig = LawConfig()) -> list[LawReport]:
    """Complementary images, ◇-closed summands, open injections."""
    if inl.cod != inr.cod:
        raise CodomainMismatch("injections into different objects")
    AB = inl.cod
    A_img, B_img = core.image(inl), core.image(inr)
    comp = _Collector("complement", "A,B")
    comp.compare(core.meet(A_img, B_img), core.bot(AB), "=")
    comp.compare(core.join(A_img, B_img), core.top(AB), "=")
    closed = _Collector("summands-closed", "A,B")
    closed.compare(core.dia(A_img), A_img, "<=", summand="A")
    closed.compare(core.dia(B_img), B_img, "<=", summand="B")
    return [comp.report(), closed.report(), open_report(inl, config, "inl"), open_report(inr, config, "inr")]


def copair(inl: Morphism, inr: Morphism, f: Morphism, g: Morphism) -> Morphism:
    """The map out of the union restricting to ``f`` and ``g``."""
    if f.cod != g.cod:
        raise CodomainMismatch("copair needs a common codomain")
    if inl.cod != inr.cod or inl.dom != f.dom or inr.dom != g.dom:
        raise CodomainMismatch("injections do not match the maps")
    table = [None] * inl.cod.size
    for inj, h in ((inl, f), (inr, g)):
        for i, j in enumerate(inj.table):
            table[j] = h.table[i]
    if any(t is None for t in table):
        raise ModalCatError("injections are not jointly surjective")
    U, X = inl.cod, f.cod
    components = {v: {} for v in U.graph.vertices}
    for i, (v, a) in enumerate(U.elements):
        components[v][a] = X.elements[table[i]][1]
    return core.make_morphism(U, X, components)


def mediate(q: Morphism, f: Morphism) -> Morphism:
    """The unique ``h`` with ``compose(q, h) == f``, for a quotient map ``q``."""
    if q.dom != f.dom:
        raise core.CompositionMismatch("q and f must share a domain")
    if not is_quotient_map(q).holds:
        raise ModalCatError("q is not a quotient map")
    if not core.leq(kernel(q), kernel(f)):
        raise KernelNotContained("ker q is not contained in ker f")
    table = [0] * q.cod.size
    for i, j in enumerate(q.table):
        table[j] = f.table[i]
    h = Morphism(q.cod, f.cod, tuple(table))
    if not core.is_relation_preserving(q.cod, f.cod, h.table):
        raise ModalCatError("mediating map does not preserve relations")
    return h


@dataclass(frozen=True)
class TripleFactorization:
    q: Morphism
    i: Morphism
    m: Morphism

    def certificates(self) -> dict[str, bool]:
        return {
            "q-quotient": is_quotient_map(self.q).holds,
            "i-mono": core.is_mono(self.i),
            "i-epiE": is_epi_e(self.i),
            "m-inM": core.is_in_m(self.m),
        }


def triple_factorize(f: Morphism) -> TripleFactorization:
    """``f = q ; i ; m`` with ``q`` the quotient by ``ker f``, ``m`` the
    M-image and ``i`` the comparison between them."""
    qr = quotient(f.dom, kernel(f))
    e, m = core.factorize(f)
    i = mediate(qr.q, e)
    return TripleFactorization(qr.q, i, m)


def pullback_of_quotient(q: Morphism, g: Morphism) -> Morphism:
    """The leg of the pullback of ``q`` along ``g`` parallel to ``q``."""
    return core.pullback(q, g).right


def initial_maps(X: RelGSet) -> list[Morphism]:
    return list(core.all_morphisms(core.empty_object(X.graph), X))

