"""Finite relational G-sets, their morphisms, and the Boolean lattice of
regular subobjects with the counterpart diamond.

A subobject is stored as one integer bitmask over the ambient object's
elements, enumerated vertex by vertex in carrier order.  Relations on a
subobject are never stored: they are always the restriction of the
ambient relations.

Composition is written in diagrammatic order: ``compose(f, g)`` is
"first ``f``, then ``g``".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as cartesian
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

TERMINAL_POINT = "*"
DEFAULT_BOUND = 14


class ModalCatError(ValueError):
    """Base class for every error raised by this package."""


class UnknownVertex(ModalCatError):
    pass


class UnknownEdge(ModalCatError):
    pass


class PairOutOfCarrier(ModalCatError):
    pass


class GraphMismatch(ModalCatError):
    pass


class NotRelationPreserving(ModalCatError):
    def __init__(self, edge: str, pair: tuple):
        super().__init__(f"pair {pair!r} of edge {edge!r} is not preserved")
        self.edge = edge
        self.pair = pair


class NotAFunction(ModalCatError):
    pass


class CompositionMismatch(ModalCatError):
    pass


class NotParallel(ModalCatError):
    pass


class AmbientMismatch(ModalCatError):
    pass


class TooLarge(ModalCatError):
    def __init__(self, size: int, bound: int):
        super().__init__(f"total carrier size {size} exceeds bound {bound}")
        self.size = size
        self.bound = bound


# --------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Edge:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        vertices = tuple(self.vertices)
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        if len(set(vertices)) != len(vertices):
            raise ModalCatError(f"duplicate vertex in {vertices!r}")
        names = [e.name for e in edges]
        if len(set(names)) != len(names):
            raise ModalCatError(f"duplicate edge name in {names!r}")
        for e in edges:
            for v in (e.src, e.dst):
                if v not in vertices:
                    raise UnknownVertex(f"edge {e.name!r} mentions undeclared vertex {v!r}")

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise UnknownEdge(name)

    def __repr__(self):
        arrows = ", ".join(f"{e.name}:{e.src}->{e.dst}" for e in self.edges)
        return f"Graph({list(self.vertices)}; {arrows})"


# --------------------------------------------------------------------------
# objects


@dataclass(frozen=True)
class RelGSet:
    """A family of finite carriers, one per vertex, with one binary relation
    per edge.  Build instances with :func:`make_gset`."""

    graph: Graph
    carriers: tuple[tuple[Hashable, ...], ...]
    relations: tuple[frozenset, ...]
    factors: tuple["RelGSet", ...] | None = field(default=None, compare=False, repr=False)

    def carrier(self, vertex: str) -> tuple:
        try:
            return self.carriers[self.graph.vertices.index(vertex)]
        except ValueError:
            raise UnknownVertex(vertex) from None

    def relation(self, edge: str) -> frozenset:
        for e, rel in zip(self.graph.edges, self.relations):
            if e.name == edge:
                return rel
        raise UnknownEdge(edge)

    @cached_property
    def offsets(self) -> dict[str, int]:
        out, n = {}, 0
        for v, car in zip(self.graph.vertices, self.carriers):
            out[v] = n
            n += len(car)
        return out

    @cached_property
    def elements(self) -> tuple[tuple[str, Hashable], ...]:
        """All ``(vertex, element)`` pairs in global index order."""
        return tuple((v, a) for v, car in zip(self.graph.vertices, self.carriers) for a in car)

    @cached_property
    def index(self) -> dict[tuple[str, Hashable], int]:
        return {ve: i for i, ve in enumerate(self.elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def vertex_mask(self, vertex: str) -> int:
        return ((1 << len(self.carrier(vertex))) - 1) << self.offsets[vertex]

    @cached_property
    def indexed_relations(self) -> tuple[frozenset[tuple[int, int]], ...]:
        """Each edge relation as a set of global index pairs."""
        idx = self.index
        return tuple(
            frozenset((idx[e.src, a], idx[e.dst, b]) for a, b in rel)
            for e, rel in zip(self.graph.edges, self.relations)
        )

    @cached_property
    def edge_pairs(self) -> tuple[tuple[int, int], ...]:
        """Every related pair of every edge as global indices ``(i, j)``."""
        idx = self.index
        return tuple(
            (idx[e.src, a], idx[e.dst, b])
            for e, rel in zip(self.graph.edges, self.relations)
            for a, b in sorted(rel, key=lambda p: (idx[e.src, p[0]], idx[e.dst, p[1]]))
        )

    @cached_property
    def predecessors(self) -> tuple[int, ...]:
        """``predecessors[j]`` is the mask of elements related to ``j`` by some edge."""
        pre = [0] * self.size
        for i, j in self.edge_pairs:
            pre[j] |= 1 << i
        return tuple(pre)

    def __repr__(self):
        parts = []
        for v, car in zip(self.graph.vertices, self.carriers):
            parts.append(f"{v}:{{{', '.join(map(repr, car))}}}")
        for e, rel in zip(self.graph.edges, self.relations):
            parts.append(f"{e.name}:{sorted(rel, key=repr)}")
        return f"RelGSet({'; '.join(parts)})"


def make_gset(
    graph: Graph,
    carriers: Mapping[str, Iterable[Hashable]],
    relations: Mapping[str, Iterable[tuple[Hashable, Hashable]]] | None = None,
) -> RelGSet:
    """Validate and build a relational G-set.

    Vertices missing from ``carriers`` get empty carriers and edges missing
    from ``relations`` get empty relations.
    """
    relations = relations or {}
    for v in carriers:
        if v not in graph.vertices:
            raise UnknownVertex(v)
    names = {e.name for e in graph.edges}
    for k in relations:
        if k not in names:
            raise UnknownEdge(k)
    cars = tuple(tuple(dict.fromkeys(carriers.get(v, ()))) for v in graph.vertices)
    by_vertex = dict(zip(graph.vertices, cars))
    rels = []
    for e in graph.edges:
        src, dst = set(by_vertex[e.src]), set(by_vertex[e.dst])
        pairs = frozenset(tuple(p) for p in relations.get(e.name, ()))
        for a, b in pairs:
            if a not in src or b not in dst:
                raise PairOutOfCarrier(f"pair {(a, b)!r} of edge {e.name!r} lies outside the carriers")
        rels.append(pairs)
    return RelGSet(graph, cars, tuple(rels))


def same_graph(*objects: RelGSet) -> Graph:
    graphs = {X.graph for X in objects}
    if len(graphs) > 1:
        raise GraphMismatch("objects live over different graphs")
    return objects[0].graph


# --------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class Morphism:
    """A vertex-indexed family of functions, stored as one table mapping
    global domain indices to global codomain indices."""

    dom: RelGSet
    cod: RelGSet
    table: tuple[int, ...]

    def __call__(self, vertex: str, a: Hashable) -> Hashable:
        return self.cod.elements[self.table[self.dom.index[vertex, a]]][1]

    @property
    def components(self) -> dict[str, dict[Hashable, Hashable]]:
        out = {v: {} for v in self.dom.graph.vertices}
        for (v, a), j in zip(self.dom.elements, self.table):
            out[v][a] = self.cod.elements[j][1]
        return out

    def then(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __repr__(self):
        comps = "; ".join(f"{v}:{c}" for v, c in self.components.items())
        return f"Morphism({comps})"


def _check_preserving(X: RelGSet, Y: RelGSet, table: tuple[int, ...]) -> None:
    for e, pairs, target in zip(X.graph.edges, X.indexed_relations, Y.indexed_relations):
        for i, j in pairs:
            if (table[i], table[j]) not in target:
                raise NotRelationPreserving(e.name, (X.elements[i][1], X.elements[j][1]))


def make_morphism(
    X: RelGSet,
    Y: RelGSet,
    components: Mapping[str, Mapping[Hashable, Hashable] | Callable[[Hashable], Hashable]],
) -> Morphism:
    """Build a morphism from per-vertex functions (dicts or callables)."""
    same_graph(X, Y)
    table = []
    for v, a in X.elements:
        comp = components.get(v)
        if comp is None:
            raise NotAFunction(f"no component at vertex {v!r}")
        try:
            b = comp(a) if callable(comp) else comp[a]
        except KeyError:
            raise NotAFunction(f"component at {v!r} undefined on {a!r}") from None
        if (v, b) not in Y.index:
            raise NotAFunction(f"{a!r} at {v!r} maps outside the codomain carrier")
        table.append(Y.index[v, b])
    table = tuple(table)
    _check_preserving(X, Y, table)
    return Morphism(X, Y, table)


def is_relation_preserving(X: RelGSet, Y: RelGSet, table: tuple[int, ...]) -> bool:
    try:
        _check_preserving(X, Y, table)
    except NotRelationPreserving:
        return False
    return True


def identity(X: RelGSet) -> Morphism:
    return Morphism(X, X, tuple(range(X.size)))


def compose(f: Morphism, g: Morphism) -> Morphism:
    """Diagrammatic composite: first ``f``, then ``g``."""
    if f.cod != g.dom:
        raise CompositionMismatch("codomain of the first map is not the domain of the second")
    return Morphism(f.dom, g.cod, tuple(g.table[i] for i in f.table))


def all_morphisms(X: RelGSet, Y: RelGSet) -> Iterator[Morphism]:
    """Brute-force enumeration of every morphism ``X -> Y``."""
    same_graph(X, Y)
    choices = []
    for v, _ in X.elements:
        off = Y.offsets[v]
        choices.append(range(off, off + len(Y.carrier(v))))
    for table in cartesian(*choices):
        if is_relation_preserving(X, Y, table):
            yield Morphism(X, Y, tuple(table))


# --------------------------------------------------------------------------
# subobjects


@dataclass(frozen=True)
class MSubobject:
    """A family of subsets of the ambient carriers; relations are induced."""

    ambient: RelGSet
    mask: int

    @property
    def parts(self) -> dict[str, frozenset]:
        out = {v: set() for v in self.ambient.graph.vertices}
        for i, (v, a) in enumerate(self.ambient.elements):
            if self.mask >> i & 1:
                out[v].add(a)
        return {v: frozenset(s) for v, s in out.items()}

    def __contains__(self, item: tuple[str, Hashable]) -> bool:
        i = self.ambient.index.get(tuple(item))
        return i is not None and bool(self.mask >> i & 1)

    def __and__(self, other):
        return meet(self, other)

    def __or__(self, other):
        return join(self, other)

    def __invert__(self):
        return neg(self)

    def __le__(self, other):
        return leq(self, other)

    def __repr__(self):
        shown = {v: sorted(p, key=repr) for v, p in self.parts.items()}
        return f"MSubobject({shown})"


def subobject(X: RelGSet, parts: Mapping[str, Iterable[Hashable]]) -> MSubobject:
    mask = 0
    for v, elems in parts.items():
        if v not in X.graph.vertices:
            raise UnknownVertex(v)
        for a in elems:
            if (v, a) not in X.index:
                raise PairOutOfCarrier(f"{a!r} is not in the carrier at {v!r}")
            mask |= 1 << X.index[v, a]
    return MSubobject(X, mask)


def top(X: RelGSet) -> MSubobject:
    return MSubobject(X, X.full_mask)


def bot(X: RelGSet) -> MSubobject:
    return MSubobject(X, 0)


def _same_ambient(S: MSubobject, T: MSubobject) -> RelGSet:
    if S.ambient != T.ambient:
        raise AmbientMismatch("subobjects of different objects")
    return S.ambient


def meet(S: MSubobject, T: MSubobject) -> MSubobject:
    return MSubobject(_same_ambient(S, T), S.mask & T.mask)


def join(S: MSubobject, T: MSubobject) -> MSubobject:
    return MSubobject(_same_ambient(S, T), S.mask | T.mask)


def neg(S: MSubobject) -> MSubobject:
    return MSubobject(S.ambient, S.ambient.full_mask & ~S.mask)


def implies(S: MSubobject, T: MSubobject) -> MSubobject:
    return join(neg(S), T)


def leq(S: MSubobject, T: MSubobject) -> bool:
    _same_ambient(S, T)
    return S.mask & ~T.mask == 0


def lattice_op(kind: str, S: MSubobject | RelGSet, T: MSubobject | None = None):
    """Dispatch on ``kind`` in meet, join, neg, top, bot, leq.

    ``top`` and ``bot`` accept either an object or a subobject of it.
    """
    match kind:
        case "meet":
            return meet(S, T)
        case "join":
            return join(S, T)
        case "neg":
            return neg(S)
        case "leq":
            return leq(S, T)
        case "top" | "bot":
            X = S.ambient if isinstance(S, MSubobject) else S
            return top(X) if kind == "top" else bot(X)
    raise ValueError(f"unknown lattice operation {kind!r}")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def pullback_sub(f: Morphism, S: MSubobject) -> MSubobject:
    """Inverse image ``f* S``."""
    if S.ambient != f.cod:
        raise AmbientMismatch("subobject does not live on the codomain")
    m = S.mask
    return MSubobject(f.dom, sum(1 << i for i, j in enumerate(f.table) if m >> j & 1))


def direct_image(f: Morphism, S: MSubobject) -> MSubobject:
    """Image ``∃_f S``."""
    if S.ambient != f.dom:
        raise AmbientMismatch("subobject does not live on the domain")
    out = 0
    for i in _bits(S.mask):
        out |= 1 << f.table[i]
    return MSubobject(f.cod, out)


def dia_mask(X: RelGSet, mask: int) -> int:
    pre = X.predecessors
    out = 0
    for j in _bits(mask):
        out |= pre[j]
    return out


def dia(S: MSubobject) -> MSubobject:
    """``a ∈ ◇S`` iff some edge relates ``a`` to an element of ``S``."""
    return MSubobject(S.ambient, dia_mask(S.ambient, S.mask))


def box(S: MSubobject) -> MSubobject:
    return neg(dia(neg(S)))


def modal_op(kind: str, S: MSubobject) -> MSubobject:
    if kind == "dia":
        return dia(S)
    if kind == "box":
        return box(S)
    raise ValueError(f"unknown modality {kind!r}")


def enumerate_subobjects(X: RelGSet, bound: int = DEFAULT_BOUND) -> Iterator[MSubobject]:
    """All ``2**n`` subobjects in increasing mask order."""
    if X.size > bound:
        raise TooLarge(X.size, bound)
    for mask in range(1 << X.size):
        yield MSubobject(X, mask)


def as_object(S: MSubobject) -> tuple[RelGSet, Morphism]:
    """The subobject as a G-set with induced relations, plus its inclusion."""
    X = S.ambient
    parts = S.parts
    carriers = {v: [a for a in X.carrier(v) if a in parts[v]] for v in X.graph.vertices}
    relations = {
        e.name: [(a, b) for a, b in rel if a in parts[e.src] and b in parts[e.dst]]
        for e, rel in zip(X.graph.edges, X.relations)
    }
    A = make_gset(X.graph, carriers, relations)
    return A, Morphism(A, X, tuple(X.index[ve] for ve in A.elements))


# --------------------------------------------------------------------------
# limits


@dataclass(frozen=True)
class Product:
    """A chosen product with its projections.

    Elements are ``"*"`` for the empty product, the factor's own element for
    a unary product, and tuples otherwise.
    """

    obj: RelGSet
    factors: tuple[RelGSet, ...]
    projections: tuple[Morphism, ...]

    def pack(self, values: Iterable[Hashable]) -> Hashable:
        values = tuple(values)
        if len(values) != len(self.factors):
            raise ModalCatError("wrong number of components")
        if not self.factors:
            return TERMINAL_POINT
        if len(self.factors) == 1:
            return values[0]
        return values

    def unpack(self, element: Hashable) -> tuple:
        if not self.factors:
            return ()
        if len(self.factors) == 1:
            return (element,)
        return tuple(element)

    def tupling(self, maps: Iterable[Morphism]) -> Morphism:
        """The unique map ``⟨f_1, ..., f_n⟩`` into the product."""
        maps = tuple(maps)
        if len(maps) != len(self.factors):
            raise ModalCatError("wrong number of components")
        if not maps:
            raise ModalCatError("tupling of zero maps needs a domain; use terminal_map")
        A = maps[0].dom
        for f, F in zip(maps, self.factors):
            if f.dom != A or f.cod != F:
                raise CompositionMismatch("tupling maps do not match the product factors")
        P = self.obj
        table = tuple(
            P.index[v, self.pack(F.elements[f.table[i]][1] for f, F in zip(maps, self.factors))]
            for i, (v, _) in enumerate(A.elements)
        )
        return Morphism(A, P, table)


def product_n(objects: Iterable[RelGSet], graph: Graph | None = None) -> Product:
    """Pointwise product; the empty product is the terminal object."""
    objects = tuple(objects)
    if not objects:
        if graph is None:
            raise ModalCatError("empty product needs an explicit graph")
        T = RelGSet(
            graph,
            tuple((TERMINAL_POINT,) for _ in graph.vertices),
            tuple(frozenset({(TERMINAL_POINT, TERMINAL_POINT)}) for _ in graph.edges),
            factors=(),
        )
        return Product(T, (), ())
    G = same_graph(*objects)
    if graph is not None and graph != G:
        raise GraphMismatch("objects do not live over the given graph")
    if len(objects) == 1:
        return Product(objects[0], objects, (identity(objects[0]),))
    carriers = tuple(tuple(cartesian(*(X.carrier(v) for X in objects))) for v in G.vertices)
    relations = tuple(
        frozenset(
            (tuple(p[0] for p in combo), tuple(p[1] for p in combo))
            for combo in cartesian(*(X.relations[k] for X in objects))
        )
        for k in range(len(G.edges))
    )
    P = RelGSet(G, carriers, relations, factors=objects)
    projections = tuple(
        Morphism(P, X, tuple(X.index[v, a[n]] for v, a in P.elements))
        for n, X in enumerate(objects)
    )
    return Product(P, objects, projections)


def terminal(graph: Graph) -> RelGSet:
    return product_n((), graph).obj


def terminal_map(X: RelGSet) -> Morphism:
    T = terminal(X.graph)
    return Morphism(X, T, tuple(T.offsets[v] for v, _ in X.elements))


def empty_object(graph: Graph) -> RelGSet:
    return make_gset(graph, {})


def binary_product(X: RelGSet, Y: RelGSet) -> Product:
    """``X × Y`` as a genuine pair product (tuples even when X or Y is a product)."""
    return product_n((X, Y))


def times(f: Morphism, g: Morphism) -> Morphism:
    """``f × g`` between binary products."""
    src = binary_product(f.dom, g.dom)
    dst = binary_product(f.cod, g.cod)
    return dst.tupling((compose(src.projections[0], f), compose(src.projections[1], g)))


def equalizer(f: Morphism, g: Morphism) -> MSubobject:
    if f.dom != g.dom or f.cod != g.cod:
        raise NotParallel("equalizer needs a parallel pair")
    return MSubobject(f.dom, sum(1 << i for i, (a, b) in enumerate(zip(f.table, g.table)) if a == b))


@dataclass(frozen=True)
class Pullback:
    obj: RelGSet
    left: Morphism   # P -> dom(f)
    right: Morphism  # P -> dom(g)


def pullback(f: Morphism, g: Morphism) -> Pullback:
    """Pullback of a cospan, computed as an equalizer inside the product."""
    if f.cod != g.cod:
        raise NotParallel("pullback needs a common codomain")
    prod = binary_product(f.dom, g.dom)
    p1, p2 = prod.projections
    E = equalizer(compose(p1, f), compose(p2, g))
    P, incl = as_object(E)
    return Pullback(P, compose(incl, p1), compose(incl, p2))


# --------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class Classification:
    is_mono: bool
    is_epi_e: bool
    is_in_m: bool
    is_iso: bool


def is_mono(f: Morphism) -> bool:
    return len(set(f.table)) == len(f.table)


def is_epi_e(f: Morphism) -> bool:
    return set(f.table) == set(range(f.cod.size))


def is_in_m(f: Morphism) -> bool:
    """Injective and reflecting every relation of the codomain."""
    if not is_mono(f):
        return False
    back = {j: i for i, j in enumerate(f.table)}
    for e, rel in zip(f.cod.graph.edges, f.cod.relations):
        for a, b in rel:
            i = back.get(f.cod.index[e.src, a])
            j = back.get(f.cod.index[e.dst, b])
            if i is None or j is None:
                continue
            if (f.dom.elements[i][1], f.dom.elements[j][1]) not in f.dom.relation(e.name):
                return False
    return True


def classify(f: Morphism) -> Classification:
    mono, epi, in_m = is_mono(f), is_epi_e(f), is_in_m(f)
    return Classification(mono, epi, in_m, in_m and epi)


def image(f: Morphism) -> MSubobject:
    return direct_image(f, top(f.dom))


def factorize(f: Morphism) -> tuple[Morphism, Morphism]:
    """``f = compose(e, m)`` with ``e`` pointwise surjective and ``m`` in M."""
    Im, m = as_object(image(f))
    back = {j: i for i, j in enumerate(m.table)}
    e = Morphism(f.dom, Im, tuple(back[j] for j in f.table))
    return e, m


def diagonal_filler(e: Morphism, m: Morphism, u: Morphism, v: Morphism) -> Morphism | None:
    """Solve the square ``e;v = u;m`` for ``w`` with ``e;w = u`` and ``w;m = v``.

    Returns ``None`` when no filler exists; when ``e`` is surjective any
    filler is unique, since it is forced on the image of ``e``.
    """
    if compose(e, v) != compose(u, m):
        raise ModalCatError("the square does not commute")
    B, C = e.cod, u.cod
    table: list[int | None] = [None] * B.size
    for i, b in enumerate(e.table):
        if table[b] is None:
            table[b] = u.table[i]
        elif table[b] != u.table[i]:
            return None
    if any(t is None for t in table):
        return None
    table = tuple(table)
    if not is_relation_preserving(B, C, table):
        return None
    w = Morphism(B, C, table)
    if compose(w, m) != v:
        return None
    return w


def graph_of(h: Morphism) -> MSubobject:
    """The graph ``{(a, h a)}`` as a subobject of ``dom × cod``."""
    prod = binary_product(h.dom, h.cod)
    return image(prod.tupling((identity(h.dom), h)))


def inverse(f: Morphism) -> Morphism | None:
    if not (is_mono(f) and is_epi_e(f)):
        return None
    table = [0] * f.cod.size
    for i, j in enumerate(f.table):
        table[j] = i
    table = tuple(table)
    if not is_relation_preserving(f.cod, f.dom, table):
        return None
    return Morphism(f.cod, f.dom, table)

