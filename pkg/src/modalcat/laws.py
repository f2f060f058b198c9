"""Exhaustive (or seeded-sampled) checks of the doctrine, modal-category,
optional S4-style and saturation laws on finite instances.

Every check returns :class:`LawReport` values.  A failing report carries a
witness: the operands, both sides of the violated (in)equality, and one
element separating them, so that the failure can be recomputed with the
operations in :mod:`modalcat.core`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping

import numpy as np

from . import core
from .core import (
    DEFAULT_BOUND,
    Graph,
    ModalCatError,
    Morphism,
    MSubobject,
    RelGSet,
    binary_product,
    classify,
    compose,
    identity,
    is_epi_e,
    is_mono,
    make_gset,
    product_n,
    terminal,
    times,
)

MAX_COUNTEREXAMPLES = 16
PAIR_TABLE_LIMIT = 22  # log2 of the largest exhaustive pair grid


class NotMono(ModalCatError):
    pass


class AmbientNotAProduct(ModalCatError):
    pass


class MissingCompositionTable(ModalCatError):
    pass


@dataclass
class LawReport:
    law: str
    status: str  # "holds" or "fails"
    subject: str = ""
    witness: dict | None = None
    counterexamples: list[dict] = field(default_factory=list)
    checked: int = 0
    sampled: bool = False
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    def line(self) -> str:
        tag = "sampled" if self.sampled else "exhaustive"
        text = f"{self.status.upper():5} {self.law} [{self.subject}] ({self.checked} cases, {tag})"
        if self.note:
            text += f" - {self.note}"
        if self.witness is not None:
            text += f"\n      witness: {describe_witness(self.witness)}"
        return text


def describe_witness(w: Mapping) -> str:
    out = []
    for key, value in w.items():
        if isinstance(value, MSubobject):
            value = {v: sorted(p, key=repr) for v, p in value.parts.items()}
        elif isinstance(value, (RelGSet, Morphism)):
            continue
        out.append(f"{key}={value}")
    return ", ".join(out)


@dataclass(frozen=True)
class LawConfig:
    bound: int = DEFAULT_BOUND
    sample_size: int = 512
    seed: int = 0


@dataclass(frozen=True)
class Operators:
    """The operations the law checks rely on; swapped out in mutation tests."""

    exists: Callable[[Morphism, MSubobject], MSubobject] = core.direct_image
    pullback: Callable[[Morphism, MSubobject], MSubobject] = core.pullback_sub
    dia: Callable[[MSubobject], MSubobject] = core.dia


DEFAULT_OPS = Operators()


@dataclass(frozen=True)
class Diagram:
    """A finite instance: named objects, named morphisms, named relations
    (subobjects of binary products)."""

    objects: Mapping[str, RelGSet]
    morphisms: Mapping[str, Morphism] = field(default_factory=dict)
    relations: Mapping[str, MSubobject] = field(default_factory=dict)

    def all_morphisms(self) -> dict[str, Morphism]:
        out = {f"id_{name}": identity(X) for name, X in self.objects.items()}
        out.update(self.morphisms)
        return out


@dataclass(frozen=True)
class ZBattery:
    members: tuple[RelGSet, ...]

    def __iter__(self) -> Iterator[RelGSet]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def z_battery(graph: Graph, extras: Iterable[RelGSet] = (), singleton_carriers: bool = False) -> ZBattery:
    """Terminal object, one singleton pair per edge, then ``extras``.

    A singleton pair for ``k: α -> β`` has ``{*}`` at α and β and the single
    pair at ``k``.  Carriers at other vertices are empty unless
    ``singleton_carriers`` is set.
    """
    members = [terminal(graph)]
    for e in graph.edges:
        if singleton_carriers:
            carriers = {v: ["*"] for v in graph.vertices}
        else:
            carriers = {e.src: ["*"], e.dst: ["*"]}
        members.append(make_gset(graph, carriers, {e.name: [("*", "*")]}))
    members.extend(extras)
    for Z in members:
        if Z.graph != graph:
            raise core.GraphMismatch("battery member over a different graph")
    return ZBattery(tuple(members))


# --------------------------------------------------------------------------
# quantification helpers


class _Space:
    """The subobjects of ``X`` to quantify over: all of them, or a sample."""

    def __init__(self, X: RelGSet, config: LawConfig, rng: random.Random):
        self.X = X
        n = X.size
        self.exhaustive = n <= config.bound
        if self.exhaustive:
            self.masks = range(1 << n)
        else:
            self.masks = sorted({rng.getrandbits(n) for _ in range(config.sample_size)})

    def __iter__(self) -> Iterator[MSubobject]:
        for m in self.masks:
            yield MSubobject(self.X, m)

    def __len__(self):
        return len(self.masks)


def _table(fn: Callable[[MSubobject], MSubobject], X: RelGSet) -> np.ndarray:
    return np.fromiter((fn(MSubobject(X, m)).mask for m in range(1 << X.size)), dtype=np.int64, count=1 << X.size)


def _first_diff(lhs: MSubobject, rhs: MSubobject) -> tuple[str, Hashable] | None:
    diff = lhs.mask ^ rhs.mask
    if not diff:
        return None
    i = (diff & -diff).bit_length() - 1
    return lhs.ambient.elements[i]


def _first_excess(lhs: MSubobject, rhs: MSubobject) -> tuple[str, Hashable] | None:
    excess = lhs.mask & ~rhs.mask
    if not excess:
        return None
    i = (excess & -excess).bit_length() - 1
    return lhs.ambient.elements[i]


class _Collector:
    def __init__(self, law: str, subject: str):
        self.law, self.subject = law, subject
        self.found: list[dict] = []
        self.checked = 0
        self.sampled = False
        self.total_failures = 0

    def compare(self, lhs: MSubobject, rhs: MSubobject, relation: str, **operands) -> bool:
        """Record one case; ``relation`` is ``"<="`` or ``"="``."""
        self.checked += 1
        if relation == "<=":
            ok = lhs.mask & ~rhs.mask == 0
            where = None if ok else _first_excess(lhs, rhs)
        else:
            ok = lhs.mask == rhs.mask
            where = None if ok else _first_diff(lhs, rhs)
        if not ok:
            self.fail(dict(operands, lhs=lhs, rhs=rhs, relation=relation, element=where))
        return ok

    def fail(self, witness: dict) -> None:
        self.total_failures += 1
        if len(self.found) < MAX_COUNTEREXAMPLES:
            self.found.append(witness)

    def report(self, note: str = "") -> LawReport:
        status = "fails" if self.total_failures else "holds"
        return LawReport(
            self.law,
            status,
            self.subject,
            witness=self.found[0] if self.found else None,
            counterexamples=list(self.found),
            checked=self.checked,
            sampled=self.sampled,
            note=note,
        )


def _rng(config: LawConfig) -> random.Random:
    return random.Random(config.seed)


def _grid_ok(n1: int, n2: int, config: LawConfig) -> bool:
    return n1 <= config.bound and n2 <= config.bound and n1 + n2 <= PAIR_TABLE_LIMIT


def _sample_pairs(X1: RelGSet, X2: RelGSet, config: LawConfig, rng: random.Random):
    for _ in range(config.sample_size):
        yield MSubobject(X1, rng.getrandbits(X1.size)), MSubobject(X2, rng.getrandbits(X2.size))


# --------------------------------------------------------------------------
# doctrine laws


def adjunction_report(f: Morphism, ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig(),
                      subject: str = "") -> LawReport:
    """``∃_f S ≤ T`` iff ``S ≤ f* T`` for all ``S`` on the domain, ``T`` on the codomain."""
    col = _Collector("adjunction", subject)
    X, Y = f.dom, f.cod
    if _grid_ok(X.size, Y.size, config):
        ex = _table(lambda S: ops.exists(f, S), X)
        pb = _table(lambda T: ops.pullback(f, T), Y)
        S = np.arange(1 << X.size, dtype=np.int64)[:, None]
        T = np.arange(1 << Y.size, dtype=np.int64)[None, :]
        left = (ex[:, None] & ~T) == 0
        right = (S & ~pb[None, :]) == 0
        bad = np.argwhere(left != right)
        col.checked = left.size
        for s, t in bad[:MAX_COUNTEREXAMPLES]:
            col.fail(_adjunction_witness(f, MSubobject(X, int(s)), MSubobject(Y, int(t)), ops))
        col.total_failures = len(bad)
    else:
        col.sampled = True
        for Sm, Tm in _sample_pairs(X, Y, config, _rng(config)):
            col.checked += 1
            if leq_flag(ops.exists(f, Sm), Tm) != leq_flag(Sm, ops.pullback(f, Tm)):
                col.fail(_adjunction_witness(f, Sm, Tm, ops))
    return col.report()


def leq_flag(S: MSubobject, T: MSubobject) -> bool:
    return S.mask & ~T.mask == 0


def _adjunction_witness(f, S, T, ops):
    return {
        "S": S,
        "T": T,
        "lhs": ops.exists(f, S),
        "rhs": ops.pullback(f, T),
        "relation": "exists(S) <= T iff S <= pullback(T)",
        "element": None,
    }


def frobenius_report(f: Morphism, ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig(),
                     subject: str = "") -> LawReport:
    """``∃_f(S ∧ f*T) = ∃_f S ∧ T``."""
    col = _Collector("frobenius", subject)
    X, Y = f.dom, f.cod
    if _grid_ok(X.size, Y.size, config):
        ex = _table(lambda S: ops.exists(f, S), X)
        pb = _table(lambda T: ops.pullback(f, T), Y)
        S = np.arange(1 << X.size, dtype=np.int64)[:, None]
        T = np.arange(1 << Y.size, dtype=np.int64)[None, :]
        lhs = ex[S & pb[None, :]]
        rhs = ex[:, None] & T
        bad = np.argwhere(lhs != rhs)
        col.checked = lhs.size
        col.total_failures = 0
        for s, t in bad[:MAX_COUNTEREXAMPLES]:
            Sm, Tm = MSubobject(X, int(s)), MSubobject(Y, int(t))
            col.fail(_frobenius_witness(f, Sm, Tm, ops))
        col.total_failures = len(bad)
    else:
        col.sampled = True
        for Sm, Tm in _sample_pairs(X, Y, config, _rng(config)):
            w = _frobenius_witness(f, Sm, Tm, ops)
            col.compare(w["lhs"], w["rhs"], "=", S=Sm, T=Tm)
    return col.report()


def _frobenius_witness(f, S, T, ops):
    lhs = ops.exists(f, core.meet(S, ops.pullback(f, T)))
    rhs = core.meet(ops.exists(f, S), T)
    return {"S": S, "T": T, "lhs": lhs, "rhs": rhs, "relation": "=", "element": _first_diff(lhs, rhs)}


def beck_chevalley_report(f1: Morphism, f2: Morphism, ops: Operators = DEFAULT_OPS,
                          config: LawConfig = LawConfig(), subject: str = "") -> LawReport:
    """On the pullback ``P`` of ``f1: Y1 -> Z <- Y2: f2``: ``f2* ∃_{f1} S = ∃_{p2} p1* S``."""
    pb = core.pullback(f1, f2)
    col = _Collector("beck-chevalley", subject)
    space = _Space(f1.dom, config, _rng(config))
    col.sampled = not space.exhaustive
    for S in space:
        lhs = ops.pullback(f2, ops.exists(f1, S))
        rhs = ops.exists(pb.right, ops.pullback(pb.left, S))
        col.compare(lhs, rhs, "=", S=S)
    return col.report()


def doctrine_report(diagram: Diagram, ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig()) -> list[LawReport]:
    """Adjunction and Frobenius for every morphism (identities included) and
    Beck-Chevalley for every cospan formable from the diagram's morphisms."""
    reports = []
    maps = diagram.all_morphisms()
    for name, f in maps.items():
        reports.append(adjunction_report(f, ops, config, subject=name))
        reports.append(frobenius_report(f, ops, config, subject=name))
    for n1, f1 in maps.items():
        for n2, f2 in maps.items():
            if f1.cod == f2.cod:
                reports.append(beck_chevalley_report(f1, f2, ops, config, subject=f"{n1},{n2}"))
    return reports


# --------------------------------------------------------------------------
# modal-category laws


def k_laws_report(X: RelGSet, ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig(),
                  subject: str = "") -> list[LawReport]:
    """``◇⊥ = ⊥`` and ``◇(S ∨ T) = ◇S ∨ ◇T``."""
    bottom = _Collector("dia-bottom", subject)
    b = core.bot(X)
    bottom.compare(ops.dia(b), b, "=")
    col = _Collector("dia-join", subject)
    if _grid_ok(X.size, X.size, config):
        d = _table(ops.dia, X)
        S = np.arange(1 << X.size, dtype=np.int64)
        lhs = d[S[:, None] | S[None, :]]
        rhs = d[:, None] | d[None, :]
        bad = np.argwhere(lhs != rhs)
        col.checked = lhs.size
        for s, t in bad[:MAX_COUNTEREXAMPLES]:
            Sm, Tm = MSubobject(X, int(s)), MSubobject(X, int(t))
            left, right = ops.dia(core.join(Sm, Tm)), core.join(ops.dia(Sm), ops.dia(Tm))
            col.fail({"S": Sm, "T": Tm, "lhs": left, "rhs": right, "relation": "=",
                      "element": _first_diff(left, right)})
        col.total_failures = len(bad)
    else:
        col.sampled = True
        for Sm, Tm in _sample_pairs(X, X, config, _rng(config)):
            col.compare(ops.dia(core.join(Sm, Tm)), core.join(ops.dia(Sm), ops.dia(Tm)), "=", S=Sm, T=Tm)
    return [bottom.report(), col.report()]


def continuity_report(f: Morphism, ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig(),
                      subject: str = "") -> LawReport:
    """``◇ f* S ≤ f* ◇ S`` for every ``S`` on the codomain."""
    col = _Collector("continuity", subject)
    space = _Space(f.cod, config, _rng(config))
    col.sampled = not space.exhaustive
    for S in space:
        col.compare(ops.dia(ops.pullback(f, S)), ops.pullback(f, ops.dia(S)), "<=", S=S)
    return col.report()


def _stabilize(m: Morphism, Z: RelGSet | None) -> Morphism:
    return m if Z is None else times(m, identity(Z))


def subspace_report(m: Morphism, battery: ZBattery | None = None, ops: Operators = DEFAULT_OPS,
                    config: LawConfig = LawConfig(), subject: str = "") -> LawReport:
    """``◇S = (m×1_Z)* ◇ ∃_{m×1_Z} S`` for ``S`` on ``A×Z``.

    Checked for ``m`` itself and for ``m × 1_Z`` with ``Z`` in the battery.
    """
    col = _Collector("subspace", subject)
    rng = _rng(config)
    for zi, Z in enumerate([None, *(battery or ())]):
        mz = _stabilize(m, Z)
        space = _Space(mz.dom, config, rng)
        col.sampled |= not space.exhaustive
        for S in space:
            col.compare(ops.dia(S), ops.pullback(mz, ops.dia(ops.exists(mz, S))), "=", S=S, Z=zi)
    return col.report()


def modal_law_report(diagram: Diagram, battery: ZBattery | None = None, ops: Operators = DEFAULT_OPS,
                     config: LawConfig = LawConfig()) -> list[LawReport]:
    """K-laws on every object, continuity on every morphism, the stabilized
    subspace law on every M-mono, and the contZ inequality on every
    continuous relation of the diagram."""
    if battery is None:
        graph = next(iter(diagram.objects.values())).graph
        battery = z_battery(graph)
    reports = []
    for name, X in diagram.objects.items():
        reports.extend(k_laws_report(X, ops, config, subject=name))
    for name, f in diagram.all_morphisms().items():
        reports.append(continuity_report(f, ops, config, subject=name))
        if classify(f).is_in_m:
            reports.append(subspace_report(f, battery, ops, config, subject=name))
    for name, R in diagram.relations.items():
        bm = brittle_morphism(R, battery, config)
        if bm.continuous.holds:
            reports.append(contz_report(R, battery, config, subject=name))
    return reports


# --------------------------------------------------------------------------
# optional laws (expected to fail on generic instances)


def closure_report(X: RelGSet, ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig(),
                   subject: str = "") -> list[LawReport]:
    """``S ≤ ◇S`` and ``◇◇S = ◇S``."""
    infl = _Collector("closure-inflationary", subject)
    idem = _Collector("closure-idempotent", subject)
    space = _Space(X, config, _rng(config))
    infl.sampled = idem.sampled = not space.exhaustive
    for S in space:
        d = ops.dia(S)
        infl.compare(S, d, "<=", S=S)
        idem.compare(ops.dia(d), d, "=", S=S)
    return [infl.report(), idem.report()]


def variable_independence_report(X1: RelGSet, X2: RelGSet, ops: Operators = DEFAULT_OPS,
                                 config: LawConfig = LawConfig(), subject: str = "") -> LawReport:
    """``π1*◇S1 ∧ π2*◇S2 = ◇(π1*S1 ∧ π2*S2)`` in ``X1 × X2``."""
    prod = binary_product(X1, X2)
    p1, p2 = prod.projections
    col = _Collector("variable-independence", subject)
    if X1.size + X2.size <= config.bound:
        pairs = ((MSubobject(X1, a), MSubobject(X2, b)) for a in range(1 << X1.size) for b in range(1 << X2.size))
    else:
        col.sampled = True
        pairs = _sample_pairs(X1, X2, config, _rng(config))
    for S1, S2 in pairs:
        lhs = core.meet(ops.pullback(p1, ops.dia(S1)), ops.pullback(p2, ops.dia(S2)))
        rhs = ops.dia(core.meet(ops.pullback(p1, S1), ops.pullback(p2, S2)))
        col.compare(lhs, rhs, "=", S1=S1, S2=S2)
    return col.report()


@dataclass(frozen=True)
class CompositionTable:
    """Composites ``compose[(k, l)]`` (first ``k`` then ``l``) and identity
    edges per vertex; a vertex absent from ``identity`` has none."""

    compose: Mapping[tuple[str, str], str]
    identity: Mapping[str, str] = field(default_factory=dict)


def lax_functoriality_report(X: RelGSet, table: CompositionTable | None, subject: str = "") -> list[LawReport]:
    """``id ⊆ X_{id_α}`` and ``X_k ; X_l ⊆ X_{l∘k}`` for the supplied table."""
    if table is None:
        raise MissingCompositionTable("lax functoriality needs a composition table")
    G = X.graph
    ident = _Collector("lax-identity", subject)
    for v in G.vertices:
        ident.checked += 1
        edge = table.identity.get(v)
        if edge is None:
            if X.carrier(v):
                ident.fail({"vertex": v, "reason": "no identity edge in the table",
                            "element": (v, X.carrier(v)[0])})
            continue
        rel = X.relation(edge)
        for a in X.carrier(v):
            if (a, a) not in rel:
                ident.fail({"vertex": v, "edge": edge, "element": (v, a)})
                break
    comp = _Collector("lax-composition", subject)
    for (k, l), kl in sorted(table.compose.items()):
        comp.checked += 1
        ek, el = G.edge(k), G.edge(l)
        if ek.dst != el.src:
            raise ModalCatError(f"edges {k!r} and {l!r} are not composable")
        Rk, Rl, Rkl = X.relation(k), X.relation(l), X.relation(kl)
        composite = {(a, c) for a, b in Rk for b2, c in Rl if b == b2}
        missing = sorted(composite - Rkl, key=repr)
        if missing:
            comp.fail({"k": k, "l": l, "composite": kl, "pair": missing[0]})
    note = "" if table.identity else "table has no identity edges"
    return [ident.report(note), comp.report()]


def optional_law_report(diagram: Diagram, composition_table: CompositionTable | None = None,
                        ops: Operators = DEFAULT_OPS, config: LawConfig = LawConfig(),
                        lax: bool | None = None) -> list[LawReport]:
    """Closure, variable independence and (when a table is given, or when
    ``lax`` is requested) lax functoriality."""
    reports = []
    names = list(diagram.objects)
    for name in names:
        reports.extend(closure_report(diagram.objects[name], ops, config, subject=name))
    for n1 in names:
        for n2 in names:
            reports.append(variable_independence_report(diagram.objects[n1], diagram.objects[n2], ops, config,
                                                        subject=f"{n1}x{n2}"))
    if lax is None:
        lax = composition_table is not None
    if lax:
        for name in names:
            reports.extend(lax_functoriality_report(diagram.objects[name], composition_table, subject=name))
    return reports


# --------------------------------------------------------------------------
# relations and saturation


def _factors(R: MSubobject) -> tuple[RelGSet, RelGSet]:
    fs = R.ambient.factors
    if not fs or len(fs) != 2:
        raise AmbientNotAProduct("relation must live on a binary product")
    return fs


class _Composer:
    """Precomputed maps for ``R ∘ T`` with ``R ≤ X×Y`` and ``T ≤ Y×Z``."""

    def __init__(self, X: RelGSet, Y: RelGSet, Z: RelGSet):
        XYZ = product_n((X, Y, Z))
        px, py, pz = XYZ.projections
        self.XY = binary_product(X, Y)
        self.YZ = binary_product(Y, Z)
        self.XZ = binary_product(X, Z)
        self.to_xy = self.XY.tupling((px, py))
        self.to_yz = self.YZ.tupling((py, pz))
        self.to_xz = self.XZ.tupling((px, pz))

    def __call__(self, R: MSubobject, T: MSubobject) -> MSubobject:
        if R.ambient != self.XY.obj or T.ambient != self.YZ.obj:
            raise core.AmbientMismatch("relations do not compose")
        both = core.meet(core.pullback_sub(self.to_xy, R), core.pullback_sub(self.to_yz, T))
        return core.direct_image(self.to_xz, both)


def rel_compose(R: MSubobject, T: MSubobject) -> MSubobject:
    """``∃_{π_XZ}(π_XY* R ∧ π_YZ* T)`` for ``R ≤ X×Y`` and ``T ≤ Y×Z``."""
    X, Y = _factors(R)
    Y2, Z = _factors(T)
    if Y != Y2:
        raise core.AmbientMismatch("middle factors differ")
    return _Composer(X, Y, Z)(R, T)


@dataclass
class OpennessReport:
    open: bool
    stably_open: bool
    barcan: bool
    lem_bf_consistent: bool
    reports: list[LawReport]


def open_report(h: Morphism, config: LawConfig = LawConfig(), subject: str = "",
                ops: Operators = DEFAULT_OPS) -> LawReport:
    """``h* ◇ S ≤ ◇ h* S`` for every ``S`` on the codomain."""
    col = _Collector("open", subject)
    space = _Space(h.cod, config, _rng(config))
    col.sampled = not space.exhaustive
    for S in space:
        col.compare(ops.pullback(h, ops.dia(S)), ops.dia(ops.pullback(h, S)), "<=", S=S)
    return col.report()


def barcan_report(h: Morphism, config: LawConfig = LawConfig(), subject: str = "",
                  ops: Operators = DEFAULT_OPS) -> LawReport:
    """``◇ ∃_h S ≤ ∃_h ◇ S`` for every ``S`` on the domain."""
    col = _Collector("barcan", subject)
    space = _Space(h.dom, config, _rng(config))
    col.sampled = not space.exhaustive
    for S in space:
        col.compare(ops.dia(ops.exists(h, S)), ops.exists(h, ops.dia(S)), "<=", S=S)
    return col.report()


def openness_report(h: Morphism, battery: ZBattery, config: LawConfig = LawConfig()) -> OpennessReport:
    plain = open_report(h, config, "h")
    stable = [open_report(_stabilize(h, Z), config, f"h x Z{i}") for i, Z in enumerate(battery)]
    bf = barcan_report(h, config, "h")
    stably = plain.holds and all(r.holds for r in stable)
    consistent = not (is_mono(h) and is_epi_e(h)) or (plain.holds == bf.holds)
    return OpennessReport(plain.holds, stably, bf.holds, consistent, [plain, *stable, bf])


def is_brittle_subspace(m: Morphism, battery: ZBattery, config: LawConfig = LawConfig(),
                        ops: Operators = DEFAULT_OPS) -> LawReport:
    """The stabilized subspace equation over the battery, for a mono ``m``."""
    if not is_mono(m):
        raise NotMono("brittle subspaces are monos")
    col = _Collector("brittle-subspace", "m")
    rng = _rng(config)
    for zi, Z in enumerate(battery):
        mz = _stabilize(m, Z)
        space = _Space(mz.dom, config, rng)
        col.sampled |= not space.exhaustive
        for S in space:
            col.compare(ops.dia(S), ops.pullback(mz, ops.dia(ops.exists(mz, S))), "=", S=S, Z=zi)
    return col.report()


@dataclass
class BrittleMorphismReport:
    functional: bool
    continuous: LawReport
    realization: Morphism | None


def is_functional(R: MSubobject) -> bool:
    """Each domain element is related to exactly one codomain element."""
    X, Y = _factors(R)
    prod = binary_product(X, Y)
    Robj, incl = core.as_object(R)
    first = compose(incl, prod.projections[0])
    return is_mono(first) and is_epi_e(first)


def continuity_of_relation(R: MSubobject, battery: ZBattery, config: LawConfig = LawConfig(),
                           subject: str = "R", ops: Operators = DEFAULT_OPS) -> LawReport:
    """``◇(R∘S) ≤ R∘◇S`` for ``Z`` in the battery and ``S ≤ Y×Z``."""
    X, Y = _factors(R)
    col = _Collector("relation-continuity", subject)
    rng = _rng(config)
    for zi, Z in enumerate(battery):
        comp = _Composer(X, Y, Z)
        space = _Space(comp.YZ.obj, config, rng)
        col.sampled |= not space.exhaustive
        for S in space:
            col.compare(ops.dia(comp(R, S)), comp(R, ops.dia(S)), "<=", S=S, Z=zi)
    return col.report()


def brittle_morphism(R: MSubobject, battery: ZBattery, config: LawConfig = LawConfig()) -> BrittleMorphismReport:
    X, Y = _factors(R)
    functional = is_functional(R)
    continuous = continuity_of_relation(R, battery, config)
    realization = None
    if functional and continuous.holds:
        chosen = {}
        for v, (x, y) in R.ambient.elements:
            if (v, (x, y)) in R:
                chosen.setdefault(v, {})[x] = y
        try:
            realization = core.make_morphism(X, Y, chosen)
        except ModalCatError:
            realization = None
    return BrittleMorphismReport(functional, continuous, realization)


@dataclass
class BrittleIsoReport:
    brittle: bool
    inverse: Morphism | None
    openness: OpennessReport


def brittle_iso(h: Morphism, battery: ZBattery, config: LawConfig = LawConfig()) -> BrittleIsoReport:
    op = openness_report(h, battery, config)
    brittle = is_mono(h) and is_epi_e(h) and op.stably_open
    inv = core.inverse(h) if classify(h).is_iso else None
    return BrittleIsoReport(brittle, inv, op)


def contz_report(R: MSubobject, battery: ZBattery, config: LawConfig = LawConfig(),
                 subject: str = "R", ops: Operators = DEFAULT_OPS) -> LawReport:
    """``◇∃_π(π*R ∧ U) ≤ ∃_π(π*R ∧ ◇U)`` for ``U ≤ Y×X×Z̃``.

    Here ``π*R`` pulls ``R`` back along the swap projection to ``X×Y`` and
    ``∃_π`` projects to ``X×Z̃``.
    """
    X, Y = _factors(R)
    col = _Collector("contZ", subject)
    rng = _rng(config)
    for zi, Z in enumerate(battery):
        YXZ = product_n((Y, X, Z))
        py, px, pz = YXZ.projections
        to_xy = binary_product(X, Y).tupling((px, py))
        to_xz = binary_product(X, Z).tupling((px, pz))
        Rp = ops.pullback(to_xy, R)
        space = _Space(YXZ.obj, config, rng)
        col.sampled |= not space.exhaustive
        for U in space:
            lhs = ops.dia(ops.exists(to_xz, core.meet(Rp, U)))
            rhs = ops.exists(to_xz, core.meet(Rp, ops.dia(U)))
            col.compare(lhs, rhs, "<=", U=U, Z=zi)
    return col.report()


def epi_report(f: Morphism, targets: Iterable[RelGSet], subject: str = "") -> LawReport:
    """Right cancellability of ``f`` against every parallel pair out of its
    codomain into one of ``targets`` (brute-force enumerated)."""
    col = _Collector("epi", subject)
    for W in targets:
        maps = list(core.all_morphisms(f.cod, W))
        for g1 in maps:
            for g2 in maps:
                col.checked += 1
                if g1 != g2 and compose(f, g1) == compose(f, g2):
                    col.fail({"g1": g1, "g2": g2, "element": None})
    return col.report()


def all_hold(reports: Iterable[LawReport]) -> bool:
    return all(r.holds for r in reports)
