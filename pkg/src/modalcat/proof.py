"""Checker for Hilbert-style derivations in the modal calculus.

Each line carries a justification with explicit witnesses, so checking is
pattern matching against the instantiated schema; no search is done.
Boxed formulas in schemata abstract the whole context of the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from .semantics import Interpretation, Theory, is_model, validates
from .syntax import (
    BoxApp,
    Bottom,
    Eq,
    Forall,
    Formula,
    FormulaInContext,
    Implies,
    Term,
    Var,
    box,
    forall,
    free_vars,
    instantiate,
    open_box,
    substitute,
    term_sort,
    term_vars,
    well_formed,
)

MAX_ATOMS = 16


class LineError(ValueError):
    kind = "LineError"

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class SchemaMismatch(LineError):
    kind = "SchemaMismatch"


class BadPremiseIndex(LineError):
    kind = "BadPremiseIndex"


class SideConditionViolated(LineError):
    kind = "SideConditionViolated"


class UnknownAxiom(LineError):
    kind = "UnknownAxiom"


class IllFormed(LineError):
    kind = "IllFormed"


class TooManyAtoms(LineError):
    kind = "TooManyAtoms"


class NotAModel(ValueError):
    def __init__(self, interpretation: int, axiom: str):
        super().__init__(f"interpretation {interpretation} violates axiom {axiom!r}")
        self.interpretation, self.axiom = interpretation, axiom


# --------------------------------------------------------------------------
# justifications


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class BoxDis:
    pass


@dataclass(frozen=True)
class ForallEx:
    term: Term
    var: Var


@dataclass(frozen=True)
class Refl:
    pass


@dataclass(frozen=True)
class Repl:
    body: FormulaInContext  # φ over a context containing var
    var: Var
    left: Term
    right: Term


@dataclass(frozen=True)
class Cont:
    body: FormulaInContext  # φ:ȳ, the abstraction context is ȳ
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class TheoryAxiom:
    name: str


@dataclass(frozen=True)
class MP:
    minor: int  # line with ψ
    major: int  # line with ψ -> φ


@dataclass(frozen=True)
class Nec:
    premise: int


@dataclass(frozen=True)
class ForallIn:
    premise: int
    var: str


@dataclass(frozen=True)
class Inst:
    premise: int
    subst: tuple[tuple[str, Term], ...]  # (premise variable name, term over the line's context)


Justification = Union[Taut, BoxDis, ForallEx, Refl, Repl, Cont, TheoryAxiom, MP, Nec, ForallIn, Inst]


@dataclass(frozen=True)
class ProofLine:
    number: int
    fic: FormulaInContext
    why: Justification


@dataclass(frozen=True)
class Derivation:
    theory: str
    lines: tuple[ProofLine, ...]


@dataclass
class LineVerdict:
    number: int
    ok: bool
    error: str = ""
    reason: str = ""


@dataclass
class DerivationReport:
    accepted: bool
    verdicts: list[LineVerdict]

    @property
    def first_failure(self) -> LineVerdict | None:
        return next((v for v in self.verdicts if not v.ok), None)


# --------------------------------------------------------------------------
# tautologies


def skeleton(phi: Formula, atoms: list[Formula]):
    """Propositional skeleton: ``True``/``False`` constants, ``("atom", i)``
    leaves and ``("->", a, b)`` nodes."""
    match phi:
        case Bottom():
            return False
        case Implies(l, r):
            return ("->", skeleton(l, atoms), skeleton(r, atoms))
    if phi not in atoms:
        atoms.append(phi)
    return ("atom", atoms.index(phi))


def _assign(node, atom: int, value: bool):
    """Substitute and simplify."""
    if isinstance(node, bool):
        return node
    if node[0] == "atom":
        return value if node[1] == atom else node
    _, a, b = node
    a, b = _assign(a, atom, value), _assign(b, atom, value)
    if a is False or b is True:
        return True
    if a is True:
        return b
    if a == b:
        return True
    return ("->", a, b)


def _first_atom(node):
    if isinstance(node, bool):
        return None
    if node[0] == "atom":
        return node[1]
    first = _first_atom(node[1])
    return first if first is not None else _first_atom(node[2])


def _valid(node) -> bool:
    if isinstance(node, bool):
        return node
    a = _first_atom(node)
    return _valid(_assign(node, a, True)) and _valid(_assign(node, a, False))


def taut_instance(phi: Formula) -> bool:
    """Whether ``phi`` instantiates a propositional tautology; the maximal
    subformulas other than ⊥ and → are the propositional atoms."""
    atoms: list[Formula] = []
    node = skeleton(phi, atoms)
    if len(atoms) > MAX_ATOMS:
        raise TooManyAtoms(f"{len(atoms)} distinct atoms (limit {MAX_ATOMS})")
    return _valid(node)


# --------------------------------------------------------------------------
# schema checks


def boxed(ctx, phi: Formula) -> BoxApp:
    """``□φ:x̄`` read as ``(□{x̄|φ})(x̄)``."""
    return BoxApp(box(ctx, phi), tuple(ctx))


def _expect(cond: bool, reason: str):
    if not cond:
        raise SchemaMismatch(reason)


def _premise(lines: Mapping[int, ProofLine], current: int, i: int) -> FormulaInContext:
    if i >= current:
        raise BadPremiseIndex(f"premise {i} is not an earlier line")
    if i not in lines:
        raise BadPremiseIndex(f"premise {i} is missing or was rejected")
    return lines[i].fic


def _check_box_dis(fic: FormulaInContext):
    ctx, phi = fic.context, fic.formula
    match phi:
        case Implies(BoxApp(b1, a1), Implies(BoxApp(b2, a2), BoxApp(b3, a3))):
            _expect(a1 == a2 == a3 == tuple(ctx), "boxes must be applied to the whole context")
            _expect(b1.sorts == b2.sorts == b3.sorts == tuple(v.sort for v in ctx), "box context differs from line context")
            inner = open_box(b1, ctx)
            match inner:
                case Implies(p, q):
                    _expect(open_box(b2, ctx) == p, "middle box is not the antecedent")
                    _expect(open_box(b3, ctx) == q, "last box is not the consequent")
                    return
            raise SchemaMismatch("first box does not contain an implication")
    raise SchemaMismatch("not of the form box(p -> q) -> (box p -> box q)")


def _check_line(line: ProofLine, lines: Mapping[int, ProofLine], T: Theory) -> None:
    fic, why = line.fic, line.why
    ctx, phi = fic.context, fic.formula
    sig = T.signature
    diags = well_formed(fic, sig)
    if diags:
        raise IllFormed("; ".join(diags))
    match why:
        case Taut():
            if not taut_instance(phi):
                raise SchemaMismatch("not a tautology instance")
        case BoxDis():
            _check_box_dis(fic)
        case ForallEx(t, y):
            match phi:
                case Implies(Forall(s, body), rhs):
                    _expect(s == y.sort, "quantified variable has another sort")
                    _expect(not set(term_vars(t)) - set(ctx), "witness term leaves the context")
                    _expect(term_sort(t, sig) == s, "witness term has the wrong sort")
                    _expect(instantiate(body, (t,)) == rhs, "consequent is not the instance at the witness")
                    return
            raise SchemaMismatch("not of the form forall y.φ -> φ[t/y]")
        case Refl():
            match phi:
                case Eq(l, r) if l == r:
                    return
            raise SchemaMismatch("not of the form t = t")
        case Repl(body, y, t1, t2):
            _expect(y in body.context, "replaced variable not in the body's context")
            _expect(term_sort(t1, sig) == y.sort == term_sort(t2, sig), "sort mismatch in replacement")
            others = set(body.context) - {y}
            _expect(others <= set(ctx), "body context is not covered by the line context")
            want = Implies(Eq(t1, t2), Implies(substitute(body.formula, {y: t1}), substitute(body.formula, {y: t2})))
            _expect(phi == want, "not of the form t1 = t2 -> (φ[t1/y] -> φ[t2/y])")
        case Cont(body, ts):
            ys = body.context
            _expect(len(ts) == len(ys), "wrong number of terms")
            for t, y in zip(ts, ys):
                _expect(term_sort(t, sig) == y.sort, f"term for {y.name} has the wrong sort")
            want = Implies(
                BoxApp(box(ys, body.formula), tuple(ts)),
                boxed(ctx, substitute(body.formula, dict(zip(ys, ts)))),
            )
            _expect(phi == want, "not of the form (box φ)[t] -> box(φ[t])")
        case TheoryAxiom(name):
            if name not in T.axioms:
                raise UnknownAxiom(f"no axiom {name!r} in theory {T.name!r}")
            _expect(T.axioms[name] == fic, f"line differs from axiom {name!r}")
        case MP(i, j):
            minor = _premise(lines, line.number, i)
            major = _premise(lines, line.number, j)
            _expect(minor.context == ctx and major.context == ctx, "contexts differ")
            _expect(major.formula == Implies(minor.formula, phi), "major premise is not minor -> conclusion")
        case Nec(i):
            prem = _premise(lines, line.number, i)
            _expect(prem.context == ctx, "context differs from the premise")
            _expect(phi == boxed(ctx, prem.formula), "not the box of the premise")
        case ForallIn(i, name):
            prem = _premise(lines, line.number, i)
            match [v for v in prem.context if v.name == name]:
                case [y]:
                    pass
                case _:
                    raise SchemaMismatch(f"{name} is not in the premise context")
            _expect(ctx == tuple(v for v in prem.context if v != y), "context is not the premise context minus y")
            match prem.formula:
                case Implies(ante, cons):
                    if y in free_vars(ante):
                        raise SideConditionViolated(f"{name} is free in the antecedent")
                    _expect(phi == Implies(ante, forall(y, cons)), "not of the form φ -> forall y.ψ")
                    return
            raise SchemaMismatch("premise is not an implication")
        case Inst(i, pairs):
            prem = _premise(lines, line.number, i)
            sigma = dict(pairs)
            names = [v.name for v in prem.context]
            _expect(sorted(sigma) == sorted(names), "substitution must cover exactly the premise context")
            mapping = {}
            for v in prem.context:
                t = sigma[v.name]
                _expect(not set(term_vars(t)) - set(ctx), f"term for {v.name} leaves the line context")
                _expect(term_sort(t, sig) == v.sort, f"term for {v.name} has the wrong sort")
                mapping[v] = t
            _expect(phi == substitute(prem.formula, mapping), "not the premise under the substitution")
        case _:
            raise SchemaMismatch(f"unknown justification {why!r}")


def check_line(line: ProofLine, prior: Mapping[int, ProofLine] | list, T: Theory) -> LineVerdict:
    if not isinstance(prior, Mapping):
        prior = {p.number: p for p in prior}
    try:
        _check_line(line, prior, T)
    except LineError as e:
        return LineVerdict(line.number, False, e.kind, e.reason)
    except ValueError as e:  # syntax-level errors from building witnesses
        return LineVerdict(line.number, False, "SchemaMismatch", str(e))
    return LineVerdict(line.number, True)


def check_derivation(D: Derivation, T: Theory) -> DerivationReport:
    """Verdict per line; only lines that check are available as premises."""
    accepted: dict[int, ProofLine] = {}
    verdicts = []
    seen = set()
    for line in D.lines:
        if line.number in seen:
            verdicts.append(LineVerdict(line.number, False, "BadPremiseIndex", "duplicate line number"))
            continue
        seen.add(line.number)
        v = check_line(line, accepted, T)
        verdicts.append(v)
        if v.ok:
            accepted[line.number] = line
    return DerivationReport(all(v.ok for v in verdicts), verdicts)


@dataclass
class AuditReport:
    ok: bool
    violations: list[tuple[int, int]] = field(default_factory=list)  # (line, interpretation)


def soundness_audit(D: Derivation, T: Theory, interpretations: list[Interpretation]) -> AuditReport:
    """Every accepted line must hold in every supplied model of ``T``."""
    for k, I in enumerate(interpretations):
        rep = is_model(I, T)
        if not rep.ok:
            raise NotAModel(k, rep.failures[0][0])
    report = check_derivation(D, T)
    good = {v.number for v in report.verdicts if v.ok}
    violations = []
    for line in D.lines:
        if line.number not in good:
            continue
        for k, I in enumerate(interpretations):
            if not validates(I, line.fic):
                violations.append((line.number, k))
    return AuditReport(not violations, violations)

