import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modalcat.grammar import ParseError, parse_box, parse_fic, parse_formula, parse_term, print_box, print_fic
from modalcat.random_instances import random_fic, random_formula, random_term
from modalcat.syntax import (
    BOTTOM,
    App,
    Atom,
    BoxApp,
    Bound,
    Eq,
    Forall,
    FormulaError,
    FormulaInContext,
    Implies,
    PartialSubstitution,
    Signature,
    SortMismatch,
    UnboundVariable,
    Var,
    alpha_eq,
    box,
    boxed_closure,
    context,
    dia,
    exists,
    forall,
    free_vars,
    neg,
    substitute,
    substitute_in_context,
    substitute_term,
    sugar,
    well_formed,
)

SIG = Signature(("U", "V"), {"P": ("U",), "R": ("U",), "Q": ("U", "V")},
                {"f": (("U",), "U"), "g": (("V",), "U"), "c": ((), "V")})
x, y, z, w = (Var(n, "U") for n in "xyzw")


def P(t):
    return Atom("P", (t,))


# --------------------------------------------------------------------------
# construction and checks


def test_signature_rejects_clashes_and_unknown_sorts():
    with pytest.raises(FormulaError):
        Signature(("U",), {"U": ("U",)})
    with pytest.raises(FormulaError):
        Signature(("U",), {"P": ("W",)})


def test_context_rejects_repeats():
    with pytest.raises(FormulaError):
        context(("x", "U"), ("x", "V"))


def test_well_formed_examples():
    assert well_formed(FormulaInContext((x,), P(x)), SIG) == []
    assert well_formed(FormulaInContext((), P(x)), SIG) == ["unbound variable 'x'"]
    b = box((x,), P(x))
    assert well_formed(FormulaInContext((y,), BoxApp(b, (y, y))), SIG) == ["box expects 1 arguments, got 2"]


def test_well_formed_sorts():
    zv = Var("z", "V")
    assert well_formed(FormulaInContext((zv,), P(zv)), SIG)
    assert well_formed(FormulaInContext((x, zv), Eq(x, zv)), SIG)


def test_box_needs_closed_body():
    with pytest.raises(UnboundVariable):
        box((x,), Atom("Q", (x, Var("z", "V"))))


# --------------------------------------------------------------------------
# alpha-equivalence


def test_alpha_examples():
    assert alpha_eq(forall(x, P(x)), forall(y, P(y)))
    assert alpha_eq(BoxApp(box((x,), P(x)), (z,)), BoxApp(box((w,), P(w)), (z,)))
    assert not alpha_eq(FormulaInContext((x,), P(x)), FormulaInContext((y,), P(y)))


def test_bound_hint_is_ignored():
    assert Bound(0, "U", "x") == Bound(0, "U", "y")


# --------------------------------------------------------------------------
# substitution


def test_substitution_leaves_box_bodies_alone():
    fic = parse_fic("ctx y:U |- box{x:U | P(x)}(y)", SIG)
    out = substitute_in_context(fic, {y: App("f", (z,))}, (z,), SIG)
    assert print_fic(out, SIG) == "ctx z:U |- box{x:U | P(x)}(f(z))"
    assert out.formula.box == fic.formula.box


def test_substitution_avoids_capture():
    fic = parse_fic("ctx y:U |- forall x:U. Q(x, c) -> P(y)", SIG)
    out = substitute_in_context(fic, {y: x}, (x,), SIG)
    assert print_fic(out, SIG) == "ctx x:U |- forall x':U. Q(x', c) -> P(x)"


def test_identity_substitution():
    fic = parse_fic("ctx x:U, y:U |- forall z:U. P(z) -> P(x) | P(y)", SIG)
    assert substitute_in_context(fic, {x: x, y: y}, fic.context, SIG) == fic


def test_substitution_errors():
    fic = parse_fic("ctx y:U |- P(y)", SIG)
    with pytest.raises(PartialSubstitution):
        substitute_in_context(fic, {}, (x,), SIG)
    with pytest.raises(SortMismatch):
        substitute_in_context(fic, {y: Var("z", "V")}, (Var("z", "V"),), SIG)
    with pytest.raises(UnboundVariable):
        substitute_in_context(fic, {y: z}, (x,), SIG)


@st.composite
def fics(draw, max_vars=2, depth=3):
    return random_fic(random.Random(draw(st.integers(0, 2**32))), SIG, max_vars, depth)


@given(fics(), st.integers(0, 2**32))
def test_substitution_composes(fic, seed):
    rng = random.Random(seed)
    mid = (Var("a", "U"), Var("b", "V"))
    target = (Var("p", "U"), Var("q", "V"))
    sigma = {v: _term(rng, mid, v.sort) for v in fic.context}
    tau = {v: _term(rng, target, v.sort) for v in mid}
    once = substitute(substitute(fic.formula, sigma), tau)
    composed = {v: substitute_term(t, tau) for v, t in sigma.items()}
    assert once == substitute(fic.formula, composed)


def _term(rng, ctx, sort):
    return random_term(rng, SIG, ctx, sort)


# --------------------------------------------------------------------------
# sugar


def test_sugar_examples():
    assert sugar("dia", (x,), P(x), (y,)) == neg(BoxApp(box((x,), neg(P(x))), (y,)))
    assert sugar("not", BOTTOM) == Implies(BOTTOM, BOTTOM)
    assert sugar("exists", x, P(x)) == neg(forall(x, neg(P(x))))
    assert sugar("and", P(x), P(y)) == neg(Implies(P(x), neg(P(y))))
    assert sugar("or", P(x), P(y)) == Implies(neg(P(x)), P(y))
    with pytest.raises(ValueError):
        sugar("xor", P(x), P(y))


# --------------------------------------------------------------------------
# boxed closure


def test_boxed_closure_examples():
    assert boxed_closure([P(x)]) == []
    b = box((x,), P(x))
    assert boxed_closure([BoxApp(b, (y,))]) == [b]
    nested = parse_fic("ctx y:U |- box{x:U | box{x:U | P(x)}(x)}(y)", SIG)
    inner, outer = boxed_closure([nested])
    assert inner == b and outer == nested.formula.box


def test_boxed_closure_dedupes_alpha_copies():
    a = parse_fic("ctx y:U |- box{x:U | P(x)}(y) -> box{w:U | P(w)}(f(y))", SIG)
    assert len(boxed_closure([a])) == 1


# --------------------------------------------------------------------------
# grammar


def test_parse_examples():
    assert isinstance(parse_fic("ctx x:U |- P(x) -> P(x)", SIG).formula, Implies)
    assert isinstance(parse_fic("ctx y:U |- box{x:U | P(x)}(y)", SIG).formula, BoxApp)
    fic = parse_fic("ctx |- forall x:U. P(x)", SIG)
    assert fic.context == () and isinstance(fic.formula, Forall)


@pytest.mark.parametrize("text, expected", [
    ("~P(x) & R(x)", lambda: neg(Implies(neg(P(x)), neg(Atom("R", (x,)))))),
    ("P(x) -> P(x) -> R(x)", lambda: Implies(P(x), Implies(P(x), Atom("R", (x,))))),
    ("P(x) | R(x) & P(x)", lambda: Implies(neg(P(x)), neg(Implies(Atom("R", (x,)), neg(P(x)))))),
    ("forall y:U. P(y) -> P(x)", lambda: forall(y, Implies(P(y), P(x)))),
    ("exists y:U. P(y)", lambda: exists(y, P(y))),
    ("dia{y:U | P(y)}(f(x))", lambda: dia((y,), P(y), (App("f", (x,)),))),
])
def test_precedence(text, expected):
    assert parse_formula(text, SIG, (x,)).formula == expected()


@pytest.mark.parametrize("text, line, column", [
    ("ctx x:U |- P(x", 1, 15),
    ("ctx x:U |- P(y)", 1, 14),
    ("ctx x:U |- x = c", 1, 14),
    ("ctx x:U |- P(x) ->", 1, 19),
    ("ctx x:U |- Z(x)", 1, 12),
    ("ctx x:U |- box{y:U | P(y)}(x, x)", 1, 28),
    ("ctx x:U, x:U |- P(x)", 1, 10),
    ("ctx x:U |- P(x) $", 1, 17),
])
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_fic(text, SIG)
    assert (info.value.line, info.value.column) == (line, column)


def test_parse_error_line_offset():
    with pytest.raises(ParseError) as info:
        parse_fic("ctx |- P(", SIG, line=7)
    assert info.value.line == 7


def test_box_body_cannot_see_outer_context():
    with pytest.raises(ParseError):
        parse_fic("ctx x:U |- box{y:U | P(x)}(x)", SIG)


def test_printer_primes_only_on_clash():
    fic = parse_fic("ctx x:U |- forall y:U. Q(y, c) -> P(x)", SIG)
    assert print_fic(fic, SIG) == "ctx x:U |- forall y:U. Q(y, c) -> P(x)"
    fic = FormulaInContext((x,), Forall("U", Implies(Atom("P", (Bound(0, "U", "x"),)), P(x)), "x"))
    assert print_fic(fic, SIG) == "ctx x:U |- forall x':U. P(x') -> P(x)"


def test_unapplied_box_round_trip():
    b = parse_box("box{x:U, z:V | Q(x, z) -> P(f(x))}", SIG)
    assert b.sorts == ("U", "V")
    assert parse_box(print_box(b, SIG), SIG) == b


def test_parse_term():
    assert parse_term("f(g(c))", SIG) == App("f", (App("g", (App("c"),)),))


@given(fics(depth=4))
def test_round_trip(fic):
    text = print_fic(fic, SIG)
    assert parse_fic(text, SIG) == fic
    assert print_fic(parse_fic(text, SIG), SIG) == text


@given(fics())
def test_generated_formulas_are_well_formed(fic):
    assert well_formed(fic, SIG) == []
    assert free_vars(fic.formula) <= set(fic.context)


def test_random_formula_over_empty_signature_part():
    sig = Signature(("U",), {}, {})
    phi = random_formula(random.Random(0), sig, (), 3)
    assert well_formed(FormulaInContext((), phi), sig) == []
