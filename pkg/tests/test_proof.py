import random
import re
from itertools import product as cartesian

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modalcat import DATA, core
from modalcat.fixtures import G1, X1
from modalcat.grammar import ParseError, parse_fic
from modalcat.proof import (
    MP,
    BoxDis,
    Cont,
    Derivation,
    ForallEx,
    ForallIn,
    Inst,
    Nec,
    NotAModel,
    ProofLine,
    Refl,
    Repl,
    Taut,
    TheoryAxiom,
    TooManyAtoms,
    check_derivation,
    check_line,
    skeleton,
    soundness_audit,
    taut_instance,
)
from modalcat.random_instances import random_formula
from modalcat.semantics import Interpretation, Theory
from modalcat.serialize import load_proof, load_theory, parse_proof
from modalcat.syntax import BOTTOM, App, Atom, Implies, Var

EMP = load_theory(DATA / "emp.thy")
SIG = EMP.signature
x, y, z = (Var(n, "U") for n in "xyz")


def fic(text):
    return parse_fic(text, SIG)


def line(n, text, why):
    return ProofLine(n, fic(text), why)


def I1(pred=(1,)):
    return Interpretation(SIG, G1, {"U": X1},
                          {"P": core.subobject(X1, {"a": list(pred)}), "R": core.top(X1)},
                          {"f": core.identity(X1)})


# --------------------------------------------------------------------------
# tautologies


def test_taut_examples():
    assert taut_instance(fic("ctx x:U |- P(x) -> P(x)").formula)
    assert taut_instance(fic("ctx y:U |- false -> box{x:U | P(x)}(y)").formula)
    assert not taut_instance(fic("ctx x:U |- box{x:U | P(x)}(x) -> P(x)").formula)


def test_taut_atoms_are_alpha_classes():
    phi = fic("ctx |- (forall x:U. P(x)) -> forall y:U. P(y)").formula
    atoms = []
    skeleton(phi, atoms)
    assert len(atoms) == 1 and taut_instance(phi)


def test_too_many_atoms():
    t, phi = x, BOTTOM
    for _ in range(17):
        phi = Implies(Atom("P", (t,)), phi)
        t = App("f", (t,))
    with pytest.raises(TooManyAtoms):
        taut_instance(phi)


def truth_table(phi) -> bool:
    atoms = []
    node = skeleton(phi, atoms)

    def ev(n, val):
        if isinstance(n, bool):
            return n
        if n[0] == "atom":
            return val[n[1]]
        return (not ev(n[1], val)) or ev(n[2], val)

    return all(ev(node, val) for val in cartesian((False, True), repeat=len(atoms)))


@st.composite
def propositional(draw, depth=4):
    leaves = [Atom("P", (x,)), Atom("R", (x,)), Atom("P", (App("f", (x,)),)), BOTTOM]
    if depth == 0:
        return draw(st.sampled_from(leaves))
    if draw(st.booleans()):
        return draw(st.sampled_from(leaves))
    return Implies(draw(propositional(depth - 1)), draw(propositional(depth - 1)))


@given(propositional())
def test_taut_matches_truth_table(phi):
    assert taut_instance(phi) == truth_table(phi)


@given(st.integers(0, 2**32))
def test_taut_matches_truth_table_on_modal_formulas(seed):
    phi = random_formula(random.Random(seed), SIG, (x, y), 3)
    assert taut_instance(phi) == truth_table(phi)
    assert taut_instance(Implies(phi, phi))


# --------------------------------------------------------------------------
# single lines


def test_line_examples():
    prior = [line(1, "ctx x:U |- P(x) -> P(x)", Taut())]
    assert check_line(prior[0], [], EMP).ok
    assert check_line(line(2, "ctx x:U |- box{x:U | P(x) -> P(x)}(x)", Nec(1)), prior, EMP).ok
    assert check_line(line(1, "ctx x:U |- (forall y:U. P(y)) -> P(f(x))", ForallEx(App("f", (x,)), y)), [], EMP).ok
    cont = Cont(fic("ctx x:U |- P(x)"), (App("f", (z,)),))
    assert check_line(line(1, "ctx z:U |- box{x:U | P(x)}(f(z)) -> box{z:U | P(f(z))}(z)", cont), [], EMP).ok


def test_box_dis():
    ok = "ctx x:U |- box{x:U | P(x) -> R(x)}(x) -> box{x:U | P(x)}(x) -> box{x:U | R(x)}(x)"
    assert check_line(line(1, ok, BoxDis()), [], EMP).ok
    # the variant with the antecedent repeated in the last box
    typo = "ctx x:U |- box{x:U | P(x) -> R(x)}(x) -> box{x:U | P(x)}(x) -> box{x:U | P(x)}(x)"
    v = check_line(line(1, typo, BoxDis()), [], EMP)
    assert not v.ok and v.error == "SchemaMismatch"


def test_refl_and_repl():
    assert check_line(line(1, "ctx x:U |- f(x) = f(x)", Refl()), [], EMP).ok
    assert not check_line(line(1, "ctx x:U, y:U |- x = y", Refl()), [], EMP).ok
    body = fic("ctx y:U |- P(f(y))")
    r = Repl(body, y, x, z)
    assert check_line(line(1, "ctx x:U, z:U |- x = z -> P(f(x)) -> P(f(z))", r), [], EMP).ok
    assert not check_line(line(1, "ctx x:U, z:U |- x = z -> P(f(z)) -> P(f(x))", r), [], EMP).ok


def test_repl_leaves_box_bodies():
    body = fic("ctx y:U |- box{w:U | P(w)}(y)")
    r = Repl(body, y, x, z)
    text = "ctx x:U, z:U |- x = z -> box{w:U | P(w)}(x) -> box{w:U | P(w)}(z)"
    assert check_line(line(1, text, r), [], EMP).ok


def test_forall_in_side_condition():
    prior = [line(1, "ctx x:U, y:U |- P(x) -> R(y)", Taut())]
    assert check_line(line(2, "ctx x:U |- P(x) -> forall y:U. R(y)", ForallIn(1, "y")), prior, EMP).ok
    v = check_line(line(2, "ctx x:U |- P(x) -> forall y:U. R(y)", ForallIn(1, "z")), prior, EMP)
    assert (v.ok, v.error) == (False, "SchemaMismatch")
    # a well-formed line whose premise has y free in the antecedent
    prior = [line(1, "ctx y:U |- P(y) -> P(y)", Taut())]
    v = check_line(ProofLine(2, fic("ctx |- (exists y:U. P(y)) -> forall y:U. P(y)"), ForallIn(1, "y")), prior, EMP)
    assert not v.ok and v.error == "SideConditionViolated"


def test_inst():
    prior = [line(1, "ctx x:U |- P(x) -> P(x)", Taut())]
    assert check_line(line(2, "ctx z:U |- P(f(z)) -> P(f(z))", Inst(1, (("x", App("f", (z,))),))), prior, EMP).ok
    v = check_line(line(2, "ctx z:U |- P(f(z)) -> P(f(z))", Inst(1, ())), prior, EMP)
    assert not v.ok and v.error == "SchemaMismatch"


def test_mp():
    prior = [line(1, "ctx x:U |- P(x)", Taut()), line(2, "ctx x:U |- P(x) -> R(x)", Taut())]
    prior = {p.number: p for p in prior}
    assert check_line(line(3, "ctx x:U |- R(x)", MP(1, 2)), prior, EMP).ok
    v = check_line(line(3, "ctx x:U |- R(x)", MP(2, 1)), prior, EMP)
    assert not v.ok


def test_bad_premise_indices():
    prior = {1: line(1, "ctx x:U |- P(x) -> P(x)", Taut())}
    v = check_line(line(2, "ctx x:U |- box{x:U | P(x) -> P(x)}(x)", Nec(2)), prior, EMP)
    assert (v.ok, v.error) == (False, "BadPremiseIndex")
    v = check_line(line(3, "ctx x:U |- box{x:U | P(x) -> P(x)}(x)", Nec(2)), prior, EMP)
    assert (v.ok, v.error) == (False, "BadPremiseIndex")


def test_theory_axioms():
    ax = load_theory(DATA / "ax.thy")
    assert check_line(line(1, "ctx x:U |- P(x) -> P(f(x))", TheoryAxiom("mono")), [], ax).ok
    v = check_line(line(1, "ctx x:U |- P(x) -> P(f(x))", TheoryAxiom("mono")), [], EMP)
    assert (v.ok, v.error) == (False, "UnknownAxiom")


# --------------------------------------------------------------------------
# derivations


def test_two_line_derivation():
    D = Derivation("emp", (line(1, "ctx x:U |- P(x) -> P(x)", Taut()),
                           line(2, "ctx x:U |- box{x:U | P(x) -> P(x)}(x)", Nec(1))))
    assert check_derivation(D, EMP).accepted


def test_missing_context_variable_is_rejected():
    D = Derivation("emp", (line(1, "ctx x:U, y:U |- P(x) -> P(x)", Taut()),
                           line(2, "ctx x:U |- box{x:U | P(x) -> P(x)}(x)", Nec(1))))
    r = check_derivation(D, EMP)
    assert not r.accepted
    assert (r.first_failure.number, r.first_failure.error) == (2, "SchemaMismatch")


def test_rejected_lines_are_not_premises():
    D = Derivation("emp", (line(1, "ctx x:U |- P(x)", Taut()),
                           line(2, "ctx x:U |- box{x:U | P(x)}(x)", Nec(1))))
    r = check_derivation(D, EMP)
    assert [v.ok for v in r.verdicts] == [False, False]
    assert r.verdicts[1].error == "BadPremiseIndex"


def test_duplicate_line_numbers():
    a = line(1, "ctx x:U |- P(x) -> P(x)", Taut())
    r = check_derivation(Derivation("emp", (a, a)), EMP)
    assert [v.ok for v in r.verdicts] == [True, False]


# --------------------------------------------------------------------------
# soundness audit


def test_audit_examples():
    D = Derivation("emp", (line(1, "ctx x:U |- P(x) -> P(x)", Taut()),
                           line(2, "ctx x:U |- box{x:U | P(x) -> P(x)}(x)", Nec(1))))
    assert soundness_audit(D, EMP, [I1()]).ok
    assert soundness_audit(Derivation("emp", ()), EMP, [I1()]).ok
    T = Theory("t", SIG, {"T": fic("ctx x:U |- box{x:U | P(x)}(x) -> P(x)")})
    with pytest.raises(NotAModel):
        soundness_audit(D, T, [I1()])


def test_audit_skips_rejected_lines():
    # an unsound but rejected line does not count as a violation
    D = Derivation("emp", (line(1, "ctx x:U |- box{x:U | P(x)}(x) -> P(x)", Taut()),))
    assert soundness_audit(D, EMP, [I1()]).ok


# --------------------------------------------------------------------------
# the bundled corpus


def corpus(prefix):
    return sorted((DATA / "proofs").glob(f"{prefix}*.prf"))


def load_with_theory(path):
    text = path.read_text()
    name = re.search(r"^theory (\w+)", text, re.M).group(1)
    T = load_theory(DATA / f"{name}.thy")
    return load_proof(path, T.signature), T, text


def test_corpus_sizes():
    assert len(corpus("d")) == 12 and len(corpus("m")) == 12


@pytest.mark.parametrize("path", corpus("d"), ids=lambda p: p.stem)
def test_corpus_accepted(path):
    D, T, _ = load_with_theory(path)
    r = check_derivation(D, T)
    assert r.accepted, r.first_failure


@pytest.mark.parametrize("path", corpus("m"), ids=lambda p: p.stem)
def test_mutants_rejected_at_expected_line(path):
    D, T, text = load_with_theory(path)
    expected = int(re.search(r"expect-reject:\s*(\d+)", text).group(1))
    r = check_derivation(D, T)
    assert not r.accepted and r.first_failure.number == expected


def test_mutants_differ_from_originals_in_one_line():
    for d, m in zip(corpus("d"), corpus("m")):
        a = [s for s in d.read_text().splitlines() if s and not s.startswith("#")]
        b = [s for s in m.read_text().splitlines() if s and not s.startswith("#")]
        assert len(a) == len(b)
        assert sum(p != q for p, q in zip(a, b)) == 1, m.stem


# --------------------------------------------------------------------------
# proof file syntax


def test_parse_proof_errors_carry_line():
    with pytest.raises(ParseError) as info:
        parse_proof("theory emp\n1. ctx x:U |- P(x) ; Taut\n2. ctx x:U |- P(x) ; Bogus\n", SIG)
    assert info.value.line == 3
    with pytest.raises(ParseError) as info:
        parse_proof("1. ctx x:U |- P(x)\n", SIG)
    assert info.value.line == 1
    with pytest.raises(ParseError) as info:
        parse_proof("\n\n1. ctx x:U |- P(x ; Taut\n", SIG)
    assert info.value.line == 3


def test_parse_proof_justifications():
    D = parse_proof("theory emp\n1. ctx z:U |- P(z) -> P(z) ; Taut\n"
                    "2. ctx x:U |- P(f(x)) -> P(f(x)) ; Inst(1, z := f(x))\n", SIG)
    assert D.theory == "emp"
    assert D.lines[1].why == Inst(1, (("z", App("f", (x,))),))
