"""Check a short derivation and audit it against random models."""

import random

from modalcat import DATA
from modalcat.grammar import parse_fic
from modalcat.proof import check_derivation, soundness_audit
from modalcat.random_instances import model_battery
from modalcat.semantics import interpret_formula
from modalcat.serialize import load_interpretation, load_proof, load_theory

T = load_theory(DATA / "emp.thy")
I = load_interpretation(DATA / "i1.json")

phi = parse_fic("ctx x:U |- dia{x:U | P(x)}(x)", T.signature)
print("extension of", phi, "is", interpret_formula(I, phi.formula, phi.context).parts)

D = load_proof(DATA / "proofs" / "d02_kdist.prf", T.signature)
report = check_derivation(D, T)
for v in report.verdicts:
    print(f"line {v.number}: {'ok' if v.ok else v.reason}")

bad = load_proof(DATA / "proofs" / "m02_kdist.prf", T.signature)
print("mutant rejected at line", check_derivation(bad, T).first_failure.number)

models = model_battery(random.Random(0), T, 20)
print("audit over", len(models), "models:", soundness_audit(D, T, models).ok)
