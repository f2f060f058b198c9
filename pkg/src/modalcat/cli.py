"""Command-line entry point: ``modalcat SUBCOMMAND ...``.

Exit codes: 0 when every check passes, 1 when a law, proof or check fails
(the report carries a witness), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from typing import Any

from . import colim, core, harness, laws, proof, semantics, serialize
from .core import Morphism, MSubobject, RelGSet
from .grammar import ParseError, parse_formula, print_fic

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    bound: int = core.DEFAULT_BOUND
    sample_size: int = 512
    format: str = "text"

    def __post_init__(self):
        if self.bound <= 0 or self.sample_size <= 0:
            raise ValueError("bound and sample size must be positive")
        if self.format not in ("text", "json"):
            raise ValueError(f"unknown format {self.format!r}")

    def law_config(self) -> laws.LawConfig:
        return laws.LawConfig(self.bound, self.sample_size, self.seed)


def jsonable(x: Any) -> Any:
    """Plain JSON data for witnesses and reports."""
    match x:
        case MSubobject():
            return {v: sorted((jsonable(a) for a in p), key=repr) for v, p in x.parts.items()}
        case RelGSet() | Morphism():
            return repr(x)[:80]
        case dict():
            return {str(k): jsonable(v) for k, v in x.items()}
        case tuple() | list():
            return [jsonable(y) for y in x]
        case set() | frozenset():
            return sorted((jsonable(y) for y in x), key=repr)
        case semantics.FormulaInContext():
            return print_fic(x)
        case _ if x is None or isinstance(x, (bool, int, float, str)):
            return x
    return str(x)


def law_json(r: laws.LawReport) -> dict:
    return {
        "law": r.law,
        "status": r.status,
        "subject": r.subject,
        "witness": jsonable(r.witness),
        "counterexamples": jsonable(r.counterexamples),
        "checked": r.checked,
        "sampled": r.sampled,
        "note": r.note,
    }


class Output:
    def __init__(self, cfg: RunConfig, command: str):
        self.cfg, self.command = cfg, command
        self.lines: list[str] = []
        self.data: dict = {"command": command}

    def text(self, line: str):
        self.lines.append(line)

    def emit(self, ok: bool, witness: Any = None) -> int:
        """Print the report; a failing report carries ``witness``."""
        if not ok:
            self.data["witness"] = jsonable(witness)
        if self.cfg.format == "json":
            self.data["ok"] = ok
            print(json.dumps(self.data, indent=1))
        else:
            for line in self.lines:
                print(line)
            if not ok:
                print("witness: " + json.dumps(self.data["witness"]))
            print("OK" if ok else "FAILED")
        return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# subcommands


def default_diagram(X: RelGSet) -> laws.Diagram:
    """``X``, ``X×X``, the projections, the diagonal map and the equality relation."""
    P = core.binary_product(X, X)
    p1, p2 = P.projections
    delta = P.tupling((core.identity(X), core.identity(X)))
    return laws.Diagram({"X": X, "XxX": P.obj}, {"pi1": p1, "pi2": p2, "delta": delta},
                        {"eq": core.image(delta)})


def cmd_laws(args, cfg: RunConfig) -> int:
    X = serialize.load_model(args.model)
    D = default_diagram(X)
    config = cfg.law_config()
    suites = ["doctrine", "modal", "optional"] if args.suite == "all" else [args.suite]
    reports = []
    for s in suites:
        match s:
            case "doctrine":
                reports += laws.doctrine_report(D, config=config)
            case "modal":
                reports += laws.modal_law_report(D, config=config)
            case "optional":
                reports += laws.optional_law_report(D, config=config)
    out = Output(cfg, "laws")
    out.data["reports"] = [law_json(r) for r in reports]
    for r in reports:
        out.text(r.line())
    bad = next((r for r in reports if r.status == "fails"), None)
    return out.emit(bad is None, bad and {"law": bad.law, "subject": bad.subject, **(bad.witness or {})})


def cmd_eval(args, cfg: RunConfig) -> int:
    I = serialize.load_interpretation(args.interp)
    fic = parse_formula(args.formula, I.signature)
    S = semantics.interpret_formula(I, fic)
    P = I.context_product(fic.context)
    parts = {v: sorted((_point(P.unpack(e)) for e in p), key=repr) for v, p in S.parts.items()}
    out = Output(cfg, "eval")
    out.data.update(formula=print_fic(fic, I.signature), parts=parts)
    out.text(print_fic(fic, I.signature))
    for v, es in parts.items():
        out.text(f"  {v}: {{{', '.join(map(_show, es))}}}")
    return out.emit(True)


def _point(t: tuple):
    """A context tuple as JSON; one-variable contexts give the bare element."""
    return jsonable(t[0] if len(t) == 1 else t)


def _points(ts) -> list:
    return sorted((_point(t) for t in ts), key=repr)


def _show(x) -> str:
    if isinstance(x, list):
        return "(" + ", ".join(map(_show, x)) + ")"
    return str(x)


def cmd_check_model(args, cfg: RunConfig) -> int:
    I = serialize.load_interpretation(args.interp)
    T = serialize.load_theory(args.theory)
    if T.signature != I.signature:
        raise semantics.SignatureMismatch("theory and interpretation signatures differ")
    rep = semantics.is_model(I, T)
    out = Output(cfg, "check-model")
    out.data["failures"] = [{"axiom": n, "witness": jsonable(e)} for n, e in rep.failures]
    for name in T.axioms:
        bad = [e for n, e in rep.failures if n == name]
        out.text(f"{'FAILS' if bad else 'HOLDS'} axiom {name}" + (f" - witness {bad[0]}" if bad else ""))
    return out.emit(rep.ok, rep.failures and {"axiom": rep.failures[0][0], "element": rep.failures[0][1]})


def cmd_check_proof(args, cfg: RunConfig) -> int:
    T = serialize.load_theory(args.theory)
    D = serialize.load_proof(args.proof, T.signature, T.name)
    rep = proof.check_derivation(D, T)
    out = Output(cfg, "check-proof")
    out.data["verdicts"] = [asdict(v) for v in rep.verdicts]
    for v in rep.verdicts:
        out.text(f"line {v.number}: " + ("ok" if v.ok else f"REJECTED {v.error}: {v.reason}"))
    first = rep.first_failure
    return out.emit(rep.accepted, first and asdict(first))


def cmd_quotient(args, cfg: RunConfig) -> int:
    X = serialize.load_model(args.model)
    data = serialize.load_json(args.rel)
    serialize._check_version(data, "relation")
    parts = {v: [tuple(serialize._elem(x) for x in p) for p in ps] for v, ps in data.get("pairs", {}).items()}
    R = colim.relation_on(X, parts)
    out = Output(cfg, "quotient")
    if not colim.is_equivalence(R):
        out.data["error"] = "not an equivalence relation"
        out.text("relation is not an equivalence relation")
        return out.emit(False, _equivalence_witness(X, parts))
    res = colim.quotient(X, R)
    rep = colim.is_quotient_map(res.q)
    out.data.update(
        quotient=serialize.gset_to_json(res.Q),
        classes=[[v, jsonable(a), jsonable(r)] for (v, a), r in res.classes.items()],
        report=law_json(rep),
    )
    for v in X.graph.vertices:
        out.text(f"{v}: " + ", ".join(f"{a}->{res.classes[(v, a)]}" for a in X.carrier(v)))
    for e in X.graph.edges:
        out.text(f"{e.name}: {sorted(res.Q.relation(e.name), key=repr)}")
    out.text(rep.line())
    return out.emit(rep.holds, rep.witness)


def _equivalence_witness(X: RelGSet, parts: dict) -> dict:
    """First missing reflexive, symmetric or transitive pair."""
    for v in X.graph.vertices:
        pairs = set(parts.get(v, ()))
        for a in X.carrier(v):
            if (a, a) not in pairs:
                return {"vertex": v, "missing": (a, a), "because": "reflexivity"}
        for a, b in sorted(pairs, key=repr):
            if (b, a) not in pairs:
                return {"vertex": v, "missing": (b, a), "because": "symmetry", "from": [(a, b)]}
            for c, d in sorted(pairs, key=repr):
                if c == b and (a, d) not in pairs:
                    return {"vertex": v, "missing": (a, d), "because": "transitivity", "from": [(a, b), (c, d)]}
    return {}


def _braces(ts) -> str:
    return "{" + ", ".join(map(_show, _points(ts))) + "}"


def _family_lines(R: harness.CounterpartFamily) -> list[str]:
    return [f"{R.name} {s}: {sorted(R.rel(s), key=repr)}" for s in R.left.signature.sorts]


def cmd_counterpart(args, cfg: RunConfig) -> int:
    models, _, probes, quotients = serialize.load_harness([args.left, args.right], [], args.probes)
    M, N = models
    out = Output(cfg, "counterpart")
    if args.maximal:
        R = harness.maximal_counterpart(M, N, probes, quotients)
        ok, addable = harness.is_maximal(R, probes, quotients)
        out.data["maximal"] = ok
        out.data["addable"] = jsonable(addable)
        out.text(f"maximal under single-pair addition: {ok}")
    elif args.seed_pairs:
        data = serialize.load_json(args.seed_pairs)
        data.setdefault("left", M.name)
        data.setdefault("right", N.name)
        R = harness.close_counterpart(serialize.family_from_json(data, {M.name: M, N.name: N}))
    else:
        raise ValueError("counterpart needs --maximal or --seed-pairs")
    rep = harness.counterpart_check(R, probes, quotients)
    out.data["family"] = serialize.family_to_json(R)
    out.data["failures"] = jsonable(rep.failures)
    out.lines[:0] = _family_lines(R)
    for f in rep.failures:
        out.text("FAILS " + ", ".join(f"{k}={jsonable(v)}" for k, v in f.items()))
    ok = rep.ok and out.data.get("maximal", True)
    if rep.failures:
        witness = {k: print_fic(v) if k == "probe" else v for k, v in rep.failures[0].items()}
    else:
        witness = {"addable": out.data.get("addable")}
    return out.emit(ok, witness)


def cmd_repr(args, cfg: RunConfig) -> int:
    models, edges, probes, quotients = serialize.load_harness(args.models, args.edges, args.probes)
    rep = harness.representation_report(models, edges, probes, quotients)
    out = Output(cfg, "repr")
    out.data["comparisons"] = [
        {"probe": print_fic(c.probe), "model": c.model, "counterpart": _points(c.counterpart),
         "stored": _points(c.stored), "violations": _points(c.violations), "gaps": _points(c.gaps)}
        for c in rep.comparisons
    ]
    for c in rep.comparisons:
        status = "VIOLATION" if c.violations else "ok"
        line = f"{status} {c.model}: dia[{print_fic(c.probe)}] counterpart={_braces(c.counterpart)}"
        line += f" stored={_braces(c.stored)}"
        if c.violations:
            line += f" violations={_braces(c.violations)}"
        if c.gaps:
            line += f" gaps={_braces(c.gaps)}"
        out.text(line)
    bad = next((c for c in rep.comparisons if c.violations), None)
    witness = bad and {"probe": print_fic(bad.probe), "model": bad.model, "elements": _points(bad.violations)}
    return out.emit(rep.ok, witness)


# --------------------------------------------------------------------------
# dispatch


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--bound", type=int, default=core.DEFAULT_BOUND, help="exhaustive carrier bound")
    common.add_argument("--sample-size", type=int, default=512)
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="modalcat", description="Checks for finite relational G-sets.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("laws", parents=[common], help="law suites on a model")
    s.add_argument("--model", required=True)
    s.add_argument("--suite", choices=("doctrine", "modal", "optional", "all"), default="all")
    s.set_defaults(run=cmd_laws)

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula in an interpretation")
    s.add_argument("--interp", required=True)
    s.add_argument("--formula", required=True)
    s.set_defaults(run=cmd_eval)

    s = sub.add_parser("check-model", parents=[common], help="validate a theory's axioms")
    s.add_argument("--interp", required=True)
    s.add_argument("--theory", required=True)
    s.set_defaults(run=cmd_check_model)

    s = sub.add_parser("check-proof", parents=[common], help="check a derivation")
    s.add_argument("--theory", required=True)
    s.add_argument("--proof", required=True)
    s.set_defaults(run=cmd_check_proof)

    s = sub.add_parser("quotient", parents=[common], help="quotient a model by an equivalence relation")
    s.add_argument("--model", required=True)
    s.add_argument("--rel", required=True)
    s.set_defaults(run=cmd_quotient)

    s = sub.add_parser("counterpart", parents=[common], help="build and check a counterpart family")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--probes", required=True)
    s.add_argument("--maximal", action="store_true")
    s.add_argument("--seed-pairs")
    s.set_defaults(run=cmd_counterpart)

    s = sub.add_parser("repr", parents=[common], help="compare counterpart and stored diamonds")
    s.add_argument("--models", nargs="+", required=True)
    s.add_argument("--edges", nargs="*", default=[])
    s.add_argument("--probes", required=True)
    s.set_defaults(run=cmd_repr)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        cfg = RunConfig(args.seed, args.bound, args.sample_size, args.format)
        return args.run(args, cfg)
    except ParseError as e:
        print(f"error: parse error at {e}", file=sys.stderr)
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
