"""File formats: JSON models and interpretations, line-oriented theory and
proof files.

Model JSON::

    {"version": 1,
     "graph": {"vertices": [...], "edges": [{"name", "src", "dst"}, ...]},
     "carriers": {vertex: [element, ...]},
     "relations": {edge: [[a, b], ...]}}

Elements are JSON scalars or lists; lists are read as tuples.

Theory file lines: ``sort U``, ``pred P(U, U)``, ``func f(U): U``,
``axiom NAME: ctx ... |- formula``; ``#`` starts a comment.

Proof file lines: ``N. ctx ... |- formula ; RULE(args)``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from . import core
from .core import Graph, Morphism, MSubobject, RelGSet, make_gset
from .grammar import ParseError, parse_box, parse_ctxlist, parse_fic, parse_term, print_box
from .proof import (
    MP,
    BoxDis,
    Cont,
    Derivation,
    ForallEx,
    ForallIn,
    Inst,
    Nec,
    ProofLine,
    Refl,
    Repl,
    Taut,
    TheoryAxiom,
)
from .semantics import Interpretation, Theory
from .syntax import FormulaInContext, Signature

VERSION = 1


class FormatError(ValueError):
    pass


def _elem(x: Any):
    if isinstance(x, list):
        return tuple(_elem(y) for y in x)
    return x


def _plain(x: Any):
    if isinstance(x, tuple):
        return [_plain(y) for y in x]
    return x


def _check_version(data: dict, what: str):
    if not isinstance(data, dict):
        raise FormatError(f"{what}: expected a JSON object")
    if data.get("version") != VERSION:
        raise FormatError(f"{what}: unsupported or missing version (want {VERSION})")


# --------------------------------------------------------------------------
# models


def graph_from_json(data: dict) -> Graph:
    try:
        edges = tuple((e["name"], e["src"], e["dst"]) for e in data.get("edges", []))
        return Graph(tuple(data["vertices"]), edges)
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed graph: {e}") from None


def graph_to_json(G: Graph) -> dict:
    return {"vertices": list(G.vertices), "edges": [{"name": e.name, "src": e.src, "dst": e.dst} for e in G.edges]}


def gset_from_json(data: dict, graph: Graph | None = None) -> RelGSet:
    if graph is None:
        _check_version(data, "model")
        graph = graph_from_json(data.get("graph", {}))
    carriers = {v: [_elem(a) for a in xs] for v, xs in data.get("carriers", {}).items()}
    relations = {k: [tuple(_elem(p)) for p in ps] for k, ps in data.get("relations", {}).items()}
    return make_gset(graph, carriers, relations)


def gset_to_json(X: RelGSet, with_graph: bool = True) -> dict:
    out: dict = {"version": VERSION} if with_graph else {}
    if with_graph:
        out["graph"] = graph_to_json(X.graph)
    out["carriers"] = {v: [_plain(a) for a in X.carrier(v)] for v in X.graph.vertices}
    out["relations"] = {e.name: [[_plain(a), _plain(b)] for a, b in sorted(X.relation(e.name), key=repr)]
                        for e in X.graph.edges}
    return out


def morphism_to_json(f: Morphism) -> dict:
    return {v: [[_plain(a), _plain(b)] for a, b in comp.items()] for v, comp in f.components.items()}


def subobject_to_json(S: MSubobject) -> dict:
    return {v: sorted((_plain(a) for a in S.parts[v]), key=repr) for v in S.ambient.graph.vertices}


def load_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None


def load_model(path: str | Path) -> RelGSet:
    return gset_from_json(load_json(path))


def save_model(X: RelGSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(gset_to_json(X), indent=1) + "\n")


# --------------------------------------------------------------------------
# interpretations


def signature_from_json(data: dict) -> Signature:
    try:
        funcs = {f: (tuple(d.get("args", [])), d["cod"]) for f, d in data.get("funcs", {}).items()}
        return Signature(tuple(data["sorts"]), {p: tuple(a) for p, a in data.get("preds", {}).items()}, funcs)
    except (KeyError, TypeError, AttributeError) as e:
        raise FormatError(f"malformed signature: {e}") from None


def signature_to_json(sig: Signature) -> dict:
    return {
        "sorts": list(sig.sorts),
        "preds": {p: list(a) for p, a in sig.preds.items()},
        "funcs": {f: {"args": list(a), "cod": c} for f, (a, c) in sig.funcs.items()},
    }


def interpretation_from_json(data: dict, base: Path | None = None) -> Interpretation:
    """Sorts map to ``"model"`` (the file's ``model`` entry, inline or a
    path relative to ``base``) or to inline carrier/relation objects."""
    _check_version(data, "interpretation")
    sig = signature_from_json(data.get("signature", {}))
    shared = data.get("model")
    if isinstance(shared, str):
        shared = load_json((base or Path(".")) / shared)
    graph = None
    if shared is not None:
        _check_version(shared, "model")
        graph = graph_from_json(shared.get("graph", {}))
    elif "graph" in data:
        graph = graph_from_json(data["graph"])
    if graph is None:
        raise FormatError("interpretation needs a model or a graph")
    sorts = {}
    for s in sig.sorts:
        spec = data.get("sorts", {}).get(s)
        if spec == "model" and shared is not None:
            sorts[s] = gset_from_json(shared, graph)
        elif isinstance(spec, dict):
            sorts[s] = gset_from_json(spec, graph)
        else:
            raise FormatError(f"sort {s!r}: expected \"model\" or an object")
    products = {}

    def product(dom):
        dom = tuple(dom)
        if dom not in products:
            products[dom] = core.product_n([sorts[x] for x in dom], graph)
        return products[dom]

    preds = {}
    for p, dom in sig.preds.items():
        ext = data.get("preds", {}).get(p, {})
        preds[p] = core.subobject(product(dom).obj, {v: [_elem(a) for a in xs] for v, xs in ext.items()})
    funcs = {}
    for f, (dom, cod) in sig.funcs.items():
        table = data.get("funcs", {}).get(f)
        if table is None:
            raise FormatError(f"function {f!r} has no table")
        P = product(dom)
        comps = {}
        for v, rows in table.items():
            comp = {}
            for row in rows:
                if len(row) != len(dom) + 1:
                    raise FormatError(f"function {f!r}: row {row} has the wrong length")
                comp[P.pack(_elem(a) for a in row[:-1])] = _elem(row[-1])
            comps[v] = comp
        for v in graph.vertices:
            comps.setdefault(v, {})
        funcs[f] = core.make_morphism(P.obj, sorts[cod], comps)
    return Interpretation(sig, graph, sorts, preds, funcs)


def load_interpretation(path: str | Path) -> Interpretation:
    path = Path(path)
    return interpretation_from_json(load_json(path), path.parent)


def interpretation_to_json(I: Interpretation) -> dict:
    sig = I.signature
    funcs = {}
    for f, (dom, _) in sig.funcs.items():
        P = I.product(dom)
        m = I.funcs[f]
        funcs[f] = {
            v: [[*(_plain(x) for x in P.unpack(a)), _plain(b)] for a, b in comp.items()]
            for v, comp in m.components.items()
        }
    return {
        "version": VERSION,
        "signature": signature_to_json(sig),
        "graph": graph_to_json(I.graph),
        "sorts": {s: gset_to_json(X, with_graph=False) for s, X in I.sorts.items()},
        "preds": {p: subobject_to_json(S) for p, S in I.preds.items()},
        "funcs": funcs,
    }


# --------------------------------------------------------------------------
# theories

_SORT = re.compile(r"sort\s+([A-Za-z_][\w']*)$")
_PRED = re.compile(r"pred\s+([A-Za-z_][\w']*)\s*\(([^)]*)\)$")
_FUNC = re.compile(r"func\s+([A-Za-z_][\w']*)\s*\(([^)]*)\)\s*:\s*([A-Za-z_][\w']*)$")
_AXIOM = re.compile(r"axiom\s+([A-Za-z_][\w'-]*)\s*:\s*(.*)$")
_THEORY = re.compile(r"theory\s+([A-Za-z_][\w'-]*)$")


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _parse_at(text: str, sig: Signature, n: int, offset: int) -> FormulaInContext:
    """``parse_fic`` with error columns counted from the start of the source line."""
    try:
        return parse_fic(text, sig, line=n)
    except ParseError as e:
        raise ParseError(e.line, e.column + offset, e.expected, e.found) from None


def _indent(raw: str) -> int:
    return len(raw) - len(raw.lstrip())


def parse_theory(text: str, name: str = "theory") -> Theory:
    sorts: list[str] = []
    preds: dict = {}
    funcs: dict = {}
    axiom_lines: list[tuple[int, str, str, int]] = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _THEORY.match(line):
            name = m.group(1)
        elif m := _SORT.match(line):
            sorts.append(m.group(1))
        elif m := _PRED.match(line):
            preds[m.group(1)] = _names(m.group(2))
        elif m := _FUNC.match(line):
            funcs[m.group(1)] = (_names(m.group(2)), m.group(3))
        elif m := _AXIOM.match(line):
            axiom_lines.append((n, m.group(1), m.group(2), _indent(raw) + m.start(2)))
        else:
            raise ParseError(n, 1, "sort, pred, func, axiom or theory declaration", line)
    try:
        sig = Signature(tuple(sorts), preds, funcs)
    except ValueError as e:
        raise FormatError(str(e)) from None
    axioms = {}
    for n, ax, body, offset in axiom_lines:
        if ax in axioms:
            raise ParseError(n, 1, "a fresh axiom name", ax)
        axioms[ax] = _parse_at(body, sig, n, offset)
    return Theory(name, sig, axioms)


def load_theory(path: str | Path) -> Theory:
    path = Path(path)
    return parse_theory(path.read_text(), path.stem)


def format_theory(T: Theory) -> str:
    from .grammar import print_fic

    out = [f"theory {T.name}"]
    out += [f"sort {s}" for s in T.signature.sorts]
    out += [f"pred {p}({', '.join(a)})" for p, a in T.signature.preds.items()]
    out += [f"func {f}({', '.join(a)}): {c}" for f, (a, c) in T.signature.funcs.items()]
    out += [f"axiom {n}: {print_fic(fic, T.signature)}" for n, fic in T.axioms.items()]
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# proofs


def split_args(text: str) -> list[str]:
    """Split on commas outside brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    last = "".join(cur).strip()
    if last or out:
        out.append(last)
    return out


_LINE = re.compile(r"\s*(\d+)\.\s*(.*)$")
_RULE = re.compile(r"\s*([A-Za-z]+)\s*(?:\((.*)\))?\s*$")


def _bracketed_fic(arg: str, sig: Signature, n: int) -> FormulaInContext:
    arg = arg.strip()
    if not (arg.startswith("[") and arg.endswith("]")):
        raise ParseError(n, 1, "a bracketed [ctx ... |- formula]", arg)
    return parse_fic(arg[1:-1], sig, line=n)


def _var(arg: str, sig: Signature, n: int):
    vs = parse_ctxlist(arg, sig)
    if len(vs) != 1:
        raise ParseError(n, 1, "one typed variable y:S", arg)
    return vs[0]


def _int(arg: str, n: int) -> int:
    try:
        return int(arg)
    except ValueError:
        raise ParseError(n, 1, "a line number", arg) from None


def parse_justification(rule: str, args: list[str], ctx, sig: Signature, n: int):
    def arity(k):
        if len(args) != k:
            raise ParseError(n, 1, f"{k} arguments for {rule}", ", ".join(args))

    try:
        match rule:
            case "Taut" | "BoxDis" | "Refl":
                arity(0)
                return {"Taut": Taut, "BoxDis": BoxDis, "Refl": Refl}[rule]()
            case "ForallEx":
                arity(2)
                return ForallEx(parse_term(args[0], sig, ctx), _var(args[1], sig, n))
            case "Repl":
                arity(4)
                return Repl(_bracketed_fic(args[0], sig, n), _var(args[1], sig, n),
                            parse_term(args[2], sig, ctx), parse_term(args[3], sig, ctx))
            case "Cont":
                if not args:
                    raise ParseError(n, 1, "a bracketed body for Cont", "")
                return Cont(_bracketed_fic(args[0], sig, n), tuple(parse_term(a, sig, ctx) for a in args[1:]))
            case "TheoryAxiom":
                arity(1)
                return TheoryAxiom(args[0])
            case "MP":
                arity(2)
                return MP(_int(args[0], n), _int(args[1], n))
            case "Nec":
                arity(1)
                return Nec(_int(args[0], n))
            case "ForallIn":
                arity(2)
                return ForallIn(_int(args[0], n), args[1])
            case "Inst":
                if not args:
                    raise ParseError(n, 1, "a premise index for Inst", "")
                pairs = []
                for a in args[1:]:
                    name, sep, term = a.partition(":=")
                    if not sep:
                        raise ParseError(n, 1, "y := term", a)
                    pairs.append((name.strip(), parse_term(term, sig, ctx)))
                return Inst(_int(args[0], n), tuple(pairs))
    except ParseError as e:
        if e.line == 1 and n != 1:
            raise ParseError(n, e.column, e.expected, e.found) from None
        raise
    raise ParseError(n, 1, "a rule name", rule)


def parse_proof(text: str, sig: Signature, theory: str = "") -> Derivation:
    lines = []
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("theory "):
            theory = body.split(None, 1)[1].strip()
            continue
        m = _LINE.match(body)
        if not m:
            raise ParseError(n, 1, "'N. ctx ... |- formula ; RULE(args)'", body)
        formula_text, sep, rule_text = m.group(2).rpartition(";")
        if not sep:
            raise ParseError(n, len(body) + 1, "';' followed by a justification")
        fic = _parse_at(formula_text, sig, n, _indent(raw) + m.start(2))
        r = _RULE.match(rule_text)
        if not r:
            raise ParseError(n, body.rindex(";") + 2, "RULE(args)", rule_text.strip())
        why = parse_justification(r.group(1), split_args(r.group(2) or ""), fic.context, sig, n)
        lines.append(ProofLine(int(m.group(1)), fic, why))
    return Derivation(theory, tuple(lines))


def load_proof(path: str | Path, sig: Signature, theory: str = "") -> Derivation:
    return parse_proof(Path(path).read_text(), sig, theory)


# --------------------------------------------------------------------------
# counterpart harness
#
# Probe file:   {"version": 1, "probes": ["ctx x:U |- P(x)", ...], "quotients": ["q", ...]}
# Model file:   {"version": 1, "name", "signature", "carriers": {sort: [...]},
#                "funcs": {f: [[arg, ..., value], ...]}, "preds": {P: [[a, ...], ...]},
#                "boxes": {"B1": "box{x:U | ~P(x)}", ...}}
# Family file:  {"version": 1, "name", "left", "right", "relations": {sort: [[a, b], ...]}}
#
# Box symbol names follow the de-modalization of the probe file; the
# optional "boxes" entry is checked against it.


def load_probes(data: dict, sig: Signature) -> tuple[tuple[FormulaInContext, ...], tuple[str, ...]]:
    _check_version(data, "probes")
    probes = tuple(parse_fic(text, sig, line=i) for i, text in enumerate(data.get("probes", []), 1))
    return probes, tuple(data.get("quotients", []))


def classical_model_from_json(data: dict, demod) -> "ClassicalModel":
    from .harness import ClassicalModel

    _check_version(data, "classical model")
    sig = demod.signature
    for name, text in data.get("boxes", {}).items():
        try:
            b = parse_box(text, demod.base)
        except ParseError as e:
            raise FormatError(f"box {name!r}: {e}") from None
        if demod.symbol(b) != name:
            raise FormatError(f"box {name!r} is named {demod.symbol(b)!r} by the probe file")
    try:
        carriers = {s: tuple(_elem(a) for a in data["carriers"][s]) for s in sig.sorts}
        funcs = {}
        for f, (dom, _) in sig.funcs.items():
            funcs[f] = {tuple(_elem(a) for a in row[:-1]): _elem(row[-1]) for row in data["funcs"][f]}
        preds = {p: frozenset(tuple(_elem(a) for a in row) for row in data.get("preds", {}).get(p, []))
                 for p in sig.preds}
    except (KeyError, TypeError) as e:
        raise FormatError(f"classical model: missing or malformed entry {e}") from None
    return ClassicalModel(data.get("name", "M"), demod, carriers, funcs, preds)


def classical_model_to_json(M) -> dict:
    sig = M.demod.signature
    return {
        "version": VERSION,
        "name": M.name,
        "signature": signature_to_json(M.demod.base),
        "carriers": {s: [_plain(a) for a in M.carriers[s]] for s in sig.sorts},
        "funcs": {f: [[*map(_plain, args), _plain(v)] for args, v in M.funcs[f].items()] for f in sig.funcs},
        "preds": {p: sorted(([_plain(a) for a in t] for t in M.preds.get(p, ())), key=repr) for p in sig.preds},
        "boxes": {name: print_box(b, M.demod.base) for b, name in M.demod.boxes},
    }


def family_from_json(data: dict, models: dict) -> "CounterpartFamily":
    from .harness import family

    _check_version(data, "counterpart family")
    try:
        left, right = models[data["left"]], models[data["right"]]
    except KeyError as e:
        raise FormatError(f"family refers to unknown model {e}") from None
    rels = {s: [tuple(_elem(x) for x in p) for p in ps] for s, ps in data.get("relations", {}).items()}
    return family(left, right, rels, data.get("name", "r"))


def family_to_json(R) -> dict:
    return {
        "version": VERSION,
        "name": R.name,
        "left": R.left.name,
        "right": R.right.name,
        "relations": {s: sorted(([_plain(a), _plain(b)] for a, b in R.rel(s)), key=repr)
                      for s in R.left.signature.sorts},
    }


def load_harness(model_paths, family_paths, probe_path):
    """Models, families, probes and quotient declarations from files; the
    models' shared signature is read from the first model."""
    from .harness import demodalize, probe_closure

    model_paths = list(model_paths)
    raw = [load_json(p) for p in model_paths]
    if not raw:
        raise FormatError("at least one model is needed")
    sig = signature_from_json(raw[0].get("signature", {}))
    probes, quotients = load_probes(load_json(probe_path), sig)
    demod = demodalize(sig, probe_closure(probes))
    for p, d in zip(model_paths[1:], raw[1:]):
        if "signature" in d and signature_from_json(d["signature"]) != sig:
            raise FormatError(f"{p}: signature differs from the first model's")
    models = [classical_model_from_json(d, demod) for d in raw]
    by_name = {M.name: M for M in models}
    families = [family_from_json(load_json(p), by_name) for p in family_paths]
    return models, families, probes, quotients
