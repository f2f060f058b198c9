"""Concrete syntax: tokenizer, recursive-descent parser and printer.

    formula := 'false' | term '=' term | IDENT '(' termlist ')'
             | formula '->' formula | '~' formula
             | formula '&' formula | formula '|' formula
             | ('forall' | 'exists') IDENT ':' IDENT '.' formula
             | ('box' | 'dia') '{' ctxlist '|' formula '}' '(' termlist ')'
             | '(' formula ')'
    line    := 'ctx' ctxlist '|-' formula

``~`` binds tightest, then ``&``, ``|``, and right-associative ``->``.
Quantifier bodies extend as far to the right as possible.  Whether an
identifier is a predicate, function or variable is read off the signature
and the variables in scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    BOTTOM,
    App,
    Atom,
    BoxApp,
    BoxPred,
    Bottom,
    Bound,
    Eq,
    Forall,
    Formula,
    FormulaInContext,
    Implies,
    Signature,
    Term,
    Var,
    box,
    box_vars,
    conj,
    disj,
    dia,
    exists,
    forall,
    free_vars,
    neg,
    term_sort,
    term_vars,
)


class ParseError(ValueError):
    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        self.line, self.column, self.expected, self.found = line, column, expected, found
        msg = f"line {line}, column {column}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


KEYWORDS = {"false", "forall", "exists", "box", "dia", "ctx"}
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<sym>\|-|->|[(){},:.|~&=])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", a keyword, a symbol, or "eof"
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    out = []
    pos, col = 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, col, "a token", text[pos])
        chunk = m.group()
        if m.lastgroup == "sym":
            out.append(Token(chunk, chunk, line, col))
        elif m.lastgroup == "ident":
            out.append(Token(chunk if chunk in KEYWORDS else "ident", chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature, line: int = 1):
        self.toks = tokenize(text, line)
        self.i = 0
        self.sig = sig
        # innermost binder last; a frame is (name, sort) for bound, or Var
        self.scope: list = []
        self.free: dict[str, Var] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, expected: str):
        t = self.tok
        raise ParseError(t.line, t.column, expected, t.text or "end of input")

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.accept(kind)
        if t is None:
            self.error(what or repr(kind))
        return t

    # contexts

    def ctxlist(self, stop: str) -> list[Var]:
        out: list[Var] = []
        if self.tok.kind == stop:
            return out
        while True:
            name = self.expect("ident", "a variable name")
            self.expect(":", "':'")
            sort = self.expect("ident", "a sort name")
            if sort.text not in self.sig.sorts:
                raise ParseError(sort.line, sort.column, "a declared sort", sort.text)
            if any(v.name == name.text for v in out):
                raise ParseError(name.line, name.column, "a fresh variable", name.text)
            out.append(Var(name.text, sort.text))
            if not self.accept(","):
                return out

    # terms

    def lookup(self, name: str) -> Term | None:
        depth = 0
        for frame in reversed(self.scope):
            if isinstance(frame, tuple):
                if frame[0] == name:
                    return Bound(depth, frame[1], name)
                depth += 1
            elif frame == "|":  # box barrier: bodies are closed
                break
        else:
            return self.free.get(name)
        return None

    def term(self) -> Term:
        t = self.expect("ident", "a term")
        if self.accept("("):
            args = self.termlist()
            self.expect(")", "')'")
            if t.text not in self.sig.funcs:
                raise ParseError(t.line, t.column, "a function symbol", t.text)
            self.check_args(t, self.sig.funcs[t.text][0], args)
            return App(t.text, tuple(args))
        found = self.lookup(t.text)
        if found is not None:
            return found
        if t.text in self.sig.funcs and not self.sig.funcs[t.text][0]:
            return App(t.text, ())
        raise ParseError(t.line, t.column, "a variable in scope", t.text)

    def termlist(self) -> list[Term]:
        out: list[Term] = []
        if self.tok.kind == ")":
            return out
        out.append(self.term())
        while self.accept(","):
            out.append(self.term())
        return out

    def check_args(self, who: Token, sorts, args):
        if len(sorts) != len(args):
            raise ParseError(who.line, who.column, f"{len(sorts)} arguments for {who.text}", who.text)
        for a, s in zip(args, sorts):
            got = term_sort(a, self.sig)
            if got != s:
                raise ParseError(who.line, who.column, f"an argument of sort {s} for {who.text}", who.text)

    # formulas

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("|"):
            left = disj(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = conj(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.accept("~"):
            return neg(self.unary())
        if self.tok.kind in ("forall", "exists"):
            return self.quantifier()
        return self.primary()

    def quantifier(self) -> Formula:
        kind = self.tok.kind
        self.i += 1
        name = self.expect("ident", "a variable name")
        self.expect(":", "':'")
        sort = self.expect("ident", "a sort name")
        if sort.text not in self.sig.sorts:
            raise ParseError(sort.line, sort.column, "a declared sort", sort.text)
        self.expect(".", "'.'")
        self.scope.append((name.text, sort.text))
        body = self.formula()
        self.scope.pop()
        f = Forall(sort.text, body if kind == "forall" else neg(body), name.text)
        return f if kind == "forall" else neg(f)

    def primary(self) -> Formula:
        t = self.tok
        if self.accept("false"):
            return BOTTOM
        if self.accept("("):
            f = self.formula()
            self.expect(")", "')'")
            return f
        if t.kind in ("box", "dia"):
            return self.modal()
        if t.kind == "ident" and t.text in self.sig.preds:
            self.i += 1
            args: list[Term] = []
            if self.accept("("):
                args = self.termlist()
                self.expect(")", "')'")
            self.check_args(t, self.sig.preds[t.text], args)
            return Atom(t.text, tuple(args))
        if t.kind != "ident":
            self.error("a formula")
        left = self.term()
        eq = self.expect("=", "'=' or a predicate")
        right = self.term()
        if term_sort(left, self.sig) != term_sort(right, self.sig):
            raise ParseError(eq.line, eq.column, "terms of equal sort", "=")
        return Eq(left, right)

    def abstraction(self) -> tuple[str, BoxPred]:
        kind = self.tok.kind
        self.i += 1
        self.expect("{", "'{'")
        vars_ = self.ctxlist("|")
        self.expect("|", "'|'")
        self.scope.append("|")
        self.scope.extend((v.name, v.sort) for v in vars_)
        body = self.formula()
        del self.scope[len(self.scope) - len(vars_) - 1:]
        self.expect("}", "'}'")
        # the body was parsed with the box variables as binders already
        return kind, BoxPred(tuple(v.sort for v in vars_), body if kind == "box" else neg(body),
                             tuple(v.name for v in vars_))

    def modal(self) -> Formula:
        kind, b = self.abstraction()
        vars_ = box_vars(b)
        self.expect("(", "'('")
        start = self.toks[self.i]
        args = self.termlist()
        self.expect(")", "')'")
        if len(args) != len(vars_) or any(term_sort(a, self.sig) != v.sort for a, v in zip(args, vars_)):
            raise ParseError(start.line, start.column, "arguments matching the box context", start.text)
        f = BoxApp(b, tuple(args))
        return f if kind == "box" else neg(f)

    def line(self) -> FormulaInContext:
        self.expect("ctx", "'ctx'")
        ctx = self.ctxlist("|-")
        self.expect("|-", "'|-'")
        self.free = {v.name: v for v in ctx}
        phi = self.formula()
        self.expect("eof", "end of formula")
        return FormulaInContext(tuple(ctx), phi)


def parse_fic(text: str, sig: Signature, line: int = 1) -> FormulaInContext:
    """Parse ``ctx x:U, ... |- formula``."""
    return _Parser(text, sig, line).line()


def parse_formula(text: str, sig: Signature, ctx=(), line: int = 1) -> FormulaInContext:
    """Parse either a full ``ctx ... |- φ`` line or a bare formula over ``ctx``."""
    p = _Parser(text, sig, line)
    if p.tok.kind == "ctx":
        return p.line()
    ctx = tuple(ctx)
    p.free = {v.name: v for v in ctx}
    phi = p.formula()
    p.expect("eof", "end of formula")
    return FormulaInContext(ctx, phi)


def parse_box(text: str, sig: Signature) -> BoxPred:
    """Parse an unapplied abstraction ``box{x:U | φ}``."""
    p = _Parser(text, sig)
    if p.tok.kind != "box":
        p.error("'box'")
    _, b = p.abstraction()
    p.expect("eof", "end of abstraction")
    return b


def parse_ctxlist(text: str, sig: Signature) -> tuple[Var, ...]:
    p = _Parser(text, sig)
    out = p.ctxlist("eof")
    p.expect("eof", "end of context")
    return tuple(out)


def parse_term(text: str, sig: Signature, ctx=()) -> Term:
    p = _Parser(text, sig)
    p.free = {v.name: v for v in ctx}
    t = p.term()
    p.expect("eof", "end of term")
    return t


# --------------------------------------------------------------------------
# printing

# binding strength of the printed forms
_IMP, _OR, _AND, _NOT, _ATOM = range(5)


class _Printer:
    def __init__(self, taken: set[str], symbols: frozenset[str] = frozenset()):
        self.symbols = symbols
        self.taken = set(taken) | symbols
        self.names: list[str] = []  # innermost binder last

    def fresh(self, hint: str) -> str:
        name = hint or "x"
        while name in self.taken or name in self.names or name in KEYWORDS:
            name += "'"
        return name

    def term(self, t: Term) -> str:
        match t:
            case Var(name):
                return name
            case Bound(i):
                if i >= len(self.names):
                    return f"?{i}"
                return self.names[-1 - i]
            case App(f, args):
                if not args:
                    return f
                return f"{f}({', '.join(self.term(a) for a in args)})"
        raise TypeError(t)

    def formula(self, phi: Formula, level: int = _IMP) -> str:
        match phi:
            case Bottom():
                return "false"
            case Atom(p, args):
                return f"{p}({', '.join(self.term(a) for a in args)})"
            case Eq(l, r):
                return f"{self.term(l)} = {self.term(r)}"
            case Implies(l, Bottom()):
                return "~" + self.formula(l, _NOT)
            case Implies(l, r):
                text = f"{self.formula(l, _OR)} -> {self.formula(r, _IMP)}"
                return text if level <= _IMP else f"({text})"
            case Forall(s, body, hint):
                name = self.fresh(hint)
                self.names.append(name)
                text = f"forall {name}:{s}. {self.formula(body, _IMP)}"
                self.names.pop()
                return text if level <= _IMP else f"({text})"
            case BoxApp(b, args):
                return f"box{self.box(b)}({', '.join(self.term(a) for a in args)})"
        raise TypeError(phi)

    def box(self, b: BoxPred) -> str:
        inner = _Printer(set(), self.symbols)  # box bodies are closed
        names = []
        for i, s in enumerate(b.sorts):
            hint = b.hints[i] if i < len(b.hints) else f"x{i}"
            name = inner.fresh(hint)
            inner.names.append(name)
            names.append(f"{name}:{s}")
        return "{" + ", ".join(names) + " | " + inner.formula(b.body) + "}"


def _symbols(sig: Signature | None) -> frozenset[str]:
    if sig is None:
        return frozenset()
    return frozenset(sig.preds) | frozenset(sig.funcs) | frozenset(sig.sorts)


def print_formula(phi: Formula, ctx=(), sig: Signature | None = None) -> str:
    """Deterministic text for ``phi``; bound names are primed on clashes."""
    taken = {v.name for v in ctx} | {v.name for v in free_vars(phi)}
    return _Printer(taken, _symbols(sig)).formula(phi)


def print_box(b: BoxPred, sig: Signature | None = None) -> str:
    return "box" + _Printer(set(), _symbols(sig)).box(b)


def print_fic(fic: FormulaInContext, sig: Signature | None = None) -> str:
    ctx = ", ".join(f"{v.name}:{v.sort}" for v in fic.context)
    body = print_formula(fic.formula, fic.context, sig)
    return f"ctx {ctx} |- {body}" if ctx else f"ctx |- {body}"


def print_term(t: Term) -> str:
    return _Printer({v.name for v in term_vars(t)}).term(t)


__all__ = [
    "ParseError",
    "parse_fic",
    "parse_formula",
    "parse_box",
    "parse_ctxlist",
    "parse_term",
    "print_box",
    "print_fic",
    "print_formula",
    "print_term",
    "tokenize",
    # re-exported builders handy alongside the parser
    "box",
    "dia",
    "exists",
    "forall",
]
