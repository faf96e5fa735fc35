"""Text format for lattices, programs, valuations, and isomorphism specs.

A document is a sequence of blocks:

    lattice powerset { Ann, Bob, Pete }
    syntax old
    universe { accept }
    program {
      in(accept):{Ann} <- in(accept):{Bob}.
    }
    init {
      accept = <{Pete}, {Bob}>.
    }

Comments run from ``#`` to end of line.  Facts are written with an explicit
arrow: ``in(b):{q} <- .``  Unit-chain annotations are exact rationals;
decimal literals convert exactly on input and serialize as fractions.  The
serializer emits a canonical form: atoms sorted, elements in their handle's
element order, rules in source order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .isomorphism import PairIso, PairMap
from .lattice import (
    CustomLattice,
    Lattice,
    LatticeError,
    LevelChain,
    PairValue,
    PowersetLattice,
    TwoLattice,
    UnitChain,
    validate,
)
from .syntax import (
    NEW,
    OLD,
    AnnotatedRevisionAtom,
    NewRule,
    OldRule,
    PairAnnotatedAtom,
    Program,
    RevisionAtom,
)
from .valuation import PairValuation


class DslError(Exception):
    """Problem with an input document; carries the source position."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            super().__init__(f"line {line}, col {col}: {message}")
        else:
            super().__init__(message)


class DslLexError(DslError):
    pass


class DslSyntaxError(DslError):
    pass


class DslSemanticError(DslError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | sym | eof
    text: str
    line: int
    col: int


_TWO_CHAR = ("<-", "->")
_ONE_CHAR = set("{}[]()<>,:;.=*/")


def _lex(text):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if text[i:i + 2] in _TWO_CHAR:
            tokens.append(Token("sym", text[i:i + 2], line, col))
            i += 2
            col += 2
            continue
        if c in _ONE_CHAR:
            tokens.append(Token("sym", c, line, col))
            i += 1
            col += 1
            continue
        raise DslLexError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at_sym(self, s):
        t = self.peek()
        return t.kind == "sym" and t.text == s

    def at_ident(self, *names):
        t = self.peek()
        return t.kind == "ident" and (not names or t.text in names)

    def expect_sym(self, s):
        t = self.peek()
        if not self.at_sym(s):
            raise DslSyntaxError(f"expected {s!r}, found {t.text or 'end of input'!r}",
                                 t.line, t.col)
        return self.advance()

    def expect_ident(self, what="a name"):
        t = self.peek()
        if t.kind != "ident":
            raise DslSyntaxError(f"expected {what}, found {t.text or 'end of input'!r}",
                                 t.line, t.col)
        return self.advance()

    def sem_error(self, msg, tok=None):
        tok = tok or self.peek()
        raise DslSemanticError(msg, tok.line, tok.col)


@dataclass
class Document:
    """One parsed input file: a lattice, a program over a declared universe,
    and optional initial/candidate valuations and isomorphism spec."""

    lattice: Lattice
    syntax: str
    universe: tuple
    program: Program
    init: PairValuation | None = None
    candidate: PairValuation | None = None
    iso: PairIso | None = None


def _parse_label_list(p):
    """Brace-enclosed comma-separated identifiers, order preserved."""
    p.expect_sym("{")
    out = []
    while not p.at_sym("}"):
        t = p.expect_ident()
        if t.text in out:
            p.sem_error(f"duplicate name {t.text!r}", t)
        out.append(t.text)
        if p.at_sym(","):
            p.advance()
        else:
            break
    p.expect_sym("}")
    return tuple(out)


def _parse_set_literal(p):
    p.expect_sym("{")
    out = []
    while not p.at_sym("}"):
        t = p.expect_ident("a label")
        out.append(t.text)
        if p.at_sym(","):
            p.advance()
        else:
            break
    p.expect_sym("}")
    return frozenset(out)


def _parse_set_table(p):
    p.expect_sym("{")
    table = {}
    while not p.at_sym("}"):
        tok = p.peek()
        k = _parse_set_literal(p)
        p.expect_sym(":")
        v = _parse_set_literal(p)
        if k in table:
            p.sem_error("duplicate complement entry", tok)
        table[k] = v
        if p.at_sym(","):
            p.advance()
        else:
            break
    p.expect_sym("}")
    return table


def _parse_lattice(p):
    t = p.expect_ident("a lattice kind")
    if t.text == "two":
        return TwoLattice()
    if t.text == "powerset":
        labels = _parse_label_list(p)
        table = None
        if p.at_ident("complement"):
            p.advance()
            table = _parse_set_table(p)
        try:
            return PowersetLattice(labels, table)
        except LatticeError as e:
            p.sem_error(str(e), t)
    if t.text == "chain":
        if p.at_ident("unit"):
            p.advance()
            return UnitChain()
        p.expect_sym("[")
        names = [p.expect_ident("a level name").text]
        while p.at_sym("<"):
            p.advance()
            names.append(p.expect_ident("a level name").text)
        p.expect_sym("]")
        try:
            return LevelChain(names)
        except LatticeError as e:
            p.sem_error(str(e), t)
    if t.text == "custom":
        p.expect_sym("{")
        kw = p.expect_ident("'elements'")
        if kw.text != "elements":
            p.sem_error("custom lattice starts with an elements block", kw)
        names = _parse_label_list(p)
        kw = p.expect_ident("'order'")
        if kw.text != "order":
            p.sem_error("expected an order block", kw)
        p.expect_sym("{")
        pairs = []
        while not p.at_sym("}"):
            a = p.expect_ident("an element name")
            p.expect_sym("<")
            b = p.expect_ident("an element name")
            pairs.append((a.text, b.text))
            if p.at_sym(","):
                p.advance()
            else:
                break
        p.expect_sym("}")
        kw = p.expect_ident("'complement'")
        if kw.text != "complement":
            p.sem_error("expected a complement block", kw)
        p.expect_sym("{")
        comp = {}
        while not p.at_sym("}"):
            a = p.expect_ident("an element name")
            p.expect_sym(":")
            b = p.expect_ident("an element name")
            if a.text in comp:
                p.sem_error(f"duplicate complement entry for {a.text!r}", a)
            comp[a.text] = b.text
            if p.at_sym(","):
                p.advance()
            else:
                break
        p.expect_sym("}")
        p.expect_sym("}")
        try:
            return CustomLattice(names, pairs, comp)
        except LatticeError as e:
            p.sem_error(str(e), t)
    raise DslSyntaxError(f"unknown lattice kind {t.text!r}", t.line, t.col)


def _parse_element(p, lattice):
    t = p.peek()
    if p.at_sym("{"):
        if lattice.kind != "powerset":
            p.sem_error("set annotations need a powerset lattice", t)
        members = _parse_set_literal(p)
        try:
            return lattice.element(members)
        except LatticeError as e:
            p.sem_error(str(e), t)
    if t.kind == "number":
        if lattice.kind != "unit":
            p.sem_error("numeric annotations need the unit chain lattice", t)
        p.advance()
        if "." in t.text:
            value = Fraction(t.text)
        else:
            value = Fraction(int(t.text))
            if p.at_sym("/"):
                p.advance()
                d = p.peek()
                if d.kind != "number" or "." in d.text:
                    raise DslSyntaxError("expected an integer denominator", d.line, d.col)
                p.advance()
                if int(d.text) == 0:
                    p.sem_error("zero denominator", d)
                value = Fraction(int(t.text), int(d.text))
        try:
            return lattice.element(value)
        except LatticeError as e:
            p.sem_error(str(e), t)
    if t.kind == "ident":
        if lattice.kind == "powerset":
            p.sem_error("expected a label set in braces", t)
        if lattice.kind == "unit":
            p.sem_error("expected a rational between 0 and 1", t)
        p.advance()
        try:
            return lattice.element(t.text)
        except LatticeError as e:
            p.sem_error(str(e), t)
    raise DslSyntaxError(f"expected an annotation, found {t.text or 'end of input'!r}",
                         t.line, t.col)


def _parse_old_atom(p, lattice, uset):
    t = p.expect_ident("'in' or 'out'")
    if t.text not in ("in", "out"):
        raise DslSyntaxError(f"expected 'in' or 'out', found {t.text!r}", t.line, t.col)
    p.expect_sym("(")
    at = p.expect_ident("an atom name")
    if at.text not in uset:
        p.sem_error(f"undeclared atom {at.text!r}", at)
    p.expect_sym(")")
    p.expect_sym(":")
    ann = _parse_element(p, lattice)
    return AnnotatedRevisionAtom(RevisionAtom(t.text, at.text), ann)


def _parse_new_atom(p, lattice, uset):
    at = p.expect_ident("an atom name")
    if at.text not in uset:
        p.sem_error(f"undeclared atom {at.text!r}", at)
    p.expect_sym(":")
    p.expect_sym("<")
    x = _parse_element(p, lattice)
    p.expect_sym(",")
    y = _parse_element(p, lattice)
    p.expect_sym(">")
    return PairAnnotatedAtom(at.text, PairValue(x, y))


def _parse_program(p, lattice, syntax, universe):
    p.expect_sym("{")
    uset = set(universe)
    atom = _parse_old_atom if syntax == OLD else _parse_new_atom
    mk = OldRule if syntax == OLD else NewRule
    rules = []
    while not p.at_sym("}"):
        head = atom(p, lattice, uset)
        p.expect_sym("<-")
        body = []
        while not p.at_sym("."):
            body.append(atom(p, lattice, uset))
            if p.at_sym(","):
                p.advance()
            elif not p.at_sym("."):
                break
        p.expect_sym(".")
        rules.append(mk(head, tuple(body)))
    p.expect_sym("}")
    return Program(syntax, lattice, universe, rules)


def _parse_valuation(p, lattice, universe):
    p.expect_sym("{")
    uset = set(universe)
    entries = {}
    while not p.at_sym("}"):
        at = p.expect_ident("an atom name")
        if at.text not in uset:
            p.sem_error(f"undeclared atom {at.text!r}", at)
        if at.text in entries:
            p.sem_error(f"duplicate entry for atom {at.text!r}", at)
        p.expect_sym("=")
        p.expect_sym("<")
        x = _parse_element(p, lattice)
        p.expect_sym(",")
        y = _parse_element(p, lattice)
        p.expect_sym(">")
        p.expect_sym(".")
        entries[at.text] = PairValue(x, y)
    p.expect_sym("}")
    return PairValuation.build(lattice, universe, entries)


def _perm_map(p, lattice, pairs, tok):
    """Pair map from a name permutation: powerset lattices permute labels,
    other finite kinds permute elements; unlisted names stay fixed."""
    if isinstance(lattice, PowersetLattice):
        known = set(lattice.labels)
        for a, b in pairs.items():
            if a not in known or b not in known:
                p.sem_error(f"perm mentions unknown label {(a if a not in known else b)!r}", tok)
        sigma = {l: pairs.get(l, l) for l in lattice.labels}
        if set(sigma.values()) != known:
            p.sem_error("perm is not a permutation of the labels", tok)
        perm = {
            e: lattice.element(frozenset(sigma[l] for l in e.key))
            for e in lattice.elements()}
    elif lattice.is_finite:
        names = {lattice.format_element(e): e for e in lattice.elements()}
        for a, b in pairs.items():
            if a not in names or b not in names:
                p.sem_error(f"perm mentions unknown element {(a if a not in names else b)!r}", tok)
        sigma = {n: pairs.get(n, n) for n in names}
        if set(sigma.values()) != set(names):
            p.sem_error("perm is not a permutation of the elements", tok)
        perm = {e: names[sigma[n]] for n, e in names.items()}
    else:
        p.sem_error("perm is not supported on the unit chain", tok)
    try:
        return PairMap.from_permutation(lattice, perm)
    except LatticeError as e:
        p.sem_error(str(e), tok)


def _parse_iso_prim(p, lattice):
    t = p.advance()
    if t.text == "id":
        return PairMap.identity(lattice)
    if t.text == "swap":
        return PairMap.swap(lattice)
    p.expect_sym("(")
    pairs = {}
    while True:
        a = p.expect_ident("a name")
        p.expect_sym("->")
        b = p.expect_ident("a name")
        if a.text in pairs:
            p.sem_error(f"duplicate perm entry for {a.text!r}", a)
        pairs[a.text] = b.text
        if p.at_sym(","):
            p.advance()
            continue
        break
    p.expect_sym(")")
    return _perm_map(p, lattice, pairs, t)


def _parse_iso_expr(p, lattice):
    m = None
    while p.at_ident("id", "swap", "perm"):
        prim = _parse_iso_prim(p, lattice)
        m = prim if m is None else m.then(prim)
    if m is None:
        t = p.peek()
        raise DslSyntaxError("expected an isomorphism: id, swap, or perm(...)",
                             t.line, t.col)
    return m


def _parse_iso_block(p, lattice, universe):
    p.expect_sym("{")
    uset = set(universe)
    maps = {}
    default = None
    while not p.at_sym("}"):
        tok = p.peek()
        if p.at_sym("*"):
            p.advance()
            key = None
        else:
            t = p.expect_ident("an atom name or '*'")
            if t.text not in uset:
                p.sem_error(f"undeclared atom {t.text!r}", t)
            if t.text in maps:
                p.sem_error(f"duplicate iso entry for atom {t.text!r}", t)
            key = t.text
        p.expect_sym(":")
        m = _parse_iso_expr(p, lattice)
        if key is None:
            if default is not None:
                p.sem_error("duplicate default iso entry", tok)
            default = m
        else:
            maps[key] = m
        if p.at_sym(";"):
            p.advance()
    p.expect_sym("}")
    return PairIso(lattice, maps, default)


def parse(text: str) -> Document:
    """Parse and fully validate one document.

    Validation covers the lattice axioms, universe coverage of every
    mentioned atom, and membership of every annotation in the declared
    lattice.  Errors carry the line and column of the offending token.
    """
    p = _Parser(_lex(text))
    lattice = None
    syntax = None
    universe = None
    program = None
    init = None
    candidate = None
    iso = None
    while p.peek().kind != "eof":
        t = p.peek()
        if t.kind != "ident":
            raise DslSyntaxError(f"expected a declaration, found {t.text!r}", t.line, t.col)
        name = t.text
        if name == "lattice":
            if lattice is not None:
                p.sem_error("duplicate lattice declaration", t)
            p.advance()
            lattice = _parse_lattice(p)
            report = validate(lattice)
            if not report.ok:
                raise DslSemanticError(f"invalid lattice: {report.failures[0]}",
                                       t.line, t.col)
        elif name == "syntax":
            if syntax is not None:
                p.sem_error("duplicate syntax declaration", t)
            if program is not None:
                p.sem_error("syntax declaration must precede the program", t)
            p.advance()
            s = p.expect_ident("'old' or 'new'")
            if s.text not in (OLD, NEW):
                p.sem_error(f"syntax must be 'old' or 'new', got {s.text!r}", s)
            syntax = s.text
        elif name == "universe":
            if universe is not None:
                p.sem_error("duplicate universe declaration", t)
            p.advance()
            universe = _parse_label_list(p)
        elif name == "program":
            if program is not None:
                p.sem_error("duplicate program block", t)
            if lattice is None or universe is None:
                p.sem_error("program needs lattice and universe declarations first", t)
            p.advance()
            program = _parse_program(p, lattice, syntax or OLD, universe)
        elif name in ("init", "candidate"):
            if lattice is None or universe is None:
                p.sem_error(f"{name} needs lattice and universe declarations first", t)
            if (init if name == "init" else candidate) is not None:
                p.sem_error(f"duplicate {name} block", t)
            p.advance()
            v = _parse_valuation(p, lattice, universe)
            if name == "init":
                init = v
            else:
                candidate = v
        elif name == "iso":
            if iso is not None:
                p.sem_error("duplicate iso block", t)
            if lattice is None or universe is None:
                p.sem_error("iso needs lattice and universe declarations first", t)
            p.advance()
            iso = _parse_iso_block(p, lattice, universe)
        else:
            raise DslSyntaxError(f"unknown block {name!r}", t.line, t.col)
    if lattice is None:
        raise DslSemanticError("missing lattice declaration")
    if universe is None:
        raise DslSemanticError("missing universe declaration")
    if program is None:
        raise DslSemanticError("missing program block")
    return Document(lattice, syntax or OLD, tuple(sorted(universe)), program,
                    init, candidate, iso)


def parse_iso(text: str, lattice, universe) -> PairIso:
    """Parse a standalone isomorphism spec against an existing document's
    lattice and universe."""
    p = _Parser(_lex(text))
    t = p.expect_ident("'iso'")
    if t.text != "iso":
        raise DslSyntaxError(f"expected an iso block, found {t.text!r}", t.line, t.col)
    iso = _parse_iso_block(p, lattice, universe)
    end = p.peek()
    if end.kind != "eof":
        raise DslSyntaxError(f"unexpected trailing input {end.text!r}", end.line, end.col)
    return iso


def _lattice_decl_text(lat):
    if isinstance(lat, TwoLattice):
        return "lattice two"
    if isinstance(lat, PowersetLattice):
        head = "lattice powerset { " + ", ".join(lat.labels) + " }"
        if not lat.has_custom_complement:
            return head
        entries = ", ".join(
            f"{lat.format_element(e)}: {lat.format_element(~e)}" for e in lat.elements())
        return f"{head} complement {{ {entries} }}"
    if isinstance(lat, UnitChain):
        return "lattice chain unit"
    if isinstance(lat, CustomLattice):
        order = ", ".join(f"{a} < {b}" for a, b in lat.cover_pairs())
        comp = ", ".join(
            f"{lat.format_element(e)}: {lat.format_element(~e)}" for e in lat.elements())
        return ("lattice custom {\n"
                f"  elements {{ {', '.join(lat.names)} }}\n"
                f"  order {{ {order} }}\n"
                f"  complement {{ {comp} }}\n"
                "}")
    if isinstance(lat, LevelChain):
        return "lattice chain [" + " < ".join(lat.names) + "]"
    raise ValueError(f"cannot serialize lattice kind {lat.kind!r}")


def _old_atom_text(a):
    return f"{a.ratom.polarity}({a.ratom.atom}):{a.ann!r}"


def _new_atom_text(a):
    return f"{a.atom}:<{a.ann.pos!r},{a.ann.neg!r}>"


def _rule_text(r):
    fmt = _old_atom_text if isinstance(r, OldRule) else _new_atom_text
    head = fmt(r.head)
    if not r.body:
        return f"{head} <- ."
    return f"{head} <- {', '.join(fmt(b) for b in r.body)}."


def _valuation_block(name, v):
    lines = [f"{name} {{"]
    lines += [f"  {line}" for line in v.canonical_text().splitlines()]
    lines.append("}")
    return "\n".join(lines)


def _iso_expr_text(m: PairMap, lat):
    perm, swap = m.structure()
    parts = []
    if perm is not None:
        moved = []
        if isinstance(lat, PowersetLattice):
            for l in lat.labels:
                img = perm[lat.element(frozenset([l]))]
                if len(img.key) != 1:
                    raise ValueError("permutation does not arise from a label permutation")
                (target,) = img.key
                if target != l:
                    moved.append((l, target))
        else:
            for e in sorted(lat.elements(), key=lat.sort_key):
                img = perm[e]
                if img != e:
                    moved.append((lat.format_element(e), lat.format_element(img)))
        if moved:
            parts.append("perm(" + ", ".join(f"{a}->{b}" for a, b in moved) + ")")
    if swap:
        parts.append("swap")
    return " ".join(parts) if parts else "id"


def _iso_block_text(iso: PairIso):
    lines = ["iso {"]
    for a in sorted(iso.entries):
        lines.append(f"  {a}: {_iso_expr_text(iso.entries[a], iso.lattice)};")
    if iso.default is not None:
        lines.append(f"  *: {_iso_expr_text(iso.default, iso.lattice)};")
    lines.append("}")
    return "\n".join(lines)


def serialize_document(doc: Document) -> str:
    parts = [_lattice_decl_text(doc.lattice),
             f"syntax {doc.syntax}",
             "universe { " + ", ".join(doc.universe) + " }",
             ""]
    body = "\n".join(f"  {_rule_text(r)}" for r in doc.program.rules)
    parts.append("program {\n" + (body + "\n" if body else "") + "}")
    if doc.init is not None:
        parts.append("")
        parts.append(_valuation_block("init", doc.init))
    if doc.candidate is not None:
        parts.append("")
        parts.append(_valuation_block("candidate", doc.candidate))
    if doc.iso is not None:
        parts.append("")
        parts.append(_iso_block_text(doc.iso))
    return "\n".join(parts) + "\n"


def valuation_to_json(v: PairValuation) -> dict:
    return {a: [repr(pv.pos), repr(pv.neg)] for a, pv in v.items()}


def outcome_to_json(o) -> dict:
    return {
        "valuation": valuation_to_json(o.candidate),
        "necessary_change": valuation_to_json(o.necessary_change),
        "semantics": o.semantics,
        "verified": o.verified,
        "trace": [list(step) for step in o.trace],
    }


def revisions_to_json(semantics, outcomes, stats) -> dict:
    return {
        "semantics": semantics,
        "revisions": [
            {
                "valuation": valuation_to_json(o.candidate),
                "necessary_change": valuation_to_json(o.necessary_change),
                "trace": [list(step) for step in o.trace],
            }
            for o in outcomes],
        "stats": dict(stats),
    }


def document_to_json(doc: Document) -> dict:
    out = {
        "lattice": _lattice_decl_text(doc.lattice),
        "syntax": doc.syntax,
        "universe": list(doc.universe),
        "rules": [_rule_text(r) for r in doc.program.rules],
    }
    if doc.init is not None:
        out["init"] = valuation_to_json(doc.init)
    if doc.candidate is not None:
        out["candidate"] = valuation_to_json(doc.candidate)
    return out


def serialize(obj, fmt: str = "text") -> str:
    """Canonical text or JSON rendering of a document, a valuation, or a
    revision outcome."""
    if fmt not in ("text", "json"):
        raise ValueError(f"format must be 'text' or 'json', got {fmt!r}")
    if isinstance(obj, Document):
        if fmt == "text":
            return serialize_document(obj)
        return json.dumps(document_to_json(obj), indent=2) + "\n"
    if isinstance(obj, PairValuation):
        if fmt == "text":
            return obj.canonical_text() + "\n"
        return json.dumps(valuation_to_json(obj), indent=2) + "\n"
    if hasattr(obj, "candidate") and hasattr(obj, "necessary_change"):
        if fmt == "text":
            lines = [f"semantics: {obj.semantics}",
                     f"verified: {str(obj.verified).lower()}",
                     "candidate:"]
            lines += [f"  {l}" for l in obj.candidate.canonical_text().splitlines()]
            lines.append("necessary change:")
            lines += [f"  {l}" for l in obj.necessary_change.canonical_text().splitlines()]
            return "\n".join(lines) + "\n"
        return json.dumps(outcome_to_json(obj), indent=2) + "\n"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
