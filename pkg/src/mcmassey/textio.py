"""Text format for presentations, elements, matrices and certificates.

Presentation documents are line based::

    # comments start with '#'
    preset heisenberg
    generator t : 1
    d a3 = a1^a2

Expressions use rational coefficients (``3/2``), ``*`` or ``^`` between
factors (``^`` followed by an integer is a power), ``+``/``-`` and brackets.
Matrices are written ``[e11, e12; e21, e22]``; ``0@d`` is a zero entry of
degree d.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .dga import DGAPresentation, tensor_product
from .gca import Element, GeneratorSpec

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()\[\];,@]))")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int = 1, col0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[:pos]) + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), col0 + start))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], lookup: Callable[[str], Element], one: Element, line: int, end_col: int):
        self.toks = toks
        self.i = 0
        self.lookup = lookup
        self.one = one
        self.line = line
        self.end_col = end_col

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg):
        t = self.peek()
        raise ParseError(msg, self.line, t.col if t else self.end_col)

    def take(self, text=None):
        t = self.peek()
        if t is None or (text is not None and t.text != text):
            self.error(f"expected {text!r}" if text else "unexpected end of input")
        self.i += 1
        return t

    def expr(self) -> Element:
        t = self.peek()
        neg = False
        if t is not None and t.text in "+-" and t.kind == "op":
            neg = t.text == "-"
            self.i += 1
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            t = self.peek()
            if t is None or t.kind != "op" or t.text not in "+-":
                return acc
            self.i += 1
            rhs = self.term()
            acc = acc + rhs if t.text == "+" else acc - rhs

    def term(self) -> Element:
        acc = self.factor()
        while True:
            t = self.peek()
            if t is None or t.kind != "op" or t.text not in "*^":
                return acc
            self.i += 1
            nxt = self.peek()
            if t.text == "^" and nxt is not None and nxt.kind == "num":
                self.i += 1
                if "/" in nxt.text:
                    self.error("exponent must be an integer")
                acc = _power_last(acc, int(nxt.text), self)
                continue
            acc = acc * self.factor()

    def factor(self) -> Element:
        t = self.peek()
        if t is None:
            self.error("unexpected end of expression")
        if t.kind == "num":
            self.i += 1
            return self.one.scale(Fraction(t.text))
        if t.kind == "name":
            self.i += 1
            try:
                return self.lookup(t.text)
            except KeyError:
                raise ParseError(f"unknown generator {t.text!r}", self.line, t.col)
        if t.text == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        if t.text == "-":
            self.i += 1
            return -self.factor()
        self.error(f"unexpected {t.text!r}")


def _power_last(acc: Element, k: int, parser: _Parser) -> Element:
    # x^3 binds to the last factor only; track it through the previous token
    prev = parser.toks[parser.i - 3] if parser.i >= 3 else None
    if prev is None or prev.kind != "name":
        parser.error("powers apply to a generator")
    g = parser.lookup(prev.text)
    if k < 1:
        parser.error("exponent must be positive")
    return acc * g ** (k - 1)


def parse_element(text: str, algebra_like, line: int = 1, column: int = 1) -> Element:
    """Parse an expression over a presentation or algebra.

    ``column`` is the position of the expression within its source line.
    """
    alg = getattr(algebra_like, "algebra", algebra_like)
    toks = _tokenize(text, line, column)
    if not toks:
        raise ParseError("empty expression", line, column)
    p = _Parser(toks, alg.gen, alg.one(), line, column + len(text))
    e = p.expr()
    if p.peek() is not None:
        p.error(f"unexpected {p.peek().text!r}")
    return e


@dataclass
class MatrixEntry:
    element: Element
    degree: int | None  # explicit degree for 0@d


def parse_matrix(text: str, algebra_like, line: int = 1) -> list[list[MatrixEntry]]:
    """``[a, b; c, d]`` or a bare expression (1x1)."""
    alg = getattr(algebra_like, "algebra", algebra_like)
    s = text.strip()
    if not s.startswith("["):
        return [[_entry(s, alg, line)]]
    if not s.endswith("]"):
        raise ParseError("matrix must end with ']'", line, len(text))
    body = s[1:-1]
    rows = []
    for r in body.split(";"):
        rows.append([_entry(e, alg, line) for e in r.split(",")])
    if any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("ragged matrix", line, 1)
    return rows


def _entry(text: str, alg, line) -> MatrixEntry:
    t = text.strip()
    m = re.fullmatch(r"0\s*@\s*(\d+)", t)
    if m:
        return MatrixEntry(alg.zero(), int(m.group(1)))
    return MatrixEntry(parse_element(t, alg, line), None)


def render_matrix(rows) -> str:
    if len(rows) == 1 and len(rows[0]) == 1:
        return str(rows[0][0])
    return "[" + "; ".join(", ".join(str(e) for e in row) for row in rows) + "]"


# --- presentation documents -----------------------------------------------

@dataclass
class PresentationDocument:
    presets: list[tuple[str, list[str], int]] = field(default_factory=list)  # (name, args, line)
    generators: list[tuple[str, int, int]] = field(default_factory=list)  # (name, degree, line)
    differentials: list[tuple[str, str, int, int]] = field(default_factory=list)  # (name, expr, line, column)

    def to_presentation(self) -> DGAPresentation:
        return build_presentation(self)


def _preset(name: str, args: list[str], line: int) -> DGAPresentation:
    from . import models

    def ints(k):
        if len(args) != k:
            raise ParseError(f"preset {name} takes {k} integer argument(s)", line, 1)
        try:
            return [int(a) for a in args]
        except ValueError:
            raise ParseError(f"preset {name} takes integer arguments", line, 1)

    try:
        if name == "heisenberg":
            ints(0)
            return models.heisenberg()
        if name == "circle":
            ints(0)
            return models.circle_model()
        if name == "kodaira_thurston":
            ints(0)
            return models.kodaira_thurston()
        if name == "generalized_heisenberg":
            return models.generalized_heisenberg(*ints(1))
        if name == "witt":
            return models.witt_model(*ints(1))
        if name == "sphere":
            return models.sphere_model(*ints(1))
        if name == "tensor":
            if len(args) != 2:
                raise ParseError("preset tensor takes two preset names", line, 1)
            return tensor_product(_preset_spec(args[0], line), _preset_spec(args[1], line))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), line, 1)
    raise ParseError(f"unknown preset {name!r}", line, 1)


def _preset_spec(spec: str, line: int) -> DGAPresentation:
    """``witt:4`` style argument for tensor."""
    name, _, rest = spec.partition(":")
    return _preset(name, [a for a in rest.split(":") if a], line)


def parse(text: str) -> PresentationDocument:
    doc = PresentationDocument()
    seen: set[str] = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        head, _, rest = stripped.partition(" ")
        if head == "preset":
            parts = rest.split()
            if not parts:
                raise ParseError("preset needs a name", ln, col + 7)
            doc.presets.append((parts[0], parts[1:], ln))
        elif head == "generator":
            m = re.fullmatch(r"generator\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(-?\d+)", stripped)
            if not m:
                raise ParseError("expected 'generator <name> : <degree>'", ln, col)
            name, deg = m.group(1), int(m.group(2))
            if deg < 1:
                raise ParseError("generator degree must be positive", ln, col + stripped.index(m.group(2)))
            if name in seen:
                raise ParseError(f"generator {name!r} declared twice", ln, col)
            seen.add(name)
            doc.generators.append((name, deg, ln))
        elif head == "d":
            m = re.fullmatch(r"d\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)", stripped)
            if not m:
                raise ParseError("expected 'd <name> = <expr>'", ln, col)
            expr_col = col + m.start(2)
            _tokenize(m.group(2), ln, expr_col)
            doc.differentials.append((m.group(1), m.group(2), ln, expr_col))
        else:
            raise ParseError(f"unknown statement {head!r}", ln, col)
    return doc


def build_presentation(doc: PresentationDocument) -> DGAPresentation:
    from .blowup import build_neighborhood

    base = None
    blowups = []
    for name, args, ln in doc.presets:
        if name == "blowup":
            blowups.append((args, ln))
            continue
        p = _preset(name, args, ln)
        base = p if base is None else tensor_product(base, p)
    gens = list(base.generators) if base is not None else []
    taken = {g.name for g in gens}
    for name, deg, ln in doc.generators:
        if name in taken:
            raise ParseError(f"generator {name!r} clashes with a preset generator", ln, 1)
        gens.append(GeneratorSpec(name, deg))
    tmp = DGAPresentation(gens)
    diffs = {}
    if base is not None:
        diffs.update(base.differentials)
    for name, expr, ln, ecol in doc.differentials:
        if name not in tmp.algebra.index:
            raise ParseError(f"differential for unknown generator {name!r}", ln, 1)
        if name in diffs and base is not None and name in base.algebra.index:
            raise ParseError(f"generator {name!r} comes from a preset; its differential is fixed", ln, 1)
        diffs[name] = parse_element(expr, tmp.algebra, ln, ecol)
    label = base.name if base is not None and not doc.generators else None
    p = DGAPresentation(gens, diffs, name=label)
    for args, ln in blowups:
        if not args:
            raise ParseError("preset blowup takes m and optional chern classes", ln, 1)
        try:
            m = int(args[0])
        except ValueError:
            raise ParseError("blowup m must be an integer", ln, 1)
        chern = [None if a == "0" else parse_element(a, p.algebra, ln) for a in args[1:]]
        p = build_neighborhood(p, m, chern).presentation
    return p


def parse_presentation(text: str) -> DGAPresentation:
    return build_presentation(parse(text))


def render(p: DGAPresentation) -> str:
    """Canonical document: generators in declaration order, then nonzero differentials."""
    lines = [f"generator {g.name} : {g.degree}" for g in p.generators]
    for g in p.generators:
        e = p.differentials[g.name]
        if e:
            lines.append(f"d {g.name} = {e}")
    return "\n".join(lines) + ("\n" if lines else "")


# --- certificates ---------------------------------------------------------

def class_matrix_from_text(p: DGAPresentation, text: str):
    from .massey import ClassMatrix

    rows = parse_matrix(text, p)
    degrees = []
    elems = []
    for row in rows:
        drow, erow = [], []
        for ent in row:
            e = ent.element
            if e and e.degree() is None:
                raise ParseError(f"entry {e} is not homogeneous")
            drow.append(ent.degree if ent.degree is not None else (e.degree() if e else None))
            erow.append(e)
        degrees.append(drow)
        elems.append(erow)
    if any(d is None for row in degrees for d in row):
        raise ParseError("zero entries of class matrices need an explicit degree, as in 0@1")
    for row, drow in zip(elems, degrees):
        for e, d in zip(row, drow):
            if e and p.d(e):
                raise ParseError(f"class entry {e} is not closed")
    return ClassMatrix.from_elements(p, elems, degrees=degrees)


def class_matrix_to_text(p: DGAPresentation, V) -> str:
    rows = []
    for row in V.entries:
        cur = []
        for c in row:
            e = p.rep(c)
            cur.append(str(e) if e else f"0@{c.degree}")
        rows.append(cur)
    if len(rows) == 1 and len(rows[0]) == 1:
        return rows[0][0]
    return "[" + "; ".join(", ".join(r) for r in rows) + "]"


def element_matrix_from_text(p: DGAPresentation, text: str):
    from .massey import EMatrix

    return EMatrix([[ent.element for ent in row] for row in parse_matrix(text, p)])


def system_to_json(system) -> dict:
    return {f"{i},{j}": render_matrix(X.entries) for (i, j), X in sorted(system.blocks.items())}


def system_from_json(p: DGAPresentation, arity: int, blocks: dict):
    from .massey import DefiningSystem

    out = {}
    for key, text in blocks.items():
        i, j = (int(s) for s in key.split(","))
        out[(i, j)] = element_matrix_from_text(p, text)
    return DefiningSystem(arity, out)


@dataclass
class Certificate:
    presentation: DGAPresentation
    document: str
    classes: list
    system: object
    claimed: object  # ClassMatrix
    convention: str
    description: str = ""

    def to_json(self) -> dict:
        p = self.presentation
        return {
            "description": self.description,
            "presentation": self.document,
            "classes": [class_matrix_to_text(p, V) for V in self.classes],
            "arity": self.system.arity,
            "system": system_to_json(self.system),
            "claimed": class_matrix_to_text(p, self.claimed),
            "convention": self.convention,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def load_certificate(data: dict | str) -> Certificate:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        doc = data["presentation"]
        p = parse_presentation(doc)
        classes = [class_matrix_from_text(p, t) for t in data["classes"]]
        system = system_from_json(p, int(data["arity"]), data["system"])
        claimed = class_matrix_from_text(p, data["claimed"])
        convention = data.get("convention", "classical")
    except KeyError as exc:
        raise ParseError(f"certificate is missing field {exc.args[0]!r}")
    if convention not in ("classical", "generalized"):
        raise ParseError(f"unknown convention {convention!r}")
    return Certificate(p, doc, classes, system, claimed, convention, data.get("description", ""))
