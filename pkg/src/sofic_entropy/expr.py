"""Text grammar for groups, ring elements, matrices and ladders.

Ring elements::

    expr   := ""  |  term ("+" term)*
    term   := [coef] factor*          (juxtaposition multiplies; "*" optional)
    factor := NAME ["^" INT]  |  "1"
    NAME   := generator letter (t; u v w ...; a b c ...; group-specific)
              | "g" DIGITS      (finite-group table index)

Coefficients are decimal residues in [0, q).  Matrices separate rows by ";"
and entries by ",".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .field import FieldSpec
from .group import (
    FinitePermGroup,
    FreeGroup,
    Group,
    GroupRingElem,
    GroupRingMatrix,
    IntegerLattice,
    cyclic_group,
    dihedral_group,
    symmetric_group,
)


class ExpressionError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        self.text, self.pos = text, pos
        super().__init__(f"{msg} at column {pos + 1} of {text!r}")


def parse_group(text: str) -> Group:
    """``Z``, ``Z^r``, ``free:k``, ``finite:Z/n``, ``finite:S<m>``, ``finite:D<n>``."""
    t = text.strip().replace(" ", "")
    if m := re.fullmatch(r"Z(?:\^?(\d+))?", t):
        return IntegerLattice(int(m.group(1) or 1))
    if m := re.fullmatch(r"(?:free:|free\(|F)(\d+)\)?", t):
        return FreeGroup(int(m.group(1)))
    if m := re.fullmatch(r"finite:Z/(\d+)", t):
        return cyclic_group(int(m.group(1)))
    if m := re.fullmatch(r"finite:S(\d+)", t):
        return symmetric_group(int(m.group(1)))
    if m := re.fullmatch(r"finite:D(\d+)", t):
        return dihedral_group(int(m.group(1)))
    raise ValueError(f"unknown group expression {text!r}")


def format_group(g: Group) -> str:
    if isinstance(g, IntegerLattice):
        return "Z" if g.rank == 1 else f"Z^{g.rank}"
    if isinstance(g, FreeGroup):
        return f"free:{g.rank}"
    if isinstance(g, FinitePermGroup) and g.label:
        return f"finite:{g.label}"
    return str(g)


@dataclass
class _Lexer:
    text: str
    pos: int = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, msg: str) -> ExpressionError:
        return ExpressionError(self.text, self.pos, msg)

    def integer(self, signed: bool) -> int:
        self.skip()
        m = re.compile(r"-?\d+" if signed else r"\d+").match(self.text, self.pos)
        if not m:
            raise self.error("malformed exponent" if signed else "expected an integer")
        self.pos = m.end()
        return int(m.group())


def _factor(lex: _Lexer, group: Group):
    """Parse one generator power; returns a group element."""
    lex.skip()
    text, pos = lex.text, lex.pos
    m = re.compile(r"g(\d+)").match(text, pos)
    if m and isinstance(group, FinitePermGroup) and "g" not in group.generator_names:
        idx = int(m.group(1))
        if idx >= group.order:
            raise lex.error(f"element index g{idx} outside a group of order {group.order}")
        lex.pos = m.end()
        base = idx
    else:
        ch = text[pos]
        if ch not in group.generator_names:
            raise lex.error(f"unknown generator {ch!r} for {format_group(group)}")
        lex.pos += 1
        base = group.gen(group.generator_names.index(ch))
    if lex.peek() == "^":
        lex.pos += 1
        k = lex.integer(signed=True)
        return group.power(base, k) if isinstance(group, FinitePermGroup) else _power(group, base, k)
    return base


def _power(group: Group, base, k: int):
    if isinstance(group, IntegerLattice):
        return tuple(x * k for x in base)
    return group.power(base, k)


def parse_ring_expression(text: str, group: Group, field: FieldSpec) -> GroupRingElem:
    """Parse a ring element; the empty string is zero."""
    lex = _Lexer(text)
    terms = []
    if lex.peek() == "":
        return GroupRingElem.zero(field, group)
    while True:
        lex.skip()
        start = lex.pos
        coef = None
        word = group.identity()
        m = re.compile(r"\d+").match(text, lex.pos)
        if m:
            coef = int(m.group())
            if coef >= field.p:
                raise lex.error(f"coefficient {coef} is not a residue mod {field.p}")
            lex.pos = m.end()
        nf = 0
        while True:
            c = lex.peek()
            if c == "*":
                lex.pos += 1
                continue
            if c.isalpha():
                word = group.mul(word, _factor(lex, group))
                nf += 1
                continue
            break
        if coef is None and nf == 0:
            lex.pos = max(lex.pos, start)
            raise lex.error("expected a term")
        terms.append((word, 1 if coef is None else coef))
        c = lex.peek()
        if c == "":
            break
        if c != "+":
            raise lex.error(f"unexpected {c!r}")
        lex.pos += 1
    return GroupRingElem(field, group, tuple(terms))


def parse_element(text: str, group: Group):
    """A single group element written as a monomial, e.g. ``t^2`` or ``ab^-1``."""
    f = parse_ring_expression(text, group, FieldSpec(2))
    if len(f.terms) != 1 or f.terms[0][1] != 1:
        raise ExpressionError(text, 0, "expected a single group element")
    return f.terms[0][0]


def parse_matrix(text: str, group: Group, field: FieldSpec, n: int | None = None) -> GroupRingMatrix:
    """Rows separated by ``;``, entries by ``,``.  Blank text is the 0 x n matrix."""
    if not text.strip():
        if n is None:
            n = 1
        return GroupRingMatrix(field, group, 0, n, ())
    rows = [[parse_ring_expression(e, group, field) for e in row.split(",")] for row in text.split(";")]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"ragged matrix {text!r}")
    if n is not None and widths != {n}:
        raise ValueError(f"matrix {text!r} does not have {n} columns")
    return GroupRingMatrix.from_rows(rows, field, group)


def format_matrix(f: GroupRingMatrix) -> str:
    return " ; ".join(", ".join(str(e) for e in r) for r in f.entries)


def parse_int_list(text: str) -> list[int]:
    """``4..64``, ``4..64:4``, ``64..4096:x2`` or ``4,8,16``."""
    t = text.strip()
    if m := re.fullmatch(r"(\d+)\.\.(\d+)(?::(x?)(\d+))?", t):
        lo, hi = int(m.group(1)), int(m.group(2))
        geometric, step = m.group(3) == "x", int(m.group(4) or 1)
        if step < 1 or (geometric and step < 2) or lo > hi:
            raise ValueError(f"bad range {text!r}")
        out = []
        x = lo
        while x <= hi:
            out.append(x)
            x = x * step if geometric else x + step
        return out
    try:
        return [int(x) for x in t.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"bad integer list {text!r}") from None


def parse_ladder_spec(text: str) -> tuple[str, list[int]]:
    """``N=...`` (torus sides) or ``d=...`` (degrees)."""
    m = re.fullmatch(r"\s*([Nd])\s*=\s*(.+)", text)
    if not m:
        raise ValueError(f"ladder must look like N=4..64 or d=50,100; got {text!r}")
    values = parse_int_list(m.group(2))
    if not values:
        raise ValueError(f"empty ladder {text!r}")
    return m.group(1), values
