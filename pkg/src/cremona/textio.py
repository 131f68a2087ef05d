"""Text round-trip for polynomials, rational functions, maps and points.

Grammar (whitespace-insensitive):

    POLY    := expression over + - * / ^ ( ) with integer literals and
               variable names; '/' is exact division, '^' integer power
    RATFN   := same grammar; result may have a nonconstant denominator
    PROJMAP := '[' POLY (':' POLY)+ ']'      variables x0..x{n}
    AFFMAP  := '(' RATFN (',' RATFN)* ')'    variables x1..xn, xn the
               distinguished fiber coordinate
    POINT   := '[' num (':' num)+ ']'  or  '(' num (',' num)* ')'
    JONQ    := 'jonq' '{' MAT2 ';' 'base' '=' AFFMAP '}'
    MAT2    := '[[' RATFN ',' RATFN '],[' RATFN ',' RATFN ']]'

Printers emit text the parsers accept; canonical forms round-trip exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from .errors import ParseError
from .fields import Field, QQ
from .mpoly import MPoly
from .ratfn import RatFn

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\]:,;{}=]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("num"):
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing RatFn values."""

    def __init__(self, text: str, varmap: dict[str, int], nvars: int,
                 field: Field = QQ):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.varmap = varmap
        self.nvars = nvars
        self.field = field

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}",
                             pos)

    def at_end(self) -> bool:
        return self.peek()[0] == "end"

    def parse_ratfn(self) -> RatFn:
        value = self.expr()
        if not self.at_end():
            kind, val, pos = self.peek()
            raise ParseError(f"trailing input {val!r}", pos)
        return value

    def expr(self) -> RatFn:
        value = self.term()
        while True:
            kind, val, _ = self.peek()
            if val == "+":
                self.next()
                value = value + self.term()
            elif val == "-":
                self.next()
                value = value - self.term()
            else:
                return value

    def term(self) -> RatFn:
        value = self.unary()
        while True:
            kind, val, pos = self.peek()
            if val == "*":
                self.next()
                value = value * self.unary()
            elif val == "/":
                self.next()
                divisor = self.unary()
                if divisor.is_zero:
                    raise ParseError("division by zero", pos)
                value = value / divisor
            else:
                return value

    def unary(self) -> RatFn:
        kind, val, _ = self.peek()
        if val == "-":
            self.next()
            return -self.unary()
        if val == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> RatFn:
        value = self.atom()
        kind, val, pos = self.peek()
        if val == "^":
            self.next()
            sign = 1
            kind, val, pos = self.next()
            if val == "-":
                sign = -1
                kind, val, pos = self.next()
            if kind != "num":
                raise ParseError("expected integer exponent", pos)
            k = int(val)
            if sign < 0:
                value = value.inv()
            result = RatFn.const(self.field, self.nvars, 1)
            for _ in range(k):
                result = result * value
            return result
        return value

    def atom(self) -> RatFn:
        kind, val, pos = self.next()
        if kind == "num":
            return RatFn.const(self.field, self.nvars, int(val))
        if kind == "name":
            if val not in self.varmap:
                raise ParseError(f"unknown variable {val!r}", pos)
            return RatFn.variable(self.field, self.nvars, self.varmap[val])
        if val == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"expected a value, found {val or 'end of input'!r}", pos)


def proj_varmap(n: int) -> dict[str, int]:
    return {f"x{i}": i for i in range(n + 1)}


def affine_varmap(n: int, with_t: bool = False) -> dict[str, int]:
    vm = {f"x{i + 1}": i for i in range(n)}
    if with_t:
        vm["t"] = n
    return vm


def parse_ratfn(text: str, varmap: dict[str, int], nvars: int,
                field: Field = QQ) -> RatFn:
    return _Parser(text, varmap, nvars, field).parse_ratfn()


def parse_poly(text: str, varmap: dict[str, int], nvars: int,
               field: Field = QQ) -> MPoly:
    r = parse_ratfn(text, varmap, nvars, field)
    if not r.is_polynomial():
        raise ParseError(f"expected a polynomial, denominator is {r.den}")
    return r.num.scaled(field.inv(r.den.constant_value()))


def _split_top(text: str, sep: str, opener: str, closer: str) -> list[str]:
    """Split on sep at nesting depth zero w.r.t. all bracket pairs."""
    depth = 0
    parts = []
    current = []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def _strip_delims(text: str, opener: str, closer: str, what: str) -> str:
    text = text.strip()
    if not text.startswith(opener) or not text.endswith(closer):
        raise ParseError(f"{what} must be enclosed in {opener}...{closer}")
    return text[1:-1]


def parse_proj_map(text: str, field: Field = QQ):
    from .maps import ProjMap

    inner = _strip_delims(text, "[", "]", "projective map")
    parts = _split_top(inner, ":", "[", "]")
    if len(parts) < 2:
        raise ParseError("projective map needs at least two components")
    n = len(parts) - 1
    vm = proj_varmap(n)
    comps = [parse_poly(part, vm, n + 1, field) for part in parts]
    return ProjMap.make(comps)


def parse_affine_map(text: str, field: Field = QQ):
    from .maps import AffineMap

    inner = _strip_delims(text, "(", ")", "affine map")
    parts = _split_top(inner, ",", "(", ")")
    n = len(parts)
    vm = affine_varmap(n)
    comps = [parse_ratfn(part, vm, n, field) for part in parts]
    return AffineMap.make(comps)


def parse_map(text: str, field: Field = QQ):
    """Dispatch on the leading delimiter: '[' projective, '(' affine."""
    stripped = text.strip()
    if stripped.startswith("["):
        return parse_proj_map(stripped, field)
    if stripped.startswith("("):
        return parse_affine_map(stripped, field)
    if stripped.startswith("jonq"):
        return parse_jonq(stripped, field)
    raise ParseError("expected '[', '(' or 'jonq' to start a map")


def parse_point(text: str, field: Field = QQ):
    from .maps import ProjPoint

    stripped = text.strip()
    if stripped.startswith("["):
        inner = _strip_delims(stripped, "[", "]", "projective point")
        parts = _split_top(inner, ":", "[", "]")
        coords = [_parse_number(part, field) for part in parts]
        return ProjPoint.make(field, coords)
    inner = _strip_delims(stripped, "(", ")", "affine point")
    parts = _split_top(inner, ",", "(", ")")
    return tuple(_parse_number(part, field) for part in parts)


def _parse_number(text: str, field: Field):
    r = parse_ratfn(text, {}, 1, field)
    if not r.is_constant:
        raise ParseError(f"expected a number, got {text.strip()!r}")
    return r.constant_value()


def parse_mat2(text: str, field: Field = QQ, nvars: Optional[int] = None):
    from .jonquieres import Mat2K

    stripped = text.strip()
    if nvars is None:
        indices = [int(m.group(1)) for m in re.finditer(r"x(\d+)", stripped)]
        nvars = max(indices) if indices else 1
    inner = _strip_delims(stripped, "[", "]", "matrix")
    rows = _split_top(inner, ",", "[", "]")
    if len(rows) != 2:
        raise ParseError("matrix must have exactly two rows")
    vm = affine_varmap(nvars)
    entries = []
    for row in rows:
        row_inner = _strip_delims(row, "[", "]", "matrix row")
        cells = _split_top(row_inner, ",", "[", "]")
        if len(cells) != 2:
            raise ParseError("matrix row must have exactly two entries")
        entries.append(tuple(parse_ratfn(c, vm, nvars, field) for c in cells))
    return Mat2K.make(tuple(entries))


def parse_jonq(text: str, field: Field = QQ):
    from .jonquieres import JonqElt

    stripped = text.strip()
    if not stripped.startswith("jonq"):
        raise ParseError("de Jonquieres element must start with 'jonq'")
    inner = _strip_delims(stripped[4:], "{", "}", "jonq body")
    parts = _split_top(inner, ";", "{", "}")
    if len(parts) != 2:
        raise ParseError("jonq body must be 'matrix ; base=(...)'")
    base_part = parts[1].strip()
    if not base_part.startswith("base"):
        raise ParseError("second jonq field must be 'base=...'")
    eq = base_part.find("=")
    if eq < 0:
        raise ParseError("missing '=' after 'base'")
    base = parse_affine_map(base_part[eq + 1:], field)
    fiber = parse_mat2(parts[0], field, nvars=base.n)
    return JonqElt.make(fiber, base)


# -- printing --------------------------------------------------------------


def format_scalar(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _default_names(nvars: int) -> list[str]:
    return [f"x{i}" for i in range(nvars)]


def format_poly(p: MPoly, names: Optional[list[str]] = None) -> str:
    if p.is_zero:
        return "0"
    names = names or _default_names(p.nvars)
    pieces = []
    for e, c in p.sorted_terms():
        mono = "*".join(
            names[v] if k == 1 else f"{names[v]}^{k}"
            for v, k in enumerate(e)
            if k
        )
        if isinstance(c, Fraction):
            negative = c < 0
            mag = -c if negative else c
        else:
            negative = False
            mag = c
        if not mono:
            body = format_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_scalar(mag)}*{mono}"
        pieces.append(("-" if negative else "+", body))
    sign, body = pieces[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def format_ratfn(r: RatFn, names: Optional[list[str]] = None) -> str:
    if r.den.is_constant:
        return format_poly(r.num, names)
    num = format_poly(r.num, names)
    den = format_poly(r.den, names)
    return f"({num})/({den})"


def format_proj_map(f, names: Optional[list[str]] = None) -> str:
    names = names or _default_names(f.n + 1)
    return "[" + " : ".join(format_poly(c, names) for c in f.components) + "]"


def format_affine_map(f, names: Optional[list[str]] = None) -> str:
    names = names or [f"x{i + 1}" for i in range(f.n)]
    return "(" + ", ".join(format_ratfn(c, names) for c in f.components) + ")"


def format_point(p) -> str:
    from .maps import ProjPoint

    if isinstance(p, ProjPoint):
        return "[" + " : ".join(format_scalar(c) for c in p.coords) + "]"
    return "(" + ", ".join(format_scalar(c) for c in p) + ")"


def format_mat2(m, names: Optional[list[str]] = None) -> str:
    names = names or [f"x{i + 1}" for i in range(m.nvars)]
    rows = []
    for row in m.entries:
        rows.append("[" + ",".join(format_ratfn(e, names) for e in row) + "]")
    return "[" + ",".join(rows) + "]"


def format_jonq(e) -> str:
    return f"jonq{{{format_mat2(e.fiber)}; base={format_affine_map(e.base)}}}"
