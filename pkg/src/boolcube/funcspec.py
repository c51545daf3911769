"""A tiny text language for naming cube functions on the command line.

Forms:
    dict(i)                         coordinate x_i
    maj(n)                          majority of n coordinates (n odd)
    parity(i,j,...)                 product of the listed coordinates
    and(n)                          +1 iff all n coordinates are +1
    poly{c*[i,j,...]; ...}          explicit multilinear polynomial in the
                                    raw coordinates; [] is the constant term
    table(hex)                      truth table: bit m of the hex integer
                                    gives the value at index m (1 -> +1);
                                    4*len(hex) must be a power of two >= 4
    randpoly(n,degree,density,seed) random polynomial: every non-empty
                                    subset of size <= degree is kept with
                                    probability `density`, standard normal
                                    coefficient, no constant term

Whitespace between tokens is ignored.  Parsing never throws anything but
FunctionSpecError, and the error carries the byte offset it occurred at.
parse -> canonical() -> parse is a fixed point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .cube import enumerate_points
from .fourier import BooleanFunction
from .rng import stream

__all__ = ["FunctionSpecError", "FunctionSpec", "parse_function"]

_NUMBER = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_INT = re.compile(r"[-+]?\d+")
_NAME = re.compile(r"[A-Za-z_]+")
_HEX = re.compile(r"[0-9a-fA-F]+")

_MAX_N = 16


class FunctionSpecError(ValueError):
    """Parse or validation failure, located by byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__("byte %d: %s" % (offset, message))
        self.offset = offset
        self.message = message


class _Cursor:
    def __init__(self, text: str):
        if not isinstance(text, str):
            raise FunctionSpecError("input must be text", 0)
        self.text = text
        self.i = 0

    def skip_ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def fail(self, message: str, offset: int | None = None):
        raise FunctionSpecError(message, self.i if offset is None else offset)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def take(self, ch: str):
        self.skip_ws()
        if self.i >= len(self.text) or self.text[self.i] != ch:
            self.fail("expected %r" % ch)
        self.i += 1

    def match(self, pattern: re.Pattern, what: str) -> str:
        self.skip_ws()
        m = pattern.match(self.text, self.i)
        if not m:
            self.fail("expected %s" % what)
        self.i = m.end()
        return m.group(0)

    def name(self) -> str:
        return self.match(_NAME, "function name")

    def integer(self, what: str = "integer") -> int:
        start = self.i
        tok = self.match(_INT, what)
        try:
            return int(tok)
        except ValueError:
            self.fail("bad %s %r" % (what, tok), start)

    def number(self, what: str = "number") -> float:
        start = self.i
        tok = self.match(_NUMBER, what)
        try:
            val = float(tok)
        except ValueError:
            self.fail("bad %s %r" % (what, tok), start)
        if not np.isfinite(val):
            self.fail("non-finite %s" % what, start)
        return val

    def end(self):
        self.skip_ws()
        if self.i < len(self.text):
            self.fail("unexpected trailing input")


def _index_list(cur: _Cursor, closing: str) -> tuple[int, ...]:
    """Comma-separated non-negative indices up to `closing`; may be empty."""
    out: list[int] = []
    if cur.peek() == closing:
        return tuple(out)
    while True:
        at = cur.i
        idx = cur.integer("coordinate index")
        if idx < 0:
            cur.fail("coordinate index must be non-negative", at)
        if idx >= _MAX_N:
            cur.fail("coordinate index %d exceeds the supported range" % idx, at)
        if idx in out:
            cur.fail("duplicate coordinate index %d" % idx, at)
        out.append(idx)
        if cur.peek() != ",":
            return tuple(out)
        cur.take(",")


@dataclass(frozen=True)
class FunctionSpec:
    """Parsed function description; `data` is the kind-specific payload."""

    kind: str
    data: tuple

    @property
    def n(self) -> int:
        if self.kind in ("maj", "and"):
            return self.data[0]
        if self.kind == "dict":
            return self.data[0] + 1
        if self.kind == "parity":
            return max(self.data) + 1
        if self.kind == "poly":
            top = max((max(ix) for ix, _ in self.data if ix), default=-1)
            return max(top + 1, 1)
        if self.kind == "table":
            return self.data[1]
        return self.data[0]  # randpoly

    def canonical(self) -> str:
        if self.kind == "dict":
            return "dict(%d)" % self.data[0]
        if self.kind in ("maj", "and"):
            return "%s(%d)" % (self.kind, self.data[0])
        if self.kind == "parity":
            return "parity(%s)" % ",".join(str(i) for i in sorted(self.data))
        if self.kind == "poly":
            terms = sorted(self.data, key=lambda t: (len(t[0]), t[0]))
            body = ";".join("%s*[%s]" % (repr(c), ",".join(str(i) for i in ix))
                            for ix, c in terms)
            return "poly{%s}" % body
        if self.kind == "table":
            return "table(%s)" % self.data[0]
        n, degree, density, seed = self.data
        return "randpoly(%d,%d,%s,%d)" % (n, degree, repr(density), seed)

    def _poly_terms(self) -> list[tuple[tuple[int, ...], float]]:
        if self.kind == "poly":
            return list(self.data)
        n, degree, density, seed = self.data
        rng = stream(seed)
        terms = []
        for mask in range(1, 1 << n):
            if mask.bit_count() > degree:
                continue
            keep = rng.random() < density
            coeff = rng.normal()
            if keep:
                members = tuple(i for i in range(n) if (mask >> i) & 1)
                terms.append((members, float(coeff)))
        return terms

    def build(self) -> BooleanFunction:
        """Materialize the truth table (indexing per cube conventions)."""
        n = self.n
        pts = enumerate_points(n).astype(np.float64)
        if self.kind == "dict":
            table = pts[:, self.data[0]]
        elif self.kind == "maj":
            table = np.sign(pts.sum(axis=1))
        elif self.kind == "and":
            table = np.where((pts > 0).all(axis=1), 1.0, -1.0)
        elif self.kind == "parity":
            table = pts[:, list(self.data)].prod(axis=1)
        elif self.kind in ("poly", "randpoly"):
            table = np.zeros(1 << n)
            for members, coeff in self._poly_terms():
                term = np.full(1 << n, coeff)
                for i in members:
                    term *= pts[:, i]
                table += term
        else:  # table
            val = int(self.data[0], 16)
            bits = (val >> np.arange(1 << n)) & 1
            table = 2.0 * bits - 1.0
        return BooleanFunction(n, table=table, name=self.canonical())


def parse_function(text: str) -> FunctionSpec:
    """Parse one function description; whitespace-insensitive."""
    cur = _Cursor(text)
    at = cur.i
    cur.skip_ws()
    at = cur.i
    kind = cur.name()
    if kind == "dict":
        cur.take("(")
        i_at = cur.i
        i = cur.integer("coordinate index")
        if not 0 <= i < _MAX_N:
            cur.fail("coordinate index out of range", i_at)
        cur.take(")")
        spec = FunctionSpec("dict", (i,))
    elif kind == "maj":
        cur.take("(")
        n_at = cur.i
        n = cur.integer("arity")
        if n < 1 or n > _MAX_N:
            cur.fail("arity out of range", n_at)
        if n % 2 == 0:
            cur.fail("majority requires odd arity", n_at)
        cur.take(")")
        spec = FunctionSpec("maj", (n,))
    elif kind == "and":
        cur.take("(")
        n_at = cur.i
        n = cur.integer("arity")
        if not 1 <= n <= _MAX_N:
            cur.fail("arity out of range", n_at)
        cur.take(")")
        spec = FunctionSpec("and", (n,))
    elif kind == "parity":
        cur.take("(")
        ix_at = cur.i
        members = _index_list(cur, ")")
        if not members:
            cur.fail("parity needs at least one coordinate", ix_at)
        cur.take(")")
        spec = FunctionSpec("parity", tuple(sorted(members)))
    elif kind == "poly":
        cur.take("{")
        terms: list[tuple[tuple[int, ...], float]] = []
        seen: set[tuple[int, ...]] = set()
        while True:
            if cur.peek() == "}" and not terms:
                cur.fail("poly needs at least one term")
            coeff = cur.number("coefficient")
            cur.take("*")
            cur.take("[")
            ix_at = cur.i
            members = tuple(sorted(_index_list(cur, "]")))
            cur.take("]")
            if members in seen:
                cur.fail("duplicate monomial", ix_at)
            seen.add(members)
            terms.append((members, coeff))
            if cur.peek() == ";":
                cur.take(";")
                if cur.peek() == "}":
                    break
                continue
            break
        cur.take("}")
        terms.sort(key=lambda t: (len(t[0]), t[0]))
        spec = FunctionSpec("poly", tuple(terms))
    elif kind == "table":
        cur.take("(")
        h_at = cur.i
        digits = cur.match(_HEX, "hex digits").lower()
        bits = 4 * len(digits)
        if bits & (bits - 1) or bits < 4:
            cur.fail("hex length must encode a power-of-two table of at "
                     "least 4 entries", h_at)
        n = bits.bit_length() - 1
        if n > _MAX_N:
            cur.fail("table too large", h_at)
        cur.take(")")
        spec = FunctionSpec("table", (digits, n))
    elif kind == "randpoly":
        cur.take("(")
        n_at = cur.i
        n = cur.integer("dimension")
        if not 1 <= n <= _MAX_N:
            cur.fail("dimension out of range", n_at)
        cur.take(",")
        d_at = cur.i
        degree = cur.integer("degree")
        if not 1 <= degree <= n:
            cur.fail("degree must lie in [1, dimension]", d_at)
        cur.take(",")
        dens_at = cur.i
        density = cur.number("density")
        if not 0.0 <= density <= 1.0:
            cur.fail("density must lie in [0, 1]", dens_at)
        cur.take(",")
        s_at = cur.i
        seed = cur.integer("seed")
        if seed < 0:
            cur.fail("seed must be non-negative", s_at)
        cur.take(")")
        spec = FunctionSpec("randpoly", (n, degree, density, seed))
    else:
        cur.fail("unknown function %r" % kind, at)
    cur.end()
    return spec
