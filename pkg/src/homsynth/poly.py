"""Variables and exact sparse polynomials.

Variable spellings::

    x[i,j]            homomorphism variable, i <= j (indices unordered)
    x[e=u-v][i,j]     colorful variable for edge u<v; i colors u, j colors v
    y[u-v]            auxiliary edge variable
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import EvaluationError, FormatError

MERSENNE_61 = (1 << 61) - 1

Number = Union[int, Fraction]


class Var(NamedTuple):
    kind: str  # "hom" | "colsub" | "aux"
    index: tuple[int, ...]

    def __str__(self):
        if self.kind == "hom":
            return "x[%d,%d]" % self.index
        if self.kind == "colsub":
            return "x[e=%d-%d][%d,%d]" % self.index
        return "y[%d-%d]" % self.index


def hom_var(i: int, j: int) -> Var:
    return Var("hom", (i, j) if i <= j else (j, i))


def colsub_var(u: int, v: int, i: int, j: int) -> Var:
    """Variable for edge {u,v} where u gets color i and v gets color j."""
    if u > v:
        u, v, i, j = v, u, j, i
    return Var("colsub", (u, v, i, j))


def aux_var(u: int, v: int) -> Var:
    return Var("aux", (u, v) if u <= v else (v, u))


_VAR_RE = re.compile(r"^(?:x\[(\d+),(\d+)\]|x\[e=(\d+)-(\d+)\]\[(\d+),(\d+)\]|y\[(\d+)-(\d+)\])$")


def parse_var(text: str) -> Var:
    m = _VAR_RE.match(text.strip())
    if not m:
        raise FormatError(f"unrecognized variable spelling {text!r}")
    g = [int(x) if x is not None else None for x in m.groups()]
    if g[0] is not None:
        return hom_var(g[0], g[1])
    if g[2] is not None:
        if g[2] == g[3]:
            raise FormatError(f"edge variable with a loop: {text!r}")
        return colsub_var(g[2], g[3], g[4], g[5])
    return aux_var(g[6], g[7])


def normalize_number(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


def parse_number(text: str) -> Number:
    try:
        return normalize_number(Fraction(str(text)))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad rational constant {text!r}") from None


def to_field(c: Number, modulus: int | None) -> Number:
    if modulus is None:
        return c
    if isinstance(c, Fraction):
        return c.numerator % modulus * pow(c.denominator, -1, modulus) % modulus
    return c % modulus


Monomial = tuple[Var, ...]


def _merge(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


class SparsePolynomial:
    """Map from sorted variable multisets to nonzero rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        self.terms: dict[Monomial, Number] = {}
        if terms:
            for mono, c in terms.items():
                self.add_term(tuple(sorted(mono)), c)

    @classmethod
    def constant(cls, c: Number) -> "SparsePolynomial":
        return cls({(): c}) if c else cls()

    @classmethod
    def variable(cls, v: Var) -> "SparsePolynomial":
        return cls({(v,): 1})

    def add_term(self, mono: Monomial, c: Number):
        if not c:
            return
        total = self.terms.get(mono, 0) + c
        if total:
            self.terms[mono] = normalize_number(total)
        else:
            self.terms.pop(mono, None)

    def copy(self) -> "SparsePolynomial":
        out = SparsePolynomial()
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        out = self.copy()
        for mono, c in other.terms.items():
            out.add_term(mono, c)
        return out

    def __mul__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        out = SparsePolynomial()
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out.add_term(_merge(m1, m2), c1 * c2)
        return out

    def scale(self, c: Number) -> "SparsePolynomial":
        out = SparsePolynomial()
        for mono, d in self.terms.items():
            out.add_term(mono, d * c)
        return out

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def coefficient(self, mono: Iterable[Var]) -> Number:
        return self.terms.get(tuple(sorted(mono)), 0)

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def variables(self) -> set[Var]:
        return {v for mono in self.terms for v in mono}

    def is_monotone(self) -> bool:
        return all(c > 0 for c in self.terms.values())

    def evaluate(self, point: Mapping[Var, Number], modulus: int | None = None) -> Number:
        total: Number = 0
        for mono, c in self.terms.items():
            val = to_field(c, modulus)
            for v in mono:
                if v not in point:
                    raise EvaluationError(f"variable {v} is unassigned")
                val = val * point[v]
                if modulus is not None:
                    val %= modulus
            total += val
        return total % modulus if modulus is not None else normalize_number(total)

    def dump(self) -> str:
        """One ``coeff monomial`` line per term, in canonical order."""
        lines = []
        for mono, c in self:
            lines.append(f"{c} {'*'.join(map(str, mono)) if mono else '1'}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse_dump(cls, text: str) -> "SparsePolynomial":
        out = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                coeff, mono = line.split()
            except ValueError:
                raise FormatError(f"line {lineno}: expected 'coeff monomial'") from None
            vars_ = () if mono == "1" else tuple(parse_var(v) for v in mono.split("*"))
            out.add_term(tuple(sorted(vars_)), parse_number(coeff))
        return out

    def __repr__(self):
        body = " + ".join(
            f"{c}*{'*'.join(map(str, m))}" if m else str(c) for m, c in self
        )
        return f"SparsePolynomial({body or '0'})"
