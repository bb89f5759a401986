"""Exact sparse multivariate polynomial arithmetic over the rationals.

Everything downstream (Groebner bases, derivation operators, the verification
pipeline) is built on the single value type defined here: an immutable sparse
polynomial with arbitrary-precision rational coefficients over a fixed,
ordered variable table.

  VarTable      ordered variable names (index <-> name bijection), optional
                integer weights (used for weighted-degree bookkeeping)
  Monomial      exponent tuple, one entry per variable
  Polynomial    dict monomial -> nonzero coefficient (int or Fraction)
  orders        lex / grevlex / block(front, back) total orders on monomials

Coefficients are stored as plain ints whenever the value is integral and as
``fractions.Fraction`` otherwise; the two compare and hash equal, so term sets
are canonical either way.  The zero polynomial has an empty term dict.

Text syntax (parser and printer): ASCII identifiers, integer literals, the
operators + - * ^ and parentheses.  Implicit multiplication is not accepted.
The printer emits terms in descending order under the active monomial order,
so parse -> print -> parse round-trips to an identical term set.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

Coeff = Union[int, Fraction]
Exponents = tuple  # tuple[int, ...]


class PolyError(Exception):
    """Structural misuse of the polynomial layer (bad variable, table mismatch)."""


class DomainError(PolyError):
    """Operation undefined for the given inputs (e.g. resultant in an absent variable)."""


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    return c


class VarTable:
    """Fixed ordered list of variable names.

    The order is part of the algebra's identity: monomial orders, printers and
    the Sylvester construction all reference variable indices.  Tables are
    immutable; ``extend`` returns a new table.
    """

    __slots__ = ("names", "index", "weights")

    _NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

    def __init__(self, names: Sequence[str], weights: Optional[Sequence[int]] = None):
        names = list(names)
        if len(set(names)) != len(names):
            raise PolyError("duplicate variable names in table")
        for n in names:
            if not self._NAME_RE.match(n):
                raise PolyError(f"bad variable name {n!r}")
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(names)}
        if weights is None:
            self.weights = (1,) * len(names)
        else:
            if len(weights) != len(names):
                raise PolyError("weights length mismatch")
            self.weights = tuple(int(w) for w in weights)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarTable({list(self.names)!r})"

    def extend(self, extra: Sequence[str], weights: Optional[Sequence[int]] = None) -> "VarTable":
        w = list(self.weights) + list(weights if weights is not None else (1,) * len(extra))
        return VarTable(list(self.names) + list(extra), w)

    def zero_exp(self) -> Exponents:
        return (0,) * len(self.names)


# ---------------------------------------------------------------------------
# monomial orders
# ---------------------------------------------------------------------------

class MonomialOrder:
    """Total order on exponent tuples, exposed as a sort key for ``max``/``sorted``.

    kind is one of 'lex', 'grevlex', or 'block' (front variable set eliminated
    first, grevlex within each block).
    """

    def __init__(self, kind: str, key: Callable[[Exponents], tuple], tag: str):
        self.kind = kind
        self.key = key
        self.tag = tag  # stable textual identity, used for caches / reports

    def __repr__(self) -> str:
        return f"MonomialOrder({self.tag})"

    def __eq__(self, other) -> bool:
        return isinstance(other, MonomialOrder) and self.tag == other.tag

    def __hash__(self) -> int:
        return hash(self.tag)


def lex_order() -> MonomialOrder:
    return MonomialOrder("lex", lambda e: e, "lex")


def _grevlex_key(e: Exponents) -> tuple:
    return (sum(e), tuple(-x for x in reversed(e)))


def grevlex_order() -> MonomialOrder:
    return MonomialOrder("grevlex", _grevlex_key, "grevlex")


def block_order(table: VarTable, front: Iterable[str]) -> MonomialOrder:
    """Elimination order: compare the front block by grevlex, ties by grevlex
    on the back block.  Front variables are strictly larger than back ones."""
    front = list(front)
    for n in front:
        if n not in table:
            raise PolyError(f"unknown front variable {n!r}")
    fidx = tuple(sorted(table.index[n] for n in front))
    bidx = tuple(i for i in range(len(table)) if i not in set(fidx))

    def key(e: Exponents) -> tuple:
        fe = tuple(e[i] for i in fidx)
        be = tuple(e[i] for i in bidx)
        return (_grevlex_key(fe), _grevlex_key(be))

    return MonomialOrder("block", key, f"block({','.join(sorted(front))})")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Immutable sparse polynomial over a VarTable.

    ``terms`` maps exponent tuples to nonzero coefficients.  All arithmetic is
    exact; operands must share a table.
    """

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VarTable, terms: Mapping[Exponents, Coeff]):
        self.table = table
        clean = {}
        for m, c in terms.items():
            c = _norm_coeff(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
            if c == 0:
                continue
            if len(m) != len(table):
                raise PolyError("exponent tuple length does not match table")
            clean[m] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(table: VarTable) -> "Polynomial":
        return Polynomial(table, {})

    @staticmethod
    def const(table: VarTable, c: Coeff) -> "Polynomial":
        return Polynomial(table, {table.zero_exp(): c})

    @staticmethod
    def var(table: VarTable, name: str) -> "Polynomial":
        if name not in table:
            raise PolyError(f"unknown variable {name!r}")
        e = [0] * len(table)
        e[table.index[name]] = 1
        return Polynomial(table, {tuple(e): 1})

    # -- basic protocol ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "Polynomial") -> None:
        if self.table != other.table:
            raise PolyError("operands live over different variable tables")

    # -- ring operations -----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.table, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm_coeff(s)
            else:
                out.pop(m, None)
        return Polynomial(self.table, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.table, other)
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Polynomial.zero(self.table)
            return Polynomial(self.table, {m: _norm_coeff(c * other) for m, c in self.terms.items()})
        self._check(other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.table)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                mm = tuple(x + y for x, y in zip(ma, mb))
                s = out.get(mm, 0) + ca * cb
                if s:
                    out[mm] = s
                else:
                    del out[mm]
        return Polynomial(self.table, {m: _norm_coeff(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise PolyError("polynomial power wants a nonnegative integer exponent")
        result = Polynomial.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure queries ----------------------------------------------------

    def variables(self) -> set:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.table.names[i])
        return used

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def weighted_degree(self) -> int:
        if not self.terms:
            return 0
        w = self.table.weights
        return max(sum(e * wi for e, wi in zip(m, w)) for m in self.terms)

    def is_weighted_homogeneous(self) -> bool:
        if not self.terms:
            return True
        w = self.table.weights
        degs = {sum(e * wi for e, wi in zip(m, w)) for m in self.terms}
        return len(degs) == 1

    def degree_in(self, name: str) -> int:
        if name not in self.table:
            raise PolyError(f"unknown variable {name!r}")
        i = self.table.index[name]
        if not self.terms:
            return -1
        return max(m[i] for m in self.terms)

    def leading_term(self, order: MonomialOrder) -> tuple:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    def coeff_in(self, name: str, power: int) -> "Polynomial":
        """Coefficient of name**power, a polynomial in the remaining variables
        (still expressed over the full table)."""
        i = self.table.index[name]
        out = {}
        for m, c in self.terms.items():
            if m[i] == power:
                mm = list(m)
                mm[i] = 0
                out[tuple(mm)] = c
        return Polynomial(self.table, out)

    def as_univariate(self, name: str) -> dict:
        """Map power -> coefficient Polynomial for the given main variable."""
        i = self.table.index[name]
        out: dict = {}
        for m, c in self.terms.items():
            mm = list(m)
            p = mm[i]
            mm[i] = 0
            out.setdefault(p, {})[tuple(mm)] = c
        return {p: Polynomial(self.table, t) for p, t in out.items()}

    # -- calculus / substitution ----------------------------------------------

    def substitute(self, name: str, value: "Polynomial") -> "Polynomial":
        """Replace every occurrence of ``name`` by ``value`` (Horner in that
        variable), expanded and normalized."""
        if name not in self.table:
            raise PolyError(f"unknown variable {name!r}")
        if isinstance(value, (int, Fraction)):
            value = Polynomial.const(self.table, value)
        self._check(value)
        parts = self.as_univariate(name)
        if not parts:
            return self
        top = max(parts)
        acc = Polynomial.zero(self.table)
        for p in range(top, -1, -1):
            acc = acc * value
            if p in parts:
                acc = acc + parts[p]
        return acc

    def evaluate(self, assignment: Mapping[str, Coeff], modulus: Optional[int] = None):
        """Exact value at a rational point; with ``modulus`` the residue of an
        integer-coefficient evaluation mod an odd prime.

        Every variable occurring in the polynomial must be assigned.
        """
        for v in self.variables():
            if v not in assignment:
                raise PolyError(f"assignment misses variable {v!r}")
        idx = {self.table.index[v]: assignment[v] for v in self.variables()}
        if modulus is None:
            total = Fraction(0)
            for m, c in self.terms.items():
                t = Fraction(c)
                for i, val in idx.items():
                    if m[i]:
                        t *= Fraction(val) ** m[i]
                total += t
            return _norm_coeff(total)
        total = 0
        for m, c in self.terms.items():
            if isinstance(c, Fraction):
                t = c.numerator * pow(c.denominator, -1, modulus) % modulus
            else:
                t = c % modulus
            for i, val in idx.items():
                if m[i]:
                    t = t * pow(int(val) % modulus, m[i], modulus) % modulus
            total = (total + t) % modulus
        return total

    def partial(self, name: str) -> "Polynomial":
        """Formal partial derivative."""
        if name not in self.table:
            raise PolyError(f"unknown variable {name!r}")
        i = self.table.index[name]
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = _norm_coeff(c * m[i])
        return Polynomial(self.table, out)

    # -- content / primitive part ----------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer coefficients;
        0 for the zero polynomial.  Sign is carried by the primitive part."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            f = Fraction(c)
            num = math.gcd(num, abs(f.numerator))
            den = den * f.denominator // math.gcd(den, f.denominator)
        return Fraction(num, den)

    def primitive(self, order: Optional[MonomialOrder] = None) -> "Polynomial":
        """Content-free version of self with positive leading coefficient under
        ``order`` (default grevlex)."""
        if not self.terms:
            return self
        c = self.content()
        p = self * (1 / c)
        order = order or grevlex_order()
        _, lc = p.leading_term(order)
        if lc < 0:
            p = -p
        return p

    # -- division --------------------------------------------------------------

    def exact_divide(self, divisor: "Polynomial", order: Optional[MonomialOrder] = None) -> "Polynomial":
        """Exact multivariate division; raises DomainError if not divisible."""
        self._check(divisor)
        if divisor.is_zero():
            raise DomainError("division by zero polynomial")
        order = order or grevlex_order()
        dm, dc = divisor.leading_term(order)
        rem = self
        out: dict = {}
        while rem.terms:
            m, c = rem.leading_term(order)
            q = tuple(a - b for a, b in zip(m, dm))
            if any(e < 0 for e in q):
                raise DomainError("not exactly divisible")
            qc = _norm_coeff(Fraction(c, 1) / Fraction(dc, 1))
            out[q] = qc
            rem = rem - Polynomial(self.table, {q: qc}) * divisor
        return Polynomial(self.table, out)

    def divides(self, other: "Polynomial") -> bool:
        try:
            other.exact_divide(self)
            return True
        except DomainError:
            return False

    def pseudo_rem(self, divisor: "Polynomial", name: str) -> tuple:
        """Pseudo remainder in the main variable ``name``.

        Returns (mult, quo, rem) with  mult * self == quo * divisor + rem  and
        deg_name(rem) < deg_name(divisor); mult is a power of divisor's leading
        coefficient (a polynomial in the remaining variables).
        """
        n = divisor.degree_in(name)
        if n < 0:
            raise DomainError("pseudo-division by zero")
        lc_d = divisor.coeff_in(name, n)
        x = Polynomial.var(self.table, name)
        rem = self
        quo = Polynomial.zero(self.table)
        mult = Polynomial.const(self.table, 1)
        while rem.degree_in(name) >= n and not rem.is_zero():
            m = rem.degree_in(name)
            lc_r = rem.coeff_in(name, m)
            rem = lc_d * rem - lc_r * divisor * x ** (m - n)
            quo = lc_d * quo + lc_r * x ** (m - n)
            mult = mult * lc_d
        return mult, quo, rem

    # -- gcd ---------------------------------------------------------------------

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Polynomial gcd via a primitive subresultant-style remainder sequence,
        recursing on coefficient contents.  Result is primitive with positive
        leading coefficient (grevlex)."""
        self._check(other)
        return _poly_gcd(self, other).primitive()

    # -- printing / parsing --------------------------------------------------------

    def sorted_terms(self, order: Optional[MonomialOrder] = None):
        order = order or grevlex_order()
        return sorted(self.terms.items(), key=lambda kv: order.key(kv[0]), reverse=True)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"<poly {self.to_text()}>"

    def to_text(self, order: Optional[MonomialOrder] = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms(order):
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(self.table.names[i])
                elif e > 1:
                    factors.append(f"{self.table.names[i]}^{e}")
            mag = abs(Fraction(c))
            if not factors:
                body = _coeff_text(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([_coeff_text(mag)] + factors)
            sign = "-" if Fraction(c) < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _coeff_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    shared = sorted(a.variables() | b.variables(), key=lambda n: a.table.index[n])
    main = None
    for v in shared:
        if a.degree_in(v) > 0 or b.degree_in(v) > 0:
            main = v
            break
    if main is None:
        # both constants
        ca, cb = a.content(), b.content()
        g = Fraction(math.gcd(ca.numerator * cb.denominator, cb.numerator * ca.denominator),
                     ca.denominator * cb.denominator)
        return Polynomial.const(a.table, g)
    f, g = a, b
    if f.degree_in(main) < g.degree_in(main):
        f, g = g, f

    def cont(p: Polynomial) -> Polynomial:
        coeffs = list(p.as_univariate(main).values())
        acc = coeffs[0]
        for c in coeffs[1:]:
            acc = _poly_gcd(acc, c)
            if acc.total_degree() == 0 and not acc.is_zero():
                break
        return acc

    cf, cg = cont(f), cont(g)
    f = f.exact_divide(cf)
    g = g.exact_divide(cg)
    ccontent = _poly_gcd(cf, cg)
    while True:
        if g.degree_in(main) < 0 or g.is_zero():
            break
        _, _, r = f.pseudo_rem(g, main)
        if r.is_zero():
            f = g
            g = Polynomial.zero(a.table)
            break
        r = r.exact_divide(cont(r)) if r.degree_in(main) >= 0 else r
        if r.degree_in(main) <= 0:
            # nontrivial remainder free of the main variable: gcd has degree 0 in main
            f = Polynomial.const(a.table, 1)
            g = Polynomial.zero(a.table)
            break
        f, g = g, r
    result = f.primitive() if not f.is_zero() else f
    return result * ccontent


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def sylvester_matrix(p: Polynomial, q: Polynomial, name: str) -> list:
    """Sylvester matrix of p, q in the variable ``name``.

    Row convention: deg(q) rows of p's coefficients above deg(p) rows of q's,
    coefficients listed from the leading power down.
    """
    m = p.degree_in(name)
    n = q.degree_in(name)
    if m <= 0 or n <= 0:
        raise DomainError("resultant requires positive degree in the chosen variable")
    pc = p.as_univariate(name)
    qc = q.as_univariate(name)
    size = m + n
    zero = Polynomial.zero(p.table)
    rows = []
    for shift in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[shift + k] = pc.get(m - k, zero)
        rows.append(row)
    for shift in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[shift + k] = qc.get(n - k, zero)
        rows.append(row)
    return rows


def _bareiss_det(rows: list, table: VarTable) -> Polynomial:
    """Fraction-free Bareiss determinant of a square matrix of polynomials."""
    n = len(rows)
    a = [row[:] for row in rows]
    sign = 1
    prev = Polynomial.const(table, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            pivot = None
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    pivot = r
                    break
            if pivot is None:
                return Polynomial.zero(table)
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = num.exact_divide(prev)
            a[i][k] = Polynomial.zero(table)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant(p: Polynomial, q: Polynomial, name: str) -> Polynomial:
    """Determinant of the Sylvester matrix of p and q with respect to ``name``
    (fraction-free elimination; exactly the determinant, sign included)."""
    if p.table != q.table:
        raise PolyError("operands live over different variable tables")
    if name not in p.table:
        raise PolyError(f"unknown variable {name!r}")
    return _bareiss_det(sylvester_matrix(p, q, name), p.table)


def gcd_content(p: Polynomial, q: Optional[Polynomial] = None):
    """One argument: (integer-content Fraction, primitive part).
    Two arguments: their polynomial gcd (primitive, positive leading coeff)."""
    if q is None:
        return p.content(), p.primitive()
    return p.gcd(q)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))")


class ParseError(PolyError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.group("int") is not None:
            out.append(("int", int(m.group("int")), m.start("int")))
        elif m.group("name") is not None:
            out.append(("name", m.group("name"), m.start("name")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def parse_polynomial(text: str, table: VarTable) -> Polynomial:
    """Parse the documented text syntax over the given table."""
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def advance():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def parse_expr() -> Polynomial:
        kind, val, pos = peek()
        negate = False
        if kind == "op" and val in "+-":
            advance()
            negate = val == "-"
        acc = parse_term()
        if negate:
            acc = -acc
        while True:
            kind, val, pos = peek()
            if kind == "op" and val in "+-":
                advance()
                nxt = parse_term()
                acc = acc + (-nxt if val == "-" else nxt)
            else:
                return acc

    def parse_term() -> Polynomial:
        acc = parse_factor()
        while True:
            kind, val, pos = peek()
            if kind == "op" and val == "*":
                advance()
                acc = acc * parse_factor()
            elif kind in ("int", "name") or (kind == "op" and val == "("):
                raise ParseError("implicit multiplication is not allowed", pos)
            else:
                return acc

    def parse_factor() -> Polynomial:
        base = parse_base()
        kind, val, pos = peek()
        if kind == "op" and val == "^":
            advance()
            kind, val, pos = peek()
            if kind == "op" and val == "-":
                raise ParseError("negative exponent", pos)
            if kind != "int":
                raise ParseError("exponent must be an integer literal", pos)
            advance()
            return base ** val
        return base

    def parse_base() -> Polynomial:
        kind, val, pos = advance()
        if kind == "int":
            return Polynomial.const(table, val)
        if kind == "name":
            if val not in table:
                raise ParseError(f"unknown variable {val!r}", pos)
            return Polynomial.var(table, val)
        if kind == "op" and val == "(":
            inner = parse_expr()
            kind, val, pos = advance()
            if not (kind == "op" and val == ")"):
                raise ParseError("expected ')'", pos)
            return inner
        if kind == "op" and val == "-":
            return -parse_base()
        raise ParseError("expected a polynomial factor", pos)

    result = parse_expr()
    kind, val, pos = peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return result


# convenience: build several polys over one table from text
def parse_many(table: VarTable, *texts: str) -> list:
    return [parse_polynomial(t, table) for t in texts]
