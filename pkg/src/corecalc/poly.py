"""Exact sparse multivariate polynomial arithmetic over QQ and prime fields.

Monomials are dense exponent tuples; polynomials are canonical sorted term
lists with nonzero coefficients. Everything is immutable and exact: rationals
are `fractions.Fraction` (always in lowest terms), prime-field elements are
ints in [0, p). No floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations

from .errors import DimensionBoundError, PreconditionError, RingMismatchError, ScriptError

Monomial = tuple[int, ...]

LT, EQ, GT = -1, 0, 1

MAX_RING_DIMENSION = 8


# ---------------------------------------------------------------------------
# coefficient fields


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class RationalField:
    """The rationals; coefficients are Fractions in lowest terms."""

    characteristic = 0
    name = "QQ"

    def coerce(self, x) -> Fraction:
        return Fraction(x)

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        return a / b

    def inv(self, a):
        return 1 / Fraction(a)

    def split_sign(self, a) -> tuple[bool, Fraction]:
        return (a < 0, abs(a))

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """Integers mod p for prime p; elements are ints in [0, p)."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"Fp({p})"

    def coerce(self, x) -> int:
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise PreconditionError(f"denominator divisible by {self.p}")
            return x.numerator * pow(den, -1, self.p) % self.p
        return int(x) % self.p

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def div(self, a, b):
        return a * pow(b, -1, self.p) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def split_sign(self, a) -> tuple[bool, int]:
        return (False, a)

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return self.name


QQ = RationalField()


# ---------------------------------------------------------------------------
# monomials (plain exponent tuples) and monomial orders


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_div(a: Monomial, b: Monomial) -> Monomial | None:
    """a / b, or None when b does not divide a."""
    q = tuple(x - y for x, y in zip(a, b))
    return q if all(e >= 0 for e in q) else None


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_degree(a: Monomial) -> int:
    return sum(a)


def _grevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order: total, multiplicative, refining divisibility.

    kind is one of "grevlex", "lex", "block"; a block order compares the
    first `block` variables grevlex-first, which makes it an elimination
    order for that leading block.
    """

    kind: str
    block: int = 0

    def key(self, m: Monomial):
        if self.kind == "grevlex":
            return _grevlex_key(m)
        if self.kind == "lex":
            return m
        k = self.block
        return (_grevlex_key(m[:k]), _grevlex_key(m[k:]))

    def __str__(self):
        if self.kind == "block":
            return f"block({self.block})"
        return self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(k: int) -> MonomialOrder:
    if k < 1:
        raise PreconditionError("elimination block must have at least one variable")
    return MonomialOrder("block", k)


def compare(a: Monomial, b: Monomial, order: MonomialOrder = GREVLEX) -> int:
    """Compare two monomials; returns LT, EQ or GT."""
    if len(a) != len(b):
        raise RingMismatchError("monomials of different dimensions")
    ka, kb = order.key(a), order.key(b)
    return LT if ka < kb else (GT if ka > kb else EQ)


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class RingDescriptor:
    """A polynomial ring k[x_1..x_d] with k = QQ or a prime field."""

    variables: tuple[str, ...]
    field: RationalField | PrimeField = QQ

    def __post_init__(self):
        if not (1 <= len(self.variables) <= MAX_RING_DIMENSION):
            raise DimensionBoundError(
                f"ring dimension must be in 1..{MAX_RING_DIMENSION}"
            )
        if len(set(self.variables)) != len(self.variables):
            raise PreconditionError("variable names must be distinct")
        for v in self.variables:
            if not v.isidentifier():
                raise PreconditionError(f"bad variable name {v!r}")

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def zero_monomial(self) -> Monomial:
        return (0,) * self.dimension

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field.coerce(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, ((self.zero_monomial(), c),))

    def variable(self, i: int) -> "Polynomial":
        e = [0] * self.dimension
        e[i] = 1
        return self.term(tuple(e), 1)

    def term(self, m: Monomial, c) -> "Polynomial":
        c = self.field.coerce(c)
        if len(m) != self.dimension:
            raise RingMismatchError("exponent vector has wrong length")
        if any(e < 0 for e in m):
            raise PreconditionError("negative exponent")
        if c == 0:
            return self.zero()
        return Polynomial(self, ((m, c),))

    def from_terms(self, items) -> "Polynomial":
        acc: dict[Monomial, object] = {}
        F = self.field
        for m, c in items:
            c = F.coerce(c)
            if len(m) != self.dimension:
                raise RingMismatchError("exponent vector has wrong length")
            s = F.add(acc.get(m, F.zero()), c)
            if s == 0:
                acc.pop(m, None)
            else:
                acc[m] = s
        return Polynomial(self, _canonical(acc))

    def from_string(self, text: str) -> "Polynomial":
        return parse_polynomial(self, text)

    def __str__(self):
        return f"{self.field.name}[{','.join(self.variables)}]"


def _canonical(terms: dict) -> tuple:
    return tuple(sorted(terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True))


class Polynomial:
    """Immutable sparse polynomial; terms stored descending in grevlex."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingDescriptor, terms: tuple):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- predicates and views ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or self.terms[0][0] == self.ring.zero_monomial()

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(monomial_degree(m) for m, _ in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {monomial_degree(m) for m, _ in self.terms}
        return len(degs) <= 1

    def leading_term(self, order: MonomialOrder = GREVLEX):
        """(monomial, coefficient) maximal under `order`; error on zero."""
        if not self.terms:
            raise PreconditionError("zero polynomial has no leading term")
        if order.kind == "grevlex":
            return self.terms[0]
        return max(self.terms, key=lambda t: order.key(t[0]))

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> Monomial:
        return self.leading_term(order)[0]

    def coefficient(self, m: Monomial):
        for mm, c in self.terms:
            if mm == m:
                return c
        return self.ring.field.zero()

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError("polynomials from different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        self._check(other)
        F = self.ring.field
        acc = dict(self.terms)
        for m, c in other.terms:
            s = F.add(acc.get(m, F.zero()), c)
            if s == 0:
                acc.pop(m, None)
            else:
                acc[m] = s
        return Polynomial(self.ring, _canonical(acc))

    def __neg__(self):
        F = self.ring.field
        return Polynomial(self.ring, tuple((m, F.neg(c)) for m, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        F = self.ring.field
        acc: dict[Monomial, object] = {}
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                m = monomial_mul(ma, mb)
                s = F.add(acc.get(m, F.zero()), F.mul(ca, cb))
                if s == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = s
        return Polynomial(self.ring, _canonical(acc))

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        F = self.ring.field
        c = F.coerce(c)
        if c == 0:
            return self.ring.zero()
        return Polynomial(self.ring, tuple((m, F.mul(cc, c)) for m, cc in self.terms))

    def __pow__(self, k: int):
        if k < 0:
            raise PreconditionError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return result

    def mul_monomial(self, m: Monomial) -> "Polynomial":
        return Polynomial(self.ring, tuple((monomial_mul(mm, m), c) for mm, c in self.terms))

    def evaluate(self, point):
        """Exact evaluation at a point (one field element per variable)."""
        if len(point) != self.ring.dimension:
            raise RingMismatchError("wrong number of coordinates")
        F = self.ring.field
        point = [F.coerce(x) for x in point]
        total = F.zero()
        for m, c in self.terms:
            v = c
            for x, e in zip(point, m):
                if e:
                    v = F.mul(v, x**e)
            total = F.add(total, v)
        return total

    # -- identity ------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.terms))
        return self._hash

    def text(self, order: MonomialOrder = GREVLEX) -> str:
        return format_polynomial(self, order)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"<{self.text()}>"


# ---------------------------------------------------------------------------
# canonical text form: terms descending in the active order, `^` powers,
# `*` products (optional between symbols on input), e.g. "x^2*y - 3/2*y^3"


def format_polynomial(f: Polynomial, order: MonomialOrder = GREVLEX) -> str:
    if f.is_zero():
        return "0"
    ring = f.ring
    F = ring.field
    terms = sorted(f.terms, key=lambda t: order.key(t[0]), reverse=True)
    pieces = []
    for i, (m, c) in enumerate(terms):
        neg, a = F.split_sign(c)
        factors = [
            v if e == 1 else f"{v}^{e}"
            for v, e in zip(ring.variables, m)
            if e
        ]
        if not factors:
            body = F.format(a)
        elif a == F.one():
            body = "*".join(factors)
        else:
            body = "*".join([F.format(a)] + factors)
        if i == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


class _Tokens:
    """Single-line tokenizer for the polynomial grammar."""

    def __init__(self, text: str, line: int = 1, col0: int = 0):
        self.text = text
        self.line = line
        self.col0 = col0
        self.pos = 0
        self.toks: list[tuple[str, str, int]] = []  # (kind, value, col)
        self._scan()
        self.i = 0

    def _scan(self):
        t, n = self.text, len(self.text)
        i = 0
        while i < n:
            ch = t[i]
            if ch in " \t":
                i += 1
                continue
            col = self.col0 + i + 1
            if ch.isdigit():
                j = i
                while j < n and t[j].isdigit():
                    j += 1
                self.toks.append(("int", t[i:j], col))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                self.toks.append(("ident", t[i:j], col))
                i = j
            elif ch in "^*+-/,":
                self.toks.append((ch, ch, col))
                i += 1
            else:
                raise ScriptError(f"unexpected character {ch!r}", self.line, col)
        self.toks.append(("end", "", self.col0 + n + 1))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, expected: str):
        _, _, col = self.peek()
        raise ScriptError(f"expected {expected}", self.line, col)


def _parse_poly(tokens: _Tokens, ring: RingDescriptor) -> Polynomial:
    result = ring.zero()
    first = True
    while True:
        kind, _, _ = tokens.peek()
        if first:
            sign = 1
            if kind == "-":
                tokens.next()
                sign = -1
            elif kind == "+":
                tokens.next()
        else:
            if kind == "+":
                tokens.next()
                sign = 1
            elif kind == "-":
                tokens.next()
                sign = -1
            else:
                break
        result = result + _parse_term(tokens, ring).scale(sign)
        first = False
    return result


def _parse_term(tokens: _Tokens, ring: RingDescriptor) -> Polynomial:
    coeff = Fraction(1)
    exps = [0] * ring.dimension
    seen = False
    while True:
        kind, val, col = tokens.peek()
        if kind == "int":
            tokens.next()
            num = int(val)
            den = 1
            if tokens.peek()[0] == "/":
                tokens.next()
                k2, v2, _ = tokens.peek()
                if k2 != "int":
                    tokens.error("integer denominator")
                tokens.next()
                den = int(v2)
                if den == 0:
                    raise ScriptError("zero denominator", tokens.line, col)
            coeff *= Fraction(num, den)
        elif kind == "ident":
            tokens.next()
            if val not in ring.variables:
                raise ScriptError(f"unknown variable {val!r}", tokens.line, col)
            e = 1
            if tokens.peek()[0] == "^":
                tokens.next()
                k2, v2, _ = tokens.peek()
                if k2 != "int":
                    tokens.error("integer exponent")
                tokens.next()
                e = int(v2)
            exps[ring.variables.index(val)] += e
        else:
            if not seen:
                tokens.error("term")
            break
        seen = True
        if tokens.peek()[0] == "*":
            tokens.next()
            # a `*` must be followed by another factor
            if tokens.peek()[0] not in ("int", "ident"):
                tokens.error("term")
    return ring.term(tuple(exps), ring.field.coerce(coeff))


def parse_polynomial(
    ring: RingDescriptor, text: str, line: int = 1, col0: int = 0
) -> Polynomial:
    """Parse the canonical text form; raises ScriptError with position."""
    tokens = _Tokens(text, line, col0)
    p = _parse_poly(tokens, ring)
    if tokens.peek()[0] != "end":
        tokens.error("end of expression")
    return p


def parse_polynomial_list(
    ring: RingDescriptor, text: str, line: int = 1, col0: int = 0
) -> list[Polynomial]:
    """Parse a comma-separated list of polynomials."""
    tokens = _Tokens(text, line, col0)
    polys = [_parse_poly(tokens, ring)]
    while tokens.peek()[0] == ",":
        tokens.next()
        polys.append(_parse_poly(tokens, ring))
    if tokens.peek()[0] != "end":
        tokens.error("end of expression")
    return polys


# ---------------------------------------------------------------------------


def verify_power_identity(ring: RingDescriptor, t: int) -> bool:
    """Check the alternating power-sum expansion of t! X_1...X_t.

    Expands sum_{k=1..t} (-1)^(t-k) sum_{i_1<...<i_k} (X_{i_1}+...+X_{i_k})^t
    and compares it, as an exact polynomial, with t! X_1...X_t.
    """
    if t < 1:
        raise PreconditionError("t must be positive")
    if ring.field != QQ:
        raise PreconditionError("identity check requires rational coefficients")
    if t > ring.dimension:
        raise PreconditionError("too few variables")
    xs = [ring.variable(i) for i in range(t)]
    rhs = ring.zero()
    for k in range(1, t + 1):
        sign = (-1) ** (t - k)
        for subset in combinations(range(t), k):
            s = reduce(lambda a, b: a + b, (xs[i] for i in subset))
            rhs = rhs + (s**t).scale(sign)
    lhs = reduce(lambda a, b: a * b, xs).scale(math.factorial(t))
    return lhs == rhs
