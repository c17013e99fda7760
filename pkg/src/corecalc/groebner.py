"""Buchberger engine and the ideal algebra built on it.

The kernel works on plain dicts {exponent tuple: integer coefficient}. Over
QQ it is fraction-free: polynomials are scaled to primitive integer form and
every reduction step multiplies through by the reducer's leading coefficient,
stripping integer content as it goes (Becker-Weispfenning style). Over a
prime field coefficients live in [0, p) and basis rows are kept monic.

Pair selection is the normal strategy (smallest lcm first); useless pairs
are pruned with the lcm-coprimality and chain criteria.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product

from .errors import (
    InternalError,
    PreconditionError,
    RingMismatchError,
)
from .poly import (
    GREVLEX,
    Monomial,
    MonomialOrder,
    Polynomial,
    PrimeField,
    RingDescriptor,
    block_order,
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
)

# ---------------------------------------------------------------------------
# arithmetic kernels


class _ZZKernel:
    """Fraction-free arithmetic for rings over QQ."""

    def to_internal(self, f: Polynomial):
        """Return (primitive integer dict, scale) with dict == scale * f."""
        if f.is_zero():
            return {}, Fraction(1)
        lam = math.lcm(*(c.denominator for _, c in f.terms))
        ints = {m: c.numerator * (lam // c.denominator) for m, c in f.terms}
        g = math.gcd(*ints.values())
        if g > 1:
            ints = {m: v // g for m, v in ints.items()}
        return ints, Fraction(lam, g)

    def normalize(self, W: dict, key) -> dict:
        """Primitive part with positive leading coefficient."""
        if not W:
            return W
        g = math.gcd(*W.values())
        if W[max(W, key=key)] < 0:
            g = -g
        if g != 1:
            W = {m: v // g for m, v in W.items()}
        return W

    def row(self, W: dict, key):
        lm = max(W, key=key)
        tail = tuple((m, c) for m, c in W.items() if m != lm)
        return (lm, W[lm], tail)

    def nf(self, f: dict, rows, key, track_scale: bool = False):
        """Fully reduce f by the rows; returns (remainder dict, scale).

        The remainder equals scale * (true field remainder); rows must be
        normalized (positive leading coefficient).
        """
        W = dict(f)
        R: dict = {}
        scale = Fraction(1)
        while W:
            m = max(W, key=key)
            c = W[m]
            for lm, lc, tail in rows:
                q = monomial_div(m, lm)
                if q is None:
                    continue
                if lc != 1:
                    for k in W:
                        W[k] *= lc
                    for k in R:
                        R[k] *= lc
                    if track_scale:
                        scale *= lc
                del W[m]
                for mg, cg in tail:
                    mm = monomial_mul(q, mg)
                    v = W.get(mm, 0) - c * cg
                    if v:
                        W[mm] = v
                    else:
                        W.pop(mm, None)
                if W or R:
                    g = math.gcd(*W.values(), *R.values())
                    if g > 1:
                        for k in W:
                            W[k] //= g
                        for k in R:
                            R[k] //= g
                        if track_scale:
                            scale /= g
                break
            else:
                R[m] = W.pop(m)
        return R, scale

    def spoly(self, row_f, Wf: dict, row_g, Wg: dict, key) -> dict:
        lmf, lcf, _ = row_f
        lmg, lcg, _ = row_g
        l = monomial_lcm(lmf, lmg)
        uf = monomial_div(l, lmf)
        ug = monomial_div(l, lmg)
        S: dict = {}
        for m, c in Wf.items():
            S[monomial_mul(uf, m)] = c * lcg
        for m, c in Wg.items():
            mm = monomial_mul(ug, m)
            v = S.get(mm, 0) - c * lcf
            if v:
                S[mm] = v
            else:
                S.pop(mm, None)
        return self.normalize(S, key)

    def to_field_terms(self, W: dict, scale: Fraction):
        return {m: Fraction(v) / scale for m, v in W.items()}

    def monic_terms(self, W: dict, key):
        lc = W[max(W, key=key)]
        return {m: Fraction(v, lc) for m, v in W.items()}


class _FpKernel:
    """Modular arithmetic for rings over a prime field; rows kept monic."""

    def __init__(self, p: int):
        self.p = p

    def to_internal(self, f: Polynomial):
        return {m: c % self.p for m, c in f.terms}, Fraction(1)

    def normalize(self, W: dict, key) -> dict:
        if not W:
            return W
        p = self.p
        lc = W[max(W, key=key)]
        if lc != 1:
            inv = pow(lc, -1, p)
            W = {m: v * inv % p for m, v in W.items()}
        return W

    def row(self, W: dict, key):
        lm = max(W, key=key)
        tail = tuple((m, c) for m, c in W.items() if m != lm)
        return (lm, W[lm], tail)

    def nf(self, f: dict, rows, key, track_scale: bool = False):
        p = self.p
        W = dict(f)
        R: dict = {}
        while W:
            m = max(W, key=key)
            c = W[m]
            for lm, lc, tail in rows:
                q = monomial_div(m, lm)
                if q is None:
                    continue
                # rows are monic, so the leading term cancels exactly
                del W[m]
                for mg, cg in tail:
                    mm = monomial_mul(q, mg)
                    v = (W.get(mm, 0) - c * cg) % p
                    if v:
                        W[mm] = v
                    else:
                        W.pop(mm, None)
                break
            else:
                R[m] = W.pop(m)
        return R, Fraction(1)

    def spoly(self, row_f, Wf: dict, row_g, Wg: dict, key) -> dict:
        p = self.p
        lmf, _, _ = row_f
        lmg, _, _ = row_g
        l = monomial_lcm(lmf, lmg)
        uf = monomial_div(l, lmf)
        ug = monomial_div(l, lmg)
        S: dict = {}
        for m, c in Wf.items():
            S[monomial_mul(uf, m)] = c
        for m, c in Wg.items():
            mm = monomial_mul(ug, m)
            v = (S.get(mm, 0) - c) % p
            if v:
                S[mm] = v
            else:
                S.pop(mm, None)
        return self.normalize(S, key)

    def to_field_terms(self, W: dict, scale: Fraction):
        return dict(W)

    def monic_terms(self, W: dict, key):
        return self.normalize(dict(W), key)


def _kernel_for(ring: RingDescriptor):
    if isinstance(ring.field, PrimeField):
        return _FpKernel(ring.field.p)
    return _ZZKernel()


# ---------------------------------------------------------------------------
# Buchberger


def _buchberger(ring: RingDescriptor, gens: list[Polynomial], order: MonomialOrder):
    """Reduced Groebner basis as a list of monic Polynomials, LMs descending."""
    key = order.key
    K = _kernel_for(ring)

    raw = [K.to_internal(g)[0] for g in gens if not g.is_zero()]
    raw = [K.normalize(W, key) for W in raw]
    raw.sort(key=lambda W: (key(max(W, key=key)), sorted(W.items())))

    # autoreduce the input: drop generators reducing to zero, keep remainders
    basis: list[dict] = []
    rows: list = []
    for W in raw:
        R, _ = K.nf(W, rows, key)
        if R:
            R = K.normalize(R, key)
            basis.append(R)
            rows.append(K.row(R, key))
            rows.sort(key=lambda r: key(r[0]))
    if not basis:
        return []

    n = len(basis)
    pairs = {(i, j) for i in range(n) for j in range(i + 1, n)}

    def lm(i):
        return rows_by_index[i][0]

    rows_by_index = [K.row(W, key) for W in basis]

    while pairs:
        i, j = min(
            pairs,
            key=lambda ij: (
                key(monomial_lcm(lm(ij[0]), lm(ij[1]))),
                ij,
            ),
        )
        pairs.discard((i, j))
        l = monomial_lcm(lm(i), lm(j))
        if l == monomial_mul(lm(i), lm(j)):
            continue  # coprime leading terms: S-polynomial reduces to zero
        skip = False
        for k in range(len(basis)):
            if k in (i, j) or not monomial_divides(lm(k), l):
                continue
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a not in pairs and b not in pairs:
                skip = True  # chain criterion
                break
        if skip:
            continue
        S = K.spoly(rows_by_index[i], basis[i], rows_by_index[j], basis[j], key)
        if not S:
            continue
        R, _ = K.nf(S, sorted(rows_by_index, key=lambda r: key(r[0])), key)
        if not R:
            continue
        R = K.normalize(R, key)
        t = len(basis)
        basis.append(R)
        rows_by_index.append(K.row(R, key))
        pairs.update((i2, t) for i2 in range(t))

    # minimalize: survivors have pairwise non-dividing leading monomials
    order_idx = sorted(range(len(basis)), key=lambda i: key(lm(i)))
    kept: list[int] = []
    for i in order_idx:
        if not any(monomial_divides(lm(k), lm(i)) for k in kept):
            kept.append(i)

    # interreduce survivors fully
    reduced: list[dict] = []
    for i in kept:
        others = [rows_by_index[k] for k in kept if k != i]
        others.sort(key=lambda r: key(r[0]))
        R, _ = K.nf(basis[i], others, key)
        if R:
            reduced.append(K.normalize(R, key))

    out = []
    for W in reduced:
        terms = K.monic_terms(W, key)
        out.append(ring.from_terms(terms.items()))
    out.sort(key=lambda f: key(f.leading_monomial(order)), reverse=True)
    return out


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis: monic, no tail term divisible by another LM."""

    order: MonomialOrder
    elements: tuple[Polynomial, ...]

    @property
    def ring(self) -> RingDescriptor:
        return self.elements[0].ring

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def leading_monomials(self) -> list[Monomial]:
        return [g.leading_monomial(self.order) for g in self.elements]

    def _context(self):
        # cached kernel rows for repeated normal-form calls
        ctx = getattr(self, "_ctx", None)
        if ctx is None:
            K = _kernel_for(self.ring)
            key = self.order.key
            rows = []
            for g in self.elements:
                W, _ = K.to_internal(g)
                rows.append(K.row(K.normalize(W, key), key))
            rows.sort(key=lambda r: key(r[0]))
            ctx = (K, key, rows)
            object.__setattr__(self, "_ctx", ctx)
        return ctx


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
    """S(f, g) = (lcm/lt(f)) f - (lcm/lt(g)) g."""
    if f.ring != g.ring:
        raise RingMismatchError("polynomials from different rings")
    if f.is_zero() or g.is_zero():
        raise PreconditionError("S-polynomial of zero polynomial")
    lmf, lcf = f.leading_term(order)
    lmg, lcg = g.leading_term(order)
    l = monomial_lcm(lmf, lmg)
    F = f.ring.field
    a = f.mul_monomial(monomial_div(l, lmf)).scale(F.inv(lcf))
    b = g.mul_monomial(monomial_div(l, lmg)).scale(F.inv(lcg))
    return a - b


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Remainder of f on division by G; unique since G is reduced."""
    if not G.elements:
        return f
    if f.ring != G.ring:
        raise RingMismatchError("polynomial not in the basis ring")
    if f.is_zero():
        return f
    K, key, rows = G._context()
    W, scale = K.to_internal(f)
    R, s2 = K.nf(W, rows, key, track_scale=True)
    if not R:
        return f.ring.zero()
    return f.ring.from_terms(K.to_field_terms(R, scale * s2).items())


# ---------------------------------------------------------------------------
# ideals


class Ideal:
    """An ideal given by generators, with cached Groebner bases per order.

    Values are immutable; caches are filled lazily behind a lock so ideals
    are safe to share across threads. `==` is structural (same generator
    list); use `ideal_equal` for mathematical equality.
    """

    __slots__ = ("ring", "generators", "_lock", "_gb_cache", "_power_cache")

    def __init__(self, ring: RingDescriptor, generators, _allow_empty: bool = False):
        gens = []
        seen = set()
        for g in generators:
            if not isinstance(g, Polynomial):
                raise PreconditionError("generators must be polynomials")
            if g.ring != ring:
                raise RingMismatchError("generator from a different ring")
            if g.is_zero():
                raise PreconditionError("zero generator")
            if g.terms not in seen:
                seen.add(g.terms)
                gens.append(g)
        if not gens and not _allow_empty:
            raise PreconditionError("ideal needs at least one nonzero generator")
        self.ring = ring
        self.generators = tuple(gens)
        self._lock = threading.Lock()
        self._gb_cache: dict[MonomialOrder, GroebnerBasis] = {}
        self._power_cache: dict[int, "Ideal"] = {}

    @classmethod
    def zero(cls, ring: RingDescriptor) -> "Ideal":
        return cls(ring, (), _allow_empty=True)

    @classmethod
    def from_strings(cls, ring: RingDescriptor, texts) -> "Ideal":
        return cls(ring, [ring.from_string(s) for s in texts])

    def is_zero_ideal(self) -> bool:
        return not self.generators

    def groebner(self, order: MonomialOrder = GREVLEX) -> GroebnerBasis:
        with self._lock:
            gb = self._gb_cache.get(order)
        if gb is not None:
            return gb
        elements = tuple(_buchberger(self.ring, list(self.generators), order))
        gb = GroebnerBasis(order, elements)
        with self._lock:
            self._gb_cache.setdefault(order, gb)
            return self._gb_cache[order]

    def canonical(self, order: MonomialOrder = GREVLEX) -> "Ideal":
        """Same ideal, regenerated by its reduced Groebner basis."""
        gb = self.groebner(order)
        out = Ideal(self.ring, gb.elements, _allow_empty=True)
        with out._lock:
            out._gb_cache[order] = gb
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Ideal)
            and self.ring == other.ring
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __repr__(self):
        inside = ", ".join(str(g) for g in self.generators) or "0"
        return f"ideal({inside})"


def groebner_basis(I: Ideal, order: MonomialOrder = GREVLEX) -> GroebnerBasis:
    return I.groebner(order)


def ideal_member(f: Polynomial, I: Ideal) -> bool:
    if f.ring != I.ring:
        raise RingMismatchError("polynomial not in the ideal's ring")
    if f.is_zero():
        return True
    G = I.groebner(GREVLEX)
    if not G.elements:
        return False
    K, key, rows = G._context()
    W, _ = K.to_internal(f)
    R, _ = K.nf(W, rows, key)
    return not R


def ideal_contains(I: Ideal, J: Ideal) -> bool:
    """True iff J is a subset of I."""
    return all(ideal_member(g, I) for g in J.generators)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    if I.ring != J.ring:
        raise RingMismatchError("ideals from different rings")
    return I.groebner(GREVLEX).elements == J.groebner(GREVLEX).elements


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    if I.ring != J.ring:
        raise RingMismatchError("ideals from different rings")
    if I.is_zero_ideal() or J.is_zero_ideal():
        return Ideal.zero(I.ring)
    return Ideal(I.ring, (f * g for f in I.generators for g in J.generators))


def ideal_power(I: Ideal, k: int) -> Ideal:
    if k < 1:
        raise PreconditionError("ideal power needs k >= 1")
    with I._lock:
        cached = I._power_cache.get(k)
    if cached is not None:
        return cached
    result = I
    for _ in range(k - 1):
        result = ideal_product(result, I)
    with I._lock:
        I._power_cache.setdefault(k, result)
        return I._power_cache[k]


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    if I.ring != J.ring:
        raise RingMismatchError("ideals from different rings")
    return Ideal(I.ring, I.generators + J.generators, _allow_empty=True)


# -- intersection via the tag-variable method --------------------------------


def _tag_ring(ring: RingDescriptor) -> tuple[RingDescriptor, str]:
    tag = "t"
    n = 0
    while tag in ring.variables:
        tag = f"t{n}"
        n += 1
    return RingDescriptor((tag,) + ring.variables, ring.field), tag


def _lift(f: Polynomial, ext: RingDescriptor, t_exp: int) -> Polynomial:
    return Polynomial(ext, tuple(((t_exp,) + m, c) for m, c in f.terms))


def ideal_intersection(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J, by eliminating t from t·I + (1-t)·J."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals from different rings")
    ring = I.ring
    if I.is_zero_ideal() or J.is_zero_ideal():
        return Ideal.zero(ring)
    ext, _ = _tag_ring(ring)
    gens = [_lift(f, ext, 1) for f in I.generators]
    for g in J.generators:
        gens.append(_lift(g, ext, 0) - _lift(g, ext, 1))
    basis = _buchberger(ext, gens, block_order(1))
    down = []
    for h in basis:
        if all(m[0] == 0 for m, _ in h.terms):
            down.append(Polynomial(ring, tuple((m[1:], c) for m, c in h.terms)))
    if not down:
        return Ideal.zero(ring)
    return Ideal(ring, down).canonical()


def intersect_many(ideals) -> Ideal:
    """Intersection folded as a balanced binary tree."""
    items = list(ideals)
    if not items:
        raise PreconditionError("intersection of no ideals")
    while len(items) > 1:
        nxt = [
            ideal_intersection(items[i], items[i + 1])
            if i + 1 < len(items)
            else items[i]
            for i in range(0, len(items), 2)
        ]
        items = nxt
    return items[0]


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g when g divides f exactly; InternalError otherwise."""
    if g.is_zero():
        raise PreconditionError("division by zero polynomial")
    if f.is_zero():
        return f
    ring = f.ring
    F = ring.field
    key = GREVLEX.key
    lmg, lcg = g.leading_term(GREVLEX)
    W = dict(f.terms)
    Q: dict = {}
    while W:
        m = max(W, key=key)
        c = W.pop(m)
        qm = monomial_div(m, lmg)
        if qm is None:
            raise InternalError("exact division failed")
        qc = F.div(c, lcg)
        Q[qm] = qc
        for mg, cg in g.terms:
            if mg == lmg:
                continue
            mm = monomial_mul(qm, mg)
            v = F.add(W.get(mm, F.zero()), F.neg(F.mul(qc, cg)))
            if v == 0:
                W.pop(mm, None)
            else:
                W[mm] = v
    return ring.from_terms(Q.items())


def _colon_single(I: Ideal, g: Polynomial) -> Ideal:
    if g.is_zero():
        raise PreconditionError("colon by zero polynomial")
    if g.is_constant():
        return I.canonical()
    meet = ideal_intersection(I, Ideal(I.ring, (g,)))
    if meet.is_zero_ideal():
        return meet
    return Ideal(I.ring, (exact_divide(h, g) for h in meet.generators)).canonical()


def ideal_colon(I: Ideal, J) -> Ideal:
    """I : J = {f : f·J ⊆ I}, intersecting single-generator colons."""
    if isinstance(J, Polynomial):
        return _colon_single(I, J)
    if I.ring != J.ring:
        raise RingMismatchError("ideals from different rings")
    if J.is_zero_ideal():
        raise PreconditionError("colon by the zero ideal")
    return intersect_many(_colon_single(I, g) for g in J.generators)


def eliminate(I: Ideal, k: int) -> Ideal:
    """Generators of I ∩ k[x_{k+1}, ..., x_d], via a block order."""
    d = I.ring.dimension
    if not 1 <= k < d:
        raise PreconditionError(f"eliminable block must satisfy 1 <= k < {d}")
    basis = I.groebner(block_order(k))
    kept = [g for g in basis if all(all(e == 0 for e in m[:k]) for m, _ in g.terms)]
    return Ideal(I.ring, kept, _allow_empty=True)


# -- combinatorics of the initial ideal ---------------------------------------


def _support_mask(m: Monomial) -> int:
    mask = 0
    for i, e in enumerate(m):
        if e:
            mask |= 1 << i
    return mask


def krull_dimension(I: Ideal) -> int:
    """Dimension of ring/I, from the staircase of the initial ideal.

    Equals the largest number of variables no initial monomial lives on;
    -1 when I is the unit ideal, d for the zero ideal.
    """
    d = I.ring.dimension
    if I.is_zero_ideal():
        return d
    lms = I.groebner(GREVLEX).leading_monomials()
    masks = [_support_mask(m) for m in lms]
    if 0 in masks:
        return -1
    best = -1
    for subset in range(1 << d):
        if all(lm_mask & ~subset for lm_mask in masks):
            size = subset.bit_count()
            if size > best:
                best = size
    return best


def is_cofinite(I: Ideal) -> bool:
    """True iff ring/I is finite dimensional over the field."""
    if I.is_zero_ideal():
        return False
    d = I.ring.dimension
    lms = I.groebner(GREVLEX).leading_monomials()
    if any(_support_mask(m) == 0 for m in lms):
        return True  # unit ideal
    pure = set()
    for m in lms:
        mask = _support_mask(m)
        if mask.bit_count() == 1:
            pure.add(mask)
    return len(pure) == d


def quotient_basis(I: Ideal) -> list[Monomial]:
    """Standard monomials of the initial ideal, ascending in grevlex."""
    if not is_cofinite(I):
        raise PreconditionError("quotient basis is infinite: ideal not cofinite")
    d = I.ring.dimension
    lms = I.groebner(GREVLEX).leading_monomials()
    if any(_support_mask(m) == 0 for m in lms):
        return []
    bound = [0] * d
    for m in lms:
        mask = _support_mask(m)
        if mask.bit_count() == 1:
            i = mask.bit_length() - 1
            if bound[i] == 0 or m[i] < bound[i]:
                bound[i] = m[i]
    out = [
        m
        for m in iter_product(*(range(b) for b in bound))
        if not any(monomial_divides(lm, m) for lm in lms)
    ]
    out.sort(key=GREVLEX.key)
    return out
