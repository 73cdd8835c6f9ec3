"""Sparse multivariate polynomials over a FieldSpec.

Variables are zero-based: ``x0, ..., x{n-1}``.  Terms are kept in a dict from
exponent tuples to packed field codes (see :mod:`nonsingular.field`); the
public :attr:`MPoly.terms` view hands out :class:`FieldElement` values.
Monomials are ordered graded-lexicographically: total degree first, then
lexicographically on the exponent tuple, so ``x0 > x1 > ... > x{n-1}``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

from .errors import FieldMismatchError, InvariantViolation, PolySyntaxError, PreconditionError
from .field import FieldElement, FieldSpec, embedding_table

#: Degree of the zero polynomial.
ZERO_DEGREE = -math.inf


def grlex_key(e: tuple[int, ...]):
    return (sum(e), e)


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree d, in descending grlex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


class MPoly:
    """Immutable sparse polynomial in ``nvars`` variables over ``spec``."""

    __slots__ = ("spec", "nvars", "_terms", "_hash")

    def __init__(self, spec: FieldSpec, nvars: int, terms=None):
        if nvars < 1:
            raise ValueError("nvars must be >= 1")
        self.spec = spec
        self.nvars = nvars
        clean: dict[tuple[int, ...], int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {nvars} variables")
            code = spec(c).value
            if code:
                clean[e] = spec.add(clean.get(e, 0), code)
                if not clean[e]:
                    del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, spec, nvars, codes: dict) -> MPoly:
        """Build from a dict of nonzero packed codes without validation."""
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.nvars = nvars
        obj._terms = codes
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, spec, nvars):
        return cls._raw(spec, nvars, {})

    @classmethod
    def constant(cls, spec, nvars, c):
        code = spec(c).value
        return cls._raw(spec, nvars, {(0,) * nvars: code} if code else {})

    @classmethod
    def variable(cls, spec, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls._raw(spec, nvars, {tuple(e): 1})

    # --- introspection ----------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], FieldElement]:
        return {e: FieldElement(self.spec, c) for e, c in self.sorted_terms()}

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """(exponents, packed code) pairs in descending grlex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def coeff(self, e) -> FieldElement:
        return FieldElement(self.spec, self._terms.get(tuple(e), 0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self):
        """Total degree, or ``ZERO_DEGREE`` (-inf) for the zero polynomial."""
        if not self._terms:
            return ZERO_DEGREE
        return max(sum(e) for e in self._terms)

    def leading(self) -> tuple[tuple[int, ...], int]:
        if not self._terms:
            raise PreconditionError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def variables_used(self) -> set[int]:
        return {i for e in self._terms for i, x in enumerate(e) if x}

    # --- arithmetic -------------------------------------------------------

    def _check(self, other: MPoly):
        if other.spec != self.spec:
            raise FieldMismatchError(f"{self.spec!r} vs {other.spec!r}")
        if other.nvars != self.nvars:
            raise PreconditionError(f"{self.nvars} vs {other.nvars} variables")

    def _coerce(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, (int, FieldElement)):
            return MPoly.constant(self.spec, self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add = self.spec.add
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = add(out.get(e, 0), c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly._raw(self.spec, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        neg = self.spec.neg
        return MPoly._raw(self.spec, self.nvars, {e: neg(c) for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add, mul = self.spec.add, self.spec.mul
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = add(out.get(e, 0), mul(c1, c2))
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return MPoly._raw(self.spec, self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> MPoly:
        c = self.spec(c).value
        if not c:
            return MPoly.zero(self.spec, self.nvars)
        mul = self.spec.mul
        return MPoly._raw(self.spec, self.nvars, {e: mul(c, v) for e, v in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.constant(self.spec, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.spec == other.spec and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"MPoly({format_poly(self)!r}, F_{self.spec.designator}, nvars={self.nvars})"

    def __str__(self):
        return format_poly(self)

    # --- calculus and evaluation ------------------------------------------

    def partial(self, i: int) -> MPoly:
        """Formal derivative in x_i; exponents divisible by p differentiate to zero."""
        p, mul = self.spec.p, self.spec.mul
        out = {}
        for e, c in self._terms.items():
            k = e[i] % p
            if k:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = mul(k, c)
        return MPoly._raw(self.spec, self.nvars, out)

    def __call__(self, *point):
        return evaluate(self, point[0] if len(point) == 1 and isinstance(point[0], (list, tuple)) else point)

    def change_field(self, dst: FieldSpec) -> MPoly:
        """The same polynomial with coefficients embedded in the extension ``dst``."""
        if dst == self.spec:
            return self
        table = embedding_table(self.spec, dst)
        return MPoly._raw(dst, self.nvars, {e: int(table[c]) for e, c in self._terms.items()})


# --- free-function API -----------------------------------------------------

def evaluate(F: MPoly, x) -> FieldElement:
    """Exact value of F at x; coordinates may live in an extension of F.spec."""
    x = list(x)
    if len(x) != F.nvars:
        raise PreconditionError(f"point has {len(x)} coordinates, polynomial has {F.nvars} variables")
    target = F.spec
    for c in x:
        if isinstance(c, FieldElement):
            target = c.spec
            break
    if target != F.spec:
        F = F.change_field(target)
    vals = [target(c).value for c in x]
    add, mul, pw = target.add, target.mul, target.pow
    total = 0
    for e, c in F._terms.items():
        v = c
        for xi, ei in zip(vals, e):
            if ei:
                v = mul(v, pw(xi, ei))
        total = add(total, v)
    return FieldElement(target, total)


class GradientVector(tuple):
    """Tuple of the nvars formal partial derivatives of a polynomial."""

    def at(self, x) -> tuple[FieldElement, ...]:
        return tuple(evaluate(d, x) for d in self)

    def is_identically_zero(self) -> bool:
        return all(d.is_zero() for d in self)


def gradient(F: MPoly) -> GradientVector:
    return GradientVector(F.partial(i) for i in range(F.nvars))


def is_gradient_degenerate(F: MPoly) -> bool:
    """True iff every formal partial of F vanishes identically.

    In that case every exponent of F is divisible by p, so F is a p-th power
    over the algebraic closure; the implication is checked on every call.
    """
    if F.is_zero():
        raise PreconditionError("gradient degeneracy is undefined for the zero polynomial")
    degenerate = gradient(F).is_identically_zero()
    if degenerate and any(x % F.spec.p for e in F._terms for x in e):
        raise InvariantViolation(f"zero gradient but exponent not divisible by p in {F}")
    return degenerate


def homogeneous_check(F: MPoly) -> bool:
    return F.is_homogeneous()


def homogenize(P: MPoly, d: int | None = None) -> MPoly:
    """Append a homogenizing variable (last index) lifting P to a form of degree d."""
    if d is None:
        d = 0 if P.is_zero() else P.degree
    if not P.is_zero() and d < P.degree:
        raise PreconditionError(f"cannot homogenize degree {P.degree} polynomial to degree {d}")
    return MPoly._raw(P.spec, P.nvars + 1, {e + (d - sum(e),): c for e, c in P._terms.items()})


def dehomogenize(F: MPoly, var: int = -1) -> MPoly:
    """Set variable ``var`` to 1 and drop it."""
    if F.nvars < 2:
        raise PreconditionError("need at least two variables to dehomogenize")
    var %= F.nvars
    out = {}
    add = F.spec.add
    for e, c in F._terms.items():
        ne = e[:var] + e[var + 1:]
        v = add(out.get(ne, 0), c)
        if v:
            out[ne] = v
        else:
            out.pop(ne, None)
    return MPoly._raw(F.spec, F.nvars - 1, out)


def compose(F: MPoly, images: list[MPoly]) -> MPoly:
    """Substitute ``images[i]`` for x_i; the result lives in the images' ring."""
    if len(images) != F.nvars:
        raise PreconditionError(f"{len(images)} images for {F.nvars} variables")
    ring = images[0]
    for g in images:
        ring._check(g)
    if ring.spec != F.spec:
        F = F.change_field(ring.spec)
    powers: dict[tuple[int, int], MPoly] = {}

    def pw(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = images[i] if k == 1 else pw(i, k - 1) * images[i]
        return powers[(i, k)]

    out = MPoly.zero(ring.spec, ring.nvars)
    for e, c in F._terms.items():
        term = MPoly.constant(ring.spec, ring.nvars, FieldElement(ring.spec, c))
        for i, k in enumerate(e):
            if k:
                term = term * pw(i, k)
        out = out + term
    return out


def poly_divmod(H: MPoly, G: MPoly) -> tuple[MPoly, MPoly]:
    """Single-divisor multivariate division in grlex order: H = G*Q + R.

    No term of R is divisible by the leading monomial of G.  For a single
    divisor, R == 0 exactly when G divides H.
    """
    if G.is_zero():
        raise PreconditionError("division by the zero polynomial")
    H._check(G)
    spec = G.spec
    add, mul, neg = spec.add, spec.mul, spec.neg
    lead_e, lead_c = G.leading()
    inv = spec.inv(lead_c)
    g_terms = list(G._terms.items())
    work = dict(H._terms)
    quot, rem = {}, {}
    while work:
        e = max(work, key=grlex_key)
        c = work[e]
        if all(a >= b for a, b in zip(e, lead_e)):
            shift = tuple(a - b for a, b in zip(e, lead_e))
            m = mul(c, inv)
            quot[shift] = m
            nm = neg(m)
            for ge, gc in g_terms:
                key = tuple(a + b for a, b in zip(ge, shift))
                v = add(work.get(key, 0), mul(nm, gc))
                if v:
                    work[key] = v
                else:
                    work.pop(key, None)
        else:
            rem[e] = c
            del work[e]
    return MPoly._raw(spec, H.nvars, quot), MPoly._raw(spec, H.nvars, rem)


def divides(G: MPoly, H: MPoly) -> bool:
    """True iff H = G*Q for some polynomial Q."""
    Q, R = poly_divmod(H, G)
    if R.is_zero() and G * Q != H:
        raise InvariantViolation(f"quotient check failed for ({G}) | ({H})")
    return R.is_zero()


def quotient(H: MPoly, G: MPoly) -> MPoly:
    """Exact quotient H / G; raises if G does not divide H."""
    Q, R = poly_divmod(H, G)
    if not R.is_zero():
        raise PreconditionError(f"({G}) does not divide ({H})")
    return Q


# --- text format -----------------------------------------------------------

def _format_coeff(spec: FieldSpec, c: int) -> str:
    return str(c) if c < spec.p else f"[{c}]"


def format_poly(F: MPoly) -> str:
    """Canonical text: grlex descending, least residues, unit coefficients omitted."""
    if F.is_zero():
        return "0"
    parts = []
    for e, c in F.sorted_terms():
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f"x{i}")
            elif k > 1:
                factors.append(f"x{i}^{k}")
        if not factors:
            parts.append(_format_coeff(F.spec, c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([_format_coeff(F.spec, c)] + factors))
    return " + ".join(parts)


class _Parser:
    SIGNS = {"+": 1, "-": -1, "−": -1}

    def __init__(self, text, spec, nvars):
        self.text = text
        self.pos = 0
        self.spec = spec
        self.nvars = nvars

    def error(self, msg, pos=None):
        raise PolySyntaxError(msg, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def integer(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def factor(self, exps, coeff):
        ch = self.peek()
        if ch == "x":
            start = self.pos
            self.pos += 1
            if self.pos >= len(self.text) or not self.text[self.pos].isdigit():
                self.error("expected a variable index after 'x'")
            idx = self.integer()
            if idx >= self.nvars:
                self.error(f"variable x{idx} out of range for {self.nvars} variables", start)
            k = 1
            if self.peek() == "^":
                self.pos += 1
                self.skip()
                at = self.pos
                k = self.integer()
                if k < 1:
                    self.error("exponent must be a positive integer", at)
            exps[idx] += k
            return coeff
        if ch.isdigit():
            return self.spec.mul(coeff, self.integer() % self.spec.p)
        if ch == "[":
            start = self.pos
            self.pos += 1
            code = self.integer()
            if code >= self.spec.q:
                self.error(f"element code {code} out of range for F_{self.spec.designator}", start)
            if self.peek() != "]":
                self.error("expected ']'")
            self.pos += 1
            return self.spec.mul(coeff, code)
        self.error("expected a coefficient or a variable")

    def term(self, sign):
        exps = [0] * self.nvars
        coeff = 1 if sign > 0 else self.spec.neg(1)
        coeff = self.factor(exps, coeff)
        while self.peek() == "*":
            self.pos += 1
            coeff = self.factor(exps, coeff)
        return tuple(exps), coeff

    def parse(self):
        out: dict = {}
        add = self.spec.add
        sign = 1
        if self.peek() in self.SIGNS:
            sign = self.SIGNS[self.peek()]
            self.pos += 1
        while True:
            e, c = self.term(sign)
            v = add(out.get(e, 0), c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
            ch = self.peek()
            if not ch:
                break
            if ch not in self.SIGNS:
                self.error(f"unexpected character {ch!r}")
            sign = self.SIGNS[ch]
            self.pos += 1
        return MPoly._raw(self.spec, self.nvars, out)


def parse_poly(text: str, spec: FieldSpec, nvars: int) -> MPoly:
    """Parse the polynomial grammar (e.g. ``"x0^2 + 2*x1*x2"``) into an MPoly.

    Integer coefficients are reduced mod p; ``[c]`` denotes the extension
    element with packed code c (this is what :func:`format_poly` prints for
    coefficients outside the prime subfield).
    """
    if not text or not text.strip():
        raise PolySyntaxError("empty polynomial", 0)
    return _Parser(text, spec, nvars).parse()
