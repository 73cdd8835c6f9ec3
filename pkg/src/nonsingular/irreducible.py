"""Desk-scale (absolute) irreducibility by exhaustive trial division.

Non-homogeneous input is homogenized first: for P of degree d the form
P^h = z^d P(x/z) is not divisible by z, and P = A*B with deg A, deg B >= 1
exactly when P^h = A^h * B^h.  Factors of forms are forms, so only
homogeneous candidate divisors are enumerated, each normalized to have
leading grlex coefficient 1.

Linear candidates are pruned before division: if L = x_j + sum_{i>j} c_i x_i
divides F, then F vanishes at the point with x_i = 1, x_j = -c_i and all
other coordinates 0, so c_i is a root of a univariate polynomial of degree
<= d (or unconstrained when that polynomial is identically zero).  Every
divisor survives the filter, so the search stays exhaustive.

The absolute test uses the Frobenius-orbit reduction: the absolutely
irreducible factors of an F_q-irreducible F form one orbit of size r | d;
for a prime l | r the orbit groups into l conjugate products of degree d/l
defined over F_{q^l}.  So F is absolutely irreducible iff it is irreducible
over F_q and has no factor of degree d/l over F_{q^l} for each prime l | d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, FieldError, PreconditionError
from .field import FieldSpec, make_field, prime_factors
from .poly import MPoly, divides, homogenize, monomials

DEFAULT_MAX_DEGREE = 4
DEFAULT_SEARCH_BUDGET = 10**6


@dataclass
class SearchBudget:
    """Counts candidate divisors tested; raises once ``limit`` is passed."""

    limit: int = DEFAULT_SEARCH_BUDGET
    used: int = 0

    def charge(self, n: int):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"irreducibility search needs more than {self.limit} candidate divisors")


def extension(spec: FieldSpec, degree: int) -> FieldSpec:
    try:
        return make_field(spec.p, spec.k * degree)
    except FieldError as exc:
        raise BudgetExceededError(f"extension F_{spec.q}^{degree} is too large: {exc}") from exc


def univariate_roots(coeffs: list[int], K: FieldSpec) -> list[int]:
    """Codes of all roots in K of sum coeffs[i] c^i (coeffs as packed codes)."""
    if K.q <= 8:
        roots = []
        for c in range(K.q):
            acc = 0
            for a in reversed(coeffs):
                acc = K.add(K.mul(acc, c), a)
            if acc == 0:
                roots.append(c)
        return roots
    xs = np.arange(K.q, dtype=np.int64)
    acc = np.zeros(K.q, dtype=np.int64)
    for a in reversed(coeffs):
        acc = K.vadd(K.vmul(acc, xs), a)
    return np.flatnonzero(acc == 0).tolist()


def _linear_factor(F: MPoly, budget: SearchBudget) -> MPoly | None:
    """First normalized linear form dividing the form F (same field), or None."""
    K, n, d = F.spec, F.nvars, F.degree
    neg_one = K.neg(1)
    for j in range(n):
        choices = []
        for i in range(j + 1, n):
            # g(c) = F at x_j = -c, x_i = 1, other coordinates 0
            coeffs = [0] * (d + 1)
            for e, c in F._terms.items():
                if all(x == 0 for t, x in enumerate(e) if t not in (i, j)):
                    a = e[j]
                    coeffs[a] = K.add(coeffs[a], K.mul(c, K.pow(neg_one, a)))
            if any(coeffs):
                choices.append(univariate_roots(coeffs, K))
            else:
                choices.append(range(K.q))
        count = 1
        for ch in choices:
            count *= len(ch)
        budget.charge(count)
        for combo in itertools.product(*choices):
            terms = {tuple(1 if t == j else 0 for t in range(n)): 1}
            for i, c in zip(range(j + 1, n), combo):
                if c:
                    terms[tuple(1 if t == i else 0 for t in range(n))] = c
            L = MPoly._raw(K, n, terms)
            if divides(L, F):
                return L
    return None


def _normalized_forms(K: FieldSpec, nvars: int, a: int):
    """Every form of degree a with leading grlex coefficient 1, in a fixed order."""
    mons = monomials(nvars, a)
    for lead in range(len(mons)):
        for rest in itertools.product(range(K.q), repeat=len(mons) - lead - 1):
            terms = {mons[lead]: 1}
            for m, c in zip(mons[lead + 1:], rest):
                if c:
                    terms[m] = c
            yield MPoly._raw(K, nvars, terms)


def _count_normalized(Q: int, nmons: int) -> int:
    return (Q**nmons - 1) // (Q - 1)


def find_factor(F: MPoly, a: int, ext_degree: int = 1,
                budget: SearchBudget | None = None) -> MPoly | None:
    """A normalized factor of degree ``a`` of F over F_{q^ext_degree}, or None.

    F must be a nonzero form (homogenize first).  The witness is the first
    divisor in enumeration order, so the answer is deterministic.
    """
    budget = budget or SearchBudget()
    if not F.is_homogeneous():
        raise PreconditionError("find_factor expects a form")
    K = extension(F.spec, ext_degree)
    Fk = F.change_field(K)
    if a == 1:
        return _linear_factor(Fk, budget)
    budget.charge(_count_normalized(K.q, len(monomials(F.nvars, a))))
    for A in _normalized_forms(K, F.nvars, a):
        if divides(A, Fk):
            return A
    return None


def _as_form(F: MPoly, max_degree: int) -> MPoly:
    if F.is_zero():
        raise PreconditionError("irreducibility of the zero polynomial is undefined")
    d = F.degree
    if d < 1:
        raise PreconditionError("constants are neither irreducible nor reducible")
    if d > max_degree:
        raise BudgetExceededError(f"degree {d} exceeds the configured maximum {max_degree}")
    return F if F.is_homogeneous() else homogenize(F, d)


def is_irreducible_over(F: MPoly, ext_degree: int = 1, *, max_degree: int = DEFAULT_MAX_DEGREE,
                        budget: SearchBudget | int | None = None) -> bool:
    """True iff F has no factorization into positive-degree factors over F_{q^ext_degree}.

    Raises BudgetExceededError when the candidate search would exceed the
    budget; that outcome is never a verdict.
    """
    if not isinstance(budget, SearchBudget):
        budget = SearchBudget(budget or DEFAULT_SEARCH_BUDGET)
    G = _as_form(F, max_degree)
    d = G.degree
    for a in range(1, d // 2 + 1):
        if find_factor(G, a, ext_degree, budget) is not None:
            return False
    return True


def is_absolutely_irreducible(F: MPoly, *, max_degree: int = DEFAULT_MAX_DEGREE,
                              budget: SearchBudget | int | None = None) -> bool:
    """True iff F is irreducible over the algebraic closure of its field."""
    if not isinstance(budget, SearchBudget):
        budget = SearchBudget(budget or DEFAULT_SEARCH_BUDGET)
    G = _as_form(F, max_degree)
    if not is_irreducible_over(G, 1, max_degree=max_degree, budget=budget):
        return False
    d = G.degree
    for ell in prime_factors(d) if d > 1 else []:
        if find_factor(G, d // ell, ell, budget) is not None:
            return False
    return True
