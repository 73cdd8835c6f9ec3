"""Plane slices of hypersurfaces and the slice-based non-singular point finder.

For a polynomial f in m = n + 1 variables x0..xn a slice vector has 3n + 1
entries and substitutes

    x0 -> xi_0 + X,    x_i -> xi_i + xi_{n+i} X + xi_{2n+i} Y   (1 <= i <= n),

giving a bivariate polynomial in (X, Y).  With m ambient variables the slice
therefore has 3(m - 1) + 1 parameters.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import thm3_threshold
from .enumeration import DEFAULT_EVAL_BUDGET, Witness, find_nonsingular, make_witness
from .errors import (BudgetExceededError, InvariantViolation, PreconditionError,
                     SlicesExhaustedError)
from .field import FieldElement, FieldSpec
from .irreducible import DEFAULT_SEARCH_BUDGET, is_absolutely_irreducible
from .poly import MPoly, compose, evaluate, gradient


@dataclass(frozen=True)
class SliceVector:
    xi: tuple[FieldElement, ...]

    def __post_init__(self):
        if len(self.xi) % 3 != 1:
            raise PreconditionError(f"slice vector length {len(self.xi)} is not 3n+1")

    @property
    def n(self) -> int:
        return (len(self.xi) - 1) // 3

    @property
    def nambient(self) -> int:
        return self.n + 1

    @property
    def spec(self) -> FieldSpec:
        return self.xi[0].spec

    @classmethod
    def from_codes(cls, spec: FieldSpec, codes) -> SliceVector:
        return cls(tuple(spec.element(int(c)) for c in codes))

    @classmethod
    def random(cls, spec: FieldSpec, nambient: int, rng: np.random.Generator) -> SliceVector:
        return cls.from_codes(spec, rng.integers(0, spec.q, size=3 * (nambient - 1) + 1))

    def images(self) -> list[MPoly]:
        """The substitution as bivariate polynomials in (X, Y) = (x0, x1)."""
        spec, n, xi = self.spec, self.n, self.xi
        X = MPoly.variable(spec, 2, 0)
        Y = MPoly.variable(spec, 2, 1)
        out = [X + xi[0]]
        for i in range(1, n + 1):
            out.append(X * xi[n + i] + Y * xi[2 * n + i] + xi[i])
        return out

    def to_list(self) -> list[int]:
        return [c.value for c in self.xi]


def _check(f: MPoly, xi: SliceVector):
    if f.nvars != xi.nambient:
        raise PreconditionError(f"slice for {xi.nambient} variables applied to {f.nvars}")
    if f.spec != xi.spec:
        raise PreconditionError("slice vector and polynomial live in different fields")


def slice_poly(f: MPoly, xi: SliceVector) -> MPoly:
    """The sliced polynomial f|_xi(X, Y)."""
    _check(f, xi)
    return compose(f, xi.images())


def lift_point(xi: SliceVector, a, b) -> tuple[FieldElement, ...]:
    """Ambient point corresponding to (X, Y) = (a, b)."""
    spec, n, v = xi.spec, xi.n, xi.xi
    a, b = spec(a), spec(b)
    return (v[0] + a,) + tuple(v[i] + v[n + i] * a + v[2 * n + i] * b for i in range(1, n + 1))


def classify_slice(f: MPoly, sliced: MPoly, budget: int = DEFAULT_SEARCH_BUDGET) -> str:
    """"good", "bad" or "undecided" for one slice of f.

    Slices whose degree drops below deg f cannot carry the curve argument and
    count as bad, as does the zero polynomial.
    """
    if sliced.is_zero() or sliced.degree < f.degree:
        return "bad"
    try:
        return "good" if is_absolutely_irreducible(sliced, budget=budget) else "bad"
    except BudgetExceededError:
        return "undecided"


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ph = k / n
    denom = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def bad_slice_density(d: int, q: int) -> Fraction:
    """Upper bound on the fraction of bad slices: (3d^4 - 4d^3 + 5d^2) / (2q)."""
    return thm3_threshold(d) / q


@dataclass
class SliceSampleReport:
    d: int
    q: int
    trials: int
    bad: int
    good: int
    undecided: int
    density_bound: Fraction

    @property
    def fraction(self) -> float:
        decided = self.bad + self.good
        return self.bad / decided if decided else 0.0

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.bad, self.bad + self.good)

    @property
    def within_bound(self) -> bool:
        return Fraction(self.bad, max(self.bad + self.good, 1)) <= self.density_bound

    def to_dict(self):
        lo, hi = self.interval
        return {"d": self.d, "q": self.q, "trials": self.trials, "bad": self.bad,
                "good": self.good, "undecided": self.undecided,
                "fraction": self.fraction, "wilson_low": lo, "wilson_high": hi,
                "density_bound": float(self.density_bound), "within_bound": self.within_bound}


def _trial_slice(f: MPoly, seed: int, t: int) -> SliceVector:
    return SliceVector.random(f.spec, f.nvars, np.random.default_rng([seed, t]))


def sample_bad_slice_fraction(f: MPoly, trials: int, seed: int, *,
                              budget: int = DEFAULT_SEARCH_BUDGET,
                              check_input: bool = True) -> SliceSampleReport:
    """Estimate the fraction of slices whose sliced polynomial is not absolutely irreducible."""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    d = f.degree
    if f.is_zero() or d < 2:
        raise PreconditionError("bad-slice sampling needs degree >= 2")
    if check_input and not is_absolutely_irreducible(f, budget=budget):
        raise PreconditionError(f"{f} is not absolutely irreducible")
    counts = {"good": 0, "bad": 0, "undecided": 0}
    for t in range(trials):
        xi = _trial_slice(f, seed, t)
        counts[classify_slice(f, slice_poly(f, xi), budget)] += 1
    return SliceSampleReport(d, f.spec.q, trials, counts["bad"], counts["good"],
                             counts["undecided"], bad_slice_density(d, f.spec.q))


def _try_slice(F, seed, t, budget, budget_evals):
    """Outcome of slice trial t: ("bad"|"undecided"|"nopoint", None) or ("ok", witness)."""
    xi = _trial_slice(F, seed, t)
    sliced = slice_poly(F, xi)
    status = classify_slice(F, sliced, budget)
    if status != "good":
        return status, None
    w = find_nonsingular(sliced, budget_evals=budget_evals)
    if w is None:
        return "nopoint", None
    a, b = w.point
    sliced_grad = gradient(sliced).at((a, b))
    point = lift_point(xi, a, b)
    if not evaluate(F, point).is_zero():
        raise InvariantViolation("lifted point is not a zero of F")
    if all(g.is_zero() for g in gradient(F).at(point)) and any(not g.is_zero() for g in sliced_grad):
        raise InvariantViolation("nonzero sliced gradient lifted to a singular point")
    return "ok", make_witness(F, point, info={"slice_trial": t, "slice": xi.to_list(),
                                              "slice_point": [a.value, b.value]})


def find_nonsingular_via_slicing(F: MPoly, seed: int, max_slices: int = 50, *,
                                 budget: int = DEFAULT_SEARCH_BUDGET,
                                 budget_evals: int = DEFAULT_EVAL_BUDGET,
                                 threads: int = 1) -> Witness:
    """Find a non-singular zero of F through an absolutely irreducible plane slice.

    Slices are drawn from a per-trial seeded stream; the witness from the
    lowest successful trial index is returned, whatever the thread count.
    Raises SlicesExhaustedError when ``max_slices`` trials yield nothing.
    """
    if F.is_zero() or not F.is_homogeneous():
        raise PreconditionError("slicing needs a nonzero form")
    if not is_absolutely_irreducible(F, budget=budget):
        raise PreconditionError(f"{F} is not absolutely irreducible")
    tally = {"bad": 0, "undecided": 0, "nopoint": 0}
    step = max(1, threads)
    for start in range(0, max_slices, step):
        idx = range(start, min(max_slices, start + step))
        if step == 1:
            outcomes = [_try_slice(F, seed, t, budget, budget_evals) for t in idx]
        else:
            with ThreadPoolExecutor(max_workers=step) as pool:
                outcomes = list(pool.map(lambda t: _try_slice(F, seed, t, budget, budget_evals), idx))
        for t, (status, witness) in zip(idx, outcomes):
            if status == "ok":
                witness.info.update(slices_tried=t + 1, bad_slices=tally["bad"],
                                    undecided_slices=tally["undecided"])
                return witness
            tally[status] += 1
    raise SlicesExhaustedError(f"no certified point after {max_slices} slices",
                               max_slices, tally["bad"], tally["undecided"])
