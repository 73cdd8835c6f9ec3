"""Random instances and the verification suites.

Each suite samples instances from a per-instance seed ``[seed, index]`` so a
run is reproducible and independent of the worker count; outcomes are
sorted by instance index before they are reported.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .enumeration import (DEFAULT_EVAL_BUDGET, count_all, count_nonsingular_curve, count_zeros,
                          find_nonsingular)
from .errors import BudgetExceededError, PreconditionError, SlicesExhaustedError
from .field import FieldSpec, field_of_order, parse_field
from .irreducible import DEFAULT_SEARCH_BUDGET, is_absolutely_irreducible
from .poly import MPoly, dehomogenize, divides, evaluate, monomials
from .slicing import SliceVector, find_nonsingular_via_slicing, lift_point, slice_poly

SCHEMA_VERSION = 1
SUITES = ("thm2", "thm3", "cafure-matera", "leep-yeomans", "lemma-bounds",
          "chevalley-warning", "slicing-identity")
DEFAULT_REJECTION_BUDGET = 10**4

PASS, FAIL, UNDECIDED = "pass", "fail", "undecided"


# --- random instances ------------------------------------------------------

@dataclass
class RandomFormSpec:
    d: int
    n: int
    field: str | FieldSpec
    constraint: str = "any"  # any | absolutely-irreducible | pair
    seed: int | list[int] = 0
    e: int = 0
    max_attempts: int = DEFAULT_REJECTION_BUDGET
    search_budget: int = DEFAULT_SEARCH_BUDGET

    @property
    def spec(self) -> FieldSpec:
        return self.field if isinstance(self.field, FieldSpec) else parse_field(self.field)


@dataclass
class Sample:
    G: MPoly
    H: MPoly | None = None
    rejections: int = 0


def random_form(spec: FieldSpec, n: int, d: int, rng: np.random.Generator) -> MPoly:
    """Uniform nonzero form of degree d: coefficients over the full monomial basis."""
    mons = monomials(n, d)
    while True:
        coeffs = rng.integers(0, spec.q, size=len(mons))
        if coeffs.any():
            return MPoly._raw(spec, n, {m: int(c) for m, c in zip(mons, coeffs) if c})


def random_poly(spec: FieldSpec, n: int, d: int, rng: np.random.Generator) -> MPoly:
    """Uniform polynomial of degree <= d (possibly zero)."""
    mons = [m for k in range(d + 1) for m in monomials(n, k)]
    coeffs = rng.integers(0, spec.q, size=len(mons))
    return MPoly._raw(spec, n, {m: int(c) for m, c in zip(mons, coeffs) if c})


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _abs_irreducible_form(spec, n, d, rng, attempts, search_budget, reject=None):
    for tries in range(attempts):
        G = random_form(spec, n, d, rng)
        if reject is not None and reject(G):
            continue
        if is_absolutely_irreducible(G, budget=search_budget):
            return G, tries
    raise PreconditionError(f"rejection budget of {attempts} attempts exhausted "
                            f"looking for an absolutely irreducible form (d={d}, n={n}, q={spec.q})")


def gen_random_form(rs: RandomFormSpec) -> Sample:
    """Sample a form (or a pair G, H) per ``rs``; deterministic in ``rs.seed``."""
    spec, rng = rs.spec, _rng(rs.seed)
    if rs.d < 1 or rs.n < 1:
        raise PreconditionError("need d >= 1 and n >= 1")
    if rs.constraint == "any":
        return Sample(random_form(spec, rs.n, rs.d, rng))
    if rs.constraint == "absolutely-irreducible":
        G, rej = _abs_irreducible_form(spec, rs.n, rs.d, rng, rs.max_attempts, rs.search_budget)
        return Sample(G, None, rej)
    if rs.constraint == "pair":
        G, rej = _abs_irreducible_form(spec, rs.n, rs.d, rng, rs.max_attempts, rs.search_budget)
        for tries in range(rs.max_attempts):
            H = random_form(spec, rs.n, rs.e, rng)
            if not divides(G, H):
                return Sample(G, H, rej + tries)
        raise PreconditionError("rejection budget exhausted looking for H not divisible by G")
    raise PreconditionError(f"unknown constraint {rs.constraint!r}")


def enumerate_forms(spec: FieldSpec, n: int, d: int, normalized: bool = False):
    """Every nonzero form of degree d; with ``normalized`` only leading coefficient 1."""
    mons = monomials(n, d)
    for lead in range(len(mons)):
        heads = [1] if normalized else range(1, spec.q)
        for h in heads:
            for rest in itertools.product(range(spec.q), repeat=len(mons) - lead - 1):
                terms = {mons[lead]: h}
                terms.update({m: c for m, c in zip(mons[lead + 1:], rest) if c})
                yield MPoly._raw(spec, n, terms)


# --- runs and reports ------------------------------------------------------

@dataclass
class VerificationRun:
    suite: str
    parameters: dict
    outcomes: list = field(default_factory=list)
    elapsed_ms: float | None = None

    def count(self, status: str) -> int:
        return sum(1 for o in self.outcomes if o["status"] == status)

    @property
    def summary(self) -> dict:
        return {"pass": self.count(PASS), "fail": self.count(FAIL),
                "undecided": self.count(UNDECIDED), "elapsed_ms": self.elapsed_ms}

    @property
    def passed(self) -> bool:
        """A run passes only with zero failures and zero undecided instances."""
        return self.count(FAIL) == 0 and self.count(UNDECIDED) == 0

    @property
    def exit_code(self) -> int:
        if self.count(FAIL):
            return 1
        if self.count(UNDECIDED):
            return 3
        return 0

    def to_dict(self, timing: bool = False) -> dict:
        summary = self.summary
        if not timing:
            summary["elapsed_ms"] = None
        return {"schema_version": SCHEMA_VERSION, "suite": self.suite,
                "parameters": self.parameters, "outcomes": self.outcomes, "summary": summary}

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        """Flat projection: one row per outcome, nested detail JSON-encoded."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "index", "status", "detail"])
        for o in self.outcomes:
            detail = {k: v for k, v in o.items() if k not in ("index", "status")}
            w.writerow([self.suite, o["index"], o["status"], json.dumps(detail, sort_keys=True)])
        return buf.getvalue()


def _fan_out(fn, jobs, threads):
    if threads <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def _guarded(fn):
    """Turn budget exhaustion into an undecided outcome."""
    def run(job):
        try:
            return fn(job)
        except BudgetExceededError as exc:
            return {"index": job[0] if isinstance(job, tuple) else job,
                    "status": UNDECIDED, "reason": str(exc)}
    return run


def _finish(run: VerificationRun, results, t0):
    run.outcomes = sorted(results, key=lambda o: o["index"])
    run.elapsed_ms = round((time.perf_counter() - t0) * 1000, 3)
    return run


def _instance(G: MPoly, H: MPoly | None = None) -> dict:
    out = {"field": G.spec.designator, "nvars": G.nvars, "G": str(G)}
    if H is not None:
        out["H"] = str(H)
    return out


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


# --- suites ----------------------------------------------------------------

def verify_thm2(d: int, e: int, n: int, q: int, samples: int, seed: int, *, threads: int = 1,
                exploratory: bool = False, budget_evals: int = DEFAULT_EVAL_BUDGET,
                search_budget: int = DEFAULT_SEARCH_BUDGET) -> VerificationRun:
    """Every sampled (G, H) above the threshold has a non-singular zero of G off H."""
    verdict = bounds.thm2_satisfied(q, d, e)
    if verdict != bounds.YES and not exploratory:
        raise PreconditionError(f"q={q} does not satisfy the threshold for d={d}, e={e} ({verdict})")
    spec = field_of_order(q)
    run = VerificationRun("thm2", {"d": d, "e": e, "n": n, "q": q, "samples": samples,
                                   "seed": seed, "threshold": verdict,
                                   "exploratory": exploratory})
    t0 = time.perf_counter()

    def one(i):
        s = gen_random_form(RandomFormSpec(d, n, spec, "pair", [seed, i], e=e,
                                           search_budget=search_budget))
        rep = count_all(s.G, s.H, budget_evals=budget_evals)
        w = find_nonsingular(s.G, s.H, budget_evals=budget_evals)
        margin = rep.N_affine - rep.S1 - rep.S2
        checks = {
            "witness": w is not None and w.verify(s.G, s.H),
            "N_minus_S1_S2_positive": margin > 0,
            "S1_bound": rep.S1 <= bounds.singular_upper(d, n, q),
            "S2_bound": rep.S2 <= bounds.intersection_upper(d, e, n, q) if e else rep.S2 == 0,
        }
        ok = all(checks.values()) or (exploratory and verdict != bounds.YES)
        return {"index": i, "status": _status(ok), "instance": _instance(s.G, s.H),
                "rejections": s.rejections, "counts": rep.to_dict(timing=False),
                "margin": margin, "checks": checks,
                "witness": w.to_dict() if w is not None else None}

    return _finish(run, _fan_out(_guarded(one), range(samples), threads), t0)


def verify_thm3(d: int, n: int, q: int, samples: int, seed: int, mode: str = "direct", *,
                max_slices: int = 50, threads: int = 1, exploratory: bool = False,
                budget_evals: int = DEFAULT_EVAL_BUDGET,
                search_budget: int = DEFAULT_SEARCH_BUDGET) -> VerificationRun:
    """Every sampled absolutely irreducible form above the threshold has a non-singular zero."""
    if mode not in ("direct", "via-slicing"):
        raise PreconditionError(f"unknown mode {mode!r}")
    above = bounds.thm3_satisfied(q, d)
    if not above and not exploratory:
        raise PreconditionError(f"q={q} is not above the threshold {bounds.thm3_threshold(d)} for d={d}")
    spec = field_of_order(q)
    params = {"d": d, "n": n, "q": q, "samples": samples, "seed": seed, "mode": mode,
              "threshold": int(bounds.thm3_threshold(d)), "exploratory": exploratory}
    if mode == "via-slicing":
        params["max_slices"] = max_slices
    run = VerificationRun("thm3", params)
    t0 = time.perf_counter()

    def one(i):
        s = gen_random_form(RandomFormSpec(d, n, spec, "absolutely-irreducible", [seed, i],
                                           search_budget=search_budget))
        direct = find_nonsingular(s.G, budget_evals=budget_evals)
        out = {"index": i, "instance": _instance(s.G), "rejections": s.rejections,
               "direct": direct.to_dict() if direct is not None else None}
        ok = direct is not None and direct.verify(s.G)
        if mode == "via-slicing":
            try:
                w = find_nonsingular_via_slicing(s.G, seed=i + (seed << 32), max_slices=max_slices,
                                                 budget=search_budget, budget_evals=budget_evals)
                out["sliced"] = w.to_dict()
                out["slices_tried"] = w.info["slices_tried"]
                sliced_ok = w.verify(s.G)
            except SlicesExhaustedError as exc:
                out["sliced"] = None
                out["slices_tried"] = exc.slices_tried
                sliced_ok = False
            out["modes_agree"] = sliced_ok == (direct is not None)
            ok = ok and sliced_ok
        out["status"] = _status(ok or (exploratory and not above))
        return out

    return _finish(run, _fan_out(_guarded(one), range(samples), threads), t0)


def verify_cafure_matera(d: int, n: int, q_list, samples: int, seed: int, *,
                         exhaustive: bool = False, threads: int = 1,
                         budget_evals: int = DEFAULT_EVAL_BUDGET,
                         search_budget: int = DEFAULT_SEARCH_BUDGET) -> VerificationRun:
    """|N - q^{n-1}| <= (d-1)(d-2) q^{n-3/2} + 5 d^{13/3} q^{n-2} for absolutely irreducible forms.

    In exhaustive mode every form with leading coefficient 1 is examined;
    scalar multiples share the zero set, so this covers every form.
    """
    q_list = list(q_list)
    run = VerificationRun("cafure-matera", {"d": d, "n": n, "q": q_list, "samples": samples,
                                            "seed": seed, "exhaustive": exhaustive})
    t0 = time.perf_counter()

    def check(idx, q, G, extra):
        N = count_zeros(G, budget_evals=budget_evals).N_affine
        dev = bounds.deviation_report(N, d, n, q)
        return {"index": idx, "status": _status(dev.within_cafure_matera), "q": q,
                "instance": _instance(G), "N_affine": N, **extra,
                "deviation": dev.measured,
                "rhs_upper": float(dev.cafure_matera_rhs.upper)}

    results = []
    idx = 0
    for q in q_list:
        spec = field_of_order(q)
        if exhaustive:
            def one(job):
                j, G = job
                if not is_absolutely_irreducible(G, budget=search_budget):
                    return None
                return check(j, q, G, {"scalar_multiples": q - 1})
            jobs = list(enumerate(enumerate_forms(spec, n, d, normalized=True), start=idx))
            idx += len(jobs)
            results += [r for r in _fan_out(_guarded(one), jobs, threads) if r is not None]
        else:
            def one(job, q=q, spec=spec):
                j, i = job
                s = gen_random_form(RandomFormSpec(d, n, spec, "absolutely-irreducible",
                                                   [seed, q, i], search_budget=search_budget))
                return check(j, q, s.G, {"rejections": s.rejections})
            jobs = [(idx + i, i) for i in range(samples)]
            idx += samples
            results += _fan_out(_guarded(one), jobs, threads)
    return _finish(run, results, t0)


def random_curve(spec: FieldSpec, d: int, rng, search_budget=DEFAULT_SEARCH_BUDGET,
                 attempts=DEFAULT_REJECTION_BUDGET) -> tuple[MPoly, int]:
    """Absolutely irreducible P(x, y) of exact degree d, as a dehomogenized ternary form."""
    def drops_degree(F):
        return all(e[2] > 0 for e in F._terms)
    F, rej = _abs_irreducible_form(spec, 3, d, rng, attempts, search_budget, reject=drops_degree)
    return dehomogenize(F), rej


def verify_leep_yeomans(d: int, q_list, samples: int, seed: int, *, threads: int = 1,
                        budget_evals: int = DEFAULT_EVAL_BUDGET,
                        search_budget: int = DEFAULT_SEARCH_BUDGET) -> VerificationRun:
    """Projective non-singular points of absolutely irreducible plane curves vs the lower bound."""
    q_list = list(q_list)
    run = VerificationRun("leep-yeomans", {"d": d, "q": q_list, "samples": samples,
                                           "seed": seed, "count_mode": "projective"})
    t0 = time.perf_counter()
    results = []
    for k, q in enumerate(q_list):
        spec = field_of_order(q)
        lower = bounds.leep_yeomans_lower(d, q)

        def one(job, q=q, spec=spec, lower=lower):
            j, i = job
            P, rej = random_curve(spec, d, _rng([seed, q, i]), search_budget)
            proj = count_nonsingular_curve(P, "projective", budget_evals=budget_evals)
            aff = count_nonsingular_curve(P, "affine", budget_evals=budget_evals)
            return {"index": j, "status": _status(proj >= lower), "q": q,
                    "instance": _instance(P), "rejections": rej,
                    "nonsingular_projective": proj, "nonsingular_affine": aff, "lower_bound": lower}

        results += _fan_out(_guarded(one), [(k * samples + i, i) for i in range(samples)], threads)
    return _finish(run, results, t0)


def verify_lemma_bounds(d1: int, d2: int, n: int, q: int, samples: int, seed: int, *,
                        threads: int = 1, budget_evals: int = DEFAULT_EVAL_BUDGET,
                        search_budget: int = DEFAULT_SEARCH_BUDGET) -> VerificationRun:
    """Affine upper bounds: hypersurfaces, coprime intersections, singular loci.

    F1 is absolutely irreducible and F2 is resampled until F1 does not divide
    it, which makes the pair coprime over the algebraic closure.
    """
    spec = field_of_order(q)
    run = VerificationRun("lemma-bounds", {"d1": d1, "d2": d2, "n": n, "q": q,
                                           "samples": samples, "seed": seed})
    t0 = time.perf_counter()

    def one(i):
        s = gen_random_form(RandomFormSpec(d1, n, spec, "pair", [seed, i], e=d2,
                                           search_budget=search_budget))
        rep = count_all(s.G, s.H, budget_evals=budget_evals)
        n2 = count_zeros(s.H, budget_evals=budget_evals).N_affine
        checks = {
            "hypersurface_F1": rep.N_affine <= bounds.hypersurface_upper(d1, n, q),
            "hypersurface_F2": n2 <= bounds.hypersurface_upper(d2, n, q),
            "intersection": rep.S2 <= bounds.intersection_upper(d1, d2, n, q),
            "singular_F1": rep.S1 <= bounds.singular_upper(d1, n, q),
        }
        return {"index": i, "status": _status(all(checks.values())),
                "instance": _instance(s.G, s.H), "rejections": s.rejections,
                "N_F1": rep.N_affine, "N_F2": n2, "S1": rep.S1, "S2": rep.S2, "checks": checks}

    return _finish(run, _fan_out(_guarded(one), range(samples), threads), t0)


def verify_chevalley_warning(d: int, n: int, q: int, samples: int, seed: int = 0, *,
                             threads: int = 1,
                             budget_evals: int = DEFAULT_EVAL_BUDGET) -> VerificationRun:
    """Forms of degree d in n > d variables have a nontrivial zero; N is divisible by p."""
    if n <= d:
        raise PreconditionError(f"need n > d, got n={n}, d={d}")
    spec = field_of_order(q)
    run = VerificationRun("chevalley-warning", {"d": d, "n": n, "q": q,
                                                "samples": samples, "seed": seed})
    t0 = time.perf_counter()

    def one(i):
        G = random_form(spec, n, d, _rng([seed, i]))
        N = count_zeros(G, budget_evals=budget_evals).N_affine
        checks = {"nontrivial_zero": N > 1, "count_divisible_by_p": N % spec.p == 0}
        return {"index": i, "status": _status(all(checks.values())), "instance": _instance(G),
                "N_affine": N, "checks": checks}

    return _finish(run, _fan_out(_guarded(one), range(samples), threads), t0)


def _identity_holds(f: MPoly, xi: SliceVector, a, b) -> bool:
    return evaluate(slice_poly(f, xi), (a, b)) == evaluate(f, lift_point(xi, a, b))


def verify_slicing_identity(d: int, n: int, q: int, samples: int, seed: int, *,
                            exhaustive: bool = False, threads: int = 1) -> VerificationRun:
    """slice(f, xi)(a, b) == f(lift(xi, a, b)) for random or all (xi, a, b).

    ``n`` is the number of ambient variables.  Random mode draws (f, xi, a, b)
    per instance; exhaustive mode fixes ``samples`` random f and runs over
    every slice vector and every (a, b), one outcome per f.
    """
    spec = field_of_order(q)
    run = VerificationRun("slicing-identity", {"d": d, "n": n, "q": q, "samples": samples,
                                               "seed": seed, "exhaustive": exhaustive})
    t0 = time.perf_counter()

    def one(i):
        rng = _rng([seed, i])
        f = random_poly(spec, n, d, rng)
        if not exhaustive:
            xi = SliceVector.random(spec, n, rng)
            a, b = (spec.element(int(v)) for v in rng.integers(0, q, size=2))
            return {"index": i, "status": _status(_identity_holds(f, xi, a, b)),
                    "instance": _instance(f), "slice": xi.to_list(), "ab": [a.value, b.value]}
        bad = 0
        total = 0
        for codes in itertools.product(range(q), repeat=3 * (n - 1) + 1):
            xi = SliceVector.from_codes(spec, codes)
            sliced = slice_poly(f, xi)
            for a, b in itertools.product(spec.elements(), repeat=2):
                total += 1
                if evaluate(sliced, (a, b)) != evaluate(f, lift_point(xi, a, b)):
                    bad += 1
        return {"index": i, "status": _status(bad == 0), "instance": _instance(f),
                "cases": total, "mismatches": bad}

    return _finish(run, _fan_out(_guarded(one), range(samples), threads), t0)
