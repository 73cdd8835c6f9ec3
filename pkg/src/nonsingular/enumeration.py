"""Exhaustive point counting and witness search over F_q^n.

Points are visited in lexicographic order of their packed coordinates,
``x0`` slowest.  Work is split into slabs of consecutive ``x0`` values;
each slab is evaluated as a broadcast numpy grid, and slabs may be handed to
a thread pool.  Counts are merged by integer addition and witnesses by
taking the lexicographically smallest, so results never depend on the
number of threads.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, InvariantViolation, PreconditionError
from .field import FieldElement
from .poly import MPoly, evaluate, gradient, homogenize

DEFAULT_EVAL_BUDGET = 2**31
CHUNK_POINTS = 1 << 20


@dataclass
class CountReport:
    q: int
    n: int
    d: int
    N_affine: int | None = None
    N_projective: int | None = None
    S1: int | None = None
    S2: int | None = None
    elapsed: float = 0.0

    def to_dict(self, timing=True):
        out = {"q": self.q, "n": self.n, "d": self.d, "N_affine": self.N_affine,
               "N_projective": self.N_projective, "S1": self.S1, "S2": self.S2}
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out


@dataclass
class Witness:
    """A zero of F with nonzero gradient (and off H when H is given)."""

    point: tuple[FieldElement, ...]
    value: FieldElement
    gradient_at_point: tuple[FieldElement, ...]
    h_value: FieldElement | None = None
    info: dict = field(default_factory=dict)

    def verify(self, F: MPoly, H: MPoly | None = None) -> bool:
        """Re-check every claim by direct scalar evaluation."""
        if not evaluate(F, self.point).is_zero():
            return False
        grad = gradient(F).at(self.point)
        if all(g.is_zero() for g in grad) or grad != tuple(self.gradient_at_point):
            return False
        if H is not None and evaluate(H, self.point).is_zero():
            return False
        return True

    def to_dict(self):
        out = {"point": [c.value for c in self.point],
               "value": self.value.value,
               "gradient": [g.value for g in self.gradient_at_point]}
        if self.h_value is not None:
            out["h_value"] = self.h_value.value
        out.update(self.info)
        return out


def make_witness(F: MPoly, point, H: MPoly | None = None, info=None) -> Witness:
    """Build a Witness by independent scalar evaluation and insist it holds."""
    point = tuple(F.spec(c) if not isinstance(c, FieldElement) else c for c in point)
    w = Witness(point, evaluate(F, point), gradient(F).at(point),
                evaluate(H, point) if H is not None else None, dict(info or {}))
    if not w.verify(F, H):
        raise InvariantViolation(f"witness {[c.value for c in point]} fails re-verification")
    return w


class Evaluator:
    """Vectorized evaluation of one polynomial on broadcast coordinate grids."""

    def __init__(self, F: MPoly):
        self.spec = F.spec
        self.nvars = F.nvars
        self.terms = [(e, c) for e, c in F.sorted_terms()]

    def __call__(self, axes: list[np.ndarray]) -> np.ndarray:
        spec, n = self.spec, self.nvars
        shape = tuple(len(a) for a in axes)
        views = []
        for i, a in enumerate(axes):
            s = [1] * n
            s[i] = len(a)
            views.append((a, s))
        if spec.k == 1:
            p = spec.p
            acc = 0
            for e, c in self.terms:
                t = c
                for i, k in enumerate(e):
                    if k:
                        a, s = views[i]
                        t = t * spec.power_table(k)[a].reshape(s) % p
                acc = acc + t
            return np.broadcast_to(np.asarray(acc, dtype=np.int64) % p, shape)
        acc = np.zeros([1] * n, dtype=np.int64)
        for e, c in self.terms:
            t = np.full([1] * n, c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    a, s = views[i]
                    t = spec.vmul(t, spec.power_table(k)[a].reshape(s))
            acc = spec.vadd(acc, t)
        return np.broadcast_to(acc, shape)


def _check_budget(count: int, budget_evals: int):
    if count > budget_evals:
        raise BudgetExceededError(f"{count} evaluations exceed the budget of {budget_evals}")


def _slabs(q: int, fixed: tuple[int, ...], nfree: int, chunk: int = CHUNK_POINTS):
    """Yield (axes, offset) covering every point with the given fixed prefix.

    ``offset`` is the lexicographic index (within the free coordinates) of the
    slab's first point.
    """
    axes_fixed = [np.array([v], dtype=np.int64) for v in fixed]
    full = np.arange(q, dtype=np.int64)
    if nfree == 0:
        yield axes_fixed, 0
        return
    inner = q ** (nfree - 1)
    step = max(1, chunk // max(inner, 1))
    for start in range(0, q, step):
        stop = min(q, start + step)
        first = np.arange(start, stop, dtype=np.int64)
        yield axes_fixed + [first] + [full] * (nfree - 1), start * inner


def _run(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def _masks(G: MPoly, H: MPoly | None, want: set[str]):
    """Per-slab function computing the requested counts/witness index."""
    g_eval = Evaluator(G)
    d_evals = [Evaluator(D) for D in gradient(G)] if want & {"S1", "witness"} else []
    h_eval = Evaluator(H) if H is not None and want & {"S2", "witness"} else None

    def work(job):
        axes, offset = job
        zero = g_eval(axes) == 0
        out = {}
        if "N" in want:
            out["N"] = int(np.count_nonzero(zero))
        if d_evals:
            nonsing = np.zeros(zero.shape, dtype=bool)
            for ev in d_evals:
                nonsing |= ev(axes) != 0
            if "S1" in want:
                out["S1"] = int(np.count_nonzero(zero & ~nonsing))
        if h_eval is not None:
            h = h_eval(axes)
            if "S2" in want:
                out["S2"] = int(np.count_nonzero(zero & (h == 0)))
        if "witness" in want:
            ok = zero & nonsing
            if h_eval is not None:
                ok &= h != 0
            hits = np.flatnonzero(ok)
            out["witness"] = offset + int(hits[0]) if len(hits) else None
        return out

    return work


def _index_to_point(idx: int, q: int, n: int) -> list[int]:
    coords = []
    for _ in range(n):
        idx, r = divmod(idx, q)
        coords.append(r)
    return coords[::-1]


def _same_ring(G: MPoly, H: MPoly | None):
    if H is not None and (H.spec != G.spec or H.nvars != G.nvars):
        raise PreconditionError("G and H must share field and number of variables")


def _affine_scan(G, H, want, threads, budget_evals):
    q, n = G.spec.q, G.nvars
    _check_budget(q**n, budget_evals)
    jobs = list(_slabs(q, (), n))
    results = _run(_masks(G, H, want), jobs, threads)
    return results


def _projective_jobs(q: int, n: int):
    """Slabs over normalized representatives (first nonzero coordinate = 1)."""
    for lead in range(n):
        for axes, offset in _slabs(q, (0,) * lead + (1,), n - lead - 1):
            yield axes, (lead, offset)


def _projective_scan(F, want, threads, budget_evals):
    q, n = F.spec.q, F.nvars
    _check_budget(sum(q**j for j in range(n)), budget_evals)
    return _run(_masks(F, None, want), list(_projective_jobs(q, n)), threads)


def self_check(F: MPoly, samples: int = 64, seed: int = 0) -> bool:
    """Compare the vectorized evaluator against ``evaluate`` on sampled points."""
    rng = np.random.default_rng(seed)
    q, n = F.spec.q, F.nvars
    pts = rng.integers(0, q, size=(samples, n))
    ev = Evaluator(F)
    for row in pts:
        got = int(ev([np.array([v], dtype=np.int64) for v in row]).reshape(-1)[0])
        if got != evaluate(F, [F.spec.element(int(v)) for v in row]).value:
            return False
    return True


def count_zeros(F: MPoly, mode: str = "affine", *, threads: int = 1,
                budget_evals: int = DEFAULT_EVAL_BUDGET, check: bool = False) -> CountReport:
    """Exact number of zeros of F in F_q^n (affine) or P^{n-1}(F_q) (projective)."""
    if check and not self_check(F):
        raise InvariantViolation(f"vectorized evaluation disagrees with evaluate() for {F}")
    t0 = time.perf_counter()
    rep = CountReport(F.spec.q, F.nvars, F.degree if not F.is_zero() else -1)
    if mode == "affine":
        rep.N_affine = sum(r["N"] for r in _affine_scan(F, None, {"N"}, threads, budget_evals))
    elif mode == "projective":
        if not F.is_homogeneous():
            raise PreconditionError("projective counting needs a homogeneous polynomial")
        rep.N_projective = sum(r["N"] for r in _projective_scan(F, {"N"}, threads, budget_evals))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep.elapsed = time.perf_counter() - t0
    return rep


def count_singular(F: MPoly, *, threads: int = 1, budget_evals: int = DEFAULT_EVAL_BUDGET) -> int:
    """S1: number of x in F_q^n with F(x) = 0 and grad F(x) = 0."""
    return sum(r["S1"] for r in _affine_scan(F, None, {"S1"}, threads, budget_evals))


def count_common_zeros(G: MPoly, H: MPoly, *, threads: int = 1,
                       budget_evals: int = DEFAULT_EVAL_BUDGET) -> int:
    """S2: number of x in F_q^n with G(x) = H(x) = 0."""
    _same_ring(G, H)
    return sum(r["S2"] for r in _affine_scan(G, H, {"S2"}, threads, budget_evals))


def count_all(G: MPoly, H: MPoly | None = None, *, threads: int = 1,
              budget_evals: int = DEFAULT_EVAL_BUDGET) -> CountReport:
    """N_affine, S1, S2 in one pass plus N_projective for forms, cross-checked."""
    _same_ring(G, H)
    t0 = time.perf_counter()
    want = {"N", "S1"} | ({"S2"} if H is not None else set())
    res = _affine_scan(G, H, want, threads, budget_evals)
    rep = CountReport(G.spec.q, G.nvars, G.degree)
    rep.N_affine = sum(r["N"] for r in res)
    rep.S1 = sum(r["S1"] for r in res)
    if H is not None:
        rep.S2 = sum(r["S2"] for r in res)
    if G.is_homogeneous() and G.degree >= 1:
        rep.N_projective = sum(r["N"] for r in _projective_scan(G, {"N"}, threads, budget_evals))
        if rep.N_affine != (G.spec.q - 1) * rep.N_projective + 1:
            raise InvariantViolation(
                f"N_affine={rep.N_affine} but (q-1)*N_projective+1={(G.spec.q - 1) * rep.N_projective + 1}")
    if not 0 <= rep.S1 <= rep.N_affine:
        raise InvariantViolation("S1 outside [0, N_affine]")
    rep.elapsed = time.perf_counter() - t0
    return rep


def find_nonsingular(G: MPoly, H: MPoly | None = None, *, threads: int = 1,
                     budget_evals: int = DEFAULT_EVAL_BUDGET,
                     start_seed: int | None = None) -> Witness | None:
    """First x (lexicographically) with G(x)=0, grad G(x) != 0 and H(x) != 0.

    With ``start_seed`` the scan starts at a seeded random x0 slab and wraps
    around; the returned witness is re-verified exactly the same way.
    """
    _same_ring(G, H)
    q, n = G.spec.q, G.nvars
    _check_budget(q**n, budget_evals)
    jobs = list(_slabs(q, (), n))
    if start_seed is not None:
        k = int(np.random.default_rng(start_seed).integers(len(jobs)))
        jobs = jobs[k:] + jobs[:k]
    work = _masks(G, H, {"witness"})
    found = None
    if threads <= 1:
        for job in jobs:
            found = work(job)["witness"]
            if found is not None:
                break
    else:
        # evaluate in waves of `threads` slabs; first hit in scan order wins
        for i in range(0, len(jobs), threads):
            hits = [r["witness"] for r in _run(work, jobs[i:i + threads], threads)]
            hits = [h for h in hits if h is not None]
            if hits:
                found = hits[0]
                break
    if found is None:
        return None
    point = [G.spec.element(c) for c in _index_to_point(found, q, n)]
    return make_witness(G, point, H, {"scan_index": found})


def count_nonsingular_curve(P: MPoly, mode: str = "projective", *, threads: int = 1,
                            budget_evals: int = DEFAULT_EVAL_BUDGET) -> int:
    """Non-singular zeros of the plane curve P(x, y) = 0, affine or projective."""
    if P.nvars != 2:
        raise PreconditionError("count_nonsingular_curve expects a polynomial in 2 variables")
    if P.is_zero():
        raise PreconditionError("the zero polynomial does not define a curve")
    if mode == "affine":
        res = _affine_scan(P, None, {"N", "S1"}, threads, budget_evals)
        return sum(r["N"] - r["S1"] for r in res)
    if mode == "projective":
        F = homogenize(P, P.degree)
        res = _projective_scan(F, {"N", "S1"}, threads, budget_evals)
        return sum(r["N"] - r["S1"] for r in res)
    raise ValueError(f"unknown mode {mode!r}")
