import numpy as np
import pytest

from nonsingular.errors import PreconditionError, SlicesExhaustedError
from nonsingular.field import make_field
from nonsingular.harness import RandomFormSpec, gen_random_form, random_form, random_poly
from nonsingular.poly import evaluate, gradient, parse_poly
from nonsingular.slicing import (SliceVector, bad_slice_density, classify_slice,
                                 find_nonsingular_via_slicing, lift_point,
                                 sample_bad_slice_fraction, slice_poly, wilson_interval)

from oracles import wilson_reference

F5, F7 = make_field(5), make_field(7)


def P(text, K, n=3):
    return parse_poly(text, K, n)


def test_worked_slice():
    f = P("x0*x2 - x1^2", F5)
    xi = SliceVector.from_codes(F5, [0, 0, 0, 1, 0, 0, 1])
    assert slice_poly(f, xi) == P("x0*x1 - x0^2", F5, 2)  # X Y - X^2
    point = lift_point(xi, 1, 1)
    assert [c.value for c in point] == [1, 1, 1]
    assert evaluate(f, point) == 0 == evaluate(slice_poly(f, xi), (1, 1))


def test_zero_directions_give_univariate_slice():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = random_poly(F7, 3, 3, rng)
        codes = list(rng.integers(0, 7, size=7))
        codes[5:] = [0, 0]  # Y coefficients
        sliced = slice_poly(f, SliceVector.from_codes(F7, codes))
        assert all(e[1] == 0 for e in sliced.terms)


def test_lift_of_zero_slice():
    xi = SliceVector.from_codes(F7, [0] * 7)
    assert [c.value for c in lift_point(xi, 3, 5)] == [3, 0, 0]


def test_degenerate_slices_are_bad():
    f = P("x0*x2 - x1^2", F5)
    xi = SliceVector.from_codes(F5, [0] * 7)
    assert classify_slice(f, slice_poly(f, xi)) == "bad"


def test_slice_vector_validation():
    with pytest.raises(PreconditionError):
        SliceVector.from_codes(F5, [0] * 6)
    with pytest.raises(PreconditionError):
        slice_poly(P("x0", F5, 2), SliceVector.from_codes(F5, [0] * 7))


def test_evaluation_identity_extension_field():
    K = make_field(2, 3)
    rng = np.random.default_rng(1)
    for _ in range(300):
        f = random_poly(K, 4, 3, rng)
        xi = SliceVector.random(K, 4, rng)
        a, b = (K.element(int(v)) for v in rng.integers(0, K.q, size=2))
        assert evaluate(slice_poly(f, xi), (a, b)) == evaluate(f, lift_point(xi, a, b))


def test_chain_rule_consequence():
    # nonzero sliced gradient at (a, b) forces a nonzero ambient gradient at the lift
    rng = np.random.default_rng(2)
    for _ in range(300):
        f = random_form(F7, 3, 2, rng)
        xi = SliceVector.random(F7, 3, rng)
        sliced = slice_poly(f, xi)
        a, b = (F7.element(int(v)) for v in rng.integers(0, 7, size=2))
        if any(not g.is_zero() for g in gradient(sliced).at((a, b))):
            assert any(not g.is_zero() for g in gradient(f).at(lift_point(xi, a, b)))


def test_bad_slice_density_conic_q19():
    f = P("x0*x2 - x1^2", make_field(19))
    rep = sample_bad_slice_fraction(f, 500, seed=1)
    assert rep.density_bound == bad_slice_density(2, 19) and float(rep.density_bound) == 18 / 19
    assert rep.within_bound and rep.fraction < 0.5
    assert rep.undecided == 0 and rep.bad + rep.good == 500


def test_bad_slice_density_vacuous_below_threshold():
    assert bad_slice_density(2, 17) >= 1


def test_bad_slice_fraction_is_seeded():
    f = P("x0*x2 - x1^2", make_field(23))
    assert sample_bad_slice_fraction(f, 50, 4).to_dict() == sample_bad_slice_fraction(f, 50, 4).to_dict()


def test_wilson_interval():
    for k, n in [(0, 10), (3, 10), (26, 500), (10, 10)]:
        lo, hi = wilson_interval(k, n)
        rlo, rhi = wilson_reference(k, n, 1.959963984540054)
        assert abs(lo - max(rlo, 0)) < 1e-12 and abs(hi - min(rhi, 1)) < 1e-12


def test_find_via_slicing_conic_q23():
    F = P("x0*x2 - x1^2", make_field(23))
    w = find_nonsingular_via_slicing(F, seed=5, max_slices=50)
    assert w.verify(F)
    assert w.info["slices_tried"] >= 1
    xi = SliceVector.from_codes(F.spec, w.info["slice"])
    assert lift_point(xi, *w.info["slice_point"]) == w.point


def test_find_via_slicing_linear():
    F = P("x0 + 2*x1 + 3*x2", F7)
    w = find_nonsingular_via_slicing(F, seed=0)
    assert w.verify(F) and w.info["slices_tried"] == 1


def test_find_via_slicing_gate():
    with pytest.raises(PreconditionError):
        find_nonsingular_via_slicing(P("x0^2 + 2*x0*x1 + x1^2", F7), seed=0)
    with pytest.raises(PreconditionError):
        find_nonsingular_via_slicing(P("x0^2 + x1", F7), seed=0)


def test_find_via_slicing_exhausted():
    # over F_3 a conic has few good slices with points; one slice may not suffice
    F = P("x0*x2 - x1^2", make_field(3))
    outcomes = []
    for seed in range(30):
        try:
            outcomes.append(find_nonsingular_via_slicing(F, seed=seed, max_slices=1).verify(F))
        except SlicesExhaustedError as exc:
            assert exc.slices_tried == 1
            outcomes.append(None)
    assert None in outcomes and True in outcomes


def test_slicing_threads_agree():
    for seed in range(5):
        F = gen_random_form(RandomFormSpec(2, 3, "19", "absolutely-irreducible", seed)).G
        one = find_nonsingular_via_slicing(F, seed=seed, threads=1).to_dict()
        assert one == find_nonsingular_via_slicing(F, seed=seed, threads=4).to_dict()
