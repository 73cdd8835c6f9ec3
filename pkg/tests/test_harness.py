import csv
import io
import json

import pytest

from nonsingular import harness
from nonsingular.errors import PreconditionError
from nonsingular.field import make_field
from nonsingular.harness import RandomFormSpec, VerificationRun, gen_random_form
from nonsingular.irreducible import is_absolutely_irreducible
from nonsingular.poly import divides


def test_gen_linear_any():
    for seed in range(20):
        G = gen_random_form(RandomFormSpec(1, 3, "5", "any", seed)).G
        assert G.degree == 1 and G.is_homogeneous()
        assert is_absolutely_irreducible(G)


def test_gen_absolutely_irreducible_seed_42():
    s = gen_random_form(RandomFormSpec(2, 3, "7", "absolutely-irreducible", 42))
    assert s.G.degree == 2 and s.G.is_homogeneous()
    assert is_absolutely_irreducible(s.G)
    assert s.rejections >= 0


def test_gen_is_deterministic():
    rs = RandomFormSpec(3, 3, "11", "pair", [9, 2], e=2)
    a, b = gen_random_form(rs), gen_random_form(rs)
    assert (a.G, a.H, a.rejections) == (b.G, b.H, b.rejections)


def test_gen_pair_constraint():
    for seed in range(10):
        s = gen_random_form(RandomFormSpec(2, 3, "5", "pair", seed, e=2))
        assert s.H.degree == 2 and s.H.is_homogeneous()
        assert not divides(s.G, s.H)


def test_gen_rejection_budget():
    # a quadratic form in one variable is c x0^2, never absolutely irreducible
    with pytest.raises(PreconditionError):
        gen_random_form(RandomFormSpec(2, 1, "5", "absolutely-irreducible", 0, max_attempts=50))
    with pytest.raises(PreconditionError):
        gen_random_form(RandomFormSpec(2, 3, "5", "bogus", 0))


def test_enumerate_forms_counts():
    K = make_field(3)
    assert sum(1 for _ in harness.enumerate_forms(K, 2, 2)) == 3**3 - 1
    assert sum(1 for _ in harness.enumerate_forms(K, 2, 2, normalized=True)) == (3**3 - 1) // 2


def test_thm2_linear():
    run = harness.verify_thm2(1, 1, 3, 7, 100, 0)
    assert run.passed and run.summary["pass"] == 100


def test_thm2_precondition():
    with pytest.raises(PreconditionError):
        harness.verify_thm2(2, 1, 3, 103, 5, 0)


def test_thm2_exploratory_below_threshold():
    run = harness.verify_thm2(2, 1, 3, 5, 10, 0, exploratory=True)
    assert run.parameters["threshold"] == "no"
    assert run.count("fail") == 0


def test_thm3_modes_agree():
    run = harness.verify_thm3(2, 3, 19, 10, 1, "via-slicing")
    assert run.passed
    assert all(o["modes_agree"] and o["slices_tried"] >= 1 for o in run.outcomes)
    assert harness.verify_thm3(1, 3, 3, 10, 0).passed
    with pytest.raises(PreconditionError):
        harness.verify_thm3(2, 3, 17, 10, 0)


def test_cafure_matera_hyperplanes():
    run = harness.verify_cafure_matera(1, 3, [5, 7], 10, 0)
    assert run.passed and all(o["deviation"] == 0 for o in run.outcomes)
    assert [o["index"] for o in run.outcomes] == list(range(20))


def test_leep_yeomans_small_degrees():
    run = harness.verify_leep_yeomans(2, [5, 7], 10, 0)
    assert run.passed
    assert all(o["nonsingular_projective"] == o["q"] + 1 == o["lower_bound"] for o in run.outcomes)
    run = harness.verify_leep_yeomans(1, [5], 5, 0)
    assert all(o["nonsingular_projective"] == 6 for o in run.outcomes)


def test_lemma_bounds():
    run = harness.verify_lemma_bounds(2, 1, 3, 7, 20, 0)
    assert run.passed
    run = harness.verify_lemma_bounds(1, 1, 3, 5, 20, 0)
    assert run.passed and all(o["N_F1"] == 25 and o["S2"] == 5 for o in run.outcomes)


def test_chevalley_warning():
    run = harness.verify_chevalley_warning(2, 3, 3, 30, 0)
    assert run.passed
    with pytest.raises(PreconditionError):
        harness.verify_chevalley_warning(3, 3, 5, 1)


def test_slicing_identity_random():
    assert harness.verify_slicing_identity(3, 4, 7, 300, 0).passed


def test_undecided_never_passes():
    run = harness.verify_thm3(2, 3, 19, 3, 0, search_budget=2)
    assert run.count("undecided") == 3 and not run.passed and run.exit_code == 3
    run = VerificationRun("thm2", {}, [{"index": 0, "status": "pass"},
                                      {"index": 1, "status": "undecided"}])
    assert not run.passed and run.exit_code == 3
    run.outcomes.append({"index": 2, "status": "fail"})
    assert run.exit_code == 1


def test_report_schema_and_csv():
    run = harness.verify_lemma_bounds(2, 2, 3, 5, 4, 3)
    doc = json.loads(run.to_json())
    assert doc["schema_version"] == harness.SCHEMA_VERSION
    assert set(doc) == {"schema_version", "suite", "parameters", "outcomes", "summary"}
    assert set(doc["summary"]) == {"pass", "fail", "undecided", "elapsed_ms"}
    assert doc["summary"]["elapsed_ms"] is None
    assert json.loads(run.to_json(timing=True))["summary"]["elapsed_ms"] >= 0
    rows = list(csv.DictReader(io.StringIO(run.to_csv())))
    assert [int(r["index"]) for r in rows] == [0, 1, 2, 3]
    assert json.loads(rows[0]["detail"])["instance"] == doc["outcomes"][0]["instance"]


def test_threads_do_not_change_reports():
    a = harness.verify_thm2(2, 1, 3, 107, 2, 5, threads=1).to_json()
    b = harness.verify_thm2(2, 1, 3, 107, 2, 5, threads=3).to_json()
    assert a == b
