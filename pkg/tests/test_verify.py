import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onticfock import cogwheel, fermions
from onticfock.errors import BasisMismatchError, ConfigError
from onticfock.fock import FockBasis, make_boson_mode
from onticfock.verify import (
    CheckResult,
    Report,
    RunConfig,
    check_completeness,
    check_eigenrelation,
    check_operator_identity,
    check_orthonormality,
    check_permutation,
    config_from_dict,
    gram_matrix,
    load_config,
    rng_for,
    run_suite,
    suite_tasks,
)
from onticfock.verify.checks import COMPENSATED_ABOVE

# ----------------------------------------------------------- CheckResult


@settings(max_examples=100)
@given(st.floats(0, 1e3), st.floats(1e-30, 1e3))
def test_passed_iff_within_tolerance(measured, tol):
    r = CheckResult("x", "demo", measured, tol)
    assert r.passed == (measured <= tol)
    assert r.status == ("pass" if r.passed else "fail")


def test_check_result_validation():
    with pytest.raises(ValueError):
        CheckResult("x", "demo", -1.0, 1.0)
    with pytest.raises(ValueError):
        CheckResult("x", "nonsense", 0.0, 1.0)
    with pytest.raises(ValueError):
        CheckResult("x", "demo", 1.0, 0.1, expected_fail=True)


def test_expected_fail_semantics():
    r = CheckResult("x", "demo", 0.3, 1e-12, expected_fail=True, margin=0.2)
    assert not r.passed and r.confirmed and r.ok and r.status == "xfail"
    r = CheckResult("x", "demo", 0.1, 1e-12, expected_fail=True, margin=0.2)
    assert not r.ok and r.status == "xfail-unconfirmed"


# --------------------------------------------------------- generic checks


def test_orthonormality_examples():
    assert check_orthonormality(cogwheel.ontic_basis(3), 1e-13).measured < 1e-13
    fam = cogwheel.coherent_circle_family(30, 1.0, 8)
    r = check_orthonormality(fam, 1e-12)
    assert not r.passed and r.measured >= math.exp(-2)
    s = cogwheel.phase_state(3, 0.4)
    r = check_orthonormality([s, s], 1e-12)
    assert r.measured == pytest.approx(1.0) and not r.passed


def test_orthonormality_errors():
    with pytest.raises(ValueError):
        check_orthonormality([cogwheel.phase_state(3, 0)], 1e-12)
    with pytest.raises(BasisMismatchError):
        check_orthonormality([cogwheel.phase_state(3, 0), cogwheel.phase_state(4, 0)], 1e-12)


def test_completeness_examples():
    assert check_completeness(cogwheel.ontic_basis(4), 1e-12).passed
    r = check_completeness(cogwheel.ontic_basis(4)[:-1], 1e-12)
    # the missing projector |phi><phi| has entries of modulus 1/D
    assert r.measured == pytest.approx(0.25, abs=1e-12)
    assert not r.passed
    b = fermions.FermionBlock(fermions.FermionGeometry((fermions.Direction(0.5),), 2))
    _, mat = b.ontic_basis()
    assert check_completeness(mat, 1e-12).passed


def test_completeness_with_removed_number_state_is_one():
    basis = FockBasis.bosonic([4])
    states = [basis.basis_state([n]) for n in range(3)]
    assert check_completeness(states, 1e-12).measured == 1.0


def test_permutation_examples():
    D = 4
    U = cogwheel.evolve_mode(cogwheel.CogwheelMode(D, 1.0), math.pi / 2)
    basis = cogwheel.ontic_basis(D)
    good = check_permutation(U, basis, [1, 2, 3, 0], 1e-12)
    assert good.passed
    assert len(good.metadata["phases"]) == D
    bad = check_permutation(U, basis, [0, 1, 2, 3], 1e-12)
    assert bad.metadata["off_target_max"] == pytest.approx(1.0)
    assert not bad.passed
    with pytest.raises(ValueError):
        check_permutation(U, basis, [0, 0, 1, 2], 1e-12)


def test_permutation_fermion_block_with_wrap_metadata():
    from onticfock.verify.suites import _block, _f_evolve

    cfg = RunConfig()
    r = _f_evolve(cfg, _block(cfg, 2, 1), 1, "fermion-test")
    assert r.passed
    assert "wrap_counts" in r.metadata and max(r.metadata["wrap_counts"]) >= 1
    assert set(r.metadata["predicted_signs"]) == {1, -1}


def test_permutation_counts_unitarity_defect():
    basis = FockBasis.bosonic([2])
    from onticfock.fock import LinearOperator

    U = LinearOperator.from_dense(basis, [[2.0, 0], [0, 1.0]])
    states = [basis.basis_state([0]), basis.basis_state([1])]
    r = check_permutation(U, states, [0, 1], 1e-12)
    assert r.metadata["unitarity_defect"] == pytest.approx(3.0)
    assert not r.passed


def test_eigenrelation_examples():
    D = 5
    phis = cogwheel.lattice_phases(D)
    basis = cogwheel.ontic_basis(D)
    assert check_eigenrelation(cogwheel.beable_cyclic(D), basis, np.exp(1j * phis), 1e-12).passed
    sg = check_eigenrelation(cogwheel.beable_sg(D), basis, np.exp(1j * phis), 1e-12)
    assert not sg.passed
    assert sg.measured == pytest.approx(D**-0.5, abs=1e-12)
    assert check_eigenrelation(cogwheel.beable_sg(D), basis, np.exp(1j * phis), 1.1 * D**-0.5).passed
    b = fermions.FermionBlock(fermions.FermionGeometry((fermions.Direction(0.5),), 1))
    s = b.ontic_state([1, 0])
    assert check_eigenrelation(b.n_op(0), s, 1.0, 1e-12).passed


def test_operator_identity_examples():
    D = 4
    assert check_operator_identity(cogwheel.beable_from_projectors(D), cogwheel.beable_cyclic(D), 1e-12).passed
    a, adag, _ = make_boson_mode(D)
    r = check_operator_identity(a.commutator(adag), np.eye(D), 1e-12)
    # top level holds 1 - D, so the deviation from I there is D
    assert r.measured == pytest.approx(D, abs=1e-12)
    assert not r.passed
    b = fermions.FermionBlock(fermions.FermionGeometry((fermions.Direction(0.5),), 2))
    psi, psid = b.site_operators()[0]
    assert check_operator_identity(psi.anticommutator(psid), b.basis.identity(), 1e-13).passed


def test_compensated_gram_matches_plain():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(COMPENSATED_ABOVE + 10, 3)) + 1j * rng.normal(size=(COMPENSATED_ABOVE + 10, 3))
    np.testing.assert_allclose(gram_matrix(v), v.conj().T @ v, rtol=1e-12)


# --------------------------------------------------------------- suites


def test_default_run_all_ok():
    report = run_suite(RunConfig())
    assert report.success
    plain = [c for c in report.checks if not c.expected_fail]
    assert plain and all(c.passed for c in plain)
    xfails = [c for c in report.checks if c.expected_fail]
    assert xfails and all(c.confirmed and not c.passed for c in xfails)
    ids = [c.id for c in report.checks]
    assert ids == sorted(ids) and len(set(ids)) == len(ids)


def test_every_scheduled_check_present_once():
    cfg = RunConfig(suites=["cogwheel", "fermion"])
    cfg.cogwheel.dims = [2, 3]
    cfg.fermion.K = [1]
    expected = sorted(cid for cid, _ in suite_tasks(cfg))
    assert [c.id for c in run_suite(cfg).checks] == expected


def test_counterexample_suite_succeeds_with_xfails():
    report = run_suite(RunConfig(suites=["counterexamples"]))
    assert report.success
    statuses = {c.status for c in report.checks}
    assert "xfail" in statuses and "fail" not in statuses


def test_ignore_policy_drops_xfails():
    cfg = RunConfig(suites=["counterexamples"], expected_fail_policy="ignore")
    report = run_suite(cfg)
    assert all(not c.expected_fail for c in report.counted())
    assert report.success


def test_unknown_suite_is_config_error():
    with pytest.raises(ConfigError, match="suites"):
        run_suite(RunConfig(suites=["nosuch"]))


def test_tight_tolerance_fails():
    cfg = RunConfig(suites=["fermion"])
    cfg.fermion.K = [1]
    cfg.tolerances.override_all(1e-30)
    assert not run_suite(cfg).success


def test_determinism_and_worker_independence():
    cfg = RunConfig(suites=["cogwheel", "scalar-real", "counterexamples"])
    cfg.cogwheel.dims = [2, 5]
    a = run_suite(cfg).canonical_json()
    b = run_suite(cfg).canonical_json()
    assert a == b
    cfg.workers = 3
    threaded = run_suite(cfg).to_dict(include_timing=False)
    assert threaded["checks"] == run_suite(RunConfig(**{**cfg.__dict__, "workers": 1})).to_dict(False)["checks"]


def test_seed_changes_random_checks_only():
    cfg = RunConfig(suites=["cogwheel"])
    cfg.cogwheel.dims = [3]
    cfg.cogwheel.evolution_dims = [2]
    r1 = run_suite(cfg)
    cfg.seed += 1
    r2 = run_suite(cfg)
    m1 = {c.id: c.measured for c in r1.checks}
    m2 = {c.id: c.measured for c in r2.checks}
    assert m1["cogwheel.D03.orthonormality"] == m2["cogwheel.D03.orthonormality"]
    assert m1["cogwheel.evolve.D02.offlattice"] != m2["cogwheel.evolve.D02.offlattice"]


def test_rng_streams_are_named():
    a = rng_for(1, "x").random(3)
    assert np.array_equal(a, rng_for(1, "x").random(3))
    assert not np.array_equal(a, rng_for(1, "y").random(3))


# --------------------------------------------------------------- report


def small_report():
    cfg = RunConfig(suites=["cogwheel", "counterexamples"])
    cfg.cogwheel.dims = [2, 3]
    cfg.cogwheel.evolution_dims = [2]
    return run_suite(cfg)


def test_report_json_roundtrip():
    rep = small_report()
    back = Report.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
    assert back.canonical_json() == rep.canonical_json()
    assert "wall_clock" not in rep.canonical_json()


def test_report_rejects_tampered_passed():
    import json

    data = json.loads(small_report().to_json())
    data["checks"][0]["passed"] = not data["checks"][0]["passed"]
    with pytest.raises(ValueError):
        Report.from_dict(data)


def test_report_rejects_duplicates():
    c = CheckResult("a", "demo", 0.0, 1.0)
    with pytest.raises(ValueError):
        Report([c, c], {}, "0", 1)


def test_report_order_independent():
    rep = small_report()
    shuffled = Report(list(reversed(rep.checks)), rep.config, rep.version, rep.seed,
                      rep.expected_fail_policy, rep.suites)
    assert shuffled.canonical_json() == rep.canonical_json()


def test_csv_and_table_rows():
    rep = small_report()
    assert len(rep.to_csv().strip().splitlines()) == len(rep.checks) + 1
    table = rep.to_table().strip().splitlines()
    assert len(table) == len(rep.checks) + 2
    assert table[-1].endswith("SUCCESS")


# --------------------------------------------------------------- config


def test_config_from_dict_and_paths():
    cfg = config_from_dict({"seed": 3, "cogwheel": {"dims": [2, 3]}, "tolerances": {"exact": 1e-10}})
    assert cfg.seed == 3 and cfg.cogwheel.dims == [2, 3] and cfg.tolerances.exact == 1e-10
    with pytest.raises(ConfigError, match="cogwheel.nope"):
        config_from_dict({"cogwheel": {"nope": 1}})
    with pytest.raises(ConfigError, match="tolerances.exact"):
        config_from_dict({"tolerances": {"exact": -1.0}})
    with pytest.raises(ConfigError, match="seed"):
        config_from_dict({"seed": "abc"})
    with pytest.raises(ConfigError, match=r"bosons.vector\[0\]"):
        config_from_dict({"bosons": {"vector": [[6, 2, 4]]}})
    with pytest.raises(ConfigError, match=r"fermion.K\[0\]"):
        config_from_dict({"fermion": {"K": [7]}})


def test_load_config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('seed = 9\nsuites = ["cogwheel"]\ncogwheel.dims = [4]\n')
    cfg = load_config(path)
    assert cfg.seed == 9 and cfg.suites == ["cogwheel"] and cfg.cogwheel.dims == [4]
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = = 1\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")


def test_flat_snapshot_keys():
    flat = RunConfig().flat()
    assert flat["tolerances.exact"] == 1e-12
    assert flat["cogwheel.dims"] == list(range(2, 33))
