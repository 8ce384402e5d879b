import numpy as np
import pytest

from curvspec.classifier import (
    CheckConfig,
    HypothesisError,
    PropertySpec,
    SpecError,
    Verdict,
    adapted_frame_gf,
    check,
    check_suite_theorem,
    conformal_invariance_check,
    einstein_equivalence_check,
    model_report_for_model,
    nilpotency_structure_check,
    osserman_types_expected,
    recheck_witness,
    sample_operator,
    spacelike_rank_report,
    verify_model,
)
from curvspec.geometry import ConstantCurvature, FamilyGF, HypersurfaceGf, ProductWithFlat
from curvspec.jordan import same_type
from curvspec.polynomial import PolySpec
from curvspec.tensor_core import model_v3s, model_vpp

QUICK = CheckConfig(samples=20, n_points=3)
GF_DEF = HypersurfaceGf.definite_default(3)
GF_IND = HypersurfaceGf.indefinite_default(3)
GF_BIG = FamilyGF.default(2)


def gf(text, p):
    return HypersurfaceGf(p, PolySpec.parse(text, tuple(f"x{i + 1}" for i in range(p))))


def test_definite_gf_spacelike_osserman_consistent():
    v = check(GF_DEF, PropertySpec("jordan-osserman", "spacelike"), config=QUICK)
    assert v.status == "consistent" and v.witness is None
    assert v.samples_used == 60
    assert "not a proof" in v.evidence


def test_indefinite_gf_osserman_falsified_with_witness():
    spec = PropertySpec("jordan-osserman", "spacelike")
    v = check(GF_IND, spec, config=QUICK)
    assert v.status == "falsified"
    ref, bad = recheck_witness(GF_IND, spec, v)
    assert not same_type(ref, bad, v.tolerances["tol_eig"])


def test_gF_osserman_flavors():
    assert check(GF_BIG, PropertySpec("jordan-osserman", "spacelike"), config=QUICK).status == "consistent"
    v = check(GF_BIG, PropertySpec("jordan-osserman", "timelike"), config=QUICK)
    assert v.status == "falsified"
    ref, bad = recheck_witness(GF_BIG, PropertySpec("jordan-osserman", "timelike"), v)
    assert not same_type(ref, bad)


@pytest.mark.parametrize("spec", [PropertySpec("jordan-osserman", "timelike"), PropertySpec("jordan-ip", "mixed"),
                                  PropertySpec("k-stanilov", "spacelike", k=2),
                                  PropertySpec("osserman-type-rs", r=1, s=2)], ids=lambda s: s.check_id)
def test_flat_is_consistent_with_zero_reference(spec):
    v = check(ConstantCurvature(0.0, 2, 2), spec, config=CheckConfig(samples=10, n_points=2))
    assert v.status == "consistent"
    assert all(e["re"] == 0 and e["im"] == 0 and set(e["blocks"]) == {1} for e in v.reference_jordan_type)


def test_mixed_ip_falsified_on_gf():
    assert check(gf("x1^2 + x2^2 + x1^4", 2), PropertySpec("jordan-ip", "mixed"), config=QUICK).status == "falsified"


def test_reproducible_serialization():
    spec = PropertySpec("jordan-ip", "mixed")
    a = check(GF_DEF, spec, config=QUICK).dumps()
    b = check(GF_DEF, spec, config=QUICK).dumps()
    assert a == b
    c = check(GF_DEF, spec, config=CheckConfig(samples=20, n_points=3, seed=7)).dumps()
    assert a != c


def test_verdict_json_round_trip():
    v = check(GF_IND, PropertySpec("jordan-osserman", "timelike"), config=QUICK)
    import json
    assert Verdict.from_json(json.loads(v.dumps())).dumps() == v.dumps()


def test_monotone_in_sample_prefix():
    for spec in (PropertySpec("jordan-ip", "spacelike"), PropertySpec("k-osserman", "spacelike", k=2)):
        assert check(GF_BIG, spec, config=CheckConfig(samples=30, n_points=2)).status == "consistent"
        for n in (1, 5, 15):
            assert check(GF_BIG, spec, config=CheckConfig(samples=n, n_points=2)).status == "consistent"


@pytest.mark.parametrize("fam, spec", [(GF_BIG, PropertySpec("k-stanilov", "timelike", k=4)),
                                        (GF_BIG, PropertySpec("k-stanilov", "timelike", k=2)),
                                        (GF_IND, PropertySpec("jordan-osserman", "timelike")),
                                        (GF_DEF, PropertySpec("jordan-ip", "timelike"))],
                         ids=lambda x: getattr(x, "check_id", getattr(x, "name", "")))
def test_scaling_never_flips_verdict(fam, spec):
    a = check(fam, spec, config=QUICK)
    b = check(fam, spec, config=CheckConfig(samples=20, n_points=3, operator_scale=2.0))
    assert a.status == b.status


def test_spec_validation():
    with pytest.raises(SpecError):
        PropertySpec("jordan-osserman", "mixed")
    with pytest.raises(SpecError):
        PropertySpec("k-osserman", "spacelike", k=1)
    with pytest.raises(SpecError):
        PropertySpec("osserman-type-rs")
    with pytest.raises(SpecError):
        PropertySpec("nonsense")
    assert PropertySpec("jordan-ip").scope == "pointwise"
    assert PropertySpec("jordan-osserman").scope == "global"


def test_impossible_type_is_rejected_or_vacuous():
    fam = ConstantCurvature(1.0, 0, 3)
    spec = PropertySpec("jordan-osserman", "timelike")
    with pytest.raises(SpecError):
        check(fam, spec, config=QUICK)
    v = check(fam, spec, config=QUICK, allow_vacuous=True)
    assert v.status == "consistent" and v.note.startswith("vacuous")


def test_full_subspace_is_deterministic():
    v = check(ConstantCurvature(1.0, 0, 3), PropertySpec("k-osserman", "spacelike", k=3), config=QUICK)
    assert v.status == "consistent"
    assert v.samples_used == 3  # one frame per point


def test_sample_operator_reproducible():
    spec = PropertySpec("jordan-ip", "spacelike")
    P = GF_BIG.default_points(1)[0]
    a = sample_operator(GF_BIG, spec, P, QUICK, 3)
    b = sample_operator(GF_BIG, spec, P, QUICK, 3)
    assert a[1].tobytes() == b[1].tobytes() and a[2] == b[2]


def test_verify_model_gf_quadratic():
    fam = HypersurfaceGf.quadratic(3)
    for P in fam.default_points(3):
        rep = verify_model(fam, P, model_vpp(3), adapted_frame_gf(fam, P))
        assert rep.ok, rep


def test_verify_model_generic_quartic():
    for P in GF_DEF.default_points(3):
        assert verify_model(GF_DEF, P, model_vpp(3), adapted_frame_gf(GF_DEF, P)).ok


def test_verify_model_identity_and_random(rng):
    assert model_report_for_model(model_vpp(2)).ok
    assert model_report_for_model(model_v3s(2)).ok
    fam = HypersurfaceGf.quadratic(2)
    P = fam.default_points(1)[0]
    rep = verify_model(fam, P, model_vpp(2), rng.standard_normal((4, 4)))
    assert not rep.ok
    with pytest.raises(ValueError):
        verify_model(fam, P, model_vpp(2), np.zeros((4, 4)))


def test_adapted_frame_at_origin():
    F = adapted_frame_gf(HypersurfaceGf.quadratic(2), np.zeros(4))
    want = np.zeros((4, 4))
    want[:2, :2] = np.eye(2) / np.sqrt(2)
    want[2:, 2:] = np.sqrt(2) * np.eye(2)
    np.testing.assert_allclose(F, want, atol=1e-15)


def test_adapted_frame_needs_definite_hessian():
    with pytest.raises(HypothesisError):
        adapted_frame_gf(gf("x1^2 + x2^2 - x3^2", 3), GF_IND.default_points(1)[0])


def test_nilpotency_structure():
    rep = nilpotency_structure_check(GF_DEF, GF_DEF.default_points(1)[0])
    assert rep.ok and rep.index == 2 and rep.spacelike_ranks == [2]
    rep = nilpotency_structure_check(GF_BIG, GF_BIG.default_points(1)[0])
    assert rep.ok and rep.index == 3 and rep.spacelike_ranks == [4]
    assert nilpotency_structure_check(ConstantCurvature(0.0, 1, 2), np.zeros(3)).index == 1
    assert nilpotency_structure_check(gf("3*x1 - x2", 2), [0.1, 0.2, 0.3, 0.4]).index == 1
    with pytest.raises(TypeError):
        nilpotency_structure_check(ConstantCurvature(1.0, 1, 2), np.zeros(3))


def test_spacelike_rank_report():
    assert spacelike_rank_report(GF_BIG, GF_BIG.default_points(2), QUICK, n=10) == [4]


def test_conformal_invariance_and_einstein():
    alpha = PolySpec.parse("1 + (u1/10)^2", GF_BIG.coordinates)
    rep = conformal_invariance_check(GF_BIG, alpha, PropertySpec("conformal-osserman", "spacelike"), config=QUICK)
    assert rep.ok and rep.verdict_g["status"] == "consistent"
    one = PolySpec.parse("1", GF_BIG.coordinates)
    assert conformal_invariance_check(GF_BIG, one, PropertySpec("conformal-ip", "timelike"), config=QUICK).ok
    with pytest.raises(SpecError):
        conformal_invariance_check(GF_BIG, alpha, PropertySpec("jordan-ip", "spacelike"), config=QUICK)
    e = einstein_equivalence_check(ConstantCurvature(0.7, 1, 3), "timelike", config=QUICK)
    assert e.agree and e.conformal["status"] == "consistent"
    with pytest.raises(HypothesisError):
        einstein_equivalence_check(ProductWithFlat(ConstantCurvature(1.0, 0, 2), 1, 1), "spacelike", config=QUICK)


def test_osserman_type_table():
    assert osserman_types_expected(2, 2, 1, 0) == {(0, 1), (0, 2), (3, 1), (3, 0)}
    lit = osserman_types_expected(2, 2, 0, 1, "literal")
    cor = osserman_types_expected(2, 2, 0, 1, "corrected")
    assert (4, 0) in lit and (2, 0) in cor


def test_theorem_suite_rejects_unknown():
    with pytest.raises(ValueError):
        check_suite_theorem("9.9")
    with pytest.raises(HypothesisError):
        check_suite_theorem("3.2x", {"p": [2], "hessian": ["degenerate"]}, QUICK)


def test_theorem_suite_rows_quick():
    rep = check_suite_theorem("3.xx", {}, CheckConfig(samples=20, n_points=2))
    assert len(rep.rows) == 5 and rep.all_agree
    assert "all rows agree" in rep.to_text()


def test_roundoff_weyl_reads_as_zero():
    fam = ConstantCurvature(0.7, 1, 3)
    v = check(fam, PropertySpec("conformal-osserman", "timelike"), config=QUICK)
    assert v.status == "consistent" and v.uncertain_count == 0
    assert v.reference_jordan_type == [{"re": 0.0, "im": 0.0, "blocks": [1, 1, 1, 1]}]
