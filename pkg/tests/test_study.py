import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gauss_nclass.gaussian import SamplerConfig, StandardMoments
from gauss_nclass.measures import log_negativity, nonclassicality_depth, pt_invariant_e
from gauss_nclass.study import (
    PerturbationSpec,
    StudyRecord,
    chi_minus_variant,
    chi_value,
    depth_preserving_shift,
    identity_campaign,
    perturbation_identity,
    records_csv,
    relation_analysis,
    run_study,
    study_record,
    symmetric_curve_ln,
    symmetric_e,
)

TMSV_M = math.cosh(1.0) / 2
TMSV_C = math.sinh(1.0) / 2


@pytest.fixture(scope="module")
def small_study():
    return run_study(SamplerConfig(seed=5, count=300, max_squeeze=1.0, max_thermal=1.0))


@pytest.fixture(scope="module")
def symmetric_study():
    return run_study(SamplerConfig(seed=5, count=300, max_squeeze=1.0, max_thermal=1.0, mix_passive=False))


def test_study_is_deterministic(small_study):
    again = run_study(SamplerConfig(seed=5, count=300, max_squeeze=1.0, max_thermal=1.0))
    assert records_csv(again) == records_csv(small_study)


def test_parallel_study_matches_serial():
    cfg = SamplerConfig(seed=3, count=40)
    assert records_csv(run_study(cfg, workers=2)) == records_csv(run_study(cfg, workers=1))


def test_records_are_ordered_and_converged(small_study):
    assert [r.state_id for r in small_study] == list(range(300))
    assert all(r.converged for r in small_study)


def test_entangled_states_are_deep(small_study):
    for r in small_study:
        if r.ln > 0:
            assert r.depth > 0


def test_separable_states_have_zero_depth(small_study):
    # the canonical point makes separable states P-positive
    for r in small_study:
        if r.ln == 0:
            assert r.depth == pytest.approx(0.0, abs=1e-9)


def test_relation_needs_enough_records(small_study):
    with pytest.raises(ValueError, match="at least 100"):
        relation_analysis(small_study[:50])


def test_single_state_has_no_spread(small_study):
    report = relation_analysis(small_study[:1], min_records=1)
    assert report.max_spread == 0.0
    assert report.n_converged == 1


def test_symmetric_records_lie_on_curve(symmetric_study):
    report = relation_analysis(symmetric_study)
    assert report.max_curve_deviation < 1e-6
    assert set(report.to_json()) >= {"bins", "max_spread", "n_converged"}


def test_minimal_depth_mode_lies_on_curve():
    records = run_study(SamplerConfig(seed=8, count=30), depth_mode="minimal")
    for r in records:
        if r.ln > 0:
            assert r.ln == pytest.approx(float(symmetric_curve_ln(r.depth)), abs=1e-6)


def test_bins_cover_all_records(small_study):
    report = relation_analysis(small_study, bin_width=0.05)
    assert sum(b["count"] for b in report.bins) == report.n_converged
    assert all(b["ln_max"] - b["ln_min"] == b["spread"] for b in report.bins)


def test_unconverged_records_are_ignored():
    recs = [StudyRecord(i, 0.1, float(symmetric_curve_ln(0.1)), True) for i in range(100)]
    recs.append(StudyRecord(100, math.nan, math.nan, False))
    assert relation_analysis(recs).n_converged == 100


def test_records_csv_format():
    text = records_csv([StudyRecord(0, 0.25, 1.0, True), StudyRecord(1, math.nan, math.nan, False)])
    assert text.splitlines() == ["state_id,depth,ln,converged", "0,0.25,1.0,true", "1,nan,nan,false"]


def test_study_record_reports_residuals():
    rec = study_record(SamplerConfig(seed=2, count=1), 0)
    assert max(abs(x) for x in rec.residuals) < 1e-9


def test_bad_depth_mode():
    with pytest.raises(ValueError):
        run_study(SamplerConfig(seed=1, count=1), depth_mode="deepest")


# --- perturbation identity --------------------------------------------------

def test_symmetric_e_matches_general_formula():
    m, n, c = 1.3, 0.9, 0.7
    assert symmetric_e(m, n, c) == pytest.approx(pt_invariant_e(StandardMoments(m, m, n, n, c, -c)), rel=1e-12)


def test_zero_shift_changes_nothing():
    result = perturbation_identity(PerturbationSpec(TMSV_M, TMSV_M, TMSV_C, 0.0))
    assert (result.delta_m, result.delta_n, result.delta_e) == (0.0, 0.0, 0.0)


def test_tmsv_shift():
    dc = 0.05 * TMSV_C
    result = perturbation_identity(PerturbationSpec(TMSV_M, TMSV_M, TMSV_C, dc))
    assert result.delta_m == pytest.approx(dc, rel=1e-12)
    assert result.delta_m == result.delta_n
    assert abs(result.delta_e) < 1e-12
    assert abs(result.delta_e_direct) < 1e-12
    assert abs(result.delta_depth) < 1e-12


def test_asymmetric_split_still_preserves_e():
    spec = PerturbationSpec(1.2, 0.8, 0.6, 0.03)
    result = perturbation_identity(spec, asymmetry=0.01)
    assert result.delta_m - result.delta_n == pytest.approx(0.01, abs=1e-15)
    assert abs(result.delta_e_direct) < 1e-12
    assert abs(result.delta_e) < 1e-12
    assert abs(result.delta_depth) < 1e-12


def test_negative_control_moves_e():
    spec = PerturbationSpec(1.2, 0.8, 0.6, 0.03)
    result = perturbation_identity(spec, extra_noise=0.03)
    assert abs(result.delta_e_direct) > 1e-6
    assert result.delta_depth < 0


def test_minus_sign_chi_disagrees():
    m, n, c = 1.2, 0.8, 0.6
    assert chi_value(m, n, c) == pytest.approx(2.0 - math.sqrt(1.44 + 0.16))
    spec = PerturbationSpec(m, n, c, 0.05)
    result = perturbation_identity(spec)
    assert abs(result.delta_e_minus_chi) > 1e-3
    assert math.isnan(chi_minus_variant(2.0, 0.5, 0.1))


def test_perturbation_limits():
    with pytest.raises(ValueError, match="delta_c"):
        perturbation_identity(PerturbationSpec(TMSV_M, TMSV_M, TMSV_C, 0.2 * TMSV_C))
    with pytest.raises(ValueError, match="not entangled"):
        perturbation_identity(PerturbationSpec(1.0, 1.0, 0.1, 0.0))


@settings(max_examples=200, deadline=None)
@given(
    r=st.floats(0.05, 1.5), na=st.floats(0, 0.5), nb=st.floats(0, 0.5),
    frac=st.floats(-1, 1), asym=st.floats(-0.02, 0.02),
)
def test_depth_preserving_shift_keeps_depth(r, na, nb, frac, asym):
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    a, b = na + 0.5, nb + 0.5
    m, n = 0.5 * (a + b) * ch + 0.5 * (a - b), 0.5 * (a + b) * ch - 0.5 * (a - b)
    c = 0.5 * (a + b) * sh
    dc = 0.1 * c * frac
    dm, dn = depth_preserving_shift(m, n, c, dc, asym)
    try:
        shifted = StandardMoments(m + dm, m + dm, n + dn, n + dn, c + dc, -c - dc)
    except ValueError:
        return
    base = StandardMoments(m, m, n, n, c, -c)
    t0, t1 = nonclassicality_depth(base), nonclassicality_depth(shifted)
    if t0 > 0 and t1 > 0:
        assert t1 == pytest.approx(t0, abs=1e-12)
        if log_negativity(base)[0] > 0:
            assert pt_invariant_e(shifted) == pytest.approx(pt_invariant_e(base), abs=1e-9 * max(1, pt_invariant_e(base)))


def test_small_campaign():
    pairs = identity_campaign(seed=4, count=50)
    assert len(pairs) == 50
    for spec, kept, control in pairs:
        assert abs(kept.delta_e) < 1e-9 * max(1.0, abs(kept.e))
        assert abs(kept.delta_e_direct) < 1e-9 * max(1.0, abs(kept.e))
    assert np.mean([abs(c.delta_e_direct) > 1e-6 for _, _, c in pairs]) >= 0.99
