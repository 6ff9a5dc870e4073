import json

import numpy as np
import pytest

from gcx.chart import ChartMap, ChartPoint, pullback
from gcx.models import (
    ANGLES,
    CHART_ANNULUS,
    CHART_CPLANE,
    CHART_TUBE,
    LogModelParams,
    SurgeryGeometry,
    local_model_polar,
    local_model_spinor,
    tube_symplectic,
)
from gcx.verify import (
    FIBER_LATTICE,
    check_h_properties,
    check_integrability,
    check_locus,
    check_polar_compatibility,
    check_quotient,
    check_symplectomorphism,
    check_type_jump,
    degenerate_locus_field,
    locate_type_change,
    locus_complex_structure,
    reduce_modular,
)


def test_symplectomorphism_check_passes():
    rep = check_symplectomorphism(samples=300, seed=42, tol=1e-10)
    assert rep.passed
    assert rep.max_residual <= 1e-10
    assert rep.samples == 300


def test_symplectomorphism_perturbed_map_fails():
    # perturbation oracle: nudging the tube radius by 0.01 must break the identity
    def fwd(ins):
        r, t1, t2, t3 = ins
        rt = (1.0 + 2.0 * r.log()).sqrt() + 0.01
        return [rt, t3, t2, -1.0 * t1]

    bad_psi = ChartMap(CHART_ANNULUS, CHART_TUBE, 4, fwd, target_periodic=ANGLES)
    sigma = tube_symplectic()
    _, omega = local_model_polar()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        p = ChartPoint(CHART_ANNULUS, (rng.uniform(0.62, 1.0), *rng.uniform(0, 1, 3)), ANGLES)
        worst = max(worst, (pullback(bad_psi, sigma, p) - omega(p).value()).max_abs())
    assert worst > 1e-3


def test_symplectomorphism_single_boundary_sample():
    rep = check_symplectomorphism(samples=1, seed=0, tol=1e-10)
    assert rep.passed


@pytest.mark.parametrize("region", ["cplane", "polar", "bump", "outer", "quotient"])
def test_integrability_regions_pass(region):
    rep = check_integrability(region, samples=60, seed=42, tol=1e-8)
    assert rep.passed, rep.notes
    assert rep.max_residual <= 1e-8


def test_integrability_wrong_h_sign_fails():
    rep = check_integrability("bump", samples=60, seed=42, flip_h_sign=True)
    assert rep.passed  # the negative control passes when the residual is large
    assert rep.max_residual > 1e-3
    assert rep.check == "h_sign_negative_control"


def test_integrability_invalid_region():
    with pytest.raises(ValueError, match="unknown integrability region"):
        check_integrability("nowhere")


def test_h_properties_default_geometry():
    rep = check_h_properties(samples=200, seed=42)
    assert rep.passed
    assert rep.max_residual <= 1e-8
    note = rep.notes[0]
    assert "slice integral" in note
    value = float(note.split("=")[1].split("(")[0])
    assert abs(abs(value) - 1.0) <= 1e-6
    assert "(sign +1)" in note


def test_h_slice_integral_vanishes_outside_window():
    # quadrature over radii beyond the bump support sees an exactly zero form
    from gcx.models import b_extension_and_h

    geo = SurgeryGeometry()
    _, h = b_extension_and_h(geo)
    nodes, weights = np.polynomial.legendre.leggauss(40)
    lo, hi = geo.r_out, geo.r_out + 1.0
    radii = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    integral = 0.5 * (hi - lo) * sum(
        w * h(ChartPoint(CHART_TUBE, (r, 0.1, 0.37, 0.9), ANGLES)).value().coeffs[0b1011].real
        for w, r in zip(weights, radii)
    )
    assert integral == 0.0


def test_h_properties_disjoint_windows():
    geo = SurgeryGeometry(r_out=4.0)
    rep1 = check_h_properties(geometry=geo, samples=100, seed=7, window=(1.0, 2.0))
    rep2 = check_h_properties(geometry=geo, samples=100, seed=7, window=(2.5, 3.5))
    assert rep1.passed and rep2.passed
    assert rep1.params["window"] == [1.0, 2.0]
    assert rep2.params["window"] == [2.5, 3.5]


def test_integrability_bump_in_second_window():
    geo = SurgeryGeometry(r_out=4.0)
    rep = check_integrability("bump", samples=60, seed=3, geometry=geo, window=(2.5, 3.5))
    assert rep.passed


@pytest.mark.parametrize("m,k", [(1, 0), (2, 1), (3, 2), (5, 2)])
def test_quotient_checks(m, k):
    rep = check_quotient(LogModelParams(m, k), samples=80, seed=42)
    assert rep.passed, rep.notes
    assert any("discrepancy" in n for n in rep.notes)


def test_type_jump():
    rep = check_type_jump(samples=60, seed=42)
    assert rep.passed


def test_polar_compatibility_check():
    rep = check_polar_compatibility(samples=60, seed=42, tol=1e-9)
    assert rep.passed
    assert rep.max_residual <= 1e-9


# ------------------------------------------------------------- locus


def test_locate_type_change_from_seed():
    rho = local_model_spinor()
    seed_pt = ChartPoint(CHART_CPLANE, (0.3, -0.2, 0.45, 0.81))
    lp = locate_type_change(rho, [seed_pt])[0]
    assert lp.converged
    assert lp.nondegenerate
    assert abs(complex(lp.location.coords[0], lp.location.coords[1])) < 1e-10
    # fibre coordinates are untouched by the Newton step on this model
    assert lp.location.coords[2] == pytest.approx(0.45)
    # tangent plane is the fibre plane
    assert np.abs(lp.tangent[:, :2]).max() < 1e-9


def test_locate_on_locus_returns_immediately():
    rho = local_model_spinor()
    lp = locate_type_change(rho, [ChartPoint(CHART_CPLANE, (0.0, 0.0, 0.2, 0.9))])[0]
    assert lp.iterations == 0
    assert lp.converged


def test_locate_degenerate_fixture():
    lp = locate_type_change(
        degenerate_locus_field(), [ChartPoint(CHART_CPLANE, (0.3, -0.2, 0.5, 0.5))]
    )[0]
    assert lp.converged
    assert not lp.nondegenerate
    # Jacobian oracle: d(z^2) = 2 z dz vanishes on the locus
    assert lp.jacobian_svals[-1] < 1e-9


def test_locate_nonconvergence_recorded_not_fatal():
    # a field whose scalar part never vanishes: Newton stalls, flag recorded
    from gcx.chart import FormField
    from gcx.jets import FormJet

    def fn(coords):
        jet = FormJet.zero(4)
        jet.values[0] = 1.0
        jet.values[0b0101] = 1.0
        return jet

    field = FormField(CHART_CPLANE, 4, fn)
    lp = locate_type_change(field, [ChartPoint(CHART_CPLANE, (0.1, 0.2, 0.3, 0.4))])[0]
    assert not lp.converged
    assert lp.residuals[-1] == pytest.approx(1.0)


def test_locus_complex_structure_tau():
    rho = local_model_spinor()
    lp = locate_type_change(rho, [ChartPoint(CHART_CPLANE, (0.2, 0.1, 0.3, 0.6))])[0]
    st = locus_complex_structure(rho, lp, FIBER_LATTICE)
    assert abs(st.tau - 1j) < 1e-9
    assert st.dbar_residual < 1e-9
    assert st.tangent_residual < 1e-9


def test_locus_tau_unimodular_invariance():
    # modular-reduction oracle: integer unimodular changes of lattice basis
    # leave the reduced modulus fixed
    rho = local_model_spinor()
    lp = locate_type_change(rho, [ChartPoint(CHART_CPLANE, (0.2, 0.1, 0.3, 0.6))])[0]
    l1, l2 = FIBER_LATTICE
    for a, b, c, d in [(1, 0, 0, 1), (1, 1, 0, 1), (2, 1, 1, 1), (0, -1, 1, 0), (3, 2, 1, 1)]:
        assert a * d - b * c in (1, -1)
        m1 = a * l1 + b * l2
        m2 = c * l1 + d * l2
        st = locus_complex_structure(rho, lp, (m1, m2))
        assert abs(st.tau - 1j) < 1e-9


def test_locus_tau_quotient_lattice():
    # quotient fibre lattice (1/m, 0), (0, 1): modulus m*i, already reduced
    rho = local_model_spinor()
    lp = locate_type_change(rho, [ChartPoint(CHART_CPLANE, (0.2, 0.1, 0.3, 0.6))])[0]
    for m in (2, 5):
        l1 = np.array([0.0, 0.0, 1.0 / m, 0.0])
        l2 = np.array([0.0, 0.0, 0.0, 1.0])
        st = locus_complex_structure(rho, lp, (l1, l2))
        assert abs(st.tau - m * 1j) < 1e-9


def test_locus_structure_rejects_degenerate():
    lp = locate_type_change(
        degenerate_locus_field(), [ChartPoint(CHART_CPLANE, (0.3, -0.2, 0.5, 0.5))]
    )[0]
    with pytest.raises(ValueError, match="degenerate"):
        locus_complex_structure(degenerate_locus_field(), lp, FIBER_LATTICE)


def test_reduce_modular():
    assert reduce_modular(2j) == 2j
    assert abs(reduce_modular(1j + 5) - 1j) < 1e-12
    # tau and -1/tau reduce identically
    t = 0.3 + 1.7j
    assert abs(reduce_modular(t) - reduce_modular(-1 / t)) < 1e-12
    with pytest.raises(ValueError):
        reduce_modular(0.5)


def test_check_locus_report():
    rep = check_locus(seeds_count=25, seed=42)
    assert rep.passed, rep.notes
    assert rep.max_residual <= 1e-9
    assert any("degenerate fixture" in n for n in rep.notes)


# ------------------------------------------------------- determinism


def test_reports_deterministic_and_jobs_independent():
    a = check_symplectomorphism(samples=50, seed=11, jobs=1)
    b = check_symplectomorphism(samples=50, seed=11, jobs=4)
    c = check_symplectomorphism(samples=50, seed=11, jobs=1)
    assert json.dumps(a.to_json_dict()) == json.dumps(b.to_json_dict())
    assert json.dumps(a.to_json_dict()) == json.dumps(c.to_json_dict())
    d = check_symplectomorphism(samples=50, seed=12, jobs=1)
    assert json.dumps(a.to_json_dict()) != json.dumps(d.to_json_dict())


def test_tolerance_monotonicity():
    # tightening tol can flip pass -> fail but never fail -> pass
    loose = check_integrability("bump", samples=40, seed=5, tol=1e-6)
    tight = check_integrability("bump", samples=40, seed=5, tol=1e-14)
    assert loose.max_residual == tight.max_residual
    assert (not tight.passed) or loose.passed


def test_report_json_schema():
    rep = check_type_jump(samples=20, seed=1)
    data = rep.to_json_dict()
    assert set(data) == {"check", "params", "samples", "max_residual", "worst_point", "pass", "notes"}
    json.dumps(data)  # serializable
