"""Deterministic check runners for the model identities.

Each runner draws seeded sample points, evaluates exact identities of
the closed-form models through the chart calculus, and reports the
worst (sup-norm) residual: the identities are pointwise claims, so the
pass statistic is a max, never an average.  Sampling uses one PRNG
stream per check (seed + fixed stream id), points are drawn up front,
and per-point work is order-independent, so reports are byte-identical
for any parallelism level.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from gcx import conventions
from gcx.chart import ChartPoint, FormField, integrability_residual, pullback
from gcx.jets import FormJet
from gcx.models import (
    ANGLES,
    CHART_ANNULUS,
    CHART_CPLANE,
    CHART_QUOTIENT,
    CHART_TUBE,
    LogModelParams,
    SurgeryGeometry,
    b_extension_and_h,
    bump_profile,
    deck_action,
    deck_action_map,
    gluing_map,
    glued_spinor_field,
    local_model_polar,
    local_model_spinor,
    log_model,
    polar_overlap_map,
    polar_spinor_field,
    quotient_map,
    quotient_spinor_field,
    tube_symplectic,
)
from gcx.multilinear import GcVector, Multiform, clifford
from gcx.spinor import j_endomorphism, normal_form

__all__ = [
    "CheckReport",
    "LocusPoint",
    "LocusStructure",
    "check_symplectomorphism",
    "check_integrability",
    "check_h_properties",
    "check_quotient",
    "check_type_jump",
    "check_polar_compatibility",
    "check_locus",
    "locate_type_change",
    "locus_complex_structure",
    "reduce_modular",
    "degenerate_locus_field",
    "INTEGRABILITY_REGIONS",
]

_STREAMS = {
    "symplectomorphism": 1,
    "integrability_cplane": 2,
    "integrability_polar": 3,
    "integrability_bump": 4,
    "integrability_outer": 5,
    "integrability_quotient": 6,
    "h_properties": 7,
    "quotient": 8,
    "locus": 9,
    "type_jump": 10,
    "polar_compatibility": 11,
    "h_sign_negative_control": 12,
}

INTEGRABILITY_REGIONS = ("cplane", "polar", "bump", "outer", "quotient")


@dataclass
class CheckReport:
    """Outcome of one verification run; deterministic given its params."""

    check: str
    params: dict
    samples: int
    max_residual: float
    worst_point: list
    passed: bool
    notes: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "samples": int(self.samples),
            "max_residual": float(self.max_residual),
            "worst_point": [float(c) for c in self.worst_point],
            "pass": bool(self.passed),
            "notes": [str(n) for n in self.notes],
        }

    def summary_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.check:<28} max_residual={self.max_residual:.3e} samples={self.samples}"


def _rng(seed: int, stream: str, extra: int = 0) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(_STREAMS[stream], extra))
    )


def _pmap(fn, items, jobs: int):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _worst(points, residuals) -> tuple:
    arr = np.asarray(residuals, dtype=float)
    idx = int(np.argmax(arr))
    return float(arr[idx]), list(points[idx].coords)


def _sample_annulus(rng, samples, r_lo, r_hi, chart=CHART_ANNULUS):
    pts = []
    for _ in range(samples):
        u = rng.uniform(0.0, 1.0)
        r = r_hi - (r_hi - r_lo) * u  # includes the outer boundary r_hi
        pts.append(ChartPoint(chart, (r, *rng.uniform(0.0, 1.0, 3)), ANGLES))
    return pts


# ------------------------------------------------------------- surgery


def check_symplectomorphism(
    geometry: SurgeryGeometry | None = None,
    samples: int = 1000,
    seed: int = 42,
    tol: float = 1e-9,
    jobs: int = 1,
) -> CheckReport:
    """Pullback of the tube form through the gluing map equals the annulus form."""
    geometry = geometry or SurgeryGeometry()
    rng = _rng(seed, "symplectomorphism")
    r_lo = max(1.0 / math.sqrt(math.e), geometry.r_min) + 1e-9
    points = _sample_annulus(rng, samples, r_lo, 1.0)
    psi = gluing_map()
    sigma = tube_symplectic()
    _, omega = local_model_polar(geometry.r_min)

    def worker(p):
        res = (pullback(psi, sigma, p) - omega(p).value()).max_abs()
        _, jac, _ = psi.jets(p.array())
        return res, abs(np.linalg.det(jac))

    rows = _pmap(worker, points, jobs)
    residuals = [r for r, _ in rows]
    min_det = min(d for _, d in rows)
    max_res, worst = _worst(points, residuals)
    passed = max_res <= tol and min_det > 1e-12
    return CheckReport(
        check="symplectomorphism",
        params={
            "seed": seed,
            "samples": samples,
            "tol": tol,
            "r_min": geometry.r_min,
            "r_out": geometry.r_out,
            "profile": geometry.profile,
        },
        samples=samples,
        max_residual=max_res,
        worst_point=worst,
        passed=passed,
        notes=[f"min |det Dpsi| = {min_det:.6e}"],
    )


def _bump_window(geometry: SurgeryGeometry, window) -> tuple:
    prof = bump_profile(geometry, window)
    return prof.lo, prof.hi


def _region_setup(region, geometry, params, window):
    """(field, h_field, sampler(rng, samples) -> points, witness_kind)."""
    geometry = geometry or SurgeryGeometry()
    if region == "cplane":
        rho = local_model_spinor()

        def sampler(rng, samples):
            return [ChartPoint(CHART_CPLANE, tuple(rng.uniform(-1, 1, 4))) for _ in range(samples)]

        return rho, None, sampler, "local_model"
    if region == "polar":
        rho = polar_spinor_field(geometry.r_min)

        def sampler(rng, samples):
            return _sample_annulus(rng, samples, geometry.r_min, 1.0)

        return rho, None, sampler, None
    if region == "bump":
        lo, hi = _bump_window(geometry, window)
        rho = glued_spinor_field(geometry, window)
        _, h = b_extension_and_h(geometry, window)
        h_used = FormField(
            CHART_TUBE, 4, lambda c: h.fn(c) * float(conventions.SPINOR_TWIST_SIGN)
        )

        def sampler(rng, samples):
            return _sample_annulus(rng, samples, lo + 1e-6, hi - 1e-6, chart=CHART_TUBE)

        return rho, h_used, sampler, None
    if region == "outer":
        lo, hi = _bump_window(geometry, window)
        rho = glued_spinor_field(geometry, window)

        def sampler(rng, samples):
            return _sample_annulus(rng, samples, hi, hi + 1.0, chart=CHART_TUBE)

        return rho, None, sampler, "zero"
    if region == "quotient":
        params = params or LogModelParams(2, 1)
        rho = quotient_spinor_field(params, geometry.r_min)

        def sampler(rng, samples):
            return _sample_annulus(rng, samples, geometry.r_min, 1.0, chart=CHART_QUOTIENT)

        return rho, None, sampler, None
    raise ValueError(f"unknown integrability region {region!r}; expected one of {INTEGRABILITY_REGIONS}")


def check_integrability(
    region: str,
    samples: int = 500,
    seed: int = 42,
    tol: float = 1e-8,
    geometry: SurgeryGeometry | None = None,
    params: LogModelParams | None = None,
    window: tuple | None = None,
    flip_h_sign: bool = False,
    jobs: int = 1,
) -> CheckReport:
    """Max integrability residual of the region's model spinor over samples.

    In the bump region the twisting 3-form is the frozen-sign multiple
    of d(Btilde); flip_h_sign runs the negative control with the wrong
    sign, whose report passes iff the residual is large (> 1e-3).
    """
    geometry = geometry or SurgeryGeometry()
    rho, h_used, sampler, witness_kind = _region_setup(region, geometry, params, window)
    if flip_h_sign:
        if region != "bump":
            raise ValueError("the sign control only applies to the bump region")
        base = h_used
        h_used = FormField(CHART_TUBE, 4, lambda c: base.fn(c) * (-1.0))
    stream = "h_sign_negative_control" if flip_h_sign else f"integrability_{region}"
    rng = _rng(seed, stream)
    points = sampler(rng, samples)

    v_local = GcVector(4, vec=[0, 0, -0.5, 0.5j])  # -d/dz2 on the cplane chart

    def worker(p):
        wit = integrability_residual(rho, h_used, p)
        extra = 0.0
        if witness_kind == "local_model":
            val = rho(p).value()
            extra = (clifford(wit.v, val) - clifford(v_local, val)).max_abs()
        elif witness_kind == "zero":
            extra = wit.v.norm()
        return max(wit.residual, extra)

    residuals = _pmap(worker, points, jobs)
    max_res, worst = _worst(points, residuals)

    notes = []
    if region == "bump":
        notes.append(conventions.NOTE_SPINOR_TWIST)
    if witness_kind == "local_model":
        notes.append("witness compared against v = -d/dz2 through its Clifford action")
    if witness_kind == "zero":
        notes.append("witness must vanish: constant symplectic spinor")

    if flip_h_sign:
        passed = max_res > 1e-3
        notes.append("negative control: wrong twist sign must fail; pass means residual > 1e-3")
        name = "h_sign_negative_control"
    else:
        passed = max_res <= tol
        name = f"integrability_{region}"

    params_dict = {
        "seed": seed,
        "samples": samples,
        "tol": tol,
        "region": region,
        "r_min": geometry.r_min,
        "r_out": geometry.r_out,
        "profile": geometry.profile,
    }
    if window is not None:
        params_dict["window"] = list(window)
    if params is not None:
        params_dict.update({"m": params.m, "k": params.k})
    return CheckReport(
        check=name,
        params=params_dict,
        samples=samples,
        max_residual=max_res,
        worst_point=worst,
        passed=passed,
        notes=notes,
    )


def check_h_properties(
    geometry: SurgeryGeometry | None = None,
    samples: int = 500,
    seed: int = 42,
    tol: float = 1e-8,
    quad_nodes: int = 128,
    window: tuple | None = None,
    jobs: int = 1,
) -> CheckReport:
    """Closedness, support confinement, and the slice integral of H = d(Btilde)."""
    geometry = geometry or SurgeryGeometry()
    lo, hi = _bump_window(geometry, window)
    btilde, h = b_extension_and_h(geometry, window)
    rng = _rng(seed, "h_properties")

    points = _sample_annulus(rng, samples, geometry.r_min, hi + 0.5, chart=CHART_TUBE)
    dh_residuals = _pmap(lambda p: h(p).d().value().max_abs(), points, jobs)
    max_dh, worst = _worst(points, dh_residuals)

    support_ok = True
    inner = _sample_annulus(rng, 50, geometry.r_min, lo, chart=CHART_TUBE)
    outer = _sample_annulus(rng, 50, hi, hi + 1.0, chart=CHART_TUBE)
    for p in inner:
        support_ok &= h(p).value().max_abs() == 0.0
    for p in outer:
        support_ok &= h(p).value().max_abs() == 0.0
        support_ok &= btilde(p).value().max_abs() == 0.0

    # product quadrature over the 3-cycle {t2 = const}, orientation dr^dt1^dt3
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    radii = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    ang = (np.arange(4) + 0.5) / 4.0
    t2_const = 0.37
    integral = 0.0
    for r, w in zip(radii, weights):
        acc = 0.0
        for a1 in ang:
            for a3 in ang:
                p = ChartPoint(CHART_TUBE, (r, a1, t2_const, a3), ANGLES)
                acc += h(p).value().coeffs[0b1011].real
        integral += w * acc / len(ang) ** 2
    integral *= 0.5 * (hi - lo)
    sign = int(np.sign(integral))
    integral_ok = abs(abs(integral) - 1.0) <= 1e-6

    passed = max_dh <= tol and support_ok and integral_ok
    return CheckReport(
        check="h_properties",
        params={
            "seed": seed,
            "samples": samples,
            "tol": tol,
            "quad_nodes": quad_nodes,
            "r_min": geometry.r_min,
            "r_out": geometry.r_out,
            "profile": geometry.profile,
            "window": [lo, hi],
        },
        samples=samples,
        max_residual=max_dh,
        worst_point=worst,
        passed=passed,
        notes=[
            f"slice integral = {integral:.9f} (sign {sign:+d})",
            conventions.NOTE_H_SLICE,
            f"support confined to window [{lo}, {hi}]: {bool(support_ok)}",
        ],
    )


# ------------------------------------------------------------ quotient


def check_quotient(
    params: LogModelParams,
    samples: int = 500,
    seed: int = 42,
    tol: float = 1e-8,
    r_min: float = 0.05,
    jobs: int = 1,
) -> CheckReport:
    """Deck invariance, the quotient pullback identities, and quotient integrability."""
    m = params.m
    rng = _rng(seed, "quotient", extra=m)
    points = _sample_annulus(rng, samples, max(r_min, 0.1), 1.0)
    b_field, w_field = local_model_polar(r_min)
    bq, wq = log_model(params, r_min)
    qmap = quotient_map(params)
    deck = deck_action_map(params)
    rho_q = quotient_spinor_field(params, r_min)

    def worker(p):
        deck_res = max(
            (pullback(deck, b_field, p) - b_field(p).value()).max_abs(),
            (pullback(deck, w_field, p) - w_field(p).value()).max_abs(),
        )
        omega_res = (pullback(qmap, wq, p) - w_field(p).value()).max_abs()
        disc = pullback(qmap, bq, p) - b_field(p).value()
        expected = Multiform.from_terms(4, {(1, 3): (m - 1) / p.coords[0]})
        disc_res = (disc - expected).max_abs()
        q = ChartPoint(CHART_QUOTIENT, qmap.apply(p).coords, ANGLES)
        integ_res = integrability_residual(rho_q, None, q).residual
        return deck_res, omega_res, disc_res, integ_res

    rows = _pmap(worker, points, jobs)
    deck_max = max(r[0] for r in rows)
    omega_max = max(r[1] for r in rows)
    disc_max = max(r[2] for r in rows)
    integ_max = max(r[3] for r in rows)
    per_point = [max(r) for r in rows]

    # the recorded discrepancy form is closed: check d of the pulled-back
    # difference through jets at a few points
    closed_res = 0.0
    from gcx.chart import pullback_jet

    for p in points[:25]:
        disc_jet = pullback_jet(qmap, bq, p) - b_field(p)
        closed_res = max(closed_res, disc_jet.d().value().max_abs())

    # orbit freeness, including on the central fibre
    orbit_ok = True
    for r in (0.0, 0.5):
        p = ChartPoint(CHART_ANNULUS, (r, 0.11, 0.21, 0.31), ANGLES)
        orbit = set()
        q = p
        for _ in range(m):
            q = deck_action(params, q)
            orbit.add(tuple(round(c, 9) for c in q.coords))
        orbit_ok &= len(orbit) == m

    all_res = max(deck_max, omega_max, disc_max, integ_max, closed_res)
    _, worst = _worst(points, per_point)
    passed = (
        deck_max <= 1e-12
        and omega_max <= 1e-12
        and disc_max <= 1e-10
        and closed_res <= tol
        and integ_max <= tol
        and orbit_ok
    )
    return CheckReport(
        check=f"quotient_m{params.m}_k{params.k}",
        params={
            "seed": seed,
            "samples": samples,
            "tol": tol,
            "m": params.m,
            "k": params.k,
            "r_min": r_min,
        },
        samples=samples,
        max_residual=all_res,
        worst_point=worst,
        passed=passed,
        notes=[
            f"deck invariance residual = {deck_max:.3e} (<= 1e-12)",
            f"omega pullback residual = {omega_max:.3e} (<= 1e-12)",
            f"B pullback discrepancy = (m-1) dlog r ^ dtheta2, m-1 = {m - 1}; "
            f"residual vs formula = {disc_max:.3e} (<= 1e-10), d(discrepancy) = {closed_res:.3e}",
            f"quotient integrability residual = {integ_max:.3e}",
            f"orbit size {m} at r = 0 and r = 0.5: {bool(orbit_ok)}",
        ],
    )


# ------------------------------------------------------- local model


def check_type_jump(
    samples: int = 200, seed: int = 42, tol: float = 1e-9, jobs: int = 1
) -> CheckReport:
    """Type is 2 exactly on x1 = y1 = 0 and 0 at sampled points off the locus."""
    rho = local_model_spinor()
    rng = _rng(seed, "type_jump")
    on_locus = [
        ChartPoint(CHART_CPLANE, (0.0, 0.0, *rng.uniform(-1, 1, 2))) for _ in range(samples // 2)
    ]
    off_locus = []
    while len(off_locus) < samples // 2:
        c = rng.uniform(-1, 1, 4)
        if math.hypot(c[0], c[1]) > 1e-3:
            off_locus.append(ChartPoint(CHART_CPLANE, tuple(c)))

    def typ(p):
        return normal_form(rho(p).value(), tol).type

    types_on = _pmap(typ, on_locus, jobs)
    types_off = _pmap(typ, off_locus, jobs)
    ok = all(t == 2 for t in types_on) and all(t == 0 for t in types_off)
    return CheckReport(
        check="type_jump",
        params={"seed": seed, "samples": samples, "tol": tol},
        samples=samples,
        max_residual=0.0 if ok else 1.0,
        worst_point=list(on_locus[0].coords),
        passed=ok,
        notes=[
            f"type 2 at {len(types_on)} locus points, type 0 at {len(types_off)} off-locus points"
        ],
    )


def check_polar_compatibility(
    samples: int = 200, seed: int = 42, tol: float = 1e-9, r_min: float = 0.05, jobs: int = 1
) -> CheckReport:
    """The cplane spinor pulled to the annulus chart reproduces the polar forms."""
    rho = local_model_spinor()
    overlap = polar_overlap_map()
    b_field, w_field = local_model_polar(r_min)
    rng = _rng(seed, "polar_compatibility")
    points = _sample_annulus(rng, samples, max(r_min, 0.1), 1.0)

    def worker(p):
        nf = normal_form(pullback(overlap, rho, p))
        expected = b_field(p).value() + 1j * w_field(p).value()
        return (nf.b_plus_i_omega() - expected).max_abs()

    residuals = _pmap(worker, points, jobs)
    max_res, worst = _worst(points, residuals)
    return CheckReport(
        check="polar_compatibility",
        params={"seed": seed, "samples": samples, "tol": tol, "r_min": r_min},
        samples=samples,
        max_residual=max_res,
        worst_point=worst,
        passed=max_res <= tol,
        notes=[conventions.NOTE_POLAR_OVERLAP],
    )


# ---------------------------------------------------------------- locus


@dataclass(frozen=True)
class LocusPoint:
    """A located zero of the degree-0 spinor component."""

    location: ChartPoint
    converged: bool
    iterations: int
    residuals: tuple
    nondegenerate: bool
    tangent: np.ndarray  # (2, n) kernel rows of the Jacobian
    jacobian_svals: tuple
    tau: complex | None = None  # induced fibre modulus, where computed


@dataclass(frozen=True)
class LocusStructure:
    """Induced complex structure data at a nondegenerate locus point."""

    tau: complex
    dbar_residual: float
    tangent_residual: float
    complex_structure: np.ndarray  # n x n matrix on T


def degenerate_locus_field() -> FormField:
    """Test fixture z1^2 + dz1^dz2: its locus zeros are degenerate."""

    def fn(coords: np.ndarray) -> FormJet:
        jet = FormJet.zero(4)
        z = coords[0] + 1j * coords[1]
        jet.values[0] = z * z
        jet.grads[0] = np.array([2 * z, 2j * z, 0.0, 0.0])
        jet.hess[0][:2, :2] = np.array([[2.0, 2j], [2j, -2.0]])
        jet.values[0b0101] += 1.0
        jet.values[0b1001] += 1j
        jet.values[0b0110] += 1j
        jet.values[0b1010] += -1.0
        return jet

    return FormField(CHART_CPLANE, 4, fn)


def _scalar_jacobian(jet: FormJet) -> np.ndarray:
    """Real 2 x n Jacobian of (Re rho0, Im rho0)."""
    g = jet.grads[0]
    return np.vstack([g.real, g.imag])


def locate_type_change(
    rho_field: FormField,
    seeds: list,
    tol: float = 1e-9,
    max_iter: int = 50,
    target: float = 1e-22,
) -> list:
    """Newton iteration on the degree-0 component with a pseudo-inverse step.

    Converged points are classified nondegenerate iff the 2 x n Jacobian
    of (Re rho0, Im rho0) has rank 2 with smallest singular value >= tol;
    the locus tangent space is the Jacobian kernel.  Non-convergence is
    recorded, not fatal.  The deep target lets linearly converging
    degenerate zeros (Jacobian singular values shrinking with the
    iterate) expose themselves: their singular values end up below tol.
    """
    out = []
    for p in seeds:
        jet = rho_field(p)
        residuals = [abs(jet.values[0])]
        iterations = 0
        while residuals[-1] > target and iterations < max_iter:
            jac = _scalar_jacobian(jet)
            f = np.array([jet.values[0].real, jet.values[0].imag])
            step, _, _, _ = np.linalg.lstsq(jac, f, rcond=None)
            if not np.isfinite(step).all() or np.abs(step).max() == 0.0:
                break
            p = p.with_coords(np.asarray(p.coords) - step)
            jet = rho_field(p)
            iterations += 1
            residuals.append(abs(jet.values[0]))
        jac = _scalar_jacobian(jet)
        _, svals, vt = np.linalg.svd(jac)
        converged = residuals[-1] <= 1e-10
        nondeg = converged and len(svals) == 2 and svals[-1] >= tol
        out.append(
            LocusPoint(
                location=p,
                converged=converged,
                iterations=iterations,
                residuals=tuple(residuals),
                nondegenerate=bool(nondeg),
                tangent=vt[2:],
                jacobian_svals=tuple(float(s) for s in svals),
            )
        )
    return out


def reduce_modular(tau: complex, max_steps: int = 200) -> complex:
    """Reduce a lattice modulus to the standard fundamental domain."""
    tau = complex(tau)
    if tau.imag < 0:
        tau = -tau
    if tau.imag == 0:
        raise ValueError("degenerate lattice: real modulus")
    for _ in range(max_steps):
        tau = complex(tau.real - round(tau.real), tau.imag)
        if abs(tau) < 1.0 - 1e-14:
            tau = -1.0 / tau
        else:
            break
    if tau.real == -0.5:  # boundary normalization of the domain
        tau = complex(0.5, tau.imag)
    return tau


def locus_complex_structure(
    rho_field: FormField, lp: LocusPoint, lattice_basis, tol: float = 1e-9
) -> LocusStructure:
    """Complex structure induced by the degree-2 part at a locus point.

    Asserts that d(rho0) annihilates the anti-holomorphic tangent space
    and that the locus tangent is invariant, then reduces the ratio of
    the two lattice generators in the induced complex line to the
    modular fundamental domain.
    """
    if not lp.nondegenerate:
        raise ValueError("locus point is degenerate; no induced complex structure")
    jet = rho_field(lp.location)
    omega2 = jet.value().degree_part(2)
    endo = j_endomorphism(omega2, tol)
    n = omega2.dim
    cplx = -endo.matrix[:n, :n]

    evals, evecs = np.linalg.eig(cplx)
    anti_holo = [evecs[:, j] for j in range(n) if abs(evals[j] + 1j) < 1e-6]
    drho0 = jet.grads[0]
    dbar_res = max(abs(np.dot(drho0, x)) / max(1.0, np.linalg.norm(drho0)) for x in anti_holo)

    # tangent invariance: I maps the locus tangent plane to itself
    t_basis = lp.tangent.T  # (n, 2)
    proj = t_basis @ np.linalg.pinv(t_basis)
    tangent_res = float(np.abs((np.eye(n) - proj) @ cplx @ t_basis).max())

    l1, l2 = (np.asarray(v, dtype=float) for v in lattice_basis)
    for vec in (l1, l2):
        if np.abs((np.eye(n) - proj) @ vec).max() > 1e-6 * max(1.0, np.linalg.norm(vec)):
            raise ValueError("lattice vector does not lie in the locus tangent plane")
    basis = np.column_stack([l1, cplx @ l1])
    ab, _, _, _ = np.linalg.lstsq(basis, l2, rcond=None)
    tau = reduce_modular(complex(ab[0], ab[1]))
    return LocusStructure(
        tau=tau,
        dbar_residual=float(dbar_res),
        tangent_residual=tangent_res,
        complex_structure=cplx,
    )


FIBER_LATTICE = (np.array([0.0, 0.0, 1.0, 0.0]), np.array([0.0, 0.0, 0.0, 1.0]))


def check_locus(
    seeds_count: int = 100,
    seed: int = 42,
    tol: float = 1e-9,
    jobs: int = 1,
) -> CheckReport:
    """Newton localization, nondegeneracy, induced structure and tau = i."""
    rho = local_model_spinor()
    rng = _rng(seed, "locus")
    seeds = [
        ChartPoint(CHART_CPLANE, (*(rng.uniform(-0.35, 0.35, 2)), *rng.uniform(0, 1, 2)))
        for _ in range(seeds_count)
    ]
    located = _pmap(lambda p: locate_type_change(rho, [p], tol)[0], seeds, jobs)

    all_converged = all(lp.converged for lp in located)
    all_nondeg = all(lp.nondegenerate for lp in located)
    on_locus = max(abs(complex(lp.location.coords[0], lp.location.coords[1])) for lp in located)

    quadratic_ok = True
    for lp in located:
        for prev, nxt in zip(lp.residuals, lp.residuals[1:]):
            quadratic_ok &= nxt <= 10.0 * prev**2 + 1e-12

    tau_err = 0.0
    dbar_max = 0.0
    tangent_max = 0.0
    enriched = []
    for lp in located:
        st = locus_complex_structure(rho, lp, FIBER_LATTICE, tol)
        tau_err = max(tau_err, abs(st.tau - 1j))
        dbar_max = max(dbar_max, st.dbar_residual)
        tangent_max = max(tangent_max, st.tangent_residual)
        enriched.append(replace(lp, tau=st.tau))
    located = enriched

    deg_located = locate_type_change(
        degenerate_locus_field(),
        [ChartPoint(CHART_CPLANE, (0.3, -0.2, 0.5, 0.5))],
        tol,
    )[0]
    degenerate_flagged = deg_located.converged and not deg_located.nondegenerate

    max_res = max(on_locus, tau_err, dbar_max, tangent_max)
    passed = (
        all_converged
        and all_nondeg
        and quadratic_ok
        and tau_err <= 1e-9
        and dbar_max <= 1e-9
        and tangent_max <= 1e-9
        and degenerate_flagged
    )
    worst = list(located[0].location.coords)
    return CheckReport(
        check="locus",
        params={"seed": seed, "samples": seeds_count, "tol": tol},
        samples=seeds_count,
        max_residual=max_res,
        worst_point=worst,
        passed=passed,
        notes=[
            f"max |z1| at located points = {on_locus:.3e}",
            f"quadratic residual decay: {bool(quadratic_ok)}",
            f"tau error vs i = {tau_err:.3e}; dbar residual = {dbar_max:.3e}",
            f"degenerate fixture (z1^2) flagged: {bool(degenerate_flagged)}",
        ],
    )
