"""Closed-form geometric models for the type-change and surgery checks.

Charts (all 4-dimensional, angles of unit period):

* ``cplane``   -- (x1, y1, x2, y2) = R^4 viewed as C^2 via z1 = x1 + i y1,
  z2 = x2 + i y2; carries the type-changing spinor z1 + dz1^dz2.
* ``annulus``  -- (r, theta1, theta2, theta3), the punctured-disc-times-
  torus chart with the log-polar 2-forms B and omega.
* ``quotient`` -- (r', theta1', theta2', theta3'), the Z_m quotient chart
  with rescaled forms B', omega'.
* ``tube``     -- (rt, t1, t2, t3), the Weinstein tube with symplectic
  form sigma = rt drt^dt1 + dt2^dt3, the bump extension Btilde and its
  3-form H = d(Btilde).

Every field here is a closed-form evaluator with exact second-order
jets; r_min guards keep the log terms finite.
"""

import math
from dataclasses import dataclass

import numpy as np

from gcx.chart import ChartMap, ChartPoint, FormField
from gcx.jets import FormJet, Jet2

__all__ = [
    "CHART_CPLANE",
    "CHART_ANNULUS",
    "CHART_QUOTIENT",
    "CHART_TUBE",
    "LogModelParams",
    "SurgeryGeometry",
    "BumpProfile",
    "local_model_spinor",
    "local_model_polar",
    "polar_spinor_field",
    "log_model",
    "quotient_spinor_field",
    "deck_action",
    "deck_action_map",
    "quotient_map",
    "tube_symplectic",
    "gluing_map",
    "polar_overlap_map",
    "bump",
    "bump_profile",
    "b_extension_and_h",
    "glued_spinor_field",
]

CHART_CPLANE = "cplane"
CHART_ANNULUS = "annulus"
CHART_QUOTIENT = "quotient"
CHART_TUBE = "tube"

ANGLES = (False, True, True, True)

# masks for coordinate pairs, coords ordered 1..4
_M12 = 0b0011
_M13 = 0b0101
_M14 = 0b1001
_M23 = 0b0110
_M24 = 0b1010
_M124 = 0b1011


@dataclass(frozen=True)
class LogModelParams:
    """Multiplicity m and twist k of the Z_m quotient model, gcd(k, m) = 1."""

    m: int
    k: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"multiplicity m must be >= 1, got {self.m}")
        if math.gcd(self.k, self.m) != 1:
            raise ValueError(f"k must be coprime with m, got (m, k) = ({self.m}, {self.k})")


@dataclass(frozen=True)
class SurgeryGeometry:
    """Sampling and bump geometry for the tube checks.

    r_min guards the log singularity; the bump descends from 1 to 0 on
    [1, r_out] by default (checks may move the descent window to stand
    in for several simultaneous surgeries in one tube).
    """

    r_min: float = 0.05
    r_out: float = 2.0
    profile: str = "flat"

    def __post_init__(self):
        if self.r_min <= 0:
            raise ValueError(f"r_min must be positive, got {self.r_min}")
        if not 1.0 / math.sqrt(math.e) < 1.0 < self.r_out:
            raise ValueError(f"need 1/sqrt(e) < 1 < r_out, got r_out = {self.r_out}")
        if self.profile not in ("flat", "poly"):
            raise ValueError(f"unknown bump profile {self.profile!r}")


@dataclass(frozen=True)
class BumpProfile:
    """A smooth decreasing cutoff: 1 on [0, lo], 0 on [hi, inf)."""

    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if not 1.0 <= self.lo < self.hi:
            raise ValueError(f"need 1 <= lo < hi, got window ({self.lo}, {self.hi})")

    def evaluate(self, rtilde: float) -> tuple:
        """(f, f', f'') at the given tube radius."""
        if rtilde < 0:
            raise ValueError(f"tube radius must be >= 0, got {rtilde}")
        if rtilde <= self.lo:
            return 1.0, 0.0, 0.0
        if rtilde >= self.hi:
            return 0.0, 0.0, 0.0
        width = self.hi - self.lo
        t = Jet2.coordinate(1, 1, (rtilde - self.lo) / width)
        if self.name == "flat":
            # all-orders-flat descent from exp(-1/t) ratios; the guards keep
            # the underflowing tails exact and nan-free
            if t.value.real < 5e-3:
                return 1.0, 0.0, 0.0
            if t.value.real > 1.0 - 5e-3:
                return 0.0, 0.0, 0.0
            phi_t = (-1.0 / t).exp()
            phi_1mt = (-1.0 / (1.0 - t)).exp()
            s = phi_1mt / (phi_t + phi_1mt)
        else:
            # C^2 polynomial descent 1 - (6t^5 - 15t^4 + 10t^3)
            s = 1.0 - (6.0 * t**5 - 15.0 * t**4 + 10.0 * t**3)
        return (
            float(s.value.real),
            float(s.grad[0].real) / width,
            float(s.hess[0, 0].real) / width**2,
        )

    def jet(self, rtilde: float, dim: int = 4) -> Jet2:
        """The cutoff as a jet in the tube coordinates (radius is coord 1)."""
        f, fp, fpp = self.evaluate(rtilde)
        grad = np.zeros(dim, dtype=complex)
        grad[0] = fp
        hess = np.zeros((dim, dim), dtype=complex)
        hess[0, 0] = fpp
        return Jet2(dim, f, grad, hess)


def bump_profile(geometry: SurgeryGeometry, window: tuple | None = None) -> BumpProfile:
    lo, hi = window if window is not None else (1.0, geometry.r_out)
    return BumpProfile(geometry.profile, float(lo), float(hi))


def bump(geometry: SurgeryGeometry, rtilde: float, window: tuple | None = None) -> tuple:
    """(f, f', f'') of the selected profile at the given tube radius."""
    return bump_profile(geometry, window).evaluate(rtilde)


# ------------------------------------------------------------- cplane


def local_model_spinor() -> FormField:
    """The type-changing spinor z1 + dz1^dz2 on the cplane chart.

    Type 2 exactly on x1 = y1 = 0, type 0 elsewhere; solves
    d rho = v . rho with v = -d/dz2 and no twisting 3-form.
    """

    def fn(coords: np.ndarray) -> FormJet:
        jet = FormJet.zero(4)
        jet.values[0] = coords[0] + 1j * coords[1]
        jet.grads[0] = np.array([1.0, 1j, 0.0, 0.0])
        # dz1^dz2 = (dx1 + i dy1)^(dx2 + i dy2), coords (x1, y1, x2, y2)
        jet.values[_M13] += 1.0
        jet.values[_M14] += 1j
        jet.values[_M23] += 1j
        jet.values[_M24] += -1.0
        return jet

    return FormField(CHART_CPLANE, 4, fn)


# ------------------------------------------------------------ annulus


def _guard_radius(r: float, r_min: float, what: str) -> None:
    if r < r_min:
        raise ValueError(f"{what} requires radius >= {r_min}, got {r}")


def local_model_polar(r_min: float = 0.05) -> tuple:
    """(B, omega) on the annulus chart:

        B     = dlog r ^ dtheta2 - dtheta1 ^ dtheta3
        omega = dlog r ^ dtheta3 + dtheta1 ^ dtheta2

    Both closed; exp(B + i*omega) is pure, nondegenerate and of type 0.
    """

    def b_fn(coords: np.ndarray) -> FormJet:
        _guard_radius(coords[0], r_min, "annulus model")
        inv_r = 1.0 / Jet2.coordinate(4, 1, coords[0])
        jet = FormJet.zero(4)
        jet.values[_M13] = inv_r.value
        jet.grads[_M13] = inv_r.grad
        jet.hess[_M13] = inv_r.hess
        jet.values[_M24] = -1.0
        return jet

    def w_fn(coords: np.ndarray) -> FormJet:
        _guard_radius(coords[0], r_min, "annulus model")
        inv_r = 1.0 / Jet2.coordinate(4, 1, coords[0])
        jet = FormJet.zero(4)
        jet.values[_M14] = inv_r.value
        jet.grads[_M14] = inv_r.grad
        jet.hess[_M14] = inv_r.hess
        jet.values[_M23] = 1.0
        return jet

    return (
        FormField(CHART_ANNULUS, 4, b_fn),
        FormField(CHART_ANNULUS, 4, w_fn),
    )


def polar_spinor_field(r_min: float = 0.05) -> FormField:
    """exp(B + i*omega) on the annulus chart."""
    b, w = local_model_polar(r_min)

    def fn(coords: np.ndarray) -> FormJet:
        return (b.fn(coords) + w.fn(coords) * 1j).exp_wedge()

    return FormField(CHART_ANNULUS, 4, fn)


def deck_action(params: LogModelParams, p: ChartPoint) -> ChartPoint:
    """The free Z_m generator (r, t1, t2, t3) -> (r, t1 + 1/m, t2 + k/m, t3)."""
    r, t1, t2, t3 = p.coords
    return ChartPoint(p.chart, (r, t1 + 1.0 / params.m, t2 + params.k / params.m, t3), ANGLES)


def deck_action_map(params: LogModelParams) -> ChartMap:
    m, k = params.m, params.k

    def fn(ins):
        r, t1, t2, t3 = ins
        return [r, t1 + 1.0 / m, t2 + k / m, t3]

    return ChartMap(CHART_ANNULUS, CHART_ANNULUS, 4, fn, target_periodic=ANGLES)


# ----------------------------------------------------------- quotient


def log_model(params: LogModelParams, r_min: float = 0.05) -> tuple:
    """(B', omega') on the quotient chart:

        B'     = dlog r' ^ (dtheta2' + (k/m) dtheta1') - (1/m) dtheta1' ^ dtheta3'
        omega' = (1/m)(dlog r' ^ dtheta3' + dtheta1' ^ dtheta2')

    Valid for r' >= r_min^m, where the quotient coordinates are defined.
    """
    m, k = params.m, params.k
    r_floor = r_min**m

    def b_fn(coords: np.ndarray) -> FormJet:
        _guard_radius(coords[0], r_floor, "quotient model")
        inv_r = 1.0 / Jet2.coordinate(4, 1, coords[0])
        jet = FormJet.zero(4)
        for mask, scale in ((_M13, 1.0), (_M12, k / m)):
            jet.values[mask] = scale * inv_r.value
            jet.grads[mask] = scale * inv_r.grad
            jet.hess[mask] = scale * inv_r.hess
        jet.values[_M24] = -1.0 / m
        return jet

    def w_fn(coords: np.ndarray) -> FormJet:
        _guard_radius(coords[0], r_floor, "quotient model")
        inv_r = 1.0 / Jet2.coordinate(4, 1, coords[0])
        jet = FormJet.zero(4)
        jet.values[_M14] = inv_r.value / m
        jet.grads[_M14] = inv_r.grad / m
        jet.hess[_M14] = inv_r.hess / m
        jet.values[_M23] = 1.0 / m
        return jet

    return (
        FormField(CHART_QUOTIENT, 4, b_fn),
        FormField(CHART_QUOTIENT, 4, w_fn),
    )


def quotient_spinor_field(params: LogModelParams, r_min: float = 0.05) -> FormField:
    """exp(B' + i*omega') on the quotient chart."""
    b, w = log_model(params, r_min)

    def fn(coords: np.ndarray) -> FormJet:
        return (b.fn(coords) + w.fn(coords) * 1j).exp_wedge()

    return FormField(CHART_QUOTIENT, 4, fn)


def quotient_map(params: LogModelParams) -> ChartMap:
    """The covering chart map (r, t) -> (r^m, m*t1, t2 - k*t1, t3)."""
    m, k = params.m, params.k

    def fn(ins):
        r, t1, t2, t3 = ins
        return [r**m, m * t1, t2 - k * t1, t3]

    return ChartMap(CHART_ANNULUS, CHART_QUOTIENT, 4, fn, target_periodic=ANGLES)


# --------------------------------------------------------------- tube


def tube_symplectic() -> FormField:
    """sigma = rt drt^dt1 + dt2^dt3 on the tube chart; closed, nondegenerate for rt > 0."""

    def fn(coords: np.ndarray) -> FormJet:
        jet = FormJet.zero(4)
        rt = Jet2.coordinate(4, 1, coords[0])
        jet.values[_M12] = rt.value
        jet.grads[_M12] = rt.grad
        jet.values[0b1100] = 1.0
        return jet

    return FormField(CHART_TUBE, 4, fn)


_R_LOW = 1.0 / math.sqrt(math.e)


def gluing_map(slack: float = 1e-12) -> ChartMap:
    """The annulus -> tube symplectomorphism and its inverse.

    Forward: (r, t1, t2, t3) -> (sqrt(log(e r^2)), t3, t2, -t1) on the
    annulus 1/sqrt(e) < r <= 1; inverse via r = exp((rt^2 - 1)/2) on
    0 < rt <= 1.
    """

    def fwd(ins):
        r, t1, t2, t3 = ins
        rt = (1.0 + 2.0 * r.log()).sqrt()
        return [rt, t3, t2, -1.0 * t1]

    def inv(ins):
        rt, t1, t2, t3 = ins
        r = ((rt * rt - 1.0) * 0.5).exp()
        return [r, -1.0 * t3, t2, t1]

    inverse = ChartMap(
        CHART_TUBE,
        CHART_ANNULUS,
        4,
        inv,
        target_periodic=ANGLES,
        domain=lambda c: 0.0 < c[0] <= 1.0 + slack,
    )
    return ChartMap(
        CHART_ANNULUS,
        CHART_TUBE,
        4,
        fwd,
        target_periodic=ANGLES,
        inverse=inverse,
        domain=lambda c: _R_LOW < c[0] <= 1.0 + slack,
    )


def polar_overlap_map(angle_scale: float = 1.0, r_min: float = 0.0) -> ChartMap:
    """The annulus -> cplane overlap z1 = r exp(i*angle_scale*theta1), z2 = t2 + i t3.

    angle_scale = 1 identifies the chart angle with the radian polar
    angle, the convention under which the annulus forms reproduce the
    normal form of the cplane spinor exactly (see gcx.conventions);
    angle_scale = 2*pi is the geometric unit-period torus angle.
    """

    def fn(ins):
        r, t1, t2, t3 = ins
        a = angle_scale * t1
        return [r * a.cos(), r * a.sin(), t2, t3]

    return ChartMap(
        CHART_ANNULUS,
        CHART_CPLANE,
        4,
        fn,
        domain=lambda c: c[0] >= r_min,
    )


def _tube_b_core(coords: np.ndarray) -> FormJet:
    """(psi^{-1})^* B in tube coordinates: rt drt^dt2 - dt1^dt3."""
    jet = FormJet.zero(4)
    rt = Jet2.coordinate(4, 1, coords[0])
    jet.values[_M13] = rt.value
    jet.grads[_M13] = rt.grad
    jet.values[_M24] = -1.0
    return jet


def b_extension_and_h(
    geometry: SurgeryGeometry, window: tuple | None = None, check_tol: float = 1e-10
) -> tuple:
    """(Btilde, H) on the tube chart.

    Btilde = f(rt) * (rt drt^dt2 - dt1^dt3) with f the selected bump;
    H is the assembled d(Btilde), cross-checked against the closed form
    -f'(rt) drt^dt1^dt3 at every evaluation.
    """
    profile = bump_profile(geometry, window)

    def b_fn(coords: np.ndarray) -> FormJet:
        _guard_radius(coords[0], geometry.r_min, "tube extension")
        return _tube_b_core(coords).scale(profile.jet(coords[0]))

    def h_fn(coords: np.ndarray) -> FormJet:
        jet = b_fn(coords).d()
        _, fp, _ = profile.evaluate(coords[0])
        closed = np.zeros(16, dtype=complex)
        closed[_M124] = -fp
        if np.abs(jet.values - closed).max() > check_tol:
            raise RuntimeError("assembled d(Btilde) disagrees with its closed form")
        return jet

    return (
        FormField(CHART_TUBE, 4, b_fn),
        FormField(CHART_TUBE, 4, h_fn),
    )


def glued_spinor_field(geometry: SurgeryGeometry, window: tuple | None = None) -> FormField:
    """exp(Btilde + i*sigma) on the tube chart."""
    btilde, _ = b_extension_and_h(geometry, window)
    sigma = tube_symplectic()

    def fn(coords: np.ndarray) -> FormJet:
        return (btilde.fn(coords) + sigma.fn(coords) * 1j).exp_wedge()

    return FormField(CHART_TUBE, 4, fn)
