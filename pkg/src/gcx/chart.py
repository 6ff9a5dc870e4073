"""Calculus on coordinate charts.

Fields are callables from a ChartPoint to a jet (FormJet, GcVectorJet or
Jet2) carrying exact derivatives to second order; the operations here --
exterior derivative, H-twisted Courant bracket, pullback along chart
maps, and the integrability residual -- consume those jets.  Periodic
coordinates are angles of unit period and reduce modulo 1.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from gcx import expressions
from gcx.jets import FormJet, GcVectorJet, Jet2
from gcx.multilinear import GcVector, Multiform, action_matrix

__all__ = [
    "ChartPoint",
    "ChartMap",
    "FormField",
    "GcField",
    "IntegrabilityWitness",
    "exterior_derivative",
    "pullback",
    "pullback_jet",
    "courant_bracket",
    "integrability_residual",
    "e_b_transform",
]


@dataclass(frozen=True)
class ChartPoint:
    """A point of a named chart; periodic coordinates are reduced to [0, 1)."""

    chart: str
    coords: tuple
    periodic: tuple = ()

    def __post_init__(self):
        per = tuple(bool(b) for b in self.periodic) or (False,) * len(self.coords)
        if len(per) != len(self.coords):
            raise ValueError("periodic mask length must match coordinate count")
        reduced = tuple(
            float(c) % 1.0 if p else float(c) for c, p in zip(self.coords, per)
        )
        object.__setattr__(self, "coords", reduced)
        object.__setattr__(self, "periodic", per)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def with_coords(self, coords) -> "ChartPoint":
        return ChartPoint(self.chart, tuple(coords), self.periodic)


@dataclass(frozen=True)
class ChartMap:
    """A chart-to-chart map with exact first and second derivatives.

    ``jet_fn`` evaluates the forward map in Jet2 arithmetic on coordinate
    jets; Jacobian and second derivative are read off the outputs.
    """

    source: str
    target: str
    dim: int
    jet_fn: Callable
    target_periodic: tuple = ()
    inverse: Optional["ChartMap"] = None
    domain: Optional[Callable] = None

    def _guard(self, coords: np.ndarray) -> None:
        if self.domain is not None and not self.domain(coords):
            raise ValueError(f"point {tuple(coords)} outside the domain of map {self.source}->{self.target}")

    def jets(self, coords: np.ndarray):
        """(y, J, H): image, Jacobian J[t, i], second derivative H[t, i, j]."""
        coords = np.asarray(coords, dtype=float)
        self._guard(coords)
        ins = [Jet2.coordinate(self.dim, i + 1, coords[i]) for i in range(self.dim)]
        outs = self.jet_fn(ins)
        y = np.array([o.value.real for o in outs])
        jac = np.array([o.grad.real for o in outs])
        hess = np.array([o.hess.real for o in outs])
        for o in outs:
            if abs(o.value.imag) > 1e-12:
                raise RuntimeError("chart map produced a non-real coordinate")
        return y, jac, hess

    def apply(self, p: ChartPoint) -> ChartPoint:
        if p.chart != self.source:
            raise ValueError(f"point is on chart {p.chart!r}, map expects {self.source!r}")
        y, _, _ = self.jets(p.array())
        periodic = self.target_periodic or p.periodic
        return ChartPoint(self.target, tuple(y), periodic)


def _check_chart(expected: str, p: ChartPoint) -> None:
    if expected and p.chart != expected:
        raise ValueError(f"field lives on chart {expected!r}, got point on {p.chart!r}")


@dataclass(frozen=True)
class FormField:
    """A Multiform-valued field: point -> FormJet."""

    chart: str
    dim: int
    fn: Callable = field(repr=False)

    def __call__(self, p: ChartPoint) -> FormJet:
        _check_chart(self.chart, p)
        return self.fn(p.array())

    @classmethod
    def constant(cls, chart: str, form: Multiform) -> "FormField":
        return cls(chart, form.dim, lambda coords: FormJet.constant(form))

    @classmethod
    def from_expressions(cls, chart: str, dim: int, terms: list) -> "FormField":
        for term in terms:
            expressions.validate(term["expr"], dim)
        return cls(chart, dim, lambda coords: expressions.form_terms_to_jet(dim, terms, coords))


@dataclass(frozen=True)
class GcField:
    """A generator field of T + T*: point -> GcVectorJet."""

    chart: str
    dim: int
    fn: Callable = field(repr=False)

    def __call__(self, p: ChartPoint) -> GcVectorJet:
        _check_chart(self.chart, p)
        return self.fn(p.array())

    @classmethod
    def constant(cls, chart: str, v: GcVector) -> "GcField":
        return cls(chart, v.dim, lambda coords: GcVectorJet.constant(v))

    @classmethod
    def from_expressions(cls, chart: str, dim: int, vec_exprs: list, cov_exprs: list) -> "GcField":
        for e in list(vec_exprs) + list(cov_exprs):
            expressions.validate(e, dim)
        return cls(
            chart,
            dim,
            lambda coords: expressions.gc_components_to_jet(dim, vec_exprs, cov_exprs, coords),
        )


@dataclass(frozen=True)
class IntegrabilityWitness:
    """Least-squares witness for d rho + H ^ rho = v . rho at a point."""

    v: GcVector
    residual: float


def exterior_derivative(alpha: FormField, p: ChartPoint) -> Multiform:
    """d(alpha) at p, assembled from the field's first partials."""
    return alpha(p).d().value()


def pullback_jet(phi: ChartMap, alpha: FormField, p: ChartPoint) -> FormJet:
    """Pullback of alpha through phi at p, with exact first derivatives.

    Coefficient functions compose to second order; the pulled-back basis
    one-forms carry phi's second derivatives only, so the result's order
    is 1 (enough for d of the pullback).
    """
    if p.chart != phi.source:
        raise ValueError(f"point is on chart {p.chart!r}, map expects {phi.source!r}")
    coords = p.array()
    y, jac, hess = phi.jets(coords)
    q = ChartPoint(phi.target, tuple(y), phi.target_periodic or p.periodic)
    ajet = alpha(q)
    n = phi.dim

    # composed coefficient jets (exact to second order)
    comp_vals = ajet.values
    comp_grads = ajet.grads @ jac
    comp_hess = np.einsum("stu,ti,uj->sij", ajet.hess, jac, jac) + np.einsum(
        "st,tij->sij", ajet.grads, hess
    )

    # pulled-back basis one-forms d(phi^t), order 1
    dphi = []
    for t in range(n):
        jet = FormJet.zero(n, order=1)
        for i in range(n):
            jet.values[1 << i] = jac[t, i]
            jet.grads[1 << i] = hess[t, i]
        dphi.append(jet)

    wedge_cache = {0: FormJet.constant(Multiform.scalar(n, 1.0), order=1)}

    def pulled_basis(mask: int) -> FormJet:
        if mask not in wedge_cache:
            low = mask & -mask
            t = low.bit_length() - 1
            wedge_cache[mask] = dphi[t].wedge(pulled_basis(mask ^ low))
        return wedge_cache[mask]

    out = FormJet.zero(n, order=1)
    for mask in range(1 << n):
        if comp_vals[mask] == 0 and not comp_grads[mask].any() and not comp_hess[mask].any():
            continue
        scalar = Jet2(n, comp_vals[mask], comp_grads[mask], comp_hess[mask])
        out = out + pulled_basis(mask).scale(scalar)
    return out


def pullback(phi: ChartMap, alpha: FormField, p: ChartPoint) -> Multiform:
    """(phi^* alpha) at p."""
    return pullback_jet(phi, alpha, p).value()


def _one_form_components(form: Multiform) -> np.ndarray:
    return np.array([form.coeffs[1 << i] for i in range(form.dim)])


def courant_bracket(
    u: GcField, v: GcField, h: Optional[FormField], p: ChartPoint
) -> GcVector:
    """H-twisted Courant bracket of two generator fields at a point.

    [X+xi, Y+eta]_H = [X,Y] + L_X eta - L_Y xi - d(eta(X) - xi(Y))/2
                      + i_Y i_X H,
    with Lie derivatives expanded through the Cartan formula.
    """
    uj = u(p)
    vj = v(p)
    n = uj.dim
    xv, xg = uj.vec_values, uj.vec_grads
    yv, yg = vj.vec_values, vj.vec_grads

    lie_xy = np.einsum("i,ji->j", xv, yg) - np.einsum("i,ji->j", yv, xg)

    def lie_derivative(wv, wg, eta_jet: GcVectorJet) -> np.ndarray:
        """Covector components of L_W eta = i_W d(eta) + d(i_W eta)."""
        eta_form = eta_jet.cov_form()
        i_w_deta = _one_form_components(eta_form.d().value().interior(wv))
        # gradient of the scalar i_W eta, by the product rule
        d_i_w_eta = np.einsum("ij,i->j", wg, eta_jet.cov_values) + np.einsum(
            "i,ij->j", wv, eta_jet.cov_grads
        )
        return i_w_deta + d_i_w_eta

    cov = lie_derivative(xv, xg, vj) - lie_derivative(yv, yg, uj)

    # d(eta(X) - xi(Y)) / 2
    eta_x = np.einsum("ij,i->j", xg, vj.cov_values) + np.einsum("i,ij->j", xv, vj.cov_grads)
    xi_y = np.einsum("ij,i->j", yg, uj.cov_values) + np.einsum("i,ij->j", yv, uj.cov_grads)
    cov = cov - 0.5 * (eta_x - xi_y)

    if h is not None:
        h_val = h(p).value()
        cov = cov + _one_form_components(h_val.interior(xv).interior(yv))

    return GcVector(n, vec=lie_xy, cov=cov)


def integrability_residual(
    rho: FormField, h: Optional[FormField], p: ChartPoint, zero_tol: float = 1e-12
) -> IntegrabilityWitness:
    """Least-squares minimizer of |d rho + H ^ rho - v . rho| over v.

    A residual at round-off level certifies pointwise integrability of
    the spinor line generated by rho.
    """
    jet = rho(p)
    val = jet.value()
    if val.max_abs() <= zero_tol:
        raise ValueError("spinor vanishes here; evaluate off the zero locus")
    target = jet.d().value()
    if h is not None:
        target = target + h(p).value().wedge(val)
    mat = action_matrix(val)
    sol, _, _, _ = np.linalg.lstsq(mat, target.coeffs, rcond=None)
    residual = float(np.linalg.norm(mat @ sol - target.coeffs))
    return IntegrabilityWitness(v=GcVector.from_array(val.dim, sol), residual=residual)


def e_b_transform(b: FormField, u: GcField) -> GcField:
    """The generator-field transform X + xi -> X + xi + i_X B.

    The contraction convention is (i_X B)(Y) = B(X, Y), matching the
    interior product used by the Clifford action.
    """
    if b.dim != u.dim:
        raise ValueError(f"dimension mismatch: {b.dim} vs {u.dim}")

    def fn(coords: np.ndarray) -> GcVectorJet:
        uj = u.fn(coords)
        bj = b.fn(coords)
        ixb = bj.interior_jet(uj.vec_values, uj.vec_grads, uj.vec_hess)
        return uj.with_cov_form(uj.cov_form() + ixb)

    return GcField(u.chart, u.dim, fn)
