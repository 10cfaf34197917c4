"""Monopole fields and chiral maps read off frames, and their PDE residuals.

Conventions fixed here once:

* points are (x, y, t); light-cone coordinates xi = (t+x)/2, eta = (t-x)/2,
  so d_xi = d_t + d_x and d_eta = d_t - d_x acting on functions of (x, y, t);
* a connection A = A_xi dxi + A_eta deta + A_y dy has Cartesian components
  A_t = (A_xi + A_eta)/2 and A_x = (A_xi - A_eta)/2 (the factor of two comes
  from dxi = (dt + dx)/2);
* z = x + i y, A_z = (A_x - i A_y)/2, d_z = (d_x - i d_y)/2.

The linear system a frame psi solves reads off four field combinations as
the tau-linear polynomials

    (tau d_y - d_xi) psi . psi^{-1}  = tau (A_y + phi) - A_xi
    (tau d_eta - d_y) psi . psi^{-1} = tau A_eta + (phi - A_y),

which degenerate for normalized soliton frames to the tau-independent
P = -A_xi and Q = 2 phi = -2 A_y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._numerics import FD_STEP, dagger, opnorm
from .errors import WardError
from .frames import MobiusFrame, TransportedSpan, WardFrame, generic_taus
from .geometry import LorentzElement, act_on_point, mu_of_tau, tau_of_mu

__all__ = [
    "GridSpec", "MonopoleField", "WardMap", "extract_monopole",
    "monopole_residual", "monopole_residual_report", "residual_of_sampler",
    "extract_ward_map", "ward_residual", "energy_density", "gauge_transform",
    "SmoothUnitaryGauge", "lorentz_transform_frame", "pullback_sampler",
    "monopole_bt_fields", "tr_phi_squared",
]


@dataclass(frozen=True)
class GridSpec:
    """Rectangular space grid with a short stack of time slices."""

    x0: float = -10.0
    x1: float = 10.0
    nx: int = 101
    y0: float = -10.0
    y1: float = 10.0
    ny: int = 101
    t_center: float = 0.0
    dt: Optional[float] = None  # defaults to the x spacing
    nt: int = 3

    def axes(self):
        x = np.linspace(self.x0, self.x1, self.nx)
        y = np.linspace(self.y0, self.y1, self.ny)
        dt = self.dt if self.dt is not None else (x[1] - x[0] if self.nx > 1 else 0.1)
        t = self.t_center + dt * (np.arange(self.nt) - (self.nt - 1) / 2.0)
        return x, y, t

    def points(self):
        """Full point array of shape (nt, ny, nx, 3)."""
        x, y, t = self.axes()
        tt, yy, xx = np.meshgrid(t, y, x, indexing="ij")
        return np.stack([xx, yy, tt], axis=-1)

    def halved(self):
        """Same extents with doubled node density (grid-convergence studies)."""
        return GridSpec(self.x0, self.x1, 2 * self.nx - 1,
                        self.y0, self.y1, 2 * self.ny - 1,
                        self.t_center,
                        (self.dt if self.dt is not None else None) and self.dt / 2.0,
                        self.nt)


@dataclass
class MonopoleField:
    """Connection components and Higgs field sampled on a grid.

    Arrays are indexed [it, iy, ix, :, :].  ``sampler`` optionally holds the
    closed-form evaluator the grids were sampled from: points (..., 3) ->
    (A_x, A_y, A_t, phi); rotations and tiny-step differencing use it when
    present instead of interpolating.
    """

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    A_x: np.ndarray
    A_y: np.ndarray
    A_t: np.ndarray
    phi: np.ndarray
    sampler: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return self.A_x.shape[-1]

    @property
    def spacing(self):
        hx = self.x[1] - self.x[0] if len(self.x) > 1 else 1.0
        hy = self.y[1] - self.y[0] if len(self.y) > 1 else hx
        ht = self.t[1] - self.t[0] if len(self.t) > 1 else hx
        return hx, hy, ht

    def anti_hermitian_defect(self):
        d = 0.0
        for a in (self.A_x, self.A_y, self.A_t, self.phi):
            d = max(d, float(np.max(opnorm(a + dagger(a)))))
        return d

    def boundary_decay(self):
        """Max component norm on the spatial boundary ring (decay report)."""
        mid = len(self.t) // 2
        worst = 0.0
        for a in (self.A_x, self.A_y, self.A_t, self.phi):
            s = a[mid]
            ring = np.concatenate([
                opnorm(s[0, :]), opnorm(s[-1, :]), opnorm(s[:, 0]), opnorm(s[:, -1]),
            ])
            worst = max(worst, float(np.max(ring)))
        return worst

    def rotated(self, phi0):
        """Fields of the solution rotated by ``phi0`` about the origin,
        sampled on the same grid.

        Spatial components mix as a 1-form; the Higgs field is a scalar.
        Uses the closed-form sampler when available, otherwise quintic
        spline interpolation of the stored grids (zero beyond the grid).
        """
        c, s = np.cos(phi0), np.sin(phi0)
        tt, yy, xx = np.meshgrid(self.t, self.y, self.x, indexing="ij")
        pts = np.stack([c * xx - s * yy, s * xx + c * yy, tt], axis=-1)
        if self.sampler is not None:
            ax, ay, at, ph = self.sampler(pts)
        else:
            ax = _interp_component(self, self.A_x, pts)
            ay = _interp_component(self, self.A_y, pts)
            at = _interp_component(self, self.A_t, pts)
            ph = _interp_component(self, self.phi, pts)
        new_ax = c * ax + s * ay
        new_ay = -s * ax + c * ay
        rot_sampler = None
        if self.sampler is not None:
            base = self.sampler

            def rot_sampler(points, _b=base, _c=c, _s=s):
                p = np.asarray(points, dtype=float)
                q = np.stack([_c * p[..., 0] - _s * p[..., 1],
                              _s * p[..., 0] + _c * p[..., 1],
                              p[..., 2]], axis=-1)
                bx, by, bt, bp = _b(q)
                return _c * bx + _s * by, -_s * bx + _c * by, bt, bp

        return MonopoleField(self.x.copy(), self.y.copy(), self.t.copy(),
                             new_ax, new_ay, at, ph, sampler=rot_sampler)


def _interp_component(fld, arr, pts):
    from scipy.interpolate import RectBivariateSpline

    nt = len(fld.t)
    n = arr.shape[-1]
    out = np.zeros(pts.shape[:-1] + (n, n), dtype=complex)
    for it in range(nt):
        px = pts[it, ..., 0].ravel()
        py = pts[it, ..., 1].ravel()
        inside = ((px >= fld.x[0]) & (px <= fld.x[-1]) &
                  (py >= fld.y[0]) & (py <= fld.y[-1]))
        for i in range(n):
            for j in range(n):
                for part, sel in ((np.real, 1.0), (np.imag, 1.0j)):
                    spl = RectBivariateSpline(fld.y, fld.x, part(arr[it, :, :, i, j]),
                                              kx=5, ky=5)
                    vals = np.zeros_like(px)
                    vals[inside] = spl.ev(py[inside], px[inside])
                    out[it, ..., i, j] += sel * vals.reshape(pts.shape[1:-1])
    return out


@dataclass
class WardMap:
    """Unitary chiral-model map on a grid (three time slices)."""

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    g: np.ndarray

    @property
    def n(self):
        return self.g.shape[-1]

    def unitarity_defect(self):
        ident = np.eye(self.n)
        return float(np.max(opnorm(dagger(self.g) @ self.g - ident)))


# --------------------------------------------------------------------------
# extraction


def _linear_tau_fit(frame, points, taus, h):
    """Fit (tau d - d') psi psi^{-1} = tau B1 + B0 over the tau samples.

    Returns (B0_1, B1_1, B0_2, B1_2, residual) for the two light-cone
    combinations; residual measures deviation from tau-linearity.
    """
    taus = np.asarray(taus, dtype=complex)
    vand = np.stack([np.ones_like(taus), taus], axis=-1)  # (m, 2)
    pinv = np.linalg.pinv(vand)  # (2, m)
    m1, m2 = [], []
    for tau in taus:
        dxi, deta, dy = frame.lightcone_derivs(points, tau, h)
        inv = np.linalg.inv(frame.eval(points, tau))
        m1.append((tau * dy - dxi) @ inv)
        m2.append((tau * deta - dy) @ inv)
    m1 = np.stack(m1)  # (m, ..., n, n)
    m2 = np.stack(m2)
    fit1 = np.tensordot(pinv, m1, axes=(1, 0))  # (2, ..., n, n)
    fit2 = np.tensordot(pinv, m2, axes=(1, 0))
    res = 0.0
    for arr, fit in ((m1, fit1), (m2, fit2)):
        recon = fit[0] + taus[:, None, None, None, None].reshape(
            (len(taus),) + (1,) * (arr.ndim - 1)) * fit[1]
        res = max(res, float(np.max(opnorm(arr - recon))))
    return fit1[0], fit1[1], fit2[0], fit2[1], res


@dataclass
class ExtractionReport:
    tau_linearity_defect: float
    anti_hermitian_defect: float


def extract_monopole(frame: WardFrame, grid: GridSpec, taus=None, h=FD_STEP,
                     with_report=False):
    """Read the connection and Higgs field off a frame on a grid.

    Works for normalized soliton frames and for Lorentz-transformed frames
    alike: the four light-cone combinations are fitted from the tau-linear
    structure of the linear system, then converted to Cartesian components.
    """
    if taus is None:
        taus = generic_taus(frame.pole_data, count=4)
    pts = grid.points()
    b0_1, b1_1, b0_2, b1_2, res = _linear_tau_fit(frame, pts, taus, h)
    a_xi = -b0_1
    ay_plus_phi = b1_1
    a_eta = b1_2
    phi_minus_ay = b0_2
    phi = 0.5 * (ay_plus_phi + phi_minus_ay)
    a_y = 0.5 * (ay_plus_phi - phi_minus_ay)
    a_t = 0.5 * (a_xi + a_eta)
    a_x = 0.5 * (a_xi - a_eta)
    x, y, t = grid.axes()
    fld = MonopoleField(x, y, t, a_x, a_y, a_t, phi)
    if with_report:
        return fld, ExtractionReport(res, fld.anti_hermitian_defect())
    return fld


# --------------------------------------------------------------------------
# residuals


def _mu_coefficient_equations(comps, dx_comps, dy_comps, dt_comps):
    """The three matrix equations equivalent to the monopole system.

    ``comps`` and the derivative triples are (A_x, A_y, A_t, phi) tuples of
    like-shaped arrays.  Returns the residual arrays of the coefficient
    equations of the spectral-parameter expansion of the zero-curvature
    condition (orders +1, 0, -1).
    """
    ax, ay, at, phi = comps
    az = 0.5 * (ax - 1j * ay)
    azb = 0.5 * (ax + 1j * ay)
    dxa, dya, dta = dx_comps, dy_comps, dt_comps
    d_z = lambda i: 0.5 * (dxa[i] - 1j * dya[i])
    d_zb = lambda i: 0.5 * (dxa[i] + 1j * dya[i])
    # indices: 0 A_x, 1 A_y, 2 A_t, 3 phi; derived: A_z, A_zb
    dt_az = 0.5 * (dta[0] - 1j * dta[1])
    dt_azb = 0.5 * (dta[0] + 1j * dta[1])
    dz_at = d_z(2)
    dzb_at = d_zb(2)
    dz_phi = d_z(3)
    dzb_phi = d_zb(3)
    dzb_az = 0.5 * (d_zb(0) - 1j * d_zb(1))
    dz_azb = 0.5 * (d_z(0) + 1j * d_z(1))
    comm = lambda a, b: a @ b - b @ a
    eq_plus = 0.5 * (dt_az - dz_at + comm(az, at)) + 0.5j * (dz_phi - comm(az, phi))
    eq_zero = 0.5j * (dta[3] - comm(at, phi)) + dzb_az - dz_azb + comm(az, azb)
    eq_minus = 0.5 * (dzb_at - dt_azb + comm(at, azb)) + 0.5j * (dzb_phi - comm(azb, phi))
    return eq_plus, eq_zero, eq_minus


def monopole_residual_report(fld: MonopoleField):
    """Central-difference residual norms of the three component equations."""
    if len(fld.t) < 3:
        raise WardError("need at least three time slices for the residual")
    hx, hy, ht = fld.spacing
    comps = (fld.A_x, fld.A_y, fld.A_t, fld.phi)
    crop = lambda a: a[1:-1, 1:-1, 1:-1]
    dx = lambda a: (a[1:-1, 1:-1, 2:] - a[1:-1, 1:-1, :-2]) / (2 * hx)
    dy = lambda a: (a[1:-1, 2:, 1:-1] - a[1:-1, :-2, 1:-1]) / (2 * hy)
    dt = lambda a: (a[2:, 1:-1, 1:-1] - a[:-2, 1:-1, 1:-1]) / (2 * ht)
    eqs = _mu_coefficient_equations(
        tuple(crop(a) for a in comps),
        tuple(dx(a) for a in comps),
        tuple(dy(a) for a in comps),
        tuple(dt(a) for a in comps),
    )
    return tuple(float(np.max(opnorm(e))) for e in eqs)


def monopole_residual(fld: MonopoleField):
    return max(monopole_residual_report(fld))


def residual_of_sampler(sampler, points, h=1e-4):
    """Monopole residual of a closed-form field at arbitrary points.

    Differencing uses a tiny step on the sampler itself, so the result is
    limited by the sampler's smoothness, not by any grid.  Used for
    residual comparisons that must hold far below grid truncation error.
    """
    points = np.asarray(points, dtype=float)

    def get(pts):
        return tuple(np.asarray(a) for a in sampler(pts))

    ex = np.array([1.0, 0, 0])
    ey = np.array([0, 1.0, 0])
    et = np.array([0, 0, 1.0])
    base = get(points)
    dxv = tuple((a - b) / (2 * h) for a, b in zip(get(points + h * ex), get(points - h * ex)))
    dyv = tuple((a - b) / (2 * h) for a, b in zip(get(points + h * ey), get(points - h * ey)))
    dtv = tuple((a - b) / (2 * h) for a, b in zip(get(points + h * et), get(points - h * et)))
    eqs = _mu_coefficient_equations(base, dxv, dyv, dtv)
    return max(float(np.max(opnorm(e))) for e in eqs)


# --------------------------------------------------------------------------
# chiral (unitary-map) side


def extract_ward_map(frame: WardFrame, theta, grid: GridSpec):
    """g = psi(., tau1)^{-1} psi(., tau2) with tau_i the two real spectral
    values picked out by the angle theta (the mu-circle points +-e^{i theta})."""
    mu1 = np.exp(1j * theta)
    for a, _ in frame.pole_data:
        mua = mu_of_tau(a)
        for target in (mu1, -mu1):
            if abs(mua - target) < 1e-6:
                raise WardError(
                    f"frame pole at tau={a:.6g} sits at the gauge point mu={target:.6g}")
    tau1 = tau_of_mu(mu1)
    tau2 = tau_of_mu(-mu1)
    pts = grid.points()
    v1 = frame.eval(pts, tau1)
    v2 = frame.eval(pts, tau2)
    g = np.linalg.solve(v1, v2)
    x, y, t = grid.axes()
    return WardMap(x, y, t, g)


def ward_residual(wmap: WardMap, theta=0.0):
    """Residual of the modified chiral equation at mixing angle theta.

    Second time derivatives are expanded through first derivatives of g, so
    three time slices suffice.
    """
    g = wmap.g
    hx = wmap.x[1] - wmap.x[0]
    hy = wmap.y[1] - wmap.y[0]
    ht = wmap.t[1] - wmap.t[0]
    inv = np.linalg.inv(g)

    def d(axis, a, hh):
        lo = [slice(1, -1)] * 3
        hi = [slice(1, -1)] * 3
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        return (a[tuple(hi)] - a[tuple(lo)]) / (2 * hh)

    def dd(axis, a, hh):
        lo = [slice(1, -1)] * 3
        hi = [slice(1, -1)] * 3
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        return (a[tuple(hi)] - 2 * a[tuple([slice(1, -1)] * 3)] + a[tuple(lo)]) / hh**2

    crop = lambda a: a[1:-1, 1:-1, 1:-1]
    gt, gx, gy = d(0, g, ht), d(2, g, hx), d(1, g, hy)
    gtt, gxx, gyy = dd(0, g, ht), dd(2, g, hx), dd(1, g, hy)
     invc = crop(inv)
    jt = gt @ invc
    jx = gx @ invc
    jy = gy @ invc
    # (j_a)_a = g_aa g^{-1} - (g_a g^{-1})^2
    t_term = gtt @ invc - jt @ jt
    x_term = gxx @ invc - jx @ jx
    y_term = gyy @ invc - jy @ jy
    brk = jt @ (np.cos(theta) * jx + np.sin(theta) * jy) - (
        np.cos(theta) * jx + np.sin(theta) * jy) @ jt
    res = -t_term + x_term + y_term + brk
    return float(np.max(opnorm(res)))


def energy_density(wmap: WardMap):
    """Standard chiral energy density -1/2 tr[(g^-1 g_t)^2 + (g^-1 g_x)^2
    + (g^-1 g_y)^2] on the interior nodes of the middle slice."""
    g = wmap.g
    hx = wmap.x[1] - wmap.x[0]
    hy = wmap.y[1] - wmap.y[0]
    ht = wmap.t[1] - wmap.t[0]
    inv = np.linalg.inv(g)
    mid = len(wmap.t) // 2
    gt = (g[mid + 1] - g[mid - 1]) / (2 * ht)
    gx = (g[mid, :, 2:] - g[mid, :, :-2]) / (2 * hx)
    gy = (g[mid, 2:, :] - g[mid, :-2, :]) / (2 * hy)
    it = inv[mid]
    jt = (it @ gt)[1:-1, 1:-1]
    jx = (it[:, 1:-1] @ gx)[1:-1]
    jy = (it[1:-1, :] @ gy)[:, 1:-1]
    dens = -0.5 * np.trace(jt @ jt + jx @ jx + jy @ jy, axis1=-2, axis2=-1)
    return wmap.x[1:-1], wmap.y[1:-1], np.real(dens)


# --------------------------------------------------------------------------
# gauge action


def gauge_transform(u, fld: MonopoleField, du=None):
    """Act by a unitary gauge map on a field.

    ``u`` is an array (nt, ny, nx, n, n); ``du`` optionally provides the
    analytic derivatives (du_x, du_y, du_t) (same shapes).  Without them the
    derivatives are taken by central differences on the grid, shrinking the
    usable region by one node on each side.
    """
    uinv = np.linalg.inv(u)
    if du is not None:
        dux, duy, dut = du
    else:
        hx, hy, ht = fld.spacing
        dux = np.zeros_like(u)
        duy = np.zeros_like(u)
        dut = np.zeros_like(u)
        dux[:, :, 1:-1] = (u[:, :, 2:] - u[:, :, :-2]) / (2 * hx)
        duy[:, 1:-1, :] = (u[:, 2:, :] - u[:, :-2, :]) / (2 * hy)
        dut[1:-1] = (u[2:] - u[:-2]) / (2 * ht)
    conj = lambda a: u @ a @ uinv
    return MonopoleField(
        fld.x.copy(), fld.y.copy(), fld.t.copy(),
        conj(fld.A_x) + dux @ uinv,
        conj(fld.A_y) + duy @ uinv,
        conj(fld.A_t) + dut @ uinv,
        conj(fld.phi),
    )


class SmoothUnitaryGauge:
    """Random smooth unitary map u(x, y, t) -> I at spatial infinity.

    Built as a product of factors exp(i f_k(p) H_k) with Gaussian bumps
    f_k and constant Hermitian H_k, so derivatives are available in closed
    form (each factor commutes with its own derivative).
    """

    def __init__(self, n, rng, nfactors=2, scale=0.7, width=(1.5, 3.0), center=2.0):
        self.n = n
        self.factors = []
        for _ in range(nfactors):
            h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            h = 0.5 * (h + h.conj().T)
            lam, vec = np.linalg.eigh(h)
            c = rng.uniform(-center, center, size=2)
            w = rng.uniform(*width)
            amp = rng.uniform(0.3, 1.0) * scale
            self.factors.append((lam, vec, c, w, amp))

    def _bump(self, pts):
        out = []
        for lam, vec, c, w, amp in self.factors:
            r2 = (pts[..., 0] - c[0]) ** 2 + (pts[..., 1] - c[1]) ** 2
            f = amp * np.exp(-r2 / (2 * w**2))
            fx = f * (-(pts[..., 0] - c[0]) / w**2)
            fy = f * (-(pts[..., 1] - c[1]) / w**2)
            out.append((f, fx, fy))
        return out

    def __call__(self, pts):
        """u and its (du_x, du_y, du_t) at the given points."""
        pts = np.asarray(pts, dtype=float)
        bumps = self._bump(pts)
        u = None
        dux = duy = None
        for (lam, vec, _, _, _), (f, fx, fy) in zip(self.factors, bumps):
            phase = np.exp(1j * f[..., None] * lam)  # (..., n)
            fac = (vec * phase[..., None, :]) @ vec.conj().T
            hmat = (vec * lam) @ vec.conj().T
            dfac_x = 1j * fx[..., None, None] * hmat @ fac
            dfac_y = 1j * fy[..., None, None] * hmat @ fac
            if u is None:
                u, dux, duy = fac, dfac_x, dfac_y
            else:
                dux = dux @ fac + u @ dfac_x
                duy = duy @ fac + u @ dfac_y
                u = u @ fac
        dut = np.zeros_like(u)
        return u, (dux, duy, dut)

    def apply(self, fld: MonopoleField):
        pts = np.stack(np.meshgrid(fld.t, fld.y, fld.x, indexing="ij")[::-1], axis=-1)
        u, du = self(pts)
        return gauge_transform(u, fld, du=du)

    def apply_sampler(self, sampler):
        def gauged(points):
            ax, ay, at, phi = sampler(points)
            u, (dux, duy, dut) = self(points)
            uinv = np.linalg.inv(u)
            return (u @ ax @ uinv + dux @ uinv,
                    u @ ay @ uinv + duy @ uinv,
                    u @ at @ uinv + dut @ uinv,
                    u @ phi @ uinv)
        return gauged


# --------------------------------------------------------------------------
# Lorentz action


def lorentz_transform_frame(h: LorentzElement, frame: WardFrame) -> WardFrame:
    """Frame of the transformed solution: psi'(p, tau) = psi(h p, h * tau)."""
    return MobiusFrame(frame, h)


def pullback_sampler(h: LorentzElement, sampler):
    """Pull a field sampler back along h (1-form on A, scalar on phi)."""
    jac = h.matrix  # columns act on (x, y, t)

    def pulled(points):
        q = act_on_point(h, points)
        ax, ay, at, phi = sampler(q)
        comps = np.stack([ax, ay, at])
        new = np.tensordot(jac, comps, axes=(0, 0))
        return new[0], new[1], new[2], phi

    return pulled


def tr_phi_squared(fld: MonopoleField):
    return np.real(np.trace(fld.phi @ fld.phi, axis1=-2, axis2=-1))


# --------------------------------------------------------------------------
# closed-form superposition of fields


def monopole_bt_fields(psi: WardFrame, source, grid: GridSpec, h=FD_STEP,
                       input_fields=None):
    """Fields of the superposed frame from the closed-form update laws.

    Given a frame psi with fields (A, phi) and a seed projector field at
    alpha, the superposed solution's fields are

        A'_eta       = A_eta
        A'_y + phi'  = A_y + phi
        A'_xi        = (1 - conj(a)/a) (d_xi pit) hmat + hmat^{-1} A_xi hmat
        A'_y - phi'  = (1 - conj(a)/a) (d_y pit) hmat + hmat^{-1} (A_y - phi) hmat

    with pit the transported projector and hmat = pit + (a/conj(a)) pit_perp.
    ``input_fields`` may supply the (A_xi, A_eta, A_y, phi) grids of psi;
    otherwise they are extracted from the frame.
    """
    alpha = complex(source.alpha)
    pts = grid.points()
    if input_fields is None:
        base = extract_monopole(psi, grid)
        a_xi = base.A_t + base.A_x
        a_eta = base.A_t - base.A_x
        a_y = base.A_y
        phi = base.phi
    else:
        a_xi, a_eta, a_y, phi = input_fields

    tilted = TransportedSpan(psi, alpha, source)
    pit = tilted(pts)
    n = pit.shape[-1]
    ident = np.eye(n)
    hmat = pit + (alpha / np.conj(alpha)) * (ident - pit)
    hinv = np.linalg.inv(hmat)

    ex = np.array([1.0, 0, 0])
    ey = np.array([0, 1.0, 0])
    et = np.array([0, 0, 1.0])
    d_xi_pit = (tilted(pts + h * (ex + et)) - tilted(pts - h * (ex + et))) / (2 * h)
    d_y_pit = (tilted(pts + h * ey) - tilted(pts - h * ey)) / (2 * h)

    c = 1.0 - np.conj(alpha) / alpha
    new_a_xi = c * (d_xi_pit @ hmat) + hinv @ a_xi @ hmat
    new_a_eta = a_eta
    new_sum = a_y + phi
    new_diff = c * (d_y_pit @ hmat) + hinv @ (a_y - phi) @ hmat
    new_ay = 0.5 * (new_sum + new_diff)
    new_phi = 0.5 * (new_sum - new_diff)
    x, yv, t = grid.axes()
    return MonopoleField(
        x, yv, t,
        0.5 * (new_a_xi - new_a_eta),
        new_ay,
        0.5 * (new_a_xi + new_a_eta),
        new_phi,
    )
