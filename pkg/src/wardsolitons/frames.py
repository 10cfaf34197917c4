"""Construction, superposition, limiting and subtraction of soliton frames.

A frame here is a map psi(p, tau), rational in the spectral parameter tau
with value I at infinity, satisfying the reality condition
psi(p, conj(tau))* psi(p, tau) = I, and such that

    P := (tau d_y psi - d_xi psi) psi^{-1}
    Q := (tau d_eta psi - d_y psi) psi^{-1}

are independent of tau.  Fields read off such a frame solve the
space-time monopole equation; the frame algebra below adds, merges and
removes poles while preserving those properties.

Frames are immutable evaluator trees; evaluation is vectorized over a
point batch at one tau per call.  Pole bookkeeping travels with each
node.  A canonical partial-fraction snapshot at any point batch is
available through :meth:`WardFrame.rational_map_at`.
"""

from __future__ import annotations

import numpy as np

from ._numerics import (ArrayMemo, FD_STEP, contour_coefficients, dagger,
                        eye_like, opnorm, richardson_weights)
from .curves import CharacteristicProjector, perturbed_curve
from .errors import DegeneracyError, NonConvergenceError, WardError
from .geometry import act_on_point, mobius_apply, tau_action_matrix
from .linalg import POLE_MERGE_RTOL, RationalMatrixMap, merge_pole, span_projector

TAU_INF = complex(np.inf, 0.0)

# Epsilon ladder for pole-coalescence limits: EPS0 / 2**i for LIMIT_LEVELS
# levels, combined by Richardson extrapolation.  Four levels keep the limit
# frame accurate even on the coefficient-extraction contours close to the
# coalesced pole, where the extrapolation residual is amplified.
EPS0 = 1e-3
LIMIT_LEVELS = 4

# Generic spectral samples used for checks and fits; filtered per frame to
# stay away from poles.
_TAU_POOL = (
    0.31 + 0.67j, -1.2 + 0.45j, 2.3 - 0.9j, -0.7 - 1.8j,
    1.7 + 1.4j, 0.05 - 2.4j, 3.1 + 0.2j, -2.6 - 0.3j,
)


def _sum_pole_data(*groups):
    locs, mult = [], {}
    for group in groups:
        for a, m in group:
            hit = merge_pole(a, locs)
            if hit is None:
                locs.append(a)
                mult[a] = m
            else:
                mult[hit] += m
    return tuple((a, mult[a]) for a in locs)


def _remove_pole(pole_data, alpha, order=None):
    out = []
    for a, m in pole_data:
        if merge_pole(alpha, [a]) is not None:
            drop = m if order is None else order
            if m - drop > 0:
                out.append((a, m - drop))
        else:
            out.append((a, m))
    return tuple(out)


def generic_taus(pole_data, count=4, min_dist=0.3):
    picked = []
    for cand in _TAU_POOL:
        if all(abs(cand - a) > min_dist and abs(cand - np.conj(a)) > min_dist
               for a, _ in pole_data):
            picked.append(cand)
        if len(picked) == count:
            break
    if len(picked) < count:
        raise WardError("could not find spectral samples clear of the pole set")
    return picked


class ProjectorSource:
    """Base for Hermitian projector fields pi(p); callable on point batches."""

    rank = None

    def span_vectors(self, points):
        raise NotImplementedError

    def __call__(self, points):
        proj, _ = span_projector(self.span_vectors(points))
        return proj


class TransportedSpan(ProjectorSource):
    """Image of a projector field under a frame value: span psi(p, alpha) V(p)."""

    def __init__(self, frame, alpha, base):
        self.frame = frame
        self.alpha = complex(alpha)
        self.base = base
        self.rank = base.rank
        self.n = frame.n if frame.n is not None else getattr(base, "n", None)
        self._memo = ArrayMemo()

    def span_vectors(self, points):
        return self.frame.eval(points, self.alpha) @ self.base.span_vectors(points)

    def __call__(self, points):
        hit = self._memo.get(points)
        if hit is None:
            proj, _ = span_projector(self.span_vectors(points))
            hit = self._memo.put(points, proj)
        return hit


class ResidueKernelSource(ProjectorSource):
    """Projector onto the kernel of a pole coefficient of a frame.

    side='right' projects onto ker C (annihilates the coefficient from the
    right), side='left' onto ker C* (annihilates from the left).  The
    coefficient of order m at alpha is extracted by a small contour.
    """

    def __init__(self, frame, alpha, order=1, side="right", radius=None):
        self.frame = frame
        self.alpha = complex(alpha)
        self.order = int(order)
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        self.side = side
        self.radius = radius if radius is not None else frame.contour_radius(alpha)
        self.n = frame.n
        self._memo = ArrayMemo()
        self.rank = None  # determined on first use, then enforced

    def _coefficient(self, points):
        fn = lambda tau: self.frame.eval(points, tau)
        c = contour_coefficients(fn, self.alpha, self.order, self.radius)
        return c[self.order - 1]

    def span_vectors(self, points):
        """Orthonormal basis (..., n, n-r) of the kernel side."""
        hit = self._memo.get(points)
        if hit is not None:
            return hit
        c = self._coefficient(points)
        u, s, vh = np.linalg.svd(c)
        smax = np.maximum(s[..., :1], np.finfo(float).tiny)
        ranks = np.sum(s > 1e-8 * smax, axis=-1)
        r = int(np.max(ranks))
        if np.any(ranks != r):
            raise WardError("non-simple pole structure: residue rank varies across points")
        n = c.shape[-1]
        if self.rank is None:
            self.rank = n - r
        elif self.rank != n - r:
            raise WardError("non-simple pole structure: residue rank changed between batches")
        if r == n:
            raise WardError("pole coefficient has full rank; nothing to project onto")
        if self.side == "right":
            basis = dagger(vh)[..., :, r:]
        else:
            basis = u[..., :, r:]
        return self._memo.put(points, basis)

    def __call__(self, points):
        basis = self.span_vectors(points)
        return basis @ dagger(basis)


class WardFrame:
    """Common interface for frame evaluator nodes."""

    n = None
    pole_data = ()

    def eval(self, points, tau):
        """Value at a point batch (..., 3) and one spectral value tau.

        ``tau`` may be TAU_INF (any non-finite complex) for the value at
        infinity.
        """
        raise NotImplementedError

    def eval_many(self, points, taus):
        return [self.eval(points, t) for t in taus]

    # -- derived quantities ------------------------------------------------

    def contour_radius(self, alpha, floor=None):
        """Safe contour radius around ``alpha`` given the other poles."""
        r = 0.05 * (1.0 + abs(alpha))
        for b, _ in self.pole_data:
            d = abs(b - alpha)
            if d > POLE_MERGE_RTOL * (1 + abs(alpha)) * 10:
                r = min(r, 0.25 * d)
        if floor is not None:
            r = max(r, floor)
        return r

    def lightcone_derivs(self, points, tau, h=FD_STEP):
        """(d_xi psi, d_eta psi, d_y psi) by central differences."""
        points = np.asarray(points, dtype=float)
        ex = np.array([1.0, 0.0, 0.0])
        ey = np.array([0.0, 1.0, 0.0])
        et = np.array([0.0, 0.0, 1.0])
        dxi = (self.eval(points + h * (ex + et), tau) - self.eval(points - h * (ex + et), tau)) / (2 * h)
        deta = (self.eval(points + h * (et - ex), tau) - self.eval(points - h * (et - ex), tau)) / (2 * h)
        dy = (self.eval(points + h * ey, tau) - self.eval(points - h * ey, tau)) / (2 * h)
        return dxi, deta, dy

    def pq(self, points, tau, h=FD_STEP):
        """P and Q at one tau; tau-independent exactly when the frame is valid."""
        return self.pq_many(points, [tau], h)[0]

    def pq_many(self, points, taus, h=FD_STEP):
        """(P, Q) pairs for several tau from shared derivative stencils.

        One stencil batch feeds every tau, so per-batch numerical noise is
        common to all spectral samples and drops out of tau-independence
        comparisons.
        """
        points = np.asarray(points, dtype=float)
        ex = np.array([1.0, 0.0, 0.0])
        ey = np.array([0.0, 1.0, 0.0])
        et = np.array([0.0, 0.0, 1.0])
        batches = {
            "xi+": points + h * (ex + et), "xi-": points - h * (ex + et),
            "eta+": points + h * (et - ex), "eta-": points - h * (et - ex),
            "y+": points + h * ey, "y-": points - h * ey,
            "0": points,
        }
        vals = {k: self.eval_many(v, taus) for k, v in batches.items()}
        out = []
        for i, tau in enumerate(taus):
            dxi = (vals["xi+"][i] - vals["xi-"][i]) / (2 * h)
            deta = (vals["eta+"][i] - vals["eta-"][i]) / (2 * h)
            dy = (vals["y+"][i] - vals["y-"][i]) / (2 * h)
            inv = np.linalg.inv(vals["0"][i])
            out.append(((tau * dy - dxi) @ inv, (tau * deta - dy) @ inv))
        return out

    def rational_map_at(self, point):
        """Canonical partial-fraction snapshot of tau -> psi(point, tau)."""
        point = np.asarray(point, dtype=float)
        fn = lambda tau: self.eval(point, tau)
        poles, coeffs = [], []
        for a, m in self.pole_data:
            c = contour_coefficients(fn, a, m, self.contour_radius(a))
            poles.append(a)
            coeffs.append(c)
        return RationalMatrixMap(self.eval(point, TAU_INF), poles, coeffs)

    def validate(self, rng=None, npoints=20, h=FD_STEP, box=3.0):
        """Measure the frame invariants on random samples.

        Returns a FrameReport with the reality defect, the value-at-infinity
        defect, and the tau-independence defect of P and Q.
        """
        rng = np.random.default_rng(0) if rng is None else rng
        pts = rng.uniform(-box, box, size=(npoints, 3))
        taus = generic_taus(self.pole_data, count=3)
        ident = np.eye(self.n)
        reality = 0.0
        for t in taus:
            a = self.eval(pts, np.conj(t))
            b = self.eval(pts, t)
            reality = max(reality, float(np.max(opnorm(dagger(a) @ b - ident))))
        inf_defect = float(np.max(opnorm(self.eval(pts, TAU_INF) - ident)))
        pqs = self.pq_many(pts, taus, h)
        ps = [p for p, _ in pqs]
        qs = [q for _, q in pqs]
        pq_defect = 0.0
        for i in range(len(taus)):
            for j in range(i + 1, len(taus)):
                pq_defect = max(pq_defect, float(np.max(opnorm(ps[i] - ps[j]))))
                pq_defect = max(pq_defect, float(np.max(opnorm(qs[i] - qs[j]))))
        return FrameReport(reality, inf_defect, pq_defect)


class FrameReport:
    def __init__(self, reality_defect, infinity_defect, pq_tau_defect):
        self.reality_defect = reality_defect
        self.infinity_defect = infinity_defect
        self.pq_tau_defect = pq_tau_defect

    def __repr__(self):
        return (f"FrameReport(reality={self.reality_defect:.3e}, "
                f"infinity={self.infinity_defect:.3e}, pq_tau={self.pq_tau_defect:.3e})")


class IdentityFrame(WardFrame):
    def __init__(self, n):
        self.n = n
        self.pole_data = ()

    def eval(self, points, tau):
        shape = np.asarray(points, dtype=float).shape[:-1]
        return np.broadcast_to(np.eye(self.n, dtype=complex), shape + (self.n, self.n)).copy()


class BlaschkeFrame(WardFrame):
    """g(p, tau) = I + (alpha - conj alpha)/(tau - alpha) * piperp(p)."""

    def __init__(self, alpha, source):
        alpha = complex(alpha)
        if alpha.imag == 0:
            raise WardError("pole on real axis")
        self.alpha = alpha
        self.source = source
        self.n = getattr(source, "n", None)
        self.pole_data = ((alpha, 1),)

    def eval(self, points, tau):
        pi = self.source(points)
        if self.n is None:
            self.n = pi.shape[-1]
        ident = eye_like(pi)
        if not np.isfinite(tau):
            return ident
        c = (self.alpha - np.conj(self.alpha)) / (complex(tau) - self.alpha)
        return ident + c * (ident - pi)

    def inverse(self):
        """g^{-1} is the same factor with the pole moved to conj(alpha)."""
        return BlaschkeFrame(np.conj(self.alpha), self.source)


class ProductFrame(WardFrame):
    def __init__(self, left, right, pole_data=None):
        if left.n is not None and right.n is not None and left.n != right.n:
            raise ValueError("frame dimensions differ")
        self.left = left
        self.right = right
        self.n = left.n if left.n is not None else right.n
        self.pole_data = (pole_data if pole_data is not None
                          else _sum_pole_data(left.pole_data, right.pole_data))

    def eval(self, points, tau):
        return self.left.eval(points, tau) @ self.right.eval(points, tau)


class ExtrapolatedFrame(WardFrame):
    """Weighted combination of frames along an epsilon ladder."""

    def __init__(self, members, weights, pole_data):
        self.members = tuple(members)
        self.weights = tuple(weights)
        self.n = members[0].n
        self.pole_data = tuple(pole_data)

    def eval(self, points, tau):
        acc = self.weights[0] * self.members[0].eval(points, tau)
        for w, f in zip(self.weights[1:], self.members[1:]):
            acc = acc + w * f.eval(points, tau)
        return acc


class CanonicalFrame(WardFrame):
    """Partial-fraction form with point-dependent coefficients.

    Wraps a raw evaluator (typically an epsilon-limit) and replaces it by
    its exact rational structure: coefficients at the declared poles are
    extracted by contours around each pole, so evaluation stays accurate
    arbitrarily close to (and right in between) the declared poles, where
    the raw extrapolant is polluted by its spurious nearby poles.
    """

    def __init__(self, base, pole_data, contour_floor=None):
        self.base = base
        self.n = base.n
        self.pole_data = tuple(pole_data)
        self._floor = contour_floor
        self._memo = ArrayMemo()

    def _coeff_table(self, points):
        hit = self._memo.get(points)
        if hit is not None:
            return hit
        table = []
        for a, m in self.pole_data:
            r = self.contour_radius(a, floor=self._floor)
            fn = lambda tau: self.base.eval(points, tau)
            table.append((a, contour_coefficients(fn, a, m, r)))
        return self._memo.put(points, table)

    def eval_many(self, points, taus):
        table = self._coeff_table(points)
        at_inf = self.base.eval(points, TAU_INF)
        out = []
        for tau in taus:
            if not np.isfinite(tau):
                out.append(at_inf.copy())
                continue
            acc = at_inf.copy()
            for a, c in table:
                d = complex(tau) - a
                for j in range(c.shape[0]):
                    acc = acc + c[j] / d ** (j + 1)
            out.append(acc)
        return out

    def eval(self, points, tau):
        return self.eval_many(points, [tau])[0]


class MobiusFrame(WardFrame):
    """Lorentz-transformed frame: psi'(p, tau) = psi(h p, M_h(tau)).

    M_h is the tau-chart Moebius action of h; the transformed frame solves
    the linear system of the transformed (pulled back) fields.
    """

    def __init__(self, base, h):
        self.base = base
        self.h = h
        self.n = base.n
        self._mob = tau_action_matrix(h)
        inv = np.linalg.inv(self._mob)
        moved = [(mobius_apply(inv, a), m) for a, m in base.pole_data]
        # a pole sent to tau = infinity leaves the rational bookkeeping
        self.pole_data = tuple((a, m) for a, m in moved if np.isfinite(a))

    def eval(self, points, tau):
        q = mobius_apply(self._mob, complex(tau) if np.isfinite(tau) else TAU_INF)
        return self.base.eval(act_on_point(self.h, points), q)


# --------------------------------------------------------------------------
# constructors


class PoleDatum:
    """Pole location with multiplicity and the curves feeding the limit."""

    def __init__(self, alpha, curves):
        alpha = complex(alpha)
        if alpha.imag == 0:
            raise WardError("pole on real axis")
        self.alpha = alpha
        self.curves = tuple(curves)
        if not self.curves:
            raise ValueError("need at least one curve")

    @property
    def multiplicity(self):
        return len(self.curves)


def identity_frame(n):
    return IdentityFrame(n)


def one_soliton(alpha, curves):
    """Single-pole frame from curve data along the alpha characteristics."""
    if not isinstance(curves, (list, tuple)):
        curves = [curves]
    return BlaschkeFrame(alpha, CharacteristicProjector(alpha, curves))


def _check_nondegenerate(psi, alpha, rng=None, npoints=5, det_floor=1e-12):
    rng = np.random.default_rng(7) if rng is None else rng
    pts = rng.uniform(-2.0, 2.0, size=(npoints, 3))
    for tau in (alpha, np.conj(alpha)):
        d = np.linalg.det(psi.eval(pts, tau))
        bad = np.abs(d) ** (1.0 / psi.n) < det_floor
        if np.any(bad):
            raise DegeneracyError(
                f"frame is degenerate at tau={tau:.6g}", pts[np.argmax(bad)]
            )


def bt_superpose(psi, source, check=True):
    """Algebraic superposition: attach a simple pole at source.alpha.

    ``source`` provides the seed projector field pi(p) (constant along the
    alpha-characteristics); the result is g_{alpha, pitilde} psi with
    pitilde(p) the projector onto psi(p, alpha) Im pi(p).  The updated
    frame satisfies

        Ptilde = P + (conj(alpha) - alpha) d_y pitilde
        Qtilde = Q + (conj(alpha) - alpha) d_eta pitilde.
    """
    alpha = complex(source.alpha)
    if merge_pole(alpha, [a for a, _ in psi.pole_data]) is not None:
        raise WardError(
            "new pole coincides with an existing one; use limit_pole_data / "
            "add_soliton for higher multiplicity"
        )
    if check:
        _check_nondegenerate(psi, alpha)
    tilted = TransportedSpan(psi, alpha, source)
    return ProductFrame(BlaschkeFrame(alpha, tilted), psi,
                        pole_data=_sum_pole_data(psi.pole_data, ((alpha, 1),)))


def _ratio_diagnostics(members, rng):
    pts = rng.uniform(-2.0, 2.0, size=(4, 3))
    taus = generic_taus(_sum_pole_data(*[m.pole_data for m in members]), count=2)
    d1 = d2 = 0.0
    for t in taus:
        v = [m.eval(pts, t) for m in members]
        d1 = max(d1, float(np.max(opnorm(v[1] - v[0]))))
        d2 = max(d2, float(np.max(opnorm(v[2] - v[1]))))
    return d1, d2


def _limit_chain_step(psi, datum, j, eps0, rng, levels=LIMIT_LEVELS):
    """One epsilon-ladder superposition raising the multiplicity to j."""
    alpha = datum.alpha
    members = []
    for i in range(levels):
        eps = eps0 / 2.0**i
        curve = perturbed_curve(datum.curves, eps, j)
        src = CharacteristicProjector(alpha + eps, [curve])
        members.append(bt_superpose(psi, src, check=False))
    d1, d2 = _ratio_diagnostics(members, rng)
    if d1 > 0 and d2 / d1 > 0.85:
        raise NonConvergenceError(
            f"epsilon limit not contracting at order {j}: "
            f"|f(e/2)-f(e)|={d1:.3e}, |f(e/4)-f(e/2)|={d2:.3e}",
            diagnostics={"d1": d1, "d2": d2},
        )
    pole_data = _sum_pole_data(psi.pole_data, ((alpha, 1),))
    raw = ExtrapolatedFrame(members, richardson_weights(levels), pole_data)
    # contours must enclose the spurious poles at alpha + eps ladder
    return CanonicalFrame(raw, pole_data, contour_floor=20 * eps0)


def limit_pole_data(datum: PoleDatum, eps0=EPS0, rng=None):
    """Frame with a single pole of multiplicity k built by coalescence.

    The k curves define perturbed seed lines at alpha + eps; each ladder
    member is superposed algebraically and the eps -> 0 limit is taken by
    Richardson extrapolation of frame values, then re-expanded to the
    canonical single-pole form.
    """
    rng = np.random.default_rng(11) if rng is None else rng
    psi = one_soliton(datum.alpha, [datum.curves[0]])
    for j in range(2, datum.multiplicity + 1):
        psi = _limit_chain_step(psi, datum, j, eps0, rng)
    return psi


def add_soliton(psi, datum: PoleDatum, eps0=EPS0, rng=None):
    """Graft pole data (alpha, k) onto an existing frame.

    Multiplicity one is a plain superposition; higher multiplicity replays
    the limiting ladder on top of psi.
    """
    rng = np.random.default_rng(13) if rng is None else rng
    _check_nondegenerate(psi, datum.alpha)
    out = bt_superpose(psi, CharacteristicProjector(datum.alpha, [datum.curves[0]]))
    for j in range(2, datum.multiplicity + 1):
        out = _limit_chain_step(out, datum, j, eps0, rng)
    return out


def subtract_simple_pole(psi, alpha=None):
    """Split off a simple pole: psi = g_{alpha, pitilde} psi_1 = psitilde g_{alpha, pi}.

    Returns (g, psi_1) where g = g_{alpha, pi} is the right soliton factor
    (its projector satisfies the characteristic constraints) and psi_1 is
    the left-peeled remainder, holomorphic and nondegenerate at alpha and
    conj(alpha).
    """
    if alpha is None:
        simple = [a for a, m in psi.pole_data if m == 1]
        if len(simple) != 1:
            raise WardError("specify which simple pole to subtract")
        alpha = simple[0]
    alpha = complex(alpha)
    hit = merge_pole(alpha, [a for a, _ in psi.pole_data])
    if hit is None:
        raise WardError(f"{alpha} is not a pole of the frame")
    mult = dict(psi.pole_data)[hit]
    if mult != 1:
        raise WardError("pole is not simple; use subtract_pole_data")
    right = ResidueKernelSource(psi, hit, order=1, side="right")
    left = ResidueKernelSource(psi, hit, order=1, side="left")
    soliton = BlaschkeFrame(hit, right)
    remainder = ProductFrame(BlaschkeFrame(np.conj(hit), left), psi,
                             pole_data=_remove_pole(psi.pole_data, hit))
    return soliton, remainder


def _top_order_norm(frame, alpha, order, rng):
    pts = rng.uniform(-2.0, 2.0, size=(3, 3))
    fn = lambda tau: frame.eval(pts, tau)
    c = contour_coefficients(fn, alpha, order, frame.contour_radius(alpha, floor=0.02))
    return float(np.max(opnorm(c[order - 1])))


def subtract_pole_data(psi, alpha=None, rng=None):
    """Split off the full pole (alpha, k): psi = psitilde G = Gtilde psi_1.

    Peels one order at a time, always constraining the current top-order
    coefficient; returns (G, psi_1) with G a product of k simple factors
    at alpha and psi_1 holomorphic at alpha, conj(alpha).
    """
    rng = np.random.default_rng(17) if rng is None else rng
    if alpha is None:
        if len(psi.pole_data) != 1:
            raise WardError("specify which pole to subtract")
        alpha = psi.pole_data[0][0]
    hit = merge_pole(complex(alpha), [a for a, _ in psi.pole_data])
    if hit is None:
        raise WardError(f"{alpha} is not a pole of the frame")
    k = dict(psi.pole_data)[hit]

    # right peel collects the soliton factor product g_k ... g_1
    work = psi
    soliton = None
    for order in range(k, 0, -1):
        scale = _top_order_norm(work, hit, order, rng)
        src = ResidueKernelSource(work, hit, order=order, side="right")
        g = BlaschkeFrame(hit, src)
        soliton = g if soliton is None else ProductFrame(g, soliton)
        work = ProductFrame(work, g.inverse(),
                            pole_data=_remove_pole(work.pole_data, hit, order=1))
        if order > 1:
            left_norm = _top_order_norm(work, hit, order, rng)
            if left_norm > 1e-6 * max(scale, 1.0):
                raise WardError(
                    f"peeling stalled: order-{order} coefficient only dropped to {left_norm:.2e}"
                )

    # independent left peel produces the normalized remainder
    rem = psi
    for order in range(k, 0, -1):
        srcl = ResidueKernelSource(rem, hit, order=order, side="left")
        rem = ProductFrame(BlaschkeFrame(np.conj(hit), srcl), rem,
                           pole_data=_remove_pole(rem.pole_data, hit, order=1))
    return soliton, rem


def spatial_infinity_limit(psi, tau, radii=(1e2, 1e3, 1e4), ndirs=8,
                           times=(0.0, 5.0), tol=1e-4):
    """Extrapolated frame value as ||(x, y)|| -> infinity.

    Samples ``ndirs`` directions at the given radii and times, extrapolates
    linearly in 1/R, and checks that the limit is direction- and
    time-independent; raises if the spread exceeds ``tol`` (scaled by the
    limit size), since that means the frame is not normalized.
    """
    angles = 2 * np.pi * np.arange(ndirs) / ndirs
    limits = []
    for t in times:
        for b in angles:
            vals = []
            for r in radii:
                p = np.array([r * np.cos(b), r * np.sin(b), t])
                vals.append(psi.eval(p, tau))
            # one Richardson step in 1/R per radius decade
            v = vals[-1] + (vals[-1] - vals[-2]) * (radii[-2] / radii[-1]) / (
                1.0 - radii[-2] / radii[-1])
            limits.append(v)
    limits = np.array(limits)
    mean = limits.mean(axis=0)
    spread = float(np.max(opnorm(limits - mean)))
    scale = 1.0 + float(opnorm(mean))
    if spread > tol * scale:
        raise NonConvergenceError(
            f"spatial limit not stable (spread {spread:.3e}); frame not normalized")
    return mean
