"""Complex dense matrices, Hermitian projectors, and rational matrix maps.

All matrices are plain numpy arrays of shape (..., n, n) with complex
dtype; leading axes broadcast.  A rational matrix map is kept in the
canonical partial-fraction form

    f(tau) = f_inf + sum_a sum_{j=1..m_a} C[a, j] / (tau - a)**j

with a finite pole list; products are re-expanded to this form by numeric
residue extraction on small circles around each pole.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._numerics import contour_coefficients, dagger, opnorm
from .errors import EmptySpanError, PoleEvalError

# Singular values below RANK_RTOL * sigma_max do not count toward rank; the
# same scale decides projector validity.
RANK_RTOL = 1e-10
PROJECTOR_TOL = 1e-12
# Two poles closer than POLE_MERGE_RTOL * (1 + |a|) are treated as one.
POLE_MERGE_RTOL = 1e-8
# Evaluation is refused within this distance of a pole.
POLE_EVAL_GUARD = 1e-9


def span_projector(vectors, rank_rtol=RANK_RTOL):
    """Orthogonal projector onto the column span, batched.

    Parameters
    ----------
    vectors : array (..., n, k)
        Columns spanning the target subspace.  The span may be rank
        deficient; rank is decided by singular values >= rank_rtol times
        the largest one.

    Returns
    -------
    proj : array (..., n, n)
    rank : int array (...)
    """
    v = np.asarray(vectors, dtype=complex)
    if v.ndim < 2:
        v = v[:, None]
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    smax = s[..., :1]
    keep = s > rank_rtol * np.maximum(smax, np.finfo(float).tiny)
    basis = np.where(keep[..., None, :], u, 0.0)
    proj = basis @ dagger(basis)
    return proj, keep.sum(axis=-1)


@dataclass(frozen=True)
class HermitianProjector:
    """Orthogonal (Hermitian, idempotent) projector of C^n."""

    matrix: np.ndarray
    rank: int

    @property
    def n(self):
        return self.matrix.shape[-1]

    def perp(self):
        return HermitianProjector(np.eye(self.n) - self.matrix, self.n - self.rank)

    def defect(self):
        """max(||P^2 - P||, ||P* - P||), both zero for a valid projector."""
        p = self.matrix
        return max(opnorm(p @ p - p), opnorm(dagger(p) - p))


def project_onto(vectors):
    """Orthogonal projector onto span{vectors}.

    ``vectors`` is a sequence of complex n-vectors (or an (n, k) array of
    columns).  Raises EmptySpanError when every vector is zero.
    """
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        cols = v[:, None]
    elif v.ndim == 2:
        # input is a list of k vectors of length n, rows -> columns
        cols = v.T
    else:
        raise ValueError("expected a vector or a list of vectors")
    if not np.any(np.abs(cols) > 0):
        raise EmptySpanError("empty span")
    proj, rank = span_projector(cols)
    return HermitianProjector(proj, int(rank))


def _as_pole_key(alpha):
    return complex(alpha)


def merge_pole(alpha, existing, rtol=POLE_MERGE_RTOL):
    """Return the member of ``existing`` that alpha coincides with, or None."""
    for b in existing:
        if abs(alpha - b) < rtol * (1.0 + abs(alpha)):
            return b
    return None


class RationalMatrixMap:
    """Matrix-valued rational function of one complex variable.

    Parameters
    ----------
    at_inf : (n, n) array
        Value at tau = infinity.
    poles : sequence of complex
        Distinct pole locations.
    coeffs : sequence of arrays
        For each pole, an array (m, n, n); entry j-1 multiplies
        (tau - pole)**(-j).  Multiplicity is m.
    """

    def __init__(self, at_inf, poles=(), coeffs=()):
        self.at_inf = np.asarray(at_inf, dtype=complex)
        if self.at_inf.ndim != 2 or self.at_inf.shape[0] != self.at_inf.shape[1]:
            raise ValueError("at_inf must be square")
        if len(poles) != len(coeffs):
            raise ValueError("poles and coeffs must pair up")
        cleaned = []
        for a, c in zip(poles, coeffs):
            c = np.atleast_3d(np.asarray(c, dtype=complex))
            if c.shape[-2:] != self.at_inf.shape:
                raise ValueError("coefficient blocks must match at_inf shape")
            # canonical form: trim trailing zero orders, drop empty poles
            scale = max(opnorm(self.at_inf), 1.0)
            m = c.shape[0]
            while m > 0 and opnorm(c[m - 1]) <= 1e-13 * scale:
                m -= 1
            if m == 0:
                continue
            if merge_pole(a, [p for p, _ in cleaned]) is not None:
                raise ValueError("pole list has (near-)coincident entries")
            cleaned.append((_as_pole_key(a), c[:m].copy()))
        self._poles = tuple(p for p, _ in cleaned)
        self._coeffs = tuple(c for _, c in cleaned)

    @property
    def n(self):
        return self.at_inf.shape[0]

    @property
    def poles(self):
        """Tuple of (location, multiplicity)."""
        return tuple((p, c.shape[0]) for p, c in zip(self._poles, self._coeffs))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def blaschke(cls, alpha, projector):
        """The degree-one unitary-on-the-real-line factor

        g(tau) = I + (alpha - conj(alpha)) / (tau - alpha) * Pperp

        for a Hermitian projector (matrix or HermitianProjector).
        """
        p = projector.matrix if isinstance(projector, HermitianProjector) else np.asarray(projector)
        n = p.shape[-1]
        perp = np.eye(n) - p
        c = (alpha - np.conj(alpha)) * perp
        return cls(np.eye(n), [complex(alpha)], [c[None]])

    def eval(self, tau):
        """Evaluate at scalar or array tau.  Points at infinity are legal;
        points within POLE_EVAL_GUARD of a pole raise PoleEvalError."""
        tau = np.asarray(tau, dtype=complex)
        scalar = tau.ndim == 0
        t = np.atleast_1d(tau)
        out = np.broadcast_to(self.at_inf, t.shape + self.at_inf.shape).copy()
        finite = np.isfinite(t)
        for a, c in zip(self._poles, self._coeffs):
            d = np.where(finite, t - a, np.inf)
            if np.any(np.abs(d[finite]) < POLE_EVAL_GUARD):
                raise PoleEvalError(f"evaluation at pole {a}")
            for j in range(c.shape[0]):
                out[finite] += c[j] / (d[finite, None, None] ** (j + 1))
        return out[0] if scalar else out.reshape(tau.shape + self.at_inf.shape)

    def __call__(self, tau):
        return self.eval(tau)

    def residue(self, alpha, order=1):
        """Coefficient of (tau - alpha)**(-order); zero matrix when absent."""
        if order < 1:
            raise ValueError("order must be >= 1")
        hit = merge_pole(alpha, self._poles)
        if hit is None:
            return np.zeros_like(self.at_inf)
        c = self._coeffs[self._poles.index(hit)]
        if order > c.shape[0]:
            return np.zeros_like(self.at_inf)
        return c[order - 1].copy()

    def _contour_radius(self, alpha, others):
        r = 0.05 * (1.0 + abs(alpha))
        for b in others:
            if abs(b - alpha) > 0:
                r = min(r, 0.25 * abs(b - alpha))
        return r

    def __matmul__(self, other):
        """Pointwise product, re-expanded to canonical partial fractions."""
        if not isinstance(other, RationalMatrixMap):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        at_inf = self.at_inf @ other.at_inf
        locs = []
        mult = {}
        for p, m in self.poles + other.poles:
            hit = merge_pole(p, locs)
            if hit is None:
                locs.append(p)
                mult[p] = m
            else:
                mult[hit] += m
        poles, coeffs = [], []
        evalfn = lambda tau: self.eval(tau) @ other.eval(tau)
        for a in locs:
            r = self._contour_radius(a, [b for b in locs if b != a])
            c = contour_coefficients(evalfn, a, mult[a], r)
            poles.append(a)
            coeffs.append(c)
        return RationalMatrixMap(at_inf, poles, coeffs)

    def reality_defect(self, taus):
        """max over samples of || f(conj(tau))* f(tau) - I ||."""
        worst = 0.0
        for t in np.atleast_1d(np.asarray(taus, dtype=complex)):
            m = dagger(self.eval(np.conj(t))) @ self.eval(t)
            worst = max(worst, float(opnorm(m - np.eye(self.n))))
        return worst


def rational_eval(f: RationalMatrixMap, tau):
    return f.eval(tau)


def rational_residue(f: RationalMatrixMap, alpha, order=1):
    return f.residue(alpha, order)


def reality_defect(f, taus):
    """Reality-condition defect of a rational map or any tau -> matrix callable."""
    if isinstance(f, RationalMatrixMap):
        return f.reality_defect(taus)
    worst = 0.0
    for t in np.atleast_1d(np.asarray(taus, dtype=complex)):
        a = np.asarray(f(np.conj(t)))
        b = np.asarray(f(t))
        worst = max(worst, float(np.max(opnorm(dagger(a) @ b - np.eye(a.shape[-1])))))
    return worst


def projector_defect(p):
    """max(||p^2 - p||, ||p* - p||) batched over leading axes."""
    p = np.asarray(p)
    return float(np.max(np.maximum(opnorm(p @ p - p), opnorm(dagger(p) - p))))


def check_projector(p, tol=PROJECTOR_TOL):
    d = projector_defect(p)
    if d > tol:
        warnings.warn(f"projector defect {d:.2e} above {tol:.0e}")
    return d
