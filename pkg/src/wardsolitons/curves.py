"""Polynomial curves into C^n and projector fields constant along
characteristics.

A rank-k subspace field pi(x, y, t) that solves the characteristic
constraints

    (alpha d_y - d_xi) pi . pi = 0,      (alpha d_eta - d_y) pi . pi = 0

is exactly one of the form pi = pi0(w) with w = y + alpha xi + eta / alpha
and pi0 a holomorphic family of subspaces; here pi0 is spanned by
polynomial curves (rational curves cleared of denominators, which is no
loss for span-valued data).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._numerics import ArrayMemo
from .errors import WardError
from .linalg import span_projector

# Nudge applied to the curve argument when the span drops rank at an
# isolated point.
DEGENERACY_NUDGE = 1e-10


@dataclass(frozen=True)
class PolyCurve:
    """A polynomial map C -> C^n given by component coefficient rows.

    ``coeffs[i, d]`` is the degree-d coefficient of component i (ascending
    degree).  The projectivized value extends to w = infinity when the
    leading coefficient vector is nonzero.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if not np.any(np.abs(c) > 0):
            raise ValueError("curve is identically zero")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self):
        return self.coeffs.shape[0]

    @property
    def degree(self):
        return self.coeffs.shape[1] - 1

    def __call__(self, w):
        """Evaluate componentwise; w may be any-shaped complex array."""
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape + (self.n,), dtype=complex)
        for d in range(self.coeffs.shape[1] - 1, -1, -1):
            out = out * w[..., None] + self.coeffs[:, d]
        return out

    def divided_difference(self, w1, w0):
        """(curve(w1) - curve(w0)) / (w1 - w0), evaluated without cancellation.

        Uses sum_d c_d sum_{k<d} w1**k w0**(d-1-k), which stays accurate as
        w1 -> w0; needed by the pole-coalescence limits where the raw
        difference would lose all significant digits.
        """
        w1 = np.asarray(w1, dtype=complex)
        w0 = np.asarray(w0, dtype=complex)
        shape = np.broadcast_shapes(w1.shape, w0.shape)
        deg = self.coeffs.shape[1] - 1
        out = np.zeros(shape + (self.n,), dtype=complex)
        p1 = np.ones(shape, dtype=complex)  # w1**k running power
        # h_d = sum_{k=0}^{d-1} w1**k w0**(d-1-k) obeys h_{d+1} = w0*h_d + w1**d
        h = np.zeros(shape, dtype=complex)
        for d in range(1, deg + 1):
            h = w0 * h + p1
            p1 = p1 * w1
            out += h[..., None] * self.coeffs[:, d]
        return out

    def leading_vector(self):
        """Coefficient vector controlling the value at w = infinity."""
        deg = self.coeffs.shape[1] - 1
        for d in range(deg, -1, -1):
            v = self.coeffs[:, d]
            if np.any(np.abs(v) > 0):
                return v.copy()
        raise AssertionError("unreachable: zero curve")

    def scaled_add(self, other: "PolyCurve", factor):
        """self + factor * other, padded to common degree."""
        if other.n != self.n:
            raise ValueError("curve dimensions differ")
        d = max(self.coeffs.shape[1], other.coeffs.shape[1])
        out = np.zeros((self.n, d), dtype=complex)
        out[:, : self.coeffs.shape[1]] = self.coeffs
        out[:, : other.coeffs.shape[1]] += factor * other.coeffs
        return PolyCurve(out)


def perturbed_curve(curves, eps, j):
    """Truncated series curve a_0 + a_1 eps + ... + a_{j-1} eps**(j-1).

    ``curves`` is the ordered list (a_0 ... a_{k-1}); 1 <= j <= len(curves).
    """
    if not 1 <= j <= len(curves):
        raise ValueError("order j out of range")
    acc = curves[0]
    for m in range(1, j):
        acc = acc.scaled_add(curves[m], eps**m)
    return acc


def char_var(points, alpha):
    """Characteristic variable w = y + alpha xi + eta / alpha."""
    if alpha == 0:
        raise WardError("alpha must be nonzero")
    p = np.asarray(points, dtype=float)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    xi = 0.5 * (t + x)
    eta = 0.5 * (t - x)
    return y + alpha * xi + eta / alpha


class CharacteristicProjector:
    """Rank-k Hermitian projector field pi(p) = span{a_j(w(p))}.

    Degenerate points (span rank below k) are handled by nudging w in a
    fixed direction and warning; the underlying subspace family has only
    isolated indeterminacy.
    """

    def __init__(self, alpha, curves):
        alpha = complex(alpha)
        if alpha.imag == 0:
            raise WardError("pole on real axis")
        curves = tuple(curves)
        if not curves:
            raise ValueError("need at least one curve")
        n = curves[0].n
        if any(c.n != n for c in curves):
            raise ValueError("curves must share the ambient dimension")
        self.alpha = alpha
        self.curves = curves
        self.n = n
        self.rank = self._rank_probe()
        self._memo = ArrayMemo()

    def _rank_probe(self):
        w = np.array([0.37 + 0.11j, -1.3 + 0.7j, 2.1 - 0.4j])
        vals = np.stack([c(w) for c in self.curves], axis=-1)
        _, r = span_projector(vals)
        return int(np.max(r))

    def span_vectors(self, points):
        """(..., n, k) stack of curve values at w(points)."""
        w = char_var(points, self.alpha)
        return np.stack([c(w) for c in self.curves], axis=-1)

    def __call__(self, points):
        hit = self._memo.get(points)
        if hit is not None:
            return hit
        v = self.span_vectors(points)
        proj, rank = span_projector(v)
        bad = rank < self.rank
        if np.any(bad):
            warnings.warn(
                f"projector span dropped rank at {int(np.sum(bad))} point(s); "
                f"nudging the curve argument by {DEGENERACY_NUDGE:g}"
            )
            w = char_var(points, self.alpha) + DEGENERACY_NUDGE
            v2 = np.stack([c(w) for c in self.curves], axis=-1)
            proj2, _ = span_projector(v2)
            proj = np.where(bad[..., None, None], proj2, proj)
        return self._memo.put(points, proj)

    def projector_at_infinity(self):
        """Span of leading coefficient vectors; the w -> infinity limit."""
        v = np.stack([c.leading_vector() for c in self.curves], axis=-1)
        proj, _ = span_projector(v)
        return proj


def projector_field(cp: CharacteristicProjector, points):
    """Hermitian projector(s) of the field at the given point array."""
    return cp(points)
