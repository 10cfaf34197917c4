"""Small shared numeric helpers: batched matrix norms, contour coefficient
extraction, Richardson weights, thread budget."""

from __future__ import annotations

import os

import numpy as np

# Central-difference step used for all frame derivatives.
FD_STEP = 1e-5

# Three-level Richardson weights for samples at (eps, eps/2, eps/4) of a
# quantity with an expansion f0 + c1*eps + c2*eps^2 + ...; eliminates both
# the eps and eps^2 terms.
RICHARDSON3 = (1.0 / 3.0, -2.0, 8.0 / 3.0)


def richardson_weights(levels):
    """Weights w_i for samples f(eps / 2**i), i = 0..levels-1, combining to
    the eps -> 0 limit with error O(eps**levels)."""
    nodes = 0.5 ** np.arange(levels)
    vand = np.vander(nodes, levels, increasing=True).T  # row k: nodes**k
    rhs = np.zeros(levels)
    rhs[0] = 1.0
    return np.linalg.solve(vand, rhs)


def dagger(a):
    """Conjugate transpose over the trailing matrix axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def opnorm(a):
    """Spectral norm over the trailing matrix axes (batched)."""
    a = np.asarray(a)
    return np.linalg.norm(a, ord=2, axis=(-2, -1))


def fronorm(a):
    a = np.asarray(a)
    return np.linalg.norm(a, axis=(-2, -1))


def eye_like(a):
    """Identity matrix broadcast to the batch shape of ``a``."""
    a = np.asarray(a)
    n = a.shape[-1]
    return np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()


def hermitian_part(a):
    return 0.5 * (a + dagger(a))


def anti_hermitian_part(a):
    return 0.5 * (a - dagger(a))


def contour_coefficients(evalfn, alpha, max_order, radius, nodes=32):
    """Principal-part coefficients of a matrix map around ``alpha``.

    ``evalfn(tau)`` must return an array (..., n, n); the map must be
    analytic on the radius-``radius`` circle and have all its singular
    behaviour near ``alpha`` strictly inside it.  Returns ``coeffs`` of
    shape (max_order, ..., n, n) where ``coeffs[j-1]`` multiplies
    ``(tau - alpha)**(-j)``.

    Trapezoidal sampling of the circle integral; spectrally accurate when
    the nearest other singularity is a few radii away.
    """
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = np.exp(1j * th)
    vals = None
    for m in range(nodes):
        v = np.asarray(evalfn(alpha + radius * ring[m]), dtype=complex)
        if vals is None:
            vals = np.zeros((nodes,) + v.shape, dtype=complex)
        vals[m] = v
    coeffs = np.empty((max_order,) + vals.shape[1:], dtype=complex)
    for j in range(1, max_order + 1):
        w = (radius**j / nodes) * np.exp(1j * j * th)
        coeffs[j - 1] = np.tensordot(w, vals, axes=(0, 0))
    return coeffs


def central_diff(evalfn, points, direction, h=FD_STEP):
    """Central difference of ``evalfn(points)`` along a coordinate direction.

    ``direction`` is a length-3 displacement in (x, y, t); the step is
    ``h`` times that displacement.
    """
    d = np.asarray(direction, dtype=float)
    return (evalfn(points + h * d) - evalfn(points - h * d)) / (2.0 * h)


class ArrayMemo:
    """Identity-keyed cache for results of per-point-batch computations.

    Keys are the actual array objects (matched with ``is``); holding the
    reference keeps ids from being recycled by the allocator.
    """

    def __init__(self, cap=8):
        self.cap = cap
        self._items = []

    def get(self, arr):
        for k, v in self._items:
            if k is arr:
                return v
        return None

    def put(self, arr, val):
        if len(self._items) >= self.cap:
            self._items.pop(0)
        self._items.append((arr, val))
        return val


def thread_budget():
    """Worker cap for the embarrassingly parallel loops.

    Honours the WSL_THREADS environment variable; falls back to the CPU
    count.  Results are assembled in deterministic order regardless.
    """
    env = os.environ.get("WSL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)
