"""Coordinates on 2+1 space-time, the Lorentz group SO(2,1), and its
fractional-linear action on the spectral parameter charts.

Points are numpy arrays (..., 3) ordered (x, y, t) with c = 1.  Three
mutually Moebius-equivalent spectral charts appear throughout:

    mu  = (lam - i) / (lam + i),      tau = 1 / lam = i (mu - 1) / (mu + 1).

Group elements carry both the real 3x3 matrix on (x, y, t) and a 2x2
unimodular companion ``sigma`` whose fractional-linear action moves the
lam chart; the mu and tau actions are obtained by conjugating with the
chart changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INF = complex(np.inf, 0.0)

# Chart-change Moebius matrices (act by (a z + b)/(c z + d)).
_LAM_TO_MU = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_MU_TO_LAM = np.array([[1.0j, 1.0j], [-1.0, 1.0]])
_LAM_TO_TAU = np.array([[0.0, 1.0], [1.0, 0.0]])
_MU_TO_TAU = np.array([[1.0j, -1.0j], [1.0, 1.0]])

_CHARTS = ("mu", "lam", "tau")


def mobius_apply(m, z):
    """Apply a 2x2 Moebius matrix projectively; z may be INF."""
    a, b, c, d = complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])
    if not np.isfinite(z):
        return a / c if c != 0 else INF
    num = a * z + b
    den = c * z + d
    if den == 0:
        return INF
    return num / den


def mobius_matrix(kind_from, kind_to):
    if kind_from not in _CHARTS or kind_to not in _CHARTS:
        raise ValueError(f"unknown chart, expected one of {_CHARTS}")
    if kind_from == kind_to:
        return np.eye(2, dtype=complex)
    table = {
        ("lam", "mu"): _LAM_TO_MU,
        ("mu", "lam"): _MU_TO_LAM,
        ("lam", "tau"): _LAM_TO_TAU,
        ("tau", "lam"): _LAM_TO_TAU,  # inversion is an involution
        ("mu", "tau"): _MU_TO_TAU,
        ("tau", "mu"): np.linalg.inv(_MU_TO_TAU),
    }
    return np.asarray(table[(kind_from, kind_to)], dtype=complex)


@dataclass(frozen=True)
class SpectralParam:
    """A spectral value tagged with its chart ('mu', 'lam' or 'tau')."""

    kind: str
    value: complex

    def to(self, kind):
        return SpectralParam(kind, mobius_apply(mobius_matrix(self.kind, kind), self.value))


def convert(param: SpectralParam, kind) -> SpectralParam:
    return param.to(kind)


def lightcone(points):
    """(xi, eta, y) with xi = (t + x)/2 and eta = (t - x)/2."""
    p = np.asarray(points, dtype=float)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    return 0.5 * (t + x), 0.5 * (t - x), y


def from_lightcone(xi, eta, y):
    x = xi - eta
    t = xi + eta
    return np.stack(np.broadcast_arrays(x, np.asarray(y, float), t), axis=-1)


_METRIC = np.diag([1.0, 1.0, -1.0])


@dataclass(frozen=True)
class LorentzElement:
    """An SO(2,1) element with its SL(2,R) companion.

    Only words in rotations and boosts are constructed, so ``sigma`` is a
    definite representative; the induced Moebius action is what downstream
    code relies on.
    """

    matrix: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        s = np.asarray(self.sigma, dtype=float)
        if np.max(np.abs(m.T @ _METRIC @ m - _METRIC)) > 1e-12:
            raise ValueError("matrix does not preserve the (+,+,-) quadratic form")
        if abs(np.linalg.det(s) - 1.0) > 1e-12:
            raise ValueError("sigma must have determinant 1")

    def __matmul__(self, other):
        if not isinstance(other, LorentzElement):
            return NotImplemented
        return LorentzElement(self.matrix @ other.matrix, self.sigma @ other.sigma)

    def inverse(self):
        return LorentzElement(np.linalg.inv(self.matrix), np.linalg.inv(self.sigma))


def identity_element():
    return LorentzElement(np.eye(3), np.eye(2))


def make_rotation(theta):
    """Spatial rotation of the xy-plane by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    m = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    ch, sh = np.cos(theta / 2.0), np.sin(theta / 2.0)
    sig = np.array([[ch, sh], [-sh, ch]])
    return LorentzElement(m, sig)


def make_boost(s):
    """Boost in the xt-plane with rapidity ``s``; (xi, eta) scale by e**(+-s)."""
    ch, sh = np.cosh(s), np.sinh(s)
    m = np.array([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]])
    sig = np.diag([np.exp(s / 2.0), np.exp(-s / 2.0)])
    return LorentzElement(m, sig)


def word(*ops):
    """Compose ('rot', theta) / ('boost', s) pairs left to right.

    word(a, b, c) returns the element a b c, i.e. c acts on a point first
    when applied as h . p.
    """
    h = identity_element()
    for kind, val in ops:
        if kind in ("rot", "rotation"):
            h = h @ make_rotation(val)
        elif kind == "boost":
            h = h @ make_boost(val)
        else:
            raise ValueError(f"unknown generator {kind!r}")
    return h


def act_on_point(h: LorentzElement, points):
    p = np.asarray(points, dtype=float)
    return p @ h.matrix.T


def act_on_lambda(h: LorentzElement, lam):
    """Fractional-linear action of sigma(h) on the lam chart."""
    return mobius_apply(h.sigma, lam)


def act_on_mu(h: LorentzElement, mu):
    m = _LAM_TO_MU @ h.sigma @ _MU_TO_LAM
    # _MU_TO_LAM is lam<-mu up to scale; scale drops out of the action
    return mobius_apply(m, mu)


def act_on_tau(h: LorentzElement, tau):
    m = _LAM_TO_TAU @ h.sigma @ _LAM_TO_TAU
    return mobius_apply(m, tau)


def tau_action_matrix(h: LorentzElement):
    """2x2 matrix whose Moebius action realizes h on the tau chart."""
    return (_LAM_TO_TAU @ h.sigma @ _LAM_TO_TAU).astype(complex)


def mu_of_tau(tau):
    return mobius_apply(mobius_matrix("tau", "mu"), tau)


def tau_of_mu(mu):
    return mobius_apply(_MU_TO_TAU, mu)
