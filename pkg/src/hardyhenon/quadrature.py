"""Shared quadrature machinery for the singular-integral and extension modules.

The workhorse is the angular sphere integral

    Phi(c0, q) = int_{S^{n-1}} (c0 + 2 q (1 - cos g))^{-m/2} dw,

with c0 >= 0 the squared offset between two radii (plus any elevation
squared) and q the product of the radii.  When c0/q is small the integrand
is a spike of width sqrt(c0/q) at g = 0; a sinh-stretched substitution
resolves it uniformly down to machine-scale offsets.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .specialfn import unit_sphere_area

#: Below this value of c0/q the sinh-stretched angular rule is used.
_ANGULAR_SWITCH = 0.25


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=64)
def gauss_jacobi_01(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^1 s^beta f(s) ds."""
    x, w = roots_jacobi(n, 0.0, beta)
    s = (x + 1.0) / 2.0
    w = w * 0.5 ** (beta + 1.0)
    return s, w


def angular_kernel(c0, q, n: int, m: float, n_nodes: int):
    """Vectorized Phi(c0, q) for exponent m; c0 and q broadcast together.

    q = 0 entries are exact: the integrand is constant over the sphere.
    """
    c0 = np.asarray(c0, dtype=float)
    q = np.asarray(q, dtype=float)
    c0b, qb = np.broadcast_arrays(c0, q)
    out = np.empty(c0b.shape, dtype=float)
    area = unit_sphere_area(n)
    ring = unit_sphere_area(n - 1)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(qb > 0.0, c0b / np.where(qb > 0.0, qb, 1.0), np.inf)
    spike = ratio < _ANGULAR_SWITCH

    xg, wg = gauss_legendre(n_nodes)
    x01 = (xg + 1.0) / 2.0
    w01 = wg / 2.0

    flat_c0 = c0b.reshape(-1)
    flat_q = qb.reshape(-1)
    flat_out = out.reshape(-1)
    flat_spike = spike.reshape(-1)

    idx = np.nonzero(~flat_spike)[0]
    if idx.size:
        gam = math.pi * x01
        s2 = np.sin(gam / 2.0) ** 2
        D = flat_c0[idx, None] + 4.0 * flat_q[idx, None] * s2[None, :]
        f = np.sin(gam)[None, :] ** (n - 2) * D ** (-m / 2.0)
        flat_out[idx] = math.pi * (f @ w01) * ring

    idx = np.nonzero(flat_spike)[0]
    if idx.size:
        delta = np.sqrt(flat_c0[idx] / flat_q[idx])
        xi_max = np.arcsinh(math.pi / delta)
        xi = xi_max[:, None] * x01[None, :]
        gam = delta[:, None] * np.sinh(xi)
        jac = delta[:, None] * np.cosh(xi) * xi_max[:, None]
        s2 = np.sin(gam / 2.0) ** 2
        D = flat_c0[idx, None] + 4.0 * flat_q[idx, None] * s2
        f = np.sin(gam) ** (n - 2) * D ** (-m / 2.0) * jac
        flat_out[idx] = (f * w01[None, :]).sum(axis=1) * ring

    # q == 0: the distance is constant over the sphere
    zero_q = flat_q == 0.0
    if zero_q.any():
        flat_out[zero_q] = area * flat_c0[zero_q] ** (-m / 2.0)
    return out


def angular_flux_kernel(c0, q, t2: float, n: int, sigma: float, n_nodes: int):
    """Angular integral of (2 sigma R^2 - n t^2) D^{-(m+2)/2} over the sphere.

    R^2 = D - t^2 is the horizontal squared distance.  Combining the two
    terms inside the integrand keeps the near-spike cancellation pointwise
    instead of between two large quadrature results.
    """
    m = n + 2.0 * sigma
    c0 = np.asarray(c0, dtype=float)
    q = np.asarray(q, dtype=float)
    c0b, qb = np.broadcast_arrays(c0, q)
    out = np.empty(c0b.shape, dtype=float)
    ring = unit_sphere_area(n - 1)
    area = unit_sphere_area(n)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(qb > 0.0, c0b / np.where(qb > 0.0, qb, 1.0), np.inf)
    spike = ratio < _ANGULAR_SWITCH

    xg, wg = gauss_legendre(n_nodes)
    x01 = (xg + 1.0) / 2.0
    w01 = wg / 2.0

    flat_c0 = c0b.reshape(-1)
    flat_q = qb.reshape(-1)
    flat_out = out.reshape(-1)
    flat_spike = spike.reshape(-1)

    def accumulate(idx, gam, jac, scale):
        s2 = np.sin(gam / 2.0) ** 2
        D = flat_c0[idx, None] + 4.0 * flat_q[idx, None] * s2
        numer = 2.0 * sigma * (D - t2) - n * t2
        f = np.sin(gam) ** (n - 2) * numer * D ** (-(m + 2.0) / 2.0) * jac
        flat_out[idx] = (f * w01[None, :]).sum(axis=1) * scale

    idx = np.nonzero(~flat_spike)[0]
    if idx.size:
        gam = np.broadcast_to(math.pi * x01, (idx.size, n_nodes))
        accumulate(idx, gam, math.pi, ring)

    idx = np.nonzero(flat_spike)[0]
    if idx.size:
        delta = np.sqrt(flat_c0[idx] / flat_q[idx])
        xi_max = np.arcsinh(math.pi / delta)
        xi = xi_max[:, None] * x01[None, :]
        gam = delta[:, None] * np.sinh(xi)
        jac = delta[:, None] * np.cosh(xi) * xi_max[:, None]
        accumulate(idx, gam, jac, ring)

    zero_q = flat_q == 0.0
    if zero_q.any():
        D0 = flat_c0[zero_q]
        flat_out[zero_q] = area * (2.0 * sigma * (D0 - t2) - n * t2) * D0 ** (-(m + 2.0) / 2.0)
    return out


def log_zone_nodes(r_lo: float, r_hi: float, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes in log radius; weights include the d(rho) Jacobian."""
    xg, wg = gauss_legendre(n_nodes)
    ya, yb = math.log(r_lo), math.log(r_hi)
    y = 0.5 * (ya + yb) + 0.5 * (yb - ya) * xg
    rho = np.exp(y)
    return rho, 0.5 * (yb - ya) * wg * rho


def tail_moment_coefficient(n: int, sigma: float, x2: float, t2: float) -> float:
    """Second-order coefficient of the far-field kernel expansion.

    Phi ~ |S^{n-1}| rho^{-m} (1 + A rho^{-2}) for rho much larger than the
    source scale, with A = m(m+2) x^2 / (2n) - m (x^2 + t^2) / 2.
    """
    m = n + 2.0 * sigma
    return m * (m + 2.0) * x2 / (2.0 * n) - m * (x2 + t2) / 2.0
