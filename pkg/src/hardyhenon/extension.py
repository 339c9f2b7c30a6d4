"""Half-space extension of radial traces and its verification helpers.

The extension of a trace u is the convolution with the Poisson-type kernel
of order 2 sigma; its weighted normal derivative at the boundary recovers
the nonlocal operator.  Points are parametrized by spherical radius and
elevation angle, X = (|X| cos psi, |X| sin psi), and every field here is
cylindrically symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fraclap import QuadratureConfig, DEFAULT_CONFIG, RadialProfile, check_Lsigma_membership
from .params import ProblemParams, derive_exponents
from .quadrature import (
    angular_kernel,
    angular_flux_kernel,
    gauss_legendre,
    log_zone_nodes,
    tail_moment_coefficient,
)
from .specialfn import kappa_sigma, poisson_normalizer, singular_constant, unit_sphere_area

__all__ = [
    "ExtensionField",
    "FowlerField",
    "SphereProfile",
    "FluxResult",
    "SphereOdeResiduals",
    "BarrierResiduals",
    "poisson_extend_radial",
    "neumann_flux",
    "fowler_map",
    "fowler_unmap",
    "exact_sphere_profile",
    "exact_extension_field",
    "poisson_extension_field",
    "verify_sphere_ode",
    "verify_barrier_identity",
]

_TAGS = ("poisson_evaluated", "cylinder_solved", "exact_homogeneous")


@dataclass(frozen=True)
class ExtensionField:
    """Sampled extension values over a (log-spaced radius) x (elevation) grid."""

    r_grid: np.ndarray
    psi_grid: np.ndarray
    values: np.ndarray  # shape (len(r_grid), len(psi_grid))
    params: ProblemParams
    representation_tag: str

    def __post_init__(self) -> None:
        if self.representation_tag not in _TAGS:
            raise ValueError(f"unknown representation tag {self.representation_tag!r}")
        if self.values.shape != (len(self.r_grid), len(self.psi_grid)):
            raise ValueError("values shape does not match the grids")
        if np.any(self.values < 0.0):
            raise ValueError("extension fields must be nonnegative")


@dataclass(frozen=True)
class FowlerField:
    """Cylinder form of an extension field: V(s, psi) = e^{beta s} U(e^s, psi)."""

    s_grid: np.ndarray
    psi_grid: np.ndarray
    values: np.ndarray
    params: ProblemParams


@dataclass(frozen=True)
class SphereProfile:
    """Angular profile of a homogeneous field on the unit upper half-sphere."""

    psi_grid: np.ndarray
    phi: np.ndarray
    boundary_value: float


def _poisson_radial_integral(trace, x, t, n, sigma, cfg, kernel):
    """int_0^inf u(rho) rho^{n-1} * kernel(rho) d rho with peak-aware zones.

    ``kernel`` maps a rho array to the sphere-reduced kernel at offset
    c0 = (x-rho)^2 + t^2 and product x*rho.  Endpoint pieces use the
    asserted power laws of the trace.
    """
    u = trace.evaluate
    L = math.hypot(x, t)
    R = cfg.tail_cutoff * L
    total = 0.0

    def log_piece(lo, hi):
        nonlocal total
        if hi <= lo:
            return
        rho, w = log_zone_nodes(lo, hi, cfg.nodes_radial)
        total += float(np.sum(w * u(rho) * rho ** (n - 1) * kernel(rho)))

    if x > 0.05 * L:
        # spike of width ~t at rho = x: sinh clustering on both sides
        h = 0.5
        d = max(t / x, 1e-300)
        zmax = math.asinh(h / d)
        xg, wg = gauss_legendre(cfg.nodes_radial)
        z = zmax * xg
        rho = x * (1.0 + d * np.sinh(z))
        jac = x * d * np.cosh(z) * zmax
        total += float(np.sum(wg * u(rho) * rho ** (n - 1) * kernel(rho) * jac))
        inner_hi = x * (1.0 - h)
        log_piece(x * (1.0 + h), R)
    else:
        inner_hi = 0.3 * L
        log_piece(inner_hi, R)

    rho0 = cfg.inner_cutoff * inner_hi
    log_piece(rho0, inner_hi)

    # [0, rho0]: kernel constant to O((rho0/L)^2)
    a = trace.inner_exponent
    ua = float(u(np.array([rho0]))[0]) * rho0 ** a
    k0 = float(kernel(np.array([0.0]))[0])
    total += k0 * ua * rho0 ** (n - a) / (n - a)
    return total, R


def poisson_extend_radial(
    trace: RadialProfile,
    point: tuple[float, float],
    n: int,
    sigma: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    convergence_tol: float | None = None,
) -> float:
    """Extension value at (radius, elevation angle); elevation zero is rejected.

    The value converges to the trace as psi -> 0; at psi = 0 itself the trace
    should be used directly.  With ``convergence_tol`` set, the quadrature is
    repeated at half the node counts and disagreement above the tolerance
    raises QuadratureError with the achieved estimate.
    """
    r, psi = point
    if r <= 0.0:
        raise ValueError("the spherical radius must be positive")
    if not 0.0 < psi <= math.pi / 2.0:
        raise ValueError("elevation angle must lie in (0, pi/2]; use the trace at psi = 0")
    if not check_Lsigma_membership(trace, n, sigma):
        raise ValueError("trace is outside the integrability class")
    value = _poisson_value(trace, point, n, sigma, cfg)
    if convergence_tol is not None:
        from .fraclap import QuadratureError

        coarse = _poisson_value(trace, point, n, sigma, cfg.halved())
        scale = max(abs(value), abs(coarse), 1e-300)
        estimate = abs(value - coarse) / scale
        if estimate > convergence_tol:
            raise QuadratureError(
                f"node-doubling disagreement {estimate:.3e} exceeds {convergence_tol:.3e} "
                f"at point {point}",
                estimate,
            )
    return value


def _poisson_value(trace, point, n, sigma, cfg) -> float:
    r, psi = point
    x = r * math.cos(psi)
    t = r * math.sin(psi)
    m = n + 2.0 * sigma
    t2 = t * t

    def kernel(rho):
        return angular_kernel((x - rho) ** 2 + t2, x * rho, n, m, cfg.nodes_angular)

    total, R = _poisson_radial_integral(trace, x, t, n, sigma, cfg, kernel)

    # power tail beyond R with the second-order far-field kernel moment
    b = trace.outer_exponent
    ub = float(trace.evaluate(np.array([R]))[0]) * R ** b
    A = tail_moment_coefficient(n, sigma, x * x, t2)
    area = unit_sphere_area(n)
    total += area * ub * (
        R ** (-2.0 * sigma - b) / (2.0 * sigma + b)
        + A * R ** (-2.0 * sigma - b - 2.0) / (2.0 * sigma + b + 2.0)
    )
    return poisson_normalizer(n, sigma) * t ** (2.0 * sigma) * total


def _weighted_t_derivative(trace, x, t, n, sigma, cfg) -> float:
    """-t^{1-2 sigma} d/dt of the extension, by differentiating the kernel."""
    t2 = t * t

    def kernel(rho):
        return angular_flux_kernel((x - rho) ** 2 + t2, x * rho, t2, n, sigma, cfg.nodes_angular)

    total, R = _poisson_radial_integral(trace, x, t, n, sigma, cfg, kernel)

    b = trace.outer_exponent
    ub = float(trace.evaluate(np.array([R]))[0]) * R ** b
    m = n + 2.0 * sigma
    A = tail_moment_coefficient(n, sigma, x * x, t2)
    area = unit_sphere_area(n)
    total += area * ub * (
        2.0 * sigma * R ** (-2.0 * sigma - b) / (2.0 * sigma + b)
        + (2.0 * sigma * A - m * t2) * R ** (-2.0 * sigma - b - 2.0) / (2.0 * sigma + b + 2.0)
    )
    return -poisson_normalizer(n, sigma) * total


@dataclass(frozen=True)
class FluxResult:
    """Extrapolated weighted Neumann flux with its sample sequence."""

    value: float
    t_samples: tuple[float, ...]
    flux_samples: tuple[float, ...]
    fit_residual: float


def neumann_flux(
    trace: RadialProfile,
    r: float,
    params: ProblemParams,
    t_sequence: np.ndarray | None = None,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> FluxResult:
    """Weighted Neumann flux -lim t^{1-2s} dU/dt at boundary radius r.

    Samples the weighted derivative on a geometric t-sequence and removes the
    known leading corrections t^{2-2s} and t^2 by least squares.  A large fit
    residual signals a non-convergent extrapolation.
    """
    n, sigma = params.n, params.sigma
    if t_sequence is None:
        t_sequence = r * 0.05 * 2.0 ** (-np.arange(9, dtype=float))
    t_sequence = np.asarray(t_sequence, dtype=float)
    samples = np.array(
        [_weighted_t_derivative(trace, r, t, n, sigma, cfg) for t in t_sequence]
    )
    e1 = 2.0 - 2.0 * sigma
    cols = [np.ones_like(t_sequence), t_sequence ** e1]
    if abs(e1 - 2.0) > 0.1:
        cols.append(t_sequence ** 2.0)
    M = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(M, samples, rcond=None)
    resid = float(np.max(np.abs(M @ coef - samples)))
    return FluxResult(
        value=float(coef[0]),
        t_samples=tuple(t_sequence),
        flux_samples=tuple(samples),
        fit_residual=resid,
    )


def fowler_map(field: ExtensionField) -> FowlerField:
    """Pass to cylinder variables: V(s, psi) = r^beta U(r, psi), s = ln r."""
    beta = derive_exponents(field.params).beta
    s = np.log(field.r_grid)
    scale = field.r_grid[:, None] ** beta
    return FowlerField(
        s_grid=s, psi_grid=field.psi_grid.copy(), values=field.values * scale,
        params=field.params,
    )


def fowler_unmap(field: FowlerField, tag: str = "cylinder_solved") -> ExtensionField:
    beta = derive_exponents(field.params).beta
    r = np.exp(field.s_grid)
    scale = r[:, None] ** (-beta)
    return ExtensionField(
        r_grid=r, psi_grid=field.psi_grid.copy(), values=field.values * scale,
        params=field.params, representation_tag=tag,
    )


def _boundary_extrapolate(values_by_psi: list[tuple[float, float]], sigma: float) -> float:
    """Limit at psi -> 0 from two small-angle samples, removing the sin^{2s} term."""
    (p1, f1), (p2, f2) = values_by_psi
    w1, w2 = math.sin(p1) ** (2.0 * sigma), math.sin(p2) ** (2.0 * sigma)
    return (f1 * w2 - f2 * w1) / (w2 - w1)


def exact_sphere_profile(
    params: ProblemParams,
    psi_grid: np.ndarray,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> SphereProfile:
    """Angular profile of the exact singular solution on the unit half-sphere.

    Interior angles are evaluated by extension quadrature of the exact trace;
    the boundary value is extrapolated from two small angles, so matching the
    closed-form amplitude is a genuine quadrature check.
    """
    n, sigma = params.n, params.sigma
    beta = derive_exponents(params).beta
    amplitude = singular_constant(params)
    trace = RadialProfile(
        evaluate=lambda rr: amplitude * np.asarray(rr, float) ** (-beta),
        inner_exponent=beta,
        outer_exponent=beta,
    )
    psi_grid = np.asarray(psi_grid, dtype=float)
    phi = np.empty_like(psi_grid)
    for j, psi in enumerate(psi_grid):
        if psi == 0.0:
            continue
        phi[j] = poisson_extend_radial(trace, (1.0, psi), n, sigma, cfg)
    pa, pb = 1e-3, 2e-3
    fa = poisson_extend_radial(trace, (1.0, pa), n, sigma, cfg)
    fb = poisson_extend_radial(trace, (1.0, pb), n, sigma, cfg)
    boundary = _boundary_extrapolate([(pa, fa), (pb, fb)], sigma)
    if psi_grid[0] == 0.0:
        phi[0] = boundary
    return SphereProfile(psi_grid=psi_grid, phi=phi, boundary_value=boundary)


def exact_extension_field(
    params: ProblemParams,
    r_grid: np.ndarray,
    psi_grid: np.ndarray,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    profile: SphereProfile | None = None,
) -> ExtensionField:
    """Extension of the exact singular solution, built from its homogeneity."""
    if profile is None:
        profile = exact_sphere_profile(params, psi_grid, cfg)
    beta = derive_exponents(params).beta
    r_grid = np.asarray(r_grid, dtype=float)
    values = r_grid[:, None] ** (-beta) * profile.phi[None, :]
    return ExtensionField(
        r_grid=r_grid, psi_grid=np.asarray(psi_grid, float), values=values,
        params=params, representation_tag="exact_homogeneous",
    )


def poisson_extension_field(
    trace: RadialProfile,
    params: ProblemParams,
    r_grid: np.ndarray,
    psi_grid: np.ndarray,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ExtensionField:
    """Pointwise extension of an arbitrary admissible trace (slow path)."""
    r_grid = np.asarray(r_grid, dtype=float)
    psi_grid = np.asarray(psi_grid, dtype=float)
    values = np.empty((len(r_grid), len(psi_grid)))
    for i, r in enumerate(r_grid):
        for j, psi in enumerate(psi_grid):
            if psi == 0.0:
                values[i, j] = float(trace.evaluate(np.array([r]))[0])
            else:
                values[i, j] = poisson_extend_radial(trace, (r, psi), params.n, params.sigma, cfg)
    return ExtensionField(
        r_grid=r_grid, psi_grid=psi_grid, values=values,
        params=params, representation_tag="poisson_evaluated",
    )


@dataclass(frozen=True)
class SphereOdeResiduals:
    """Residual norms of the homogeneous-profile equation on the half-sphere."""

    interior_max: float
    boundary_rel: float
    interior_band: tuple[float, float]


def verify_sphere_ode(
    profile: SphereProfile,
    params: ProblemParams,
    interior_band: tuple[float, float] = (0.15, math.pi / 2.0 - 0.05),
) -> SphereOdeResiduals:
    """Finite-difference residuals of the angular equation satisfied by the profile.

    Interior: -(phi'' + ((1-2s) cot psi - (n-1) tan psi) phi') + J2 phi,
    in max norm over grid nodes inside ``interior_band`` (the profile has a
    sin^{2s} edge at psi = 0, so nodes near the boundary are excluded from
    the second-difference check).  Boundary: the weighted normal limit
    against kappa_sigma phi(0)^p, extracted from the small-angle model
    phi = phi0 + c sin^{2s} + e sin^2.
    """
    n, sigma, p = params.n, params.sigma, params.p
    J2 = derive_exponents(params).J2
    psi = profile.psi_grid
    phi = profile.phi
    interior = 0.0
    for j in range(1, len(psi) - 1):
        if not interior_band[0] <= psi[j] <= interior_band[1]:
            continue
        hm = psi[j] - psi[j - 1]
        hp = psi[j + 1] - psi[j]
        d2 = 2.0 * (
            phi[j - 1] / (hm * (hm + hp)) - phi[j] / (hm * hp) + phi[j + 1] / (hp * (hm + hp))
        )
        d1 = (
            -hp / (hm * (hm + hp)) * phi[j - 1]
            + (hp - hm) / (hm * hp) * phi[j]
            + hm / (hp * (hm + hp)) * phi[j + 1]
        )
        P = (1.0 - 2.0 * sigma) / math.tan(psi[j]) - (n - 1) * math.tan(psi[j])
        interior = max(interior, abs(-(d2 + P * d1) + J2 * phi[j]))

    # boundary: extract the sin^{2s} coefficient from a small-angle window
    # fit; the window must reach past the tiniest nodes or quadrature noise
    # in phi swamps the degenerate-term amplitude
    phi0 = profile.boundary_value
    mask = (psi > 0.0) & (psi <= 0.5)
    s = np.sin(psi[mask])
    bases = [np.ones_like(s), s ** (2.0 * sigma), s ** 2,
             s ** (2.0 + 2.0 * sigma), s ** 4]
    n_b = min(len(bases), max(2, mask.sum() - 1))
    M = np.stack(bases[:n_b], axis=1)
    coef, *_ = np.linalg.lstsq(M, phi[mask] - phi0, rcond=None)
    flux = -2.0 * sigma * coef[1]
    target = kappa_sigma(sigma) * phi0 ** p
    boundary = abs(flux - target) / abs(target)
    return SphereOdeResiduals(
        interior_max=interior, boundary_rel=boundary, interior_band=interior_band
    )


def _barrier(mu: float, delta: float, sigma: float, q, t):
    """Comparison function |X|^{-mu} (1 - delta (t/|X|)^{2 sigma})."""
    X2 = q * q + t * t
    return X2 ** (-mu / 2.0) * (1.0 - delta * (t * t / X2) ** sigma)


@dataclass(frozen=True)
class BarrierResiduals:
    interior: float
    neumann: float


def verify_barrier_identity(
    mu: float,
    delta: float,
    point: tuple[float, float],
    params: ProblemParams,
    *,
    h: float = 1e-2,
    t0: float = 0.05,
    fd_ratio: float = 0.05,
) -> BarrierResiduals:
    """Finite-difference check of the two closed-form barrier identities.

    ``point`` = (horizontal radius, elevation) locates the interior stencil.
    The interior residual compares the centered-difference weighted
    divergence with its displayed closed form; the Neumann residual compares
    the extrapolated weighted t-derivative at the boundary against
    2 sigma delta |x|^{-2 sigma} times the barrier trace.  Both are second
    order in the respective discretization scales (h; t0 and fd_ratio).
    """
    n, sigma = params.n, params.sigma
    if not 0.0 < mu < n - 2.0 * sigma:
        raise ValueError(f"requires 0 < mu < n - 2*sigma, got mu={mu}")
    if not 0.0 <= delta < 0.5:
        raise ValueError(f"requires 0 <= delta < 1/2, got delta={delta}")
    q, t = point
    if t <= 0.0 or q <= 0.0:
        raise ValueError("the interior stencil point needs positive coordinates")

    def psi_fn(qq, tt):
        return _barrier(mu, delta, sigma, qq, tt)

    hq = h * q
    ht = h * t
    f0 = psi_fn(q, t)
    d2q = (psi_fn(q + hq, t) - 2.0 * f0 + psi_fn(q - hq, t)) / hq ** 2
    d1q = (psi_fn(q + hq, t) - psi_fn(q - hq, t)) / (2.0 * hq)
    d2t = (psi_fn(q, t + ht) - 2.0 * f0 + psi_fn(q, t - ht)) / ht ** 2
    d1t = (psi_fn(q, t + ht) - psi_fn(q, t - ht)) / (2.0 * ht)
    weighted_div = t ** (1.0 - 2.0 * sigma) * (d2q + (n - 1) / q * d1q + d2t) + (
        1.0 - 2.0 * sigma
    ) * t ** (-2.0 * sigma) * d1t

    X2 = q * q + t * t
    rhs = t ** (1.0 - 2.0 * sigma) * X2 ** (-(mu + 2.0) / 2.0) * (
        mu * (n - 2.0 * sigma - mu)
        - delta * (mu + 2.0 * sigma) * (n - mu) * (t * t / X2) ** sigma
    )
    interior = abs(weighted_div + rhs)

    # boundary: -t^{1-2s} dPsi/dt extrapolated to t = 0 at fixed q
    tk = t0 * 2.0 ** (-np.arange(9, dtype=float))
    g = np.array(
        [
            -tt ** (1.0 - 2.0 * sigma)
            * (psi_fn(q, tt * (1.0 + fd_ratio)) - psi_fn(q, tt * (1.0 - fd_ratio)))
            / (2.0 * tt * fd_ratio)
            for tt in tk
        ]
    )
    e1 = 2.0 - 2.0 * sigma
    cols = [np.ones_like(tk), tk ** e1]
    if abs(e1 - 2.0) > 0.1:
        cols.append(tk ** 2.0)
    M = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(M, g, rcond=None)
    target = 2.0 * sigma * delta * q ** (-2.0 * sigma) * _barrier(mu, delta, sigma, q, 0.0)
    neumann = abs(float(coef[0]) - target)
    return BarrierResiduals(interior=interior, neumann=neumann)
