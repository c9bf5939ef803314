"""Diffraction kernel of ``exp(-i pi nu)`` on a circular link.

On a circle of length ``rho`` the operator ``nu = sqrt(-Laplacian)`` has
eigenfunctions ``exp(2 pi i k s / rho) / sqrt(rho)`` with eigenvalues
``2 pi |k| / rho``.  The kernel series of ``exp(-i pi nu)`` diverges
pointwise; its Abel limit sums two geometric series and gives

    K(s) = i sin(beta) / (rho (cos(beta) - cos(2 pi s / rho))),
    beta = 2 pi^2 / rho,

singular exactly where ``s = +-pi (mod rho)``, i.e. on geometric passages.
"""
import math

import numpy as np

from .errors import GeometricSingularity, NotStrictlyDiffractive

STRICT_TOL = 1e-9
ZERO_KERNEL = 1e-10
SINGULAR_TOL = 1e-12


def _sin_pi(x):
    # exact zeros at integers: rho = 2 pi / k arrives with rounding noise
    if abs(x - round(x)) < 1e-13:
        return 0.0
    r = x - 2.0 * round(x / 2.0)
    return math.sin(math.pi * r)


def diffraction_kernel(rho, s):
    """Closed-form kernel ``K(s)`` for link length ``rho``.

    ``s`` is the link distance between the incoming and outgoing directions.
    Any real ``s`` is accepted; ``K`` is ``rho``-periodic and even.
    """
    if not rho > 0:
        raise ValueError(f"link length must be positive, got {rho}")
    if abs(s - math.pi) < STRICT_TOL:
        raise GeometricSingularity(f"kernel is singular at s = pi (rho = {rho})")
    beta = 2 * math.pi ** 2 / rho
    # fold into [0, rho / 2] so that K(s) and K(rho - s) see the same float
    r = math.fmod(s, rho)
    if r < 0:
        r += rho
    r = min(r, rho - r)
    denom = math.cos(beta) - math.cos(2 * math.pi * r / rho)
    if abs(denom) <= SINGULAR_TOL:
        raise GeometricSingularity(f"s = {s} is congruent to +-pi modulo rho = {rho}")
    return 1j * _sin_pi(2 * math.pi / rho) / (rho * denom)


def kernel_abel_sum(rho, s, r, kmax):
    """Damped spectral sum ``(1/rho) sum_{|k| <= kmax} r^|k| e^{-i pi 2 pi |k| / rho}
    e^{2 pi i k s / rho}``; the independent check on :func:`diffraction_kernel`."""
    if not 0 <= r < 1:
        raise ValueError("damping must lie in [0, 1)")
    k = np.arange(1, int(kmax) + 1, dtype=float)
    # log-domain weights avoid underflow warnings for tiny r
    w = np.exp(k * math.log(r)) if r > 0 else np.zeros_like(k)
    phase = np.exp(-1j * 2 * math.pi ** 2 * k / rho)
    terms = w * phase * 2 * np.cos(2 * math.pi * k * s / rho)
    return complex((1.0 + terms.sum()) / rho)


def is_strictly_diffractive(chain):
    """True iff every junction separation differs from pi by at least 1e-9."""
    return all(abs(d - math.pi) >= STRICT_TOL for d in chain.link_separations)


def diffraction_coefficient(chain):
    """Product of ``|K|`` over the chain's junctions (closing one included)."""
    if not is_strictly_diffractive(chain):
        raise NotStrictlyDiffractive("chain passes geometrically through a cone point")
    out = 1.0
    for rho, d in zip(chain.junction_links, chain.link_separations):
        out *= abs(diffraction_kernel(rho, d))
    return out


def admissible_junction(cone, arrival_angle, departure_angle):
    """Default junction predicate for the closed-chain graph: strictly
    diffractive and with a kernel above :data:`ZERO_KERNEL`."""
    from .geodesics import link_separation

    d = link_separation(cone, arrival_angle, departure_angle)
    if abs(d - math.pi) < STRICT_TOL:
        return False
    try:
        k = diffraction_kernel(cone.link_length, d)
    except GeometricSingularity:
        return False
    return abs(k) > ZERO_KERNEL


def vanishing_junctions(cones, segments):
    """Junctions ``(cone id, incoming index, outgoing index)`` that are
    strictly diffractive but whose kernel falls below :data:`ZERO_KERNEL`."""
    from .geodesics import directed_segments, link_separation

    segs = directed_segments(segments)
    out = []
    for i, a in enumerate(segs):
        for j, b in enumerate(segs):
            if a.to_cone != b.from_cone:
                continue
            cone = cones[a.to_cone]
            d = link_separation(cone, a.arrival_angle, b.departure_angle)
            if abs(d - math.pi) < STRICT_TOL:
                continue
            try:
                k = diffraction_kernel(cone.link_length, d)
            except GeometricSingularity:
                continue
            if abs(k) <= ZERO_KERNEL:
                out.append((cone.id, i, j))
    return out
