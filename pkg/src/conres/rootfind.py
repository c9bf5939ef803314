"""Zeros of holomorphic functions inside rectangles.

The winding number of ``f`` around a rectangle is obtained by tracking the
phase of ``f`` along the boundary: consecutive samples contribute their
phase difference forced into ``(-pi, pi]``, and intervals whose phase jump is
too large are bisected until every step is small.  Boxes with a nonzero
winding number are quadrisected until they are tiny, then polished with
Newton's method.

``f`` must accept a numpy array of complex points and return an array of the
same shape.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (DepthExceeded, NoConvergence, NonConvergentQuadrature,
                     ZeroOnContour)

#: bisection passes allowed on the contour before giving up
MAX_QUADRATURE_DEPTH = 16
#: phase step (radians) above which a contour interval is refined
MAX_PHASE_STEP = np.pi / 3
#: cells smaller than this are handed to Newton
CELL_DIAMETER = 1e-3
#: cells holding several zeros are refined down to this size before merging
CLUSTER_DIAMETER = 1e-6

# split fractions tried in order when a split line hits a zero or the
# children's windings do not add up
_SPLITS = ((0.5, 0.5), (0.4731, 0.5419), (0.5513, 0.4387), (0.4117, 0.5877),
           (0.6203, 0.3791))


@dataclass(frozen=True)
class SearchBox:
    """Rectangle ``[re_min, re_max] x [im_min, im_max]``."""
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self):
        return self.re_max - self.re_min

    @property
    def height(self):
        return self.im_max - self.im_min

    @property
    def diameter(self):
        return float(np.hypot(self.width, self.height))

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    def contains(self, z, margin=0.0):
        return (self.re_min - margin <= z.real <= self.re_max + margin
                and self.im_min - margin <= z.imag <= self.im_max + margin)

    def distance_to(self, z):
        """Euclidean distance from ``z`` to the closed rectangle."""
        dx = max(self.re_min - z.real, 0.0, z.real - self.re_max)
        dy = max(self.im_min - z.imag, 0.0, z.imag - self.im_max)
        return float(np.hypot(dx, dy))

    def shifted(self, d_re_min, d_re_max, d_im_min, d_im_max):
        return SearchBox(self.re_min + d_re_min, self.re_max + d_re_max,
                         self.im_min + d_im_min, self.im_max + d_im_max)

    def quadrisect(self, fx=0.5, fy=0.5):
        xm = self.re_min + fx * self.width
        ym = self.im_min + fy * self.height
        return (SearchBox(self.re_min, xm, self.im_min, ym),
                SearchBox(xm, self.re_max, self.im_min, ym),
                SearchBox(self.re_min, xm, ym, self.im_max),
                SearchBox(xm, self.re_max, ym, self.im_max))

    def boundary(self, s):
        """Map perimeter parameters ``s`` in ``[0, 4)`` to boundary points,
        traversed counterclockwise from the lower-left corner."""
        s = np.asarray(s, dtype=float)
        side = np.minimum(np.floor(s).astype(int), 3)
        u = s - side
        a, b, c, d = self.re_min, self.re_max, self.im_min, self.im_max
        re = np.choose(side, [a + u * (b - a), np.full_like(u, b),
                              b - u * (b - a), np.full_like(u, a)])
        im = np.choose(side, [np.full_like(u, c), c + u * (d - c),
                              np.full_like(u, d), d - u * (d - c)])
        return re + 1j * im


def _phase_steps(values):
    nxt = np.roll(values, -1)
    return np.angle(nxt / values)


def winding_number(f, box, n_per_side=64, max_depth=MAX_QUADRATURE_DEPTH):
    """Number of zeros of ``f`` inside ``box``, counted with multiplicity.

    Raises :class:`ZeroOnContour` when ``f`` vanishes on (or numerically
    indistinguishably close to) the boundary and
    :class:`NonConvergentQuadrature` when the phase cannot be resolved after
    ``max_depth`` refinements.
    """
    s = np.arange(4 * n_per_side) / n_per_side
    vals = np.asarray(f(box.boundary(s)), dtype=complex)
    for _ in range(max_depth + 1):
        if not np.all(np.isfinite(vals)):
            raise NonConvergentQuadrature(f"non-finite samples on {box}")
        if np.any(vals == 0):
            raise ZeroOnContour(f"f vanishes on the boundary of {box}")
        steps = _phase_steps(vals)
        bad = np.abs(steps) > MAX_PHASE_STEP
        raw = steps.sum() / (2 * np.pi)
        if not bad.any() and abs(raw - round(raw)) < 0.25:
            return int(round(raw))
        if not bad.any():
            bad[:] = True
        idx = np.nonzero(bad)[0]
        s_next = np.roll(s, -1)
        s_next[-1] += 4.0
        mids = 0.5 * (s[idx] + s_next[idx])
        new_vals = np.asarray(f(box.boundary(np.mod(mids, 4.0))), dtype=complex)
        s = np.insert(s, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new_vals)
    # a phase jump that survives every refinement sits on a zero of f
    steps = _phase_steps(vals)
    k = int(np.argmax(np.abs(steps)))
    where = box.boundary(np.mod(s[k], 4.0))
    if np.abs(steps[k]) > 0.9 * np.pi:
        raise ZeroOnContour(f"zero of f on the boundary of {box} near {where}")
    raise NonConvergentQuadrature(f"phase unresolved on {box} near {where}")


def newton_polish(f, z0, tol=1e-10, fprime=None, maxiter=50):
    """Newton iteration from ``z0`` until ``|f(z)| < tol``.

    Without ``fprime`` the derivative is a central difference with step
    ``1e-6 * (1 + |z|)``.
    """
    z = complex(z0)

    def ev(w):
        return complex(np.asarray(f(np.array([w])))[0])

    def deriv(w):
        if fprime is not None:
            return complex(np.asarray(fprime(np.array([w])))[0])
        h = 1e-6 * (1 + abs(w))
        pts = np.array([w + h, w - h])
        fp, fm = np.asarray(f(pts), dtype=complex)
        return (fp - fm) / (2 * h)

    fz = ev(z)
    for _ in range(maxiter):
        if abs(fz) < tol:
            return z
        dz = deriv(z)
        if dz == 0 or not np.isfinite(dz):
            break
        z = z - fz / dz
        fz = ev(z)
    if abs(fz) < tol:
        return z
    raise NoConvergence(f"Newton stalled at {z} with |f| = {abs(fz):.3e}")


@dataclass(frozen=True)
class LocatedRoot:
    root: complex
    multiplicity: int
    cluster: bool = False


def _children(f, box, winding, n_per_side):
    last = None
    for fx, fy in _SPLITS:
        kids = box.quadrisect(fx, fy)
        try:
            ws = [winding_number(f, k, n_per_side) for k in kids]
        except (ZeroOnContour, NonConvergentQuadrature) as exc:
            last = exc
            continue
        if sum(ws) == winding:
            return kids, ws
        last = NonConvergentQuadrature(
            f"children windings {ws} do not add up to {winding} on {box}")
    raise last


def _polish_in_cell(f, cell, tol, fprime):
    starts = [cell.center]
    starts += [complex(cell.re_min + fx * cell.width, cell.im_min + fy * cell.height)
               for fx, fy in ((0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75))]
    last = None
    for z0 in starts:
        try:
            z = newton_polish(f, z0, tol, fprime)
        except NoConvergence as exc:
            last = exc
            continue
        if cell.contains(z, margin=cell.diameter):
            return z
        last = NoConvergence(f"Newton left the cell {cell} (landed at {z})")
    raise last


def cluster_centroid(f, center, radius, multiplicity, n=64):
    """Mean of the ``multiplicity`` zeros inside the circle ``|z - center| = radius``.

    Newton only reaches ``eps ** (1 / m)`` at an ``m``-fold zero, so clusters
    use the contour moment ``(1 / 2 pi i m) int z f'/f dz`` over the circle.
    Writing ``g = f / (z - center)^m`` turns it into
    ``center - (1 / 2 pi i m) int log g dz``, whose integrand is periodic, so
    the trapezoid rule converges geometrically.
    """
    theta = 2 * np.pi * np.arange(n) / n
    u = np.exp(1j * theta)
    vals = np.asarray(f(center + radius * u), dtype=complex)
    if not np.all(np.isfinite(vals)) or np.any(vals == 0):
        raise NonConvergentQuadrature(f"cannot sample f around the cluster at {center}")
    g = vals / (radius * u) ** multiplicity
    phase = np.unwrap(np.angle(g))
    wrap = np.angle(g[0] / g[-1])
    if abs(phase[-1] + wrap - phase[0]) > 1e-6:
        raise NonConvergentQuadrature(f"winding around {center} differs from {multiplicity}")
    log_g = np.log(np.abs(g)) + 1j * phase
    integral = np.sum(log_g * 1j * radius * u) * (2 * np.pi / n)
    return complex(center - integral / (2j * np.pi * multiplicity))


def subdivide_and_locate(f, box, tol=1e-10, max_depth=40, n_per_side=64,
                         fprime=None, record=None):
    """All zeros of ``f`` in ``box`` as a list of :class:`LocatedRoot`.

    Boxes with positive winding number are quadrisected until their diameter
    drops below :data:`CELL_DIAMETER` (or :data:`CLUSTER_DIAMETER` when the
    cell still holds several zeros), then polished with :func:`newton_polish`.
    When ``record`` is a list, one ``(box, winding, child_windings)`` tuple is
    appended per subdivision so conservation can be audited.
    """
    total = winding_number(f, box, n_per_side)
    if total < 0:
        raise NonConvergentQuadrature(f"negative winding {total}: f has poles in {box}")
    found = []
    stack = [(box, total, 0)]
    while stack:
        cell, w, depth = stack.pop()
        if w == 0:
            continue
        small = cell.diameter < (CELL_DIAMETER if w == 1 else CLUSTER_DIAMETER)
        if small:
            if w == 1:
                z = _polish_in_cell(f, cell, tol, fprime)
            else:
                z = cluster_centroid(f, cell.center, 4 * cell.diameter, w)
            found.append(LocatedRoot(z, w, cluster=w > 1))
            continue
        if depth >= max_depth:
            raise DepthExceeded(f"subdivision depth {max_depth} reached at {cell}")
        kids, ws = _children(f, cell, w, n_per_side)
        if record is not None:
            record.append((cell, w, tuple(ws)))
        # reversed so that popping visits children in their natural order
        for k, wk in reversed(list(zip(kids, ws))):
            stack.append((k, wk, depth + 1))
    found = _merge(found)
    found.sort(key=lambda r: (r.root.real, r.root.imag))
    return found


def _merge(roots, radius=CLUSTER_DIAMETER):
    merged = []
    for r in sorted(roots, key=lambda r: (r.root.real, r.root.imag)):
        for i, m in enumerate(merged):
            if abs(m.root - r.root) < radius:
                merged[i] = LocatedRoot(m.root, m.multiplicity + r.multiplicity, True)
                break
        else:
            merged.append(r)
    return merged
