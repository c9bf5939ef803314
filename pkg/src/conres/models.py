"""Resonance-defining functions for the solvable delta models.

Delta potentials on a line
--------------------------
For ``-u'' + sum_j c_j delta(x - x_j) u = lam^2 u`` write
``u = A e^{i lam x} + B e^{-i lam x}`` between the deltas.  The jump
``u'(x_j+) - u'(x_j-) = c_j u(x_j)`` gives the left coefficients from the
right ones through

    M_j(lam) = I + c_j / (2 i lam) * [[-1, -e^{-2 i lam x_j}],
                                      [e^{2 i lam x_j}, 1]].

Starting from the purely outgoing state ``(A, B) = (1, 0)`` right of the last
delta, the ``A`` coefficient left of the first delta is the incoming
amplitude; its zeros are the resonances.  For one delta this is
``1 + i c / (2 lam)``.

Delta shell on a circle
-----------------------
For ``V delta(r - R)`` the angular mode ``m`` has a resonance where
``F_m(lam) = 1 + (i pi R V / 2) J_m(lam R) H^(1)_m(lam R)`` vanishes.
"""
import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import (ContourThroughZero, InputError, NonConvergentQuadrature,
                     ZeroFrequency, ZeroOnContour)
from .rootfind import SearchBox, newton_polish, subdivide_and_locate
from .scene import DeltaCircleScene, DeltaLineScene

log = logging.getLogger(__name__)

ZERO_MARGIN = 0.1
RESIDUAL_BOUND = 1e-8
MAX_MODE = 20
MAX_SCALED_FREQUENCY = 40.0
RETRIES = 5
PERTURBATION = 1e-4

CSV_COLUMNS = ("model", "mode", "re_lambda", "im_lambda", "multiplicity", "residual")


def _centered(scene):
    x = np.asarray(scene.positions, dtype=float)
    # the determinant is translation invariant; centering balances the
    # exponentials e^{+-2 i lam x_j}
    return x - 0.5 * (x[0] + x[-1]), np.asarray(scene.strengths, dtype=float)


def _incoming_amplitude(scene, lam, scale):
    """A-coefficient left of the first delta, with each transfer matrix
    multiplied by ``scale(lam)``."""
    x, c = _centered(scene)
    lam = np.asarray(lam, dtype=complex)
    a = np.ones_like(lam)
    b = np.zeros_like(lam)
    s = scale(lam)
    for xj, cj in zip(x[::-1], c[::-1]):
        e = np.exp(2j * lam * xj)
        k = cj * s
        a, b = (s * 2j * lam - k) * a - k * b / e, k * e * a + (s * 2j * lam + k) * b
    return a


def delta_line_determinant(scene: DeltaLineScene, lam):
    """Entire resonance function ``(2 i lam)^n D(lam)`` of the delta line.

    Zeros, with multiplicity, are the resonances (and bound states).
    """
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ZeroFrequency("the delta-line determinant is evaluated at lam != 0")
    out = _incoming_amplitude(scene, lam, lambda l: np.ones_like(l))
    return out.item() if out.ndim == 0 else out


def delta_line_normalized(scene: DeltaLineScene, lam):
    """Incoming amplitude ``D(lam)`` itself, ``1 + O(1/lam)`` at infinity.

    Holomorphic away from ``lam = 0``; this is the well-scaled function used
    for root finding and residuals.
    """
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ZeroFrequency("the delta-line determinant is evaluated at lam != 0")
    out = _incoming_amplitude(scene, lam, lambda l: 1.0 / (2j * l))
    return out.item() if out.ndim == 0 else out


def delta_circle_mode_function(scene: DeltaCircleScene, m, lam):
    """Modal function ``F_m(lam)`` of the delta shell; zeros are resonances."""
    if not 0 <= m <= MAX_MODE:
        raise specfun.DomainExceeded(f"mode {m} outside [0, {MAX_MODE}]")
    z = np.asarray(lam, dtype=complex) * scene.R
    if scene.V == 0:
        out = np.ones_like(z)
    else:
        out = 1 + 0.5j * np.pi * scene.R * scene.V * (
            specfun.bessel_j(m, z) * specfun.hankel1(m, z))
    out = np.asarray(out)
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class DeltaLineModel:
    scene: DeltaLineScene
    tag = "delta_line"
    mode = None
    branch_cut = False

    def __call__(self, lam):
        return delta_line_normalized(self.scene, lam)


@dataclass(frozen=True)
class DeltaCircleModel:
    scene: DeltaCircleScene
    mode: int = 0
    tag = "delta_circle"
    branch_cut = True

    def __call__(self, lam):
        return delta_circle_mode_function(self.scene, self.mode, lam)


@dataclass(frozen=True)
class Resonance:
    """A zero of a model's resonance function.

    ``flag`` is ``"bound"`` for zeros on the positive imaginary axis,
    ``"cluster"`` when several zeros closer than 1e-6 were merged, and empty
    otherwise.
    """
    lam: complex
    multiplicity: int = 1
    residual: float = 0.0
    model: str = ""
    mode: int | None = None
    flag: str = ""

    @property
    def re(self):
        return self.lam.real

    @property
    def im(self):
        return self.lam.imag


def _check_box(model, box):
    if box.distance_to(0j) < ZERO_MARGIN:
        raise ContourThroughZero(f"box {box} comes within {ZERO_MARGIN} of lam = 0")
    if model.branch_cut and box.re_min < ZERO_MARGIN and box.im_min < ZERO_MARGIN \
            and box.im_max > -ZERO_MARGIN:
        raise ContourThroughZero(f"box {box} comes within {ZERO_MARGIN} of the branch cut")
    if isinstance(model, DeltaCircleModel) and \
            max(abs(box.re_min), abs(box.re_max)) * model.scene.R > MAX_SCALED_FREQUENCY:
        raise specfun.DomainExceeded(
            f"|Re lam R| <= {MAX_SCALED_FREQUENCY} for the circle model, got box {box}")


def find_resonances(model, box: SearchBox, tol=1e-10, seed=0, n_per_side=64):
    """All zeros of ``model`` in ``box``, polished to ``|f| < tol``.

    A contour that hits a zero is retried with the box edges moved outward
    by at most 1e-4, drawn from a generator seeded with ``seed``.  Zeros found
    outside ``box`` after such a retry are kept.
    """
    _check_box(model, box)
    rng = np.random.default_rng(seed)
    trial = box
    for attempt in range(RETRIES + 1):
        try:
            roots = subdivide_and_locate(model, trial, tol=tol, n_per_side=n_per_side)
            break
        except (ZeroOnContour, NonConvergentQuadrature) as exc:
            if attempt == RETRIES:
                raise
            log.info("retrying %s after %s", trial, exc)
            # grow the box outward so that adjacent boxes overlap rather than
            # leave a gap; dedup removes the doubly found zeros
            d = np.abs(rng.uniform(0, PERTURBATION, size=4))
            trial = box.shifted(-d[0], d[1], -d[2], d[3])
    out = []
    for r in roots:
        flag = "cluster" if r.cluster else ""
        if r.root.imag > 0 and abs(r.root.real) < 1e-8:
            flag = "bound"
        resid = float(abs(model(np.array([r.root]))[0]))
        out.append(Resonance(r.root, r.multiplicity, resid, model.tag, model.mode, flag))
    return sorted(out, key=lambda r: (r.re, r.im))


def _pool_size():
    try:
        return max(1, int(os.environ.get("CONRES_THREADS", "1")))
    except ValueError:
        return 1


def scan_resonances(model, re_range, im_range, chunk=5.0, tol=1e-10, seed=0):
    """Resonances over a long strip, searched in boxes of width ``chunk``.

    Boxes are independent work units (pool size from ``CONRES_THREADS``);
    results are merged in canonical order.
    """
    lo, hi = re_range
    edges = np.linspace(lo, hi, max(1, int(np.ceil((hi - lo) / chunk))) + 1)
    boxes = [SearchBox(a, b, im_range[0], im_range[1]) for a, b in zip(edges[:-1], edges[1:])]
    seeds = np.random.SeedSequence(seed).generate_state(len(boxes))

    def work(i):
        return find_resonances(model, boxes[i], tol=tol, seed=int(seeds[i]))

    with ThreadPoolExecutor(_pool_size()) as pool:
        parts = list(pool.map(work, range(len(boxes))))
    return dedup([r for part in parts for r in part])


def circle_resonances(scene: DeltaCircleScene, re_range, im_range, modes=range(MAX_MODE + 1),
                      chunk=5.0, tol=1e-10, seed=0):
    """Resonances of every requested angular mode of the delta shell."""
    out = []
    for m in modes:
        out += scan_resonances(DeltaCircleModel(scene, m), re_range, im_range, chunk, tol,
                               seed + m)
    return sorted(out, key=lambda r: (r.mode, r.re, r.im))


def dedup(resonances, radius=1e-6):
    """Drop repeats (same mode, within ``radius``) found by adjacent boxes."""
    kept = []
    for r in sorted(resonances, key=lambda r: (r.mode or 0, r.re, r.im)):
        if kept and kept[-1].mode == r.mode and abs(kept[-1].lam - r.lam) < radius:
            continue
        kept.append(r)
    return sorted(kept, key=lambda r: (r.re, r.im))


def repolish(model, res: Resonance, tol=1e-10):
    return newton_polish(model, res.lam, tol)


def two_delta_branch_roots(c, L, n_values, signs=(1, -1)):
    """Zeros of ``e^{2 i lam L} = (1 - 2 i lam / c)^2`` branch by branch.

    Each branch ``i lam L = Log(s (1 - 2 i lam / c)) + 2 pi i k`` is solved by
    scalar Newton iteration; this is independent of the transfer-matrix
    determinant and of the contour search.
    """
    roots = []
    for k in n_values:
        for s in signs:
            lam = complex((2 * np.pi * k + (np.pi if s == -1 else 0.0)) / L, -1.0)
            # a few fixed-point sweeps land in the branch's basin
            for _ in range(20):
                lam = -1j * (np.log(s * (1 - 2j * lam / c)) + 2j * np.pi * k) / L
            for _ in range(50):
                g = 1j * lam * L - np.log(s * (1 - 2j * lam / c)) - 2j * np.pi * k
                dg = 1j * L + (2j / c) / (1 - 2j * lam / c)
                step = g / dg
                lam -= step
                if abs(step) < 1e-15 * (1 + abs(lam)):
                    break
            roots.append(lam)
    return roots


# -- CSV ------------------------------------------------------------------

def _fmt(x):
    return format(x, ".17g")


def resonances_to_csv(resonances, stream=None):
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in resonances:
        w.writerow([r.model, "" if r.mode is None else r.mode, _fmt(r.re), _fmt(r.im),
                    r.multiplicity, _fmt(r.residual)])
    return buf.getvalue() if stream is None else None


def resonances_from_csv(text):
    rows = csv.DictReader(io.StringIO(text))
    if rows.fieldnames is None or tuple(rows.fieldnames) != CSV_COLUMNS:
        raise InputError(f"resonance CSV must have columns {','.join(CSV_COLUMNS)}")
    out = []
    for row in rows:
        try:
            out.append(Resonance(complex(float(row["re_lambda"]), float(row["im_lambda"])),
                                 int(row["multiplicity"]), float(row["residual"]),
                                 row["model"], int(row["mode"]) if row["mode"] else None))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad resonance row {row}: {exc}") from exc
    return out
