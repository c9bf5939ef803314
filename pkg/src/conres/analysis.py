"""Strip predictions, counting functions and their numerical checks.

Widths are coefficients ``w`` of a logarithmic region
``Im lam > -w log|Re lam|``.  Formula helpers use plain arithmetic so that
:class:`fractions.Fraction` inputs give exact results.
"""
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (EmptySchedule, MissingEntry, NonpositiveDiam, NonpositiveDmax,
                     NonpositiveL, TooFewPoints)

#: width sentinel for an arbitrarily wide logarithmic region
UNBOUNDED = math.inf


class ClampWarning(UserWarning):
    """A width came out negative and was clamped to zero."""


class SubadditivityWarning(UserWarning):
    """Schedule data declared subadditive is not."""


@dataclass(frozen=True)
class SmoothingSchedule:
    """Pairs ``(N, T_N)``: derivatives gained and the time after which the
    cut-off propagator gains them, for cut-off radii ``R0 < R1``."""
    entries: tuple
    R0: float = 1.0
    R1: float = 2.0
    declared_subadditive: bool = False

    def __post_init__(self):
        if not self.R1 > self.R0:
            raise ValueError("R1 must exceed R0")
        object.__setattr__(self, "entries", tuple(sorted((N, T) for N, T in self.entries)))

    def time(self, N):
        for n, t in self.entries:
            if n == N:
                return t
        raise MissingEntry(f"no entry for N = {N}")

    def with_entry(self, N, T):
        return SmoothingSchedule(self.entries + ((N, T),), self.R0, self.R1,
                                 self.declared_subadditive)


@dataclass(frozen=True)
class BarT:
    """``value`` is ``inf T_N / N`` over the stored entries; ``limit`` is the
    slope of a least-squares line through ``(N, T_N)``, which recovers the
    limit exactly for affine schedules."""
    value: object
    limit: object
    subadditive: bool
    violations: tuple = ()


def subadditivity_violations(schedule):
    """Stored triples with ``T_{N+M} > T_N + T_M``."""
    table = dict(schedule.entries)
    bad = []
    keys = sorted(table)
    for i, n in enumerate(keys):
        for m in keys[i:]:
            if n + m in table and table[n + m] > table[n] + table[m]:
                bad.append((n, m, n + m))
    return tuple(bad)


def _slope(xs, ys):
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    den = n * sxx - sx * sx
    return (n * sxy - sx * sy) / den


def bar_t(schedule):
    """Average time per derivative gained."""
    if not schedule.entries:
        raise EmptySchedule("bar_t needs at least one entry")
    ratios = [T / N for N, T in schedule.entries]
    value = min(ratios)
    Ns = [N for N, _ in schedule.entries]
    if len(set(Ns)) > 1:
        limit = _slope(Ns, [T for _, T in schedule.entries])
    else:
        limit = value
    bad = subadditivity_violations(schedule)
    if bad:
        warnings.warn(f"schedule is not subadditive at {bad[:3]}", SubadditivityWarning,
                      stacklevel=2)
    return BarT(value, limit, not bad, bad)


@dataclass(frozen=True)
class StripPrediction:
    """A logarithmic strip: free-region width or band depth.

    ``width`` may be :data:`UNBOUNDED`.  ``asymptote`` is the large-``N``
    limit when the prediction comes from a finite-``N`` formula.
    """
    width: object
    delta: object
    source: str
    lambda0: object = None
    asymptote: object = None
    params: dict = field(default_factory=dict)
    notes: tuple = ()
    resolvent_exponents: dict = field(default_factory=dict)

    def to_dict(self):
        def enc(x):
            if isinstance(x, Fraction):
                return str(x)
            if isinstance(x, float) and not math.isfinite(x):
                return "inf" if x > 0 else "-inf"
            return x
        return {"width": enc(self.width), "delta": enc(self.delta), "source": self.source,
                "lambda0": enc(self.lambda0), "asymptote": enc(self.asymptote),
                "params": {k: enc(v) for k, v in self.params.items()},
                "notes": list(self.notes)}


@dataclass(frozen=True)
class EmptyBand:
    """No band prediction: there is no admissible closed diffractive chain."""
    source: str = "conic_band"
    reason: str = "D_plus_max = -inf"


def _clamped(width, what):
    if width < 0:
        warnings.warn(f"{what}: width {width} clamped to 0", ClampWarning, stacklevel=3)
        return 0 * width, (f"clamped from {width}",)
    return width, ()


def strip_from_smoothing(schedule, N, delta):
    """Width ``(N - 1) / T'_N - delta`` with ``T'_N = T_N + R0 + 2 R1 + 3``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    T = schedule.time(N)
    T_prime = T + schedule.R0 + 2 * schedule.R1 + 3
    width, notes = _clamped((N - 1) / T_prime - delta, "strip_from_smoothing")
    lim = bar_t(schedule).limit
    asym = UNBOUNDED if lim == 0 else 1 / lim - delta
    return StripPrediction(width, delta, "smoothing", asymptote=asym,
                           params={"N": N, "T_N": T, "T_prime": T_prime,
                                   "R0": schedule.R0, "R1": schedule.R1},
                           notes=notes)


def smoothing_from_strip(L, M, T, N):
    """Smoothing time ``(N + M + T + 2) / L`` implied by a strip of width ``L``
    with resolvent growth ``|lam|^M e^{T |Im lam|}``."""
    if not L > 0:
        raise NonpositiveL(f"L must be positive, got {L}")
    return (N + M + T + 2) / L


def schedule_from_strip(L, M, T, Ns, R0=1, R1=2):
    """The converse smoothing schedule sampled at ``Ns``; its ``bar_t`` limit
    is ``1 / L``."""
    return SmoothingSchedule(tuple((N, smoothing_from_strip(L, M, T, N)) for N in Ns), R0, R1)


def conic_strip(d, D_max, delta=0.0, capped=True):
    """Free-region width ``(d - 1) / (2 D_max) - delta``.

    With ``capped`` the geodesic enumeration was truncated, ``D_max`` is a
    lower bound, and the width an upper bound.
    """
    if not D_max > 0:
        raise NonpositiveDmax(f"D_max must be positive, got {D_max}")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    width, notes = _clamped((d - 1) / (2 * D_max) - delta, "conic_strip")
    if capped:
        notes += ("upper bound on width (D_max from capped enumeration)",)
    return StripPrediction(width, delta, "conic_free", params={"d": d, "D_max": D_max},
                           notes=notes)


def conic_band(d, D_plus, delta=0.0):
    """Band depth ``(d - 1) / (2 D_plus) + delta`` holding infinitely many
    resonances, or :class:`EmptyBand` when ``D_plus`` is ``-inf``."""
    if D_plus == -math.inf or not D_plus > 0 or not math.isfinite(D_plus):
        return EmptyBand()
    rate = (d - 1) / (2 * D_plus)
    return StripPrediction(rate + delta, delta, "conic_band", asymptote=rate,
                           params={"d": d, "D_plus": D_plus},
                           notes=(f"-Im lam_n / log Re lam_n -> {rate} along a sequence",))


def delta_obstacle_strip(diam, delta=0.0):
    """Free-region width ``1 / diam - delta`` for a delta potential on the
    boundary of a convex obstacle of diameter ``diam``."""
    if not diam > 0:
        raise NonpositiveDiam(f"diameter must be positive, got {diam}")
    width, notes = _clamped(1 / diam - delta, "delta_obstacle_strip")
    return StripPrediction(width, delta, "delta_obstacle", params={"diam": diam}, notes=notes)


def strip_from_bar_t(bar_t_value, delta):
    """Width for the region of the smoothing theorem, including the
    ``bar_t = 0`` (unbounded) and ``bar_t = inf`` (depth ``delta``) branches."""
    if bar_t_value == 0:
        return StripPrediction(UNBOUNDED, delta, "smoothing",
                               notes=(f"region Im lam > -(1/delta) log Re lam, delta={delta}",))
    if bar_t_value == math.inf:
        return StripPrediction(delta, delta, "smoothing", notes=("bar_t = inf",))
    width, notes = _clamped(1 / bar_t_value - delta, "strip_from_bar_t")
    return StripPrediction(width, delta, "smoothing", notes=notes)


# -- resonance sets ------------------------------------------------------------

def _as_arrays(resonances):
    lams, mult = [], []
    for r in resonances:
        if isinstance(r, (complex, float, int, np.number)):
            lams.append(complex(r))
            mult.append(1)
        else:
            lams.append(complex(r.lam))
            mult.append(int(r.multiplicity))
    return np.asarray(lams, dtype=complex), np.asarray(mult, dtype=int)


def counting_function(resonances, r, rho):
    """Resonances (with multiplicity) in the box ``|Re lam| <= r``,
    ``Im lam >= -rho log r``."""
    if not r > 0:
        raise ValueError("r must be positive")
    lam, m = _as_arrays(resonances)
    if lam.size == 0:
        return 0
    ok = (np.abs(lam.real) <= r) & (lam.imag >= -rho * math.log(r))
    return int(m[ok].sum())


@dataclass(frozen=True)
class LogStripFit:
    slope: float
    intercept: float
    rms: float
    count: int = 0


def fit_log_strip(resonances, re_window=None, min_points=10):
    """Least-squares line ``-Im lam = slope log Re lam + intercept``.

    The default window is the upper half of the frequency range.
    """
    lam, _ = _as_arrays(resonances)
    lam = lam[lam.real > 0]
    if lam.size and re_window is None:
        lo, hi = lam.real.min(), lam.real.max()
        re_window = (0.5 * (lo + hi), hi)
    if re_window is not None:
        lam = lam[(lam.real >= re_window[0]) & (lam.real <= re_window[1])]
    if lam.size < min_points:
        raise TooFewPoints(f"{lam.size} resonances in window, need {min_points}")
    x = np.log(lam.real)
    y = -lam.imag
    A = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ [slope, icpt] - y) ** 2)))
    return LogStripFit(float(slope), float(icpt), rms, int(lam.size))


def log_envelope(resonances, bin_width=2.0):
    """Least-damped resonance in each frequency bin of width ``bin_width``.

    Sets that mix several angular modes carry deep resonances at low
    frequency; the boundary of the free region is traced by this envelope.
    """
    lam, _ = _as_arrays(resonances)
    lam = lam[lam.real > 0]
    bins = {}
    for z in lam:
        k = int(z.real // bin_width)
        if k not in bins or z.imag > bins[k].imag:
            bins[k] = z
    return [bins[k] for k in sorted(bins)]


def fit_log_envelope(resonances, re_window=None, bin_width=2.0, min_points=5):
    """:func:`fit_log_strip` applied to :func:`log_envelope`."""
    return fit_log_strip(log_envelope(resonances, bin_width), re_window, min_points)


def poisson_trace(resonances, t_grid):
    """``s(t) = sum m(lam) e^{-i lam t}`` on ``t_grid``; no windowing."""
    lam, m = _as_arrays(resonances)
    t = np.asarray(t_grid, dtype=float)
    if lam.size == 0:
        return np.zeros(t.shape, dtype=complex)
    return np.exp(-1j * np.multiply.outer(t, lam)) @ m.astype(complex)


def local_maxima(t, values):
    """Grid points where ``values`` has a strict interior local maximum."""
    v = np.asarray(values)
    idx = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]))[0] + 1
    return np.asarray(t)[idx]


# -- verification --------------------------------------------------------------

@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    fitted: dict | None = None
    violators: list = field(default_factory=list)
    min_lambda0: float | None = None

    @property
    def passed(self):
        return all(c["status"] != "FAIL" for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c["name"] == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"checks": self.checks, "fitted": self.fitted,
                "violators": [[v.real, v.imag] for v in self.violators],
                "min_lambda0": self.min_lambda0}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def free_region_violators(resonances, width, lambda0):
    lam, _ = _as_arrays(resonances)
    x = lam.real
    with np.errstate(divide="ignore", invalid="ignore"):
        bad = (x > lambda0) & (x > 1) & (lam.imag > -float(width) * np.log(x))
    return [complex(z) for z in lam[bad]]


def verify_band(resonances, prediction, lambda0, n_grid=10, band_factor=2.0):
    """Check a resonance set against a strip prediction.

    The free-region check fails when some resonance with ``Re lam > lambda0``
    lies above ``Im lam = -width log Re lam``.  The band check fits the growth
    exponent of ``N(r, rho)`` over a grid of ``r``, with ``rho`` the band
    depth for band predictions and ``band_factor * width`` for free-region
    ones (the free region itself holds nothing to count).  The report also
    gives the smallest ``lambda0`` for which the free-region check would pass.
    """
    resonances = list(resonances)
    report = VerificationReport()
    if isinstance(prediction, EmptyBand):
        report.checks.append({"name": "free_region", "status": "NO_DATA",
                              "details": prediction.reason})
        report.checks.append({"name": "band", "status": "NO_DATA", "details": prediction.reason})
        return report
    width = prediction.width
    bad = free_region_violators(resonances, width, lambda0)
    report.violators = bad
    report.checks.append({
        "name": "free_region", "status": "FAIL" if bad else "PASS",
        "details": f"{len(bad)} resonances above Im = -{float(width):.6g} log Re "
                   f"for Re > {lambda0}"})
    everywhere = free_region_violators(resonances, width, 0.0)
    report.min_lambda0 = max((z.real for z in everywhere), default=0.0)
    lam, _ = _as_arrays(resonances)
    pos = lam.real[lam.real > 1]
    if pos.size < 2:
        report.checks.append({"name": "band", "status": "NO_DATA",
                              "details": "fewer than two resonances with Re > 1"})
    else:
        rs = np.geomspace(max(pos.min(), 1.0 + 1e-9), pos.max(), n_grid)
        rho = float(width) if prediction.source == "conic_band" else band_factor * float(width)
        counts = np.array([counting_function(resonances, r, rho) for r in rs])
        ok = counts > 0
        if ok.sum() >= 2:
            expo = float(np.polyfit(np.log(rs[ok]), np.log(counts[ok]), 1)[0])
            details = {"rho": rho, "r": rs.tolist(), "counts": counts.tolist(),
                       "growth_exponent": expo}
            report.checks.append({"name": "band", "status": "INFO", "details": details})
        else:
            report.checks.append({"name": "band", "status": "NO_DATA",
                                  "details": "no resonances inside the band"})
    try:
        f = fit_log_strip(resonances)
        report.fitted = {"slope": f.slope, "intercept": f.intercept, "rms": f.rms}
    except TooFewPoints:
        report.fitted = None
    return report


def bound_curve_rows(resonances, width):
    """Plot-ready rows ``(re, -im, width * log re)``."""
    lam, _ = _as_arrays(resonances)
    rows = []
    for z in sorted(lam, key=lambda z: (z.real, z.imag)):
        curve = float(width) * math.log(z.real) if z.real > 0 else float("nan")
        rows.append((z.real, -z.imag, curve))
    return rows
