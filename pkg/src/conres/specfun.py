"""Integer-order Bessel and Hankel functions of complex argument.

Values come from the AMOS routines wrapped by :mod:`scipy.special`; this
module adds the domain contract (orders ``0 <= m <= 60``, ``|z| <= 120``,
``|Im z| <= 25``) and derivatives through the recurrence
``C'_m = (C_{m-1} - C_{m+1}) / 2``.

All functions broadcast over array arguments.
"""
import numpy as np
import scipy.special as sc

from .errors import BranchCut, DomainExceeded

MAX_ORDER = 60
MAX_ABS = 120.0
MAX_IMAG = 25.0
# Hankel functions are only certified for Re z > 0 or |z| <= SMALL_ABS
SMALL_ABS = 1.0


def _check_order(m):
    m_arr = np.asarray(m)
    if not np.issubdtype(m_arr.dtype, np.integer):
        if np.any(m_arr != np.round(m_arr)):
            raise DomainExceeded(f"order must be an integer, got {m!r}")
    if np.any(m_arr < 0) or np.any(m_arr > MAX_ORDER):
        raise DomainExceeded(f"order outside [0, {MAX_ORDER}]: {m!r}")


def _check_arg(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > MAX_ABS) or np.any(np.abs(z.imag) > MAX_IMAG):
        raise DomainExceeded(f"|z| <= {MAX_ABS} and |Im z| <= {MAX_IMAG} required")
    return z


def _check_cut(z):
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise BranchCut("Hankel function evaluated on the cut (-inf, 0]")
    if np.any((z.real <= 0) & (np.abs(z) > SMALL_ABS)):
        raise DomainExceeded(
            f"Hankel functions are certified for Re z > 0 or |z| <= {SMALL_ABS}")


def _scalar(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def bessel_j(m, z):
    """Bessel function of the first kind ``J_m(z)``."""
    _check_order(m)
    z = _check_arg(z)
    return _scalar(sc.jv(m, z))


def hankel1(m, z):
    """Hankel function of the first kind ``H^(1)_m(z) = J_m(z) + i Y_m(z)``,
    principal branch."""
    _check_order(m)
    z = _check_arg(z)
    _check_cut(z)
    return _scalar(sc.hankel1(m, z))


def _signed_order(f, m, z):
    # C_{-n} = (-1)^n C_n for integer n, valid for J, Y and H^(1)
    m = np.asarray(m)
    sign = np.where((m < 0) & (np.abs(m) % 2 == 1), -1.0, 1.0)
    return sign * f(np.abs(m), z)


def bessel_j_prime(m, z):
    """Derivative ``J'_m(z)``."""
    _check_order(m)
    z = _check_arg(z)
    m = np.asarray(m)
    out = 0.5 * (_signed_order(sc.jv, m - 1, z) - sc.jv(m + 1, z))
    return _scalar(out)


def hankel1_prime(m, z):
    """Derivative ``H^(1)'_m(z)``."""
    _check_order(m)
    z = _check_arg(z)
    _check_cut(z)
    m = np.asarray(m)
    out = 0.5 * (_signed_order(sc.hankel1, m - 1, z) - sc.hankel1(m + 1, z))
    return _scalar(out)


def wronskian_residual(m, z):
    """Scaled residual ``|J H' - J' H - 2i/(pi z)| * |pi z / 2|``.

    Zero in exact arithmetic.  In floating point the cancellation grows like
    ``exp(2 |Im z|)`` in the lower half plane, where ``J`` and ``H^(1)`` are
    both exponentially large.
    """
    z = np.asarray(z, dtype=complex)
    J = bessel_j(m, z)
    H = hankel1(m, z)
    w = J * hankel1_prime(m, z) - bessel_j_prime(m, z) * H
    return _scalar(np.abs(w - 2j / (np.pi * z)) * np.abs(np.pi * z / 2))
