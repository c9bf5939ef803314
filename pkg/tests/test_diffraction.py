import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conres import diffraction as d
from conres.errors import GeometricSingularity, NotStrictlyDiffractive
from conres.geodesics import DiffractiveChain

PI = math.pi
GRID_RHO = (2.5 * PI, 3 * PI, 10 * PI / 3, 4 * PI)
GRID_S = (0.0, PI / 4, PI / 2, 3 * PI / 4)


def chain(separations, links):
    return DiffractiveChain((), False, 0.0, tuple(separations), tuple(links),
                            tuple(range(len(links))), len(links))


def test_kernel_at_four_pi():
    assert d.diffraction_kernel(4 * PI, 0.0) == pytest.approx(-1j / (4 * PI), abs=1e-15)


def test_kernel_singular_at_pi():
    with pytest.raises(GeometricSingularity):
        d.diffraction_kernel(4 * PI, PI)
    with pytest.raises(GeometricSingularity):
        d.diffraction_kernel(3 * PI, 2 * PI)  # congruent to -pi modulo rho
    d.diffraction_kernel(4 * PI, PI + 1e-6)


@pytest.mark.parametrize("rho", GRID_RHO)
@pytest.mark.parametrize("s", GRID_S)
def test_closed_form_matches_abel_sum(rho, s):
    closed = d.diffraction_kernel(rho, s)
    assert abs(closed - d.kernel_abel_sum(rho, s, 1 - 1e-3, 100_000)) < 1e-2


def test_abel_sum_limits():
    assert d.kernel_abel_sum(5.0, 1.3, 0.0, 50) == pytest.approx(1 / 5.0)
    assert d.kernel_abel_sum(5.0, 1.3, 0.7, 200) == pytest.approx(d.kernel_abel_sum(5.0, -1.3, 0.7, 200))
    assert abs(d.kernel_abel_sum(4 * PI, 0.0, 1 - 1e-3, 100_000) + 1j / (4 * PI)) < 1e-2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_flat_links_do_not_diffract(k):
    rho = 2 * PI / k
    for s in (0.0, 0.1, 0.5, 0.9, 1.7):
        s = s % rho
        if abs(s - PI) > 1e-3 and abs(math.cos(2 * PI * s / rho) - math.cos(2 * PI ** 2 / rho)) > 1e-6:
            assert abs(d.diffraction_kernel(rho, s)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(6.5, 12.5), st.floats(0.01, 0.99))
def test_kernel_reflection_symmetry(rho, frac):
    s = frac * rho
    if rho - (rho - s) != s:
        s = rho - s  # now rho - s is computed exactly
    try:
        k = d.diffraction_kernel(rho, s)
    except GeometricSingularity:
        return
    assert d.diffraction_kernel(rho, rho - s) == k


def test_strictness():
    assert d.is_strictly_diffractive(chain([PI / 2, PI / 3], [4 * PI, 4 * PI]))
    assert not d.is_strictly_diffractive(chain([PI / 2, PI], [4 * PI, 4 * PI]))
    assert d.is_strictly_diffractive(chain([], []))


def test_diffraction_coefficient():
    assert d.diffraction_coefficient(chain([0.0], [4 * PI])) == pytest.approx(1 / (4 * PI))
    assert d.diffraction_coefficient(chain([0.5], [2 * PI])) == 0.0
    assert d.diffraction_coefficient(chain([], [])) == 1.0
    with pytest.raises(NotStrictlyDiffractive):
        d.diffraction_coefficient(chain([PI], [4 * PI]))


def test_coefficient_multiplicative_under_concatenation():
    a = chain([0.4, 1.1], [3 * PI, 4 * PI])
    b = chain([2.0], [10 * PI / 3])
    joined = chain([0.4, 1.1, 0.7, 2.0], [3 * PI, 4 * PI, 2.5 * PI, 10 * PI / 3])
    junction = abs(d.diffraction_kernel(2.5 * PI, 0.7))
    assert d.diffraction_coefficient(joined) == pytest.approx(
        d.diffraction_coefficient(a) * d.diffraction_coefficient(b) * junction, rel=1e-14)


def test_vanishing_junctions_reported():
    import json

    from conres.geodesics import reflected_geodesics
    from conres.scene import cone_points, parse_scene
    flat = {"model": "polygon", "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]],
            "link_lengths": [2 * PI, 3 * PI, 3 * PI, 3 * PI]}
    scene = parse_scene(json.dumps(flat))
    segs = reflected_geodesics(scene, 0)
    zeros = d.vanishing_junctions(cone_points(scene), segs)
    assert zeros and all(cone_id == 0 for cone_id, _, _ in zeros)
