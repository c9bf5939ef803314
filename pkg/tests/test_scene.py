import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conres.errors import (DegenerateAngle, InvariantViolation, MalformedDocument,
                           UnknownModel)
from conres.scene import (BoundaryCondition, DeltaCircleScene, DeltaLineScene, PolygonScene,
                          cone_points, parse_scene, scene_to_dict, serialize_scene, validate)

from conftest import CUP, RIGHT_TRIANGLE


def test_parse_delta_line():
    s = parse_scene('{"model":"delta_line","positions":[0,1],"strengths":[1,1]}')
    assert s == DeltaLineScene((0.0, 1.0), (1.0, 1.0))


def test_parse_delta_circle_diameter():
    s = parse_scene('{"model":"delta_circle","R":1.0,"V":5.0}')
    assert s == DeltaCircleScene(1.0, 5.0)
    assert s.diameter == 2.0


def test_collinear_polygon_names_invariant():
    with pytest.raises(InvariantViolation) as exc:
        parse_scene('{"model":"polygon","vertices":[[0,0],[1,0],[2,0],[0,1]]}')
    assert exc.value.invariant == "three vertices collinear"


def test_self_intersecting_polygon_rejected():
    with pytest.raises(InvariantViolation) as exc:
        parse_scene('{"model":"polygon","vertices":[[0,0],[2,2],[2,0],[0,2.5]]}')
    assert exc.value.invariant == "polygon is simple"


@pytest.mark.parametrize("text, error", [
    ("not json", MalformedDocument),
    ("[1, 2]", MalformedDocument),
    ('{"positions": [0]}', MalformedDocument),
    ('{"model": "torus"}', UnknownModel),
    ('{"model": "delta_line", "positions": [0, 1], "strengths": [1]}', MalformedDocument),
    ('{"model": "delta_line", "positions": [1, 0], "strengths": [1, 1]}', InvariantViolation),
    ('{"model": "delta_line", "positions": [0, 1], "strengths": [1, 0]}', InvariantViolation),
    ('{"model": "delta_circle", "R": -1, "V": 1}', InvariantViolation),
    ('{"model": "delta_circle", "R": true, "V": 1}', MalformedDocument),
    ('{"model": "polygon", "vertices": [[0, 0], [1, 0]]}', InvariantViolation),
    ('{"model": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]], '
     '"boundary_condition": "robin"}', MalformedDocument),
])
def test_bad_documents(text, error):
    with pytest.raises(error):
        parse_scene(text)


def test_bytes_must_be_utf8():
    with pytest.raises(MalformedDocument):
        parse_scene(b"\xff\xfe{}")


def test_clockwise_input_is_reoriented():
    s = parse_scene('{"model":"polygon","vertices":[[0,0],[0,3],[4,0]]}')
    assert s.vertices[0] == (0.0, 0.0)
    assert s.signed_area > 0


def test_square_and_equilateral_link_lengths():
    sq = parse_scene('{"model":"polygon","vertices":[[0,0],[1,0],[1,1],[0,1]]}')
    assert all(c.link_length == pytest.approx(3 * math.pi) for c in cone_points(sq))
    h = math.sqrt(3) / 2
    tri = parse_scene(json.dumps({"model": "polygon", "vertices": [[0, 0], [1, 0], [0.5, h]]}))
    assert all(c.link_length == pytest.approx(10 * math.pi / 3) for c in cone_points(tri))


def test_right_triangle_cone_positions():
    cones = cone_points(parse_scene(RIGHT_TRIANGLE))
    assert [c.position for c in cones] == [(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]
    assert [c.id for c in cones] == [0, 1, 2]


def test_flat_vertex_is_not_a_cone_point():
    s = PolygonScene(((0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)))
    with pytest.raises(DegenerateAngle):
        cone_points(s)
    assert validate(s).checks["cone_points"] == "violated"


def test_validation_statuses():
    convex = validate(parse_scene('{"model":"polygon","vertices":[[0,0],[2,0],[2.5,1],[0,1.2]]}'))
    assert convex.checks["nontrapping"] == "verified"
    assert convex.checks["non_conjugate"] == "asserted (flat geometry)"
    cup_doc = json.loads(CUP)
    asserted = validate(parse_scene(CUP))
    assert asserted.checks["nontrapping"] == "asserted-by-user"
    cup_doc["nontrapping_asserted"] = False
    needs = validate(parse_scene(json.dumps(cup_doc)))
    assert needs.checks["nontrapping"] == "needs-assertion"
    assert not needs.ok
    collinear = validate(PolygonScene(((0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0))))
    assert collinear.checks["no_three_collinear"] == "violated"


def _star(n, radii, phase):
    ang = phase + 2 * math.pi * np.arange(n) / n
    return [[float(r * math.cos(a)), float(r * math.sin(a))] for r, a in zip(radii, ang)]


polygons = st.integers(3, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.floats(0.5, 2.0), min_size=n, max_size=n),
    st.floats(0, 2 * math.pi)))


@settings(max_examples=60, deadline=None)
@given(polygons)
def test_star_polygons_angle_sum_and_round_trip(data):
    n, radii, phase = data
    doc = {"model": "polygon", "vertices": _star(n, radii, phase),
           "boundary_condition": "neumann", "nontrapping_asserted": True}
    try:
        s = parse_scene(json.dumps(doc))
    except InvariantViolation:
        return  # a rare collinear draw
    assert float(np.sum(math.pi - s.interior_angles())) == pytest.approx(2 * math.pi, abs=1e-9)
    assert s.boundary_condition is BoundaryCondition.NEUMANN
    again = parse_scene(serialize_scene(s))
    assert again == s
    assert cone_points(again) == cone_points(s)


@pytest.mark.parametrize("text", [
    '{"model":"delta_line","positions":[0,1.5],"strengths":[2,-1]}',
    '{"model":"delta_circle","R":2.5,"V":-1}',
    '{"model":"polygon","vertices":[[0,0],[4,0],[0,3]],"link_lengths":[1,2,3]}',
])
def test_round_trip(text):
    s = parse_scene(text)
    assert parse_scene(serialize_scene(s)) == s
    assert scene_to_dict(s)["model"] == s.model
