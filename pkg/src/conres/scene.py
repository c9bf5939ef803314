"""Scattering configurations: polygon exteriors and delta potentials.

A scene document is a UTF-8 JSON object with a ``"model"`` key::

    {"model": "polygon", "vertices": [[0, 0], [4, 0], [0, 3]],
     "boundary_condition": "dirichlet", "nontrapping_asserted": false}
    {"model": "delta_line", "positions": [0, 1], "strengths": [1, 1]}
    {"model": "delta_circle", "R": 1.0, "V": 5.0}

Polygon vertices are stored counterclockwise; a clockwise input is reversed
keeping vertex 0 first.  Angles never appear in the input.  A polygon may
carry an optional ``"link_lengths"`` list overriding the doubled wedge
``2 (2 pi - alpha)`` at each vertex, which describes a flat surface whose
cone points have prescribed cone angles.
"""
import enum
import json
import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import DegenerateAngle, InvariantViolation, MalformedDocument, UnknownModel

COLLINEAR_TOL = 1e-12
ANGLE_TOL = 1e-9
TWO_PI = 2 * math.pi


class BoundaryCondition(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class PolygonScene:
    vertices: tuple
    boundary_condition: BoundaryCondition = BoundaryCondition.DIRICHLET
    nontrapping_asserted: bool = False
    link_lengths: tuple | None = None
    model: ClassVar[str] = "polygon"

    @property
    def n(self):
        return len(self.vertices)

    @property
    def points(self):
        return np.asarray(self.vertices, dtype=float)

    @property
    def edges(self):
        """Edge ``i`` runs from vertex ``i`` to vertex ``i + 1``."""
        p = self.points
        return [(p[i], p[(i + 1) % self.n]) for i in range(self.n)]

    @property
    def signed_area(self):
        p = self.points
        q = np.roll(p, -1, axis=0)
        return 0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))

    @property
    def bbox_area(self):
        p = self.points
        ext = p.max(axis=0) - p.min(axis=0)
        return float(ext[0] * ext[1])

    @property
    def scale(self):
        p = self.points
        return float(np.max(p.max(axis=0) - p.min(axis=0)))

    def interior_angles(self):
        """Interior angle at every vertex, radians in (0, 2 pi)."""
        p = self.points
        nxt = np.roll(p, -1, axis=0) - p
        prv = np.roll(p, 1, axis=0) - p
        a_next = np.arctan2(nxt[:, 1], nxt[:, 0])
        a_prev = np.arctan2(prv[:, 1], prv[:, 0])
        return np.mod(a_prev - a_next, TWO_PI)

    def is_convex(self):
        return bool(np.all(self.interior_angles() < math.pi - ANGLE_TOL))


@dataclass(frozen=True)
class DeltaLineScene:
    positions: tuple
    strengths: tuple
    model: ClassVar[str] = "delta_line"

    @property
    def diameter(self):
        return float(self.positions[-1] - self.positions[0])


@dataclass(frozen=True)
class DeltaCircleScene:
    R: float
    V: float
    model: ClassVar[str] = "delta_circle"

    @property
    def diameter(self):
        return 2.0 * self.R


@dataclass(frozen=True)
class ConePoint:
    """A polygon vertex seen as a cone point of the doubled exterior.

    ``reference_direction`` is the direction of the edge towards the
    previous vertex; exterior directions are measured counterclockwise from
    it and fill ``[0, wedge_angle]``.
    """
    id: int
    position: tuple
    interior_angle: float
    wedge_angle: float
    link_length: float
    reference_direction: float = 0.0

    def direction_angle(self, direction):
        """Angle of a direction vector measured into the exterior wedge."""
        a = math.atan2(direction[1], direction[0])
        return (a - self.reference_direction) % TWO_PI


# -- geometry checks ---------------------------------------------------------

def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_touch(p1, p2, q1, q2):
    d1, d2 = _cross(q1, q2, p1), _cross(q1, q2, p2)
    d3, d4 = _cross(p1, p2, q1), _cross(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True

    def on(a, b, c, d):
        return d == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) \
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
    return on(q1, q2, p1, d1) or on(q1, q2, p2, d2) or on(p1, p2, q1, d3) or on(p1, p2, q2, d4)


def self_intersections(scene: PolygonScene):
    """Pairs of non-adjacent edges that touch."""
    e = scene.edges
    n = scene.n
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_touch(e[i][0], e[i][1], e[j][0], e[j][1]):
                bad.append((i, j))
    return bad


def collinear_triples(scene: PolygonScene):
    """Vertex triples whose triangle area is below the scale-free tolerance."""
    p = scene.points
    n = scene.n
    tol = COLLINEAR_TOL * scene.bbox_area
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if 0.5 * abs(_cross(p[i], p[j], p[k])) < tol:
                    out.append((i, j, k))
    return out


def _normalized_polygon(vertices, link_lengths):
    pts = [tuple(float(c) for c in v) for v in vertices]
    area = 0.5 * sum(pts[i][0] * pts[(i + 1) % len(pts)][1]
                     - pts[(i + 1) % len(pts)][0] * pts[i][1] for i in range(len(pts)))
    if area < 0:
        pts = [pts[0]] + pts[:0:-1]
        if link_lengths is not None:
            link_lengths = [link_lengths[0]] + list(link_lengths[:0:-1])
    return tuple(pts), (None if link_lengths is None else tuple(float(x) for x in link_lengths))


def check_polygon(scene: PolygonScene):
    """Raise :class:`InvariantViolation` naming the first broken invariant."""
    if scene.n < 3:
        raise InvariantViolation("at least three vertices", f"got {scene.n}")
    if scene.bbox_area <= 0:
        raise InvariantViolation("three vertices collinear", "all vertices on one line")
    bad = self_intersections(scene)
    if bad:
        raise InvariantViolation("polygon is simple", f"edges {bad[0]} intersect")
    trip = collinear_triples(scene)
    if trip:
        raise InvariantViolation("three vertices collinear", f"vertices {trip[0]}")
    ang = scene.interior_angles()
    flat = np.nonzero(np.abs(ang - math.pi) < ANGLE_TOL)[0]
    if flat.size:
        raise InvariantViolation("no interior angle equal to pi", f"vertex {int(flat[0])}")
    total = float(np.sum(math.pi - ang))
    if abs(total - TWO_PI) > ANGLE_TOL:
        raise InvariantViolation("angle sum", f"sum(pi - alpha) = {total}")
    if scene.link_lengths is not None:
        if len(scene.link_lengths) != scene.n:
            raise InvariantViolation("one link length per vertex")
        if any(not (x > 0) for x in scene.link_lengths):
            raise InvariantViolation("link lengths positive")


def cone_points(scene: PolygonScene):
    """One :class:`ConePoint` per vertex, in vertex order."""
    p = scene.points
    alphas = scene.interior_angles()
    out = []
    for i, alpha in enumerate(alphas):
        if abs(alpha - math.pi) < ANGLE_TOL:
            raise DegenerateAngle(f"vertex {i} has interior angle pi")
        w = TWO_PI - float(alpha)
        rho = 2 * w if scene.link_lengths is None else float(scene.link_lengths[i])
        prev = p[i - 1] - p[i]
        out.append(ConePoint(i, (float(p[i][0]), float(p[i][1])), float(alpha), w, rho,
                             math.atan2(prev[1], prev[0])))
    return out


# -- validation report -------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    """Status of each modelling assumption.

    Statuses: ``verified``, ``asserted-by-user``, ``asserted (flat
    geometry)``, ``needs-assertion``, ``violated``.
    """
    model: str
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(v not in ("violated", "needs-assertion") for v in self.checks.values())

    def to_dict(self):
        return {"model": self.model, "checks": dict(self.checks), "details": dict(self.details)}


def validate(scene):
    """Report on the nontrapping, genericity and non-conjugacy assumptions."""
    checks, details = {}, {}
    if isinstance(scene, PolygonScene):
        bad = self_intersections(scene) if scene.n >= 3 else []
        checks["simple"] = "violated" if bad or scene.n < 3 else "verified"
        trip = collinear_triples(scene)
        checks["no_three_collinear"] = "violated" if trip else "verified"
        if trip:
            details["no_three_collinear"] = f"collinear vertices {trip}"
        ang = scene.interior_angles()
        flat = [int(i) for i in np.nonzero(np.abs(ang - math.pi) < ANGLE_TOL)[0]]
        checks["cone_points"] = "violated" if flat else "verified"
        if flat:
            details["cone_points"] = f"vertices with angle pi: {flat}"
        if scene.is_convex():
            checks["nontrapping"] = "verified"
            details["nontrapping"] = "convex polygon"
        elif scene.nontrapping_asserted:
            checks["nontrapping"] = "asserted-by-user"
        else:
            checks["nontrapping"] = "needs-assertion"
            details["nontrapping"] = "nonconvex polygon; set nontrapping_asserted"
        checks["non_conjugate"] = "asserted (flat geometry)"
    elif isinstance(scene, DeltaLineScene):
        x = scene.positions
        ok = len(x) >= 1 and all(b > a for a, b in zip(x, x[1:]))
        checks["positions_increasing"] = "verified" if ok else "violated"
        checks["nonzero_strengths"] = ("verified" if all(c != 0 for c in scene.strengths)
                                       else "violated")
    elif isinstance(scene, DeltaCircleScene):
        checks["positive_radius"] = "verified" if scene.R > 0 else "violated"
    else:
        raise UnknownModel(f"not a scene: {scene!r}")
    return ValidationReport(scene.model, checks, details)


# -- documents ---------------------------------------------------------------

def _require(doc, key, kind):
    if key not in doc:
        raise MalformedDocument(f"missing key {key!r}")
    val = doc[key]
    if kind == "number":
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise MalformedDocument(f"{key!r} must be a number")
        if not math.isfinite(val):
            raise MalformedDocument(f"{key!r} must be finite")
    elif kind == "numbers":
        if not isinstance(val, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                for v in val):
            raise MalformedDocument(f"{key!r} must be a list of numbers")
    return val


def parse_scene(text):
    """Parse and validate a scene document (``str`` or ``bytes``)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(str(exc)) from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("scene document must be a JSON object")
    model = doc.get("model")
    if model is None:
        raise MalformedDocument("missing key 'model'")
    if model == "polygon":
        verts = doc.get("vertices")
        if not isinstance(verts, list) or not all(
                isinstance(v, list) and len(v) == 2 and all(
                    isinstance(c, (int, float)) and not isinstance(c, bool) and math.isfinite(c)
                    for c in v) for v in verts):
            raise MalformedDocument("'vertices' must be a list of [x, y] pairs")
        bc = doc.get("boundary_condition", "dirichlet")
        try:
            bc = BoundaryCondition(str(bc).lower())
        except ValueError as exc:
            raise MalformedDocument(f"unknown boundary_condition {bc!r}") from exc
        flag = doc.get("nontrapping_asserted", False)
        if not isinstance(flag, bool):
            raise MalformedDocument("'nontrapping_asserted' must be a boolean")
        links = doc.get("link_lengths")
        if links is not None:
            links = _require(doc, "link_lengths", "numbers")
        verts, links = _normalized_polygon(verts, links)
        scene = PolygonScene(verts, bc, flag, links)
        check_polygon(scene)
        return scene
    if model == "delta_line":
        x = _require(doc, "positions", "numbers")
        c = _require(doc, "strengths", "numbers")
        if len(x) != len(c):
            raise MalformedDocument("'positions' and 'strengths' differ in length")
        if not x:
            raise InvariantViolation("at least one delta")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise InvariantViolation("positions strictly increasing")
        if any(v == 0 for v in c):
            raise InvariantViolation("strengths nonzero")
        return DeltaLineScene(tuple(float(v) for v in x), tuple(float(v) for v in c))
    if model == "delta_circle":
        R = float(_require(doc, "R", "number"))
        V = float(_require(doc, "V", "number"))
        if not R > 0:
            raise InvariantViolation("R > 0", f"got R = {R}")
        return DeltaCircleScene(R, V)
    raise UnknownModel(f"unknown model {model!r}")


def scene_to_dict(scene):
    if isinstance(scene, PolygonScene):
        doc = {"model": "polygon", "vertices": [list(v) for v in scene.vertices],
               "boundary_condition": scene.boundary_condition.value,
               "nontrapping_asserted": scene.nontrapping_asserted}
        if scene.link_lengths is not None:
            doc["link_lengths"] = list(scene.link_lengths)
        return doc
    if isinstance(scene, DeltaLineScene):
        return {"model": "delta_line", "positions": list(scene.positions),
                "strengths": list(scene.strengths)}
    if isinstance(scene, DeltaCircleScene):
        return {"model": "delta_circle", "R": scene.R, "V": scene.V}
    raise UnknownModel(f"not a scene: {scene!r}")


def serialize_scene(scene):
    return json.dumps(scene_to_dict(scene))


def load_scene(path):
    with open(path, "rb") as fh:
        return parse_scene(fh.read())
