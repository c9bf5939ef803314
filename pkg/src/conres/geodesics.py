"""Vertex-to-vertex geodesics on polygon exteriors.

Straight segments come from a visibility test; billiard segments that
reflect off edges come from unfolding: the target vertex is mirrored across
the edge lines in reverse order and the straight line to the image is traced
back onto the edges.  Every leg of a returned path stays out of the open
polygon interior and passes through no third vertex.

Junctions at a vertex are measured on the doubled cone (link circle of
length ``rho = 2 w``): with both directions measured from the vertex's
reference edge the link distance is ``min(t_in + t_out, rho - t_in - t_out)``.
"""
import csv
import io
import itertools
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AngleOutOfRange, BrokenChain, CapExceeded, EmptyInput, NoCycle
from .scene import COLLINEAR_TOL, PolygonScene, cone_points

DEFAULT_REFLECTIONS = 3
SOFT_CAP = 8
HARD_LIMIT = 12
ANGLE_SLACK = 1e-9


@dataclass(frozen=True)
class GeodesicSegment:
    """Geodesic from one cone point to another, possibly reflecting.

    ``path`` lists the vertex, the reflection points, and the final vertex.
    Angles are measured into each endpoint's exterior wedge from its
    reference edge.
    """
    from_cone: int
    to_cone: int
    reflection_edges: tuple
    length: float
    departure_angle: float
    arrival_angle: float
    path: tuple = ()

    def reversed(self):
        return GeodesicSegment(self.to_cone, self.from_cone, self.reflection_edges[::-1],
                               self.length, self.arrival_angle, self.departure_angle,
                               self.path[::-1])

    @property
    def key(self):
        return (self.from_cone, self.to_cone, self.reflection_edges)


@dataclass(frozen=True)
class DiffractiveChain:
    segments: tuple
    closed: bool
    total_length: float
    link_separations: tuple
    junction_links: tuple
    junction_cones: tuple
    n_gamma: int


# -- polygon primitives --------------------------------------------------------

def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _strictly_inside(scene, pt, eps):
    """Point strictly inside the polygon (boundary counts as outside)."""
    p = scene.points
    n = scene.n
    x, y = pt
    for i in range(n):
        a, b = p[i], p[(i + 1) % n]
        ab = b - a
        L = math.hypot(*ab)
        t = np.dot(np.asarray(pt) - a, ab) / (L * L)
        if -1e-12 <= t <= 1 + 1e-12 and abs(_cross(ab, np.asarray(pt) - a)) / L <= eps:
            return False
    inside = False
    for i in range(n):
        (x1, y1), (x2, y2) = p[i], p[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def _edge_hits(scene, P, Q):
    """Parameters in [0, 1] along P->Q where the segment meets an edge."""
    d = Q - P
    ts = [0.0, 1.0]
    for a, b in scene.edges:
        e = b - a
        den = _cross(d, e)
        w = a - P
        if abs(den) <= 1e-14 * (np.dot(d, d) + np.dot(e, e)):
            if abs(_cross(w, d)) <= 1e-12 * scene.scale * math.hypot(*d):
                dd = np.dot(d, d)
                for q in (a, b):
                    t = np.dot(q - P, d) / dd
                    if 0 < t < 1:
                        ts.append(t)
            continue
        t = _cross(w, e) / den
        u = _cross(w, d) / den
        if -1e-12 <= u <= 1 + 1e-12 and 0 < t < 1:
            ts.append(t)
    return sorted(ts)


def leg_is_valid(scene, P, Q, endpoints=()):
    """Open segment P->Q avoids the open polygon interior and every vertex
    other than the ones listed in ``endpoints``."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    d = Q - P
    L = math.hypot(*d)
    if L <= 1e-12 * scene.scale:
        return False
    tol = COLLINEAR_TOL * scene.bbox_area
    for i, v in enumerate(scene.points):
        if i in endpoints:
            continue
        t = np.dot(v - P, d) / (L * L)
        # triangle area test, same tolerance as the scene collinearity rule
        if 0 < t < 1 and 0.5 * abs(_cross(d, v - P)) < tol:
            return False
    eps = 1e-10 * scene.scale
    ts = _edge_hits(scene, P, Q)
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 <= 1e-12:
            continue
        mid = P + 0.5 * (t0 + t1) * d
        if _strictly_inside(scene, mid, eps):
            return False
    return True


def _wedge_angle(cone, direction):
    th = cone.direction_angle(direction)
    if th > cone.wedge_angle + ANGLE_SLACK:
        # within rounding of 2 pi means the reference edge itself
        if th > 2 * math.pi - ANGLE_SLACK:
            return 0.0
        return None
    return min(th, cone.wedge_angle)


def _sort_key(seg):
    return (round(seg.length, 12), seg.from_cone, seg.to_cone, seg.reflection_edges)


def visibility_geodesics(scene: PolygonScene):
    """Straight segments between mutually visible vertices, one per pair."""
    cones = cone_points(scene)
    p = scene.points
    out = []
    for i, j in itertools.combinations(range(scene.n), 2):
        if not leg_is_valid(scene, p[i], p[j], endpoints=(i, j)):
            continue
        th_out = _wedge_angle(cones[i], p[j] - p[i])
        th_in = _wedge_angle(cones[j], p[i] - p[j])
        if th_out is None or th_in is None:
            continue
        out.append(GeodesicSegment(i, j, (), float(math.hypot(*(p[j] - p[i]))), th_out, th_in,
                                   (tuple(p[i]), tuple(p[j]))))
    return sorted(out, key=_sort_key)


def _mirror(pt, a, b):
    e = b - a
    t = np.dot(pt - a, e) / np.dot(e, e)
    foot = a + t * e
    return 2 * foot - pt


def _unfold(scene, i, j, seq):
    """Billiard path from vertex i to vertex j reflecting off ``seq`` in order,
    or None when the unfolded straight line is not a valid path."""
    p = scene.points
    edges = scene.edges
    A = p[i]
    # image of the target: mirror across e_k, then e_{k-1}, ..., e_1
    image = p[j].copy()
    for k in reversed(seq):
        image = _mirror(image, *edges[k])
    d = image - A
    total = math.hypot(*d)
    if total <= 1e-12 * scene.scale:
        return None
    # mirrors in the unfolded picture: m_1 = e_1, m_k = s_1...s_{k-1}(e_k)
    pts = [A]
    t_prev = 0.0
    for n, k in enumerate(seq):
        a, b = edges[k]
        for kk in reversed(seq[:n]):
            a, b = _mirror(a, *edges[kk]), _mirror(b, *edges[kk])
        e = b - a
        den = _cross(d, e)
        if abs(den) < 1e-14:
            return None
        w = a - A
        t = _cross(w, e) / den
        u = _cross(w, d) / den
        if not (t_prev + 1e-12 < t < 1 - 1e-12) or not (1e-9 < u < 1 - 1e-9):
            return None
        t_prev = t
        ea, eb = edges[k]
        pts.append(ea + u * (eb - ea))
    pts.append(p[j])
    # consecutive legs must stay outside, meeting each mirror from its outer side
    for n in range(len(pts) - 1):
        ends = tuple(x for x, is_v in ((i, n == 0), (j, n == len(pts) - 2)) if is_v)
        if not leg_is_valid(scene, pts[n], pts[n + 1], endpoints=ends):
            return None
    for n, k in enumerate(seq):
        ea, eb = edges[k]
        # ccw polygon: the exterior lies to the right of each edge
        if _cross(eb - ea, pts[n] - ea) >= 0 or _cross(eb - ea, pts[n + 2] - ea) >= 0:
            return None
    return pts, total


def mirror_candidates(scene):
    """Edges that can reflect a vertex-to-vertex path.

    A ray leaving an edge whose line has every vertex on its inner side stays
    in the open outer half-plane and never reaches a vertex, so only edges
    with some vertex strictly outside their line qualify.  Convex polygons
    have none.
    """
    p = scene.points
    tol = COLLINEAR_TOL * scene.bbox_area
    out = []
    for k, (a, b) in enumerate(scene.edges):
        if any(_cross(b - a, v - a) < -tol for v in p):
            out.append(k)
    return out


def reflected_geodesics(scene: PolygonScene, max_reflections=DEFAULT_REFLECTIONS):
    """Straight and reflected vertex-to-vertex segments with at most
    ``max_reflections`` reflections, deduplicated and canonically sorted."""
    if max_reflections > HARD_LIMIT:
        raise CapExceeded(f"max_reflections {max_reflections} exceeds hard limit {HARD_LIMIT}")
    if max_reflections < 0:
        raise ValueError("max_reflections must be nonnegative")
    if max_reflections > SOFT_CAP:
        warnings.warn(f"max_reflections {max_reflections} above the default cap {SOFT_CAP}",
                      stacklevel=2)
    out = {s.key: s for s in visibility_geodesics(scene)}
    cones = cone_points(scene)
    mirrors = mirror_candidates(scene)
    for k in range(1, max_reflections + 1):
        for seq in itertools.product(mirrors, repeat=k):
            if any(a == b for a, b in zip(seq, seq[1:])):
                continue
            for i in range(scene.n):
                for j in range(scene.n):
                    got = _unfold(scene, i, j, seq)
                    if got is None:
                        continue
                    pts, total = got
                    th_out = _wedge_angle(cones[i], pts[1] - pts[0])
                    th_in = _wedge_angle(cones[j], pts[-2] - pts[-1])
                    if th_out is None or th_in is None:
                        continue
                    seg = GeodesicSegment(i, j, tuple(seq), float(total), th_out, th_in,
                                          tuple(tuple(q) for q in pts))
                    rev = seg.reversed()
                    canon = min(seg, rev, key=lambda s: s.key)
                    out.setdefault(canon.key, canon)
    return sorted(out.values(), key=_sort_key)


def link_separation(cone, arrival_angle, departure_angle):
    """Link distance between arrival and departure on the doubled cone.

    Angles are measured from the reference edge and must lie in
    ``[0, wedge_angle]``.  A link-length override rescales them onto the
    circle of length ``rho``.
    """
    w = cone.wedge_angle
    for th in (arrival_angle, departure_angle):
        if not (-ANGLE_SLACK <= th <= w + ANGLE_SLACK):
            raise AngleOutOfRange(f"angle {th} outside [0, {w}] at cone {cone.id}")
    rho = cone.link_length
    total = (arrival_angle + departure_angle) * rho / (2 * w)
    return min(total, rho - total)


def d_max(segments):
    """Longest vertex-to-vertex geodesic among ``segments``.

    With reflections capped this is only a lower bound for the supremum over
    all geometric geodesics.
    """
    segments = list(segments)
    if not segments:
        raise EmptyInput("d_max needs at least one segment")
    return max(s.length for s in segments)


def build_chain(segments, cones):
    """Chain the oriented ``segments`` head to tail at cone points."""
    segments = tuple(segments)
    if not segments:
        raise EmptyInput("empty chain")
    for a, b in zip(segments, segments[1:]):
        if a.to_cone != b.from_cone:
            raise BrokenChain(f"segment ending at {a.to_cone} followed by one "
                              f"starting at {b.from_cone}")
    closed = segments[-1].to_cone == segments[0].from_cone
    pairs = list(zip(segments, segments[1:]))
    if closed:
        pairs.append((segments[-1], segments[0]))
    seps, links, ids = [], [], []
    for a, b in pairs:
        cone = cones[a.to_cone]
        seps.append(link_separation(cone, a.arrival_angle, b.departure_angle))
        links.append(cone.link_length)
        ids.append(cone.id)
    return DiffractiveChain(segments, closed, float(sum(s.length for s in segments)),
                            tuple(seps), tuple(links), tuple(ids), len(pairs))


# -- maximum mean cycle --------------------------------------------------------

def max_mean_cycle(edges):
    """Maximum mean-weight directed cycle (Karp).

    ``edges`` is an iterable of ``(u, v, weight)`` with hashable nodes.
    Returns ``(mean, cycle)`` where ``cycle`` is a list of edges in order.
    """
    edges = [(u, v, float(w)) for u, v, w in edges]
    if not edges:
        raise NoCycle("empty graph")
    nodes = sorted({u for u, _, _ in edges} | {v for _, v, _ in edges}, key=repr)
    index = {x: k for k, x in enumerate(nodes)}
    n = len(nodes)
    src = np.array([index[u] for u, _, _ in edges])
    dst = np.array([index[v] for _, v, _ in edges])
    wt = np.array([w for _, _, w in edges])
    # D[k, v]: best weight of a walk with exactly k edges ending at v
    D = np.full((n + 1, n), -np.inf)
    D[0] = 0.0
    parent = np.full((n + 1, n), -1, dtype=int)
    for k in range(1, n + 1):
        cand = D[k - 1, src] + wt
        for e in np.argsort(-cand, kind="stable"):
            if cand[e] > D[k, dst[e]]:
                D[k, dst[e]] = cand[e]
                parent[k, dst[e]] = e
    best, best_v = -np.inf, -1
    with np.errstate(invalid="ignore"):
        for v in range(n):
            if not np.isfinite(D[n, v]):
                continue
            vals = [(D[n, v] - D[k, v]) / (n - k) for k in range(n) if np.isfinite(D[k, v])]
            m = min(vals)
            if m > best:
                best, best_v = m, v
    if best_v < 0:
        raise NoCycle("graph has no directed cycle")
    # the n-edge walk to best_v revisits a node; its cycles include an optimal one
    walk = []
    v = best_v
    for k in range(n, 0, -1):
        e = parent[k, v]
        walk.append(e)
        v = src[e]
    walk.reverse()
    cycle = _best_cycle_in_walk(walk, src, dst, wt)
    return float(best), [edges[e] for e in cycle]


def _best_cycle_in_walk(walk, src, dst, wt):
    nodes = [src[walk[0]]] + [dst[e] for e in walk]
    best, best_cyc = -np.inf, None
    stack_nodes, stack_edges, pos = [], [], {}
    for idx, node in enumerate(nodes):
        if node in pos:
            start = pos[node]
            cyc = stack_edges[start:]
            m = wt[cyc].mean()
            if m > best:
                best, best_cyc = m, list(cyc)
            for x in stack_nodes[start + 1:]:
                del pos[x]
            stack_nodes = stack_nodes[:start + 1]
            stack_edges = stack_edges[:start]
        else:
            pos[node] = len(stack_nodes)
            stack_nodes.append(node)
        if idx < len(walk):
            stack_edges.append(walk[idx])
    return best_cyc


def directed_segments(segments):
    """Both orientations of every segment, without duplicates."""
    out = {}
    for s in segments:
        for t in (s, s.reversed()):
            out.setdefault(t.key, t)
    return sorted(out.values(), key=_sort_key)


def junction_graph(scene, segments, kernel_predicate=None, cones=None):
    """Weighted edges between directed segments joined by admissible junctions.

    Edge weight is the length of the successor segment, so a cycle's mean is
    its length per diffraction.
    """
    if kernel_predicate is None:
        from .diffraction import admissible_junction as kernel_predicate
    cones = cone_points(scene) if cones is None else cones
    segs = directed_segments(segments)
    edges = []
    for a_idx, a in enumerate(segs):
        for b_idx, b in enumerate(segs):
            if a.to_cone == b.from_cone and kernel_predicate(cones[a.to_cone], a.arrival_angle,
                                                              b.departure_angle):
                edges.append((a_idx, b_idx, b.length))
    return segs, edges


def d_plus_max(scene, segments, kernel_predicate=None):
    """Largest length per diffraction over closed strictly diffractive chains
    with nonzero coefficient; ``-inf`` when there is no such chain."""
    _, edges = junction_graph(scene, segments, kernel_predicate)
    try:
        mean, _ = max_mean_cycle(edges)
    except NoCycle:
        return -math.inf
    return mean


def best_closed_chain(scene, segments, kernel_predicate=None):
    """The chain realizing :func:`d_plus_max`, or None."""
    segs, edges = junction_graph(scene, segments, kernel_predicate)
    try:
        _, cyc = max_mean_cycle(edges)
    except NoCycle:
        return None
    return build_chain([segs[v] for _, v, _ in cyc], cone_points(scene))


# -- export --------------------------------------------------------------------

SEGMENT_COLUMNS = ("from", "to", "length", "reflections", "theta_in", "theta_out")


def segments_to_csv(segments):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SEGMENT_COLUMNS)
    for s in segments:
        w.writerow([s.from_cone, s.to_cone, format(s.length, ".17g"),
                    "-".join(str(e) for e in s.reflection_edges),
                    format(s.arrival_angle, ".17g"), format(s.departure_angle, ".17g")])
    return buf.getvalue()


def chain_to_json(chain, segments):
    """Chain as a JSON array of indices into ``segments`` (orientation-free)."""
    keys = {}
    for k, s in enumerate(segments):
        keys[s.key] = k
        keys[s.reversed().key] = k
    return json.dumps([keys[s.key] for s in chain.segments])
