"""
Diffractive geodesics in a polygon
==================================

Cone points sit at the vertices.  Straight and reflected paths between them
bound the resonance-free region, and the diffraction kernel decides which
closed chains of paths actually carry energy.
"""

import math

from conres import analysis, diffraction, geodesics
from conres.scene import cone_points, parse_scene

triangle = parse_scene('{"model": "polygon", "vertices": [[0, 0], [4, 0], [0, 3]]}')
segs = geodesics.reflected_geodesics(triangle, 3)
dmax = geodesics.d_max(segs)
print(f"{len(segs)} geodesics, longest {dmax}")
print(geodesics.segments_to_csv(segs[:4]))

# free strip predicted from the longest diffractive path
print("free strip width:", analysis.conic_strip(2, dmax).width)

# the best closed chain maximises mean length per diffraction
dplus = geodesics.d_plus_max(triangle, segs)
chain = geodesics.best_closed_chain(triangle, segs)
print(f"D_plus = {dplus:.4f}, chain coefficient {diffraction.diffraction_coefficient(chain):.3e}")

# cones whose link is 2 pi / k never diffract, so no band is predicted
rho = 2 * math.pi / 3
flat = parse_scene('{"model": "polygon", "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]], '
                   f'"link_lengths": [{rho}, {rho}, {rho}, {rho}]}}')
flat_segs = geodesics.reflected_geodesics(flat, 3)
print(analysis.conic_band(2, geodesics.d_plus_max(flat, flat_segs)))
print(f"{len(diffraction.vanishing_junctions(cone_points(flat), flat_segs))} vanishing junctions")
