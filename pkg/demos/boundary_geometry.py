"""Walk through the geometric core: boundaries built from points.

Two points pin a line in the plane; n points pin a hyperplane in n-space.
Every point in space then carries a signed distance from the boundary,
and the sign alone tells you which side it sits on.
"""

import numpy as np

from movingpoints.geometry import (
    hyperplane_from_points,
    line_from_points,
    region_sign,
    signed_displacement,
)


def main():
    print("== a line through (1, 2) and (3, 5) ==")
    h = line_from_points((1, 2), (3, 5))
    print(f"weights {h.weights}, bias {h.bias}")
    print(f"equation: {h.weights[0]:+g}x {h.weights[1]:+g}y {h.bias:+g} = 0")
    for p in [(1, 2), (3, 5), (0, 0), (2, 4)]:
        d = signed_displacement(h, p)
        print(f"  point {p}: displacement {d:+.6f}, side {region_sign(h, p):+d}")

    print()
    print("== the plane through the 3-D unit simplex corners ==")
    h3 = hyperplane_from_points([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    print(f"weights {h3.weights}, bias {h3.bias}")
    probes = [(0, 0, 0), (1, 1, 1), (1 / 3, 1 / 3, 1 / 3)]
    for p in probes:
        d = signed_displacement(h3, p)
        print(f"  point {np.round(p, 3)}: displacement {d:+.6f}, "
              f"side {region_sign(h3, p):+d}")
    print()
    print("the centroid sits on the plane, the origin and (1,1,1) sit on")
    print("opposite sides; the three signs partition space")


if __name__ == "__main__":
    main()
