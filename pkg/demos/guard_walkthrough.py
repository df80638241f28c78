"""Show the proximity guard stopping moving points from collapsing.

If two moving points drift within alpha of each other, a proposed move is
stripped of its component toward the neighbor; a move that already points
away passes through untouched. Collapsing points would degenerate the
boundary (two coincident points stop defining a line), which is the
failure mode the guard exists to prevent.
"""

import numpy as np

from movingpoints.mpa import MpaConfig, MpaModel, overfit_guard


def show(label, t_in, t_out):
    changed = "corrected" if t_out is not t_in else "untouched"
    print(f"  {label}: proposed {t_in} -> {np.round(t_out, 12)} ({changed})")


def main():
    # two moving points only 1.0 apart, guard threshold alpha = 2.0
    pts = np.array([[0.0, 0.0], [1.0, 0.0]])
    model = MpaModel(pts, {0: -1, 1: 1}, alpha=2.0, config=MpaConfig())
    print(f"moving points {pts.tolist()}, separation 1.0, alpha {model.alpha}")
    print()

    print("moves proposed for the point at (0, 0):")
    toward = np.array([0.5, 0.5])       # closes the gap -> corrected
    away = np.array([-0.5, 0.5])        # opens the gap  -> untouched
    head_on = np.array([0.9, 0.0])      # straight at the neighbor -> zeroed
    show("diagonal approach", toward, overfit_guard(model, 0, toward))
    show("diagonal retreat ", away, overfit_guard(model, 0, away))
    show("head-on approach ", head_on, overfit_guard(model, 0, head_on))
    print()

    r_hat = (pts[1] - pts[0]) / np.linalg.norm(pts[1] - pts[0])
    corrected = overfit_guard(model, 0, toward)
    print(f"component along the approach direction after correction: "
          f"{float(corrected @ r_hat):.2e}")
    print("the guard removes approach exactly; sideways motion survives")


if __name__ == "__main__":
    main()
