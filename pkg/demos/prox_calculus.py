"""Tour of the proximal calculus: closed-form proxes, conjugates through the
Moreau decomposition, and the projections every solver step is built from.

Run:  python demos/prox_calculus.py
"""
import numpy as np

from proxsplit import (
    BallIndicator,
    BoxIndicator,
    EuclideanNorm,
    LineIndicator,
    WeightedL1,
    distance_to_set,
    project_pixel_discs,
    prox,
    prox_conjugate,
)

print("=== projections are proxes of indicators ===")
ball = BallIndicator(center=(5.0, 0.0), radius=2.0)
print("project (0,0) onto the disc around (5,0):", prox(ball, 1.0, [0.0, 0.0]))

box = BoxIndicator([0.0, 0.0], [1.0, 1.0])
print("clamp (-1, 0.5) into the unit box:      ", prox(box, 1.0, [-1.0, 0.5]))

line = LineIndicator(base=(1.0, 6.0), direction=(1.0, 0.0))
print("drop (-1, 3) onto the horizontal line:  ", prox(line, 1.0, [-1.0, 3.0]))

print()
print("=== soft thresholding: the prox of the l1 norm ===")
l1 = WeightedL1(1.0)
x = np.array([2.0, -0.5, 0.9])
print(f"prox of ||.||_1 at {x} with gamma=1:", prox(l1, 1.0, x))

print()
print("=== conjugates come free via the Moreau decomposition ===")
norm = EuclideanNorm()
# the conjugate of the Euclidean norm is the unit-ball indicator, so its
# prox is the unit-ball projection
print("prox of the norm's conjugate at (3,0):", prox_conjugate(norm, 1.0, [3.0, 0.0]))

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    gamma = rng.uniform(0.1, 10.0)
    x = rng.standard_normal(3) * 3.0
    recon = prox(l1, gamma, x) + gamma * prox_conjugate(l1, 1.0 / gamma, x / gamma)
    worst = max(worst, np.abs(recon - x).max())
print(f"Moreau reconstruction residual over 1000 random points: {worst:.2e}")

print()
print("=== distances realized by projection ===")
print("distance from the origin to the shifted disc:", distance_to_set(ball, [0.0, 0.0]))

print()
print("=== the per-pixel disc projection used by the TV dual ===")
p, q = project_pixel_discs(1.0, [3.0, 0.3], [4.0, 0.2])
print("pairs (3,4) and (0.3,0.2) projected onto unit discs:", list(zip(p, q)))
