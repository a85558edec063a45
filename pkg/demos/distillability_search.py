"""Random search for 1-distillability across the Werner line and two copies.

Werner states 1 + beta F on 3x3 are 1-distillable exactly when beta < -1/2.
The Watrous point eps = -0.2 is caught on a single copy; its two-copy
projection follows a closed-form recursion.
"""
import numpy as np

from entglkit import zoo
from entglkit.distill import distill_test_1copy, robustness_distill_details

for beta in np.round(np.arange(-1.0, -0.05, 0.1), 1):
    v = distill_test_1copy(zoo.werner(3, beta).state, 2000, opt_steps=50, seed=1)
    print(f"beta={beta:+.1f} detected={v.detected!s:5} min={v.min_value:+.6f}")

fp = zoo.watrous(3, -0.2)
v = distill_test_1copy(fp.state, 2000, seed=3)
print("Watrous eps=-0.2 detected on one copy:", v.detected)
out = zoo.project_two_copies(fp.state, (3, 3))
print("two-copy eps:", zoo.uuvvf_parameters(out, 3)[0], "formula:", zoo.watrous_recursion(-0.2, 3))

det = robustness_distill_details(zoo.robustness_example().state)
print("worked example: eigenvalue", det.eigenvalue, "bound", det.bound, "distillable", det.distillable)
