"""Small volume experiment: how often is a random NPT state found distillable?

Uses 500 states per dimension so it finishes in about a minute. The
acceptance suite runs the larger version.
"""
from entglkit.montecarlo import volume_experiment

for d in (3, 4, 5):
    r = volume_experiment(d, n_states=500, n_tests=300, opt_steps=10 * d, seed=7)
    print(
        f"d={d}: NPT {r.n_npt}/{r.n_states}, detected on first test {r.first_test_fraction:.3f}, "
        f"still undetected {r.frac_npt_undetected:.3f} ({r.wall_time:.1f}s)"
    )
