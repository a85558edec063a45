"""Distillation protocols on Bell-diagonal states and pure-state conversion."""
from entglkit.protocol import (
    breeding_yield,
    max_conversion_prob,
    optimal_concentration,
    qpa_iterate,
    recurrence_iterate,
)

traj = recurrence_iterate(0.65)
print(f"recurrence from 0.65 reaches {traj[-1]:.9f} in {len(traj) - 1} rounds")

for row in qpa_iterate([0.6, 0.2, 0.15, 0.05], 5):
    print("QPA", " ".join(f"{x:.6f}" for x in row))

for p in ([0.9, 0.05, 0.03, 0.02], [0.7, 0.1, 0.1, 0.1]):
    y = breeding_yield(p)
    print(f"breeding yield for {p}: raw {y.raw:+.4f}, clamped {y.clamped:.4f}")

print("P(0.5,0.3,0.2 -> maximally entangled qutrit) =", max_conversion_prob([0.5, 0.3, 0.2], [1 / 3] * 3))
probs, e = optimal_concentration([0.5, 0.3, 0.2])
print("concentration outcome probabilities", probs, "expected ebits", e)
