"""Psychometric curves for a dot-counting task.

An observer sees i blue dots out of 100 and reports which color has the
majority.  Under the log-likelihood-ratio cost with inverse-square
prices, accuracy climbs smoothly with the distance from 50: a sigmoid
psychometric function.  Under mutual information the probability of a
correct report is the same in every state, hard and easy alike, which is
the signature experimentalists use to reject that model.
"""

from infocost import psychometric_curve

R = 10
llr = psychometric_curve(R, 1.0, "llr")
mi = psychometric_curve(R, 1.0, "mi")

print(f"{'dots':>5} {'P(correct) llr':>15} {'P(correct) mi':>14}")
for (state, _, _, p_llr), (_, _, _, p_mi) in zip(llr, mi):
    gauge = "*" * round(800 * (p_llr - 0.5))
    print(f"{state:>5} {p_llr:>15.4f} {p_mi:>14.4f}  {gauge}")

spread_llr = max(r[3] for r in llr) - min(r[3] for r in llr)
spread_mi = max(r[3] for r in mi) - min(r[3] for r in mi)
print()
print(f"accuracy spread across states: llr {spread_llr:.4f}, mi {spread_mi:.2e}")
