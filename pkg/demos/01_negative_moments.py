"""
Negative moments of symmetric stable laws
=========================================

E|X|^beta for a standard SaS variable, once from the closed form in Gamma
functions and once by integrating the characteristic function.  Then the
map alpha -> h(alpha) that the alpha estimator inverts.
"""

import numpy as np

from stablehurst import BetaPair, h_uv, neg_moment_closed_form, neg_moment_via_cf, phi_uv

print(f"{'alpha':>6} {'beta':>6} {'closed form':>14} {'cf integral':>14} {'rel diff':>9}")
for alpha in (0.8, 1.0, 1.5, 2.0):
    for beta in (-0.45, -0.1):
        a = neg_moment_closed_form(alpha, beta)
        b = neg_moment_via_cf(alpha, beta)
        print(f"{alpha:6.2f} {beta:6.2f} {a:14.10f} {b:14.10f} {abs(a - b) / a:9.1e}")

# h is negative and increasing; phi undoes it
uv = BetaPair(-0.4, -0.1).uv
alphas = np.linspace(0.2, 4.0, 8)
hs = [h_uv(uv, a) for a in alphas]
back = [phi_uv(uv, y) for y in hs]
print()
print("alpha   h(alpha)        phi(h(alpha))")
for a, y, b in zip(alphas, hs, back):
    print(f"{a:5.2f}  {y:+.8f}  {b:.12f}")
