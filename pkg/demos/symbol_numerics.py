"""The symbol a(x)|xi|^beta(x) three ways.

C_alpha from quadrature against its Gamma closed form, the symbol against a
direct Fourier integral of the Levy measure, and the generator applied to a
plane wave cos(xi x), which it scales by -q(x, xi).

    python3 demos/symbol_numerics.py
"""

import math

from stablelike.core import rational_bump
from stablelike.symbol import (apply_generator, c_alpha, c_alpha_closed_form, symbol,
                               symbol_fourier_check)

print("alpha   C_alpha (quad)        closed form")
for a in (0.3, 0.9, 1.5, 1.9):
    print(f"{a:5.1f}  {c_alpha(a):.15f}  {c_alpha_closed_form(a):.15f}")

beta = rational_bump()
x, xi = 0.5, 2.0
q = symbol([x], [xi], beta).value
print(f"\nq(0.5, 2) = {q:.10f}, Fourier gap {symbol_fourier_check([x], xi, beta):.1e}")

f = lambda y: math.cos(xi * y[0])
grad = lambda y: [-xi * math.sin(xi * y[0])]
Lf = apply_generator(f, [x], beta, grad=grad)
print(f"L cos(2x) at 0.5 = {Lf:.8f}, -q cos(1) = {-q * f([x]):.8f}")
