#!/usr/bin/env python3
"""Welge tangent construction for the 1-D waterflood deck.

Corey exponents 2/2, zero residuals, viscosity ratio 1. Prints the shock
saturation, the fractional-flow slope there and the front position (as a
fraction of the length) after 0.3 pore volumes injected.
"""
from scipy.optimize import brentq

MU_W, MU_O = 1.0, 1.0
N_W, N_O = 2.0, 2.0


def frac_flow(s):
    lw = s ** N_W / MU_W
    lo = (1.0 - s) ** N_O / MU_O
    return lw / (lw + lo)


def dfrac_flow(s, h=1e-7):
    return (frac_flow(s + h) - frac_flow(s - h)) / (2.0 * h)


def main():
    # tangent from (0, 0): f(s)/s = f'(s)
    s_f = brentq(lambda s: frac_flow(s) / s - dfrac_flow(s), 0.3, 0.99, xtol=1e-14)
    slope = frac_flow(s_f) / s_f
    print(f"s_front {s_f:.12f}")
    print(f"df/ds   {slope:.12f}")
    print(f"x_front/L at 0.3 PV {0.3 * slope:.12f}")


if __name__ == "__main__":
    main()
