"""Closed-form fourth-order spectra of round spheres.

Prints the coefficient rationals, the Q-curvature value and the first few
eigenvalue lines of the Paneitz operator on S^n(r) for a few dimensions.
"""

import argparse
from fractions import Fraction

from paneitzlab.catalog import model_constants, paneitz_spectrum, round_sphere
from paneitzlab.coefficients import paneitz_coefficients


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--lines", type=int, default=5)
    args = ap.parse_args()

    for n in (3, 4, 5, 6, 7):
        c = paneitz_coefficients(n)
        m = round_sphere(n, args.radius)
        consts = model_constants(m)
        spec = paneitz_spectrum(m, args.lines)
        print(f"S^{n}(r={args.radius:g})   a_n={Fraction(c.a)}  b_n={Fraction(c.b)}"
              f"  (n-4)/2={Fraction(c.q_factor)}")
        print(f"  R = {consts.scalar:.12g}   Q = {consts.q:.12g}   "
              f"vol = {consts.volume:.12g}")
        for line in spec.lines:
            print(f"    lambda = {line.value:.12g}   multiplicity {line.multiplicity}")
        print()


if __name__ == "__main__":
    main()
