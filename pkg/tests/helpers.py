"""Shared oracles for the test suite.

The geometry tests need 2-jets whose derivatives were produced by something
other than the library itself; sympy differentiates explicit chart formulas
and the lambdified results are evaluated at batches of interior points.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

from paneitzlab.geometry import ImmersionJet


def chart_jet(components, variables, points) -> ImmersionJet:
    """Exact 2-jet of a symbolic immersion chart.

    components: sequence of sympy expressions y_a(x_1..x_n)
    variables:  the chart coordinates, in slot order
    points:     (P, n) array of evaluation points
    """
    points = np.asarray(points, dtype=float)
    n = len(variables)
    N = len(components)
    assert points.shape[-1] == n

    y_f = sp.lambdify(variables, components, "numpy")
    dy_exprs = [[sp.diff(c, v) for v in variables] for c in components]
    dy_f = sp.lambdify(variables, dy_exprs, "numpy")
    d2y_exprs = [[[sp.diff(c, u, v) for v in variables] for u in variables]
                 for c in components]
    d2y_f = sp.lambdify(variables, d2y_exprs, "numpy")

    cols = [points[..., i] for i in range(n)]
    P = points.shape[:-1]
    y = np.empty(P + (N,))
    dy = np.empty(P + (N, n))
    d2y = np.empty(P + (N, n, n))
    y_val = y_f(*cols)
    dy_val = dy_f(*cols)
    d2y_val = d2y_f(*cols)
    for a in range(N):
        y[..., a] = y_val[a]
        for i in range(n):
            dy[..., a, i] = dy_val[a][i]
            for j in range(n):
                d2y[..., a, i, j] = d2y_val[a][i][j]
    return ImmersionJet(y=y, dy=dy, d2y=d2y)


def hypersphere_chart(n: int, r: float = 1.0, prefix: str = "phi"):
    """Hyperspherical chart of S^n(r) in R^{n+1}: (components, variables).

    Distinct prefixes keep variables disjoint when charts are multiplied.
    """
    phis = sp.symbols(f"{prefix}0:{n}", real=True)
    rr = sp.Rational(r) if float(r).is_integer() else sp.Float(r, 30)
    comps = []
    for a in range(n + 1):
        term = rr
        for i in range(min(a, n)):
            term *= sp.sin(phis[i])
        if a < n:
            term *= sp.cos(phis[a])
        comps.append(sp.expand_trig(term))
    return comps, list(phis)


def product_chart(factors):
    """Concatenate factor charts into a product immersion chart.

    factors: list of (components, variables) pairs with disjoint variables.
    """
    comps, variables = [], []
    for fc, fv in factors:
        comps.extend(fc)
        variables.extend(fv)
    return comps, variables


def interior_points(n: int, count: int, rng, low: float = 0.4, high: float = 2.2):
    """Chart points away from the polar degeneracies of hyperspherical charts."""
    return rng.uniform(low, high, size=(count, n))
