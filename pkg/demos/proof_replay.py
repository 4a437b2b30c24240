"""Replaying the trial-function proof, symbolically and on a grid.

The analytic route evaluates every inequality of the chain in closed form on
a round sphere, where each step is saturated.  The numerical route re-runs
the same chain with discrete eigenfunctions on a flat T^4 grid and shows the
slack each step actually has.
"""

from paneitzlab.catalog import round_sphere
from paneitzlab.coefficients import paneitz_coefficients
from paneitzlab.discrete import build_bundle
from paneitzlab.eigensolve import spectrum
from paneitzlab.fourier import TorusGrid, clifford_torus
from paneitzlab.replay import replay_proof, replay_proof_analytic


def show(rep) -> None:
    print(f"{rep.label}  [{rep.route}]")
    for step in rep.steps:
        print(f"  {step.name:28s} {step.kind:10s} slack = {step.slack:+.3e}")
    final = rep.step("final_bound")
    print(f"  final: {final.lhs:.12g} <= {final.rhs:.12g}"
          f"   (worst slack {rep.worst_slack:+.3e}, ok={rep.ok})")
    print()


def main() -> None:
    show(replay_proof_analytic("thm_1_1", round_sphere(4, 1.0)))

    imm = clifford_torus((1.0,) * 4)
    grid = TorusGrid((8,) * 4)
    bundle = build_bundle(imm, grid)
    result = spectrum(imm, grid, paneitz_coefficients(4), 9, bundle=bundle,
                      solver="lanczos", seed=3)
    show(replay_proof("thm_1_1", result, bundle))


if __name__ == "__main__":
    main()
