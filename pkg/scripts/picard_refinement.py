"""Grid refinement and iterate convergence of the Picard oracle for Z.

    python scripts/picard_refinement.py --noise-seed 7 --lam 0.25
"""

import argparse
import math

from stochsol.initial import ExpOf, Sine
from stochsol.noise_field import GridSpec, build_realization
from stochsol.oracles import PicardEquation, picard_iterate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--noise-seed", type=int, default=7)
    ap.add_argument("--lam", type=float, default=0.25)
    ap.add_argument("--t", type=float, default=0.25)
    ap.add_argument("--x", type=float, default=1.0)
    ap.add_argument("--iters", type=int, default=8)
    ap.add_argument("--refine", type=int, nargs="+", default=[2, 4, 8, 16])
    args = ap.parse_args()

    noise = build_realization(GridSpec(0.0, 2 * math.pi, 8, 1.0, 16), args.noise_seed)
    ic = ExpOf(args.lam, Sine(1.0, 1.0, 0.0))
    print("refine,value,last_increment")
    for r in args.refine:
        sol = picard_iterate(PicardEquation.Z, noise, args.iters, ic, args.t, lam=args.lam, refine_x=r, refine_t=r)
        print(f"{r},{sol.at(args.x):.8f},{sol.meta['sup_diffs'][-1]:.2e}", flush=True)


if __name__ == "__main__":
    main()
