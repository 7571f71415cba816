"""dt-bias of the first and second derivative weights against the exact derivative.

    python scripts/derivative_bias.py --samples 200000
"""

import argparse

from stochsol.diffusion_paths import DiffusionParams
from stochsol.initial import Sine
from stochsol.label_transport import derivative_bias, estimate_derivative


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--x0", type=float, default=0.5)
    ap.add_argument("--dts", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025, 0.0125])
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    h = Sine(1.0, 1.0, 0.0)
    params = DiffusionParams(1.0)
    print("order,dt,estimate,stderr,exact,bias")
    for order in (1, 2):
        exact = h.derivative(args.x0, order)
        for dt in args.dts:
            est = estimate_derivative(order, h, args.x0, params, dt, args.samples, args.seed)
            bias = derivative_bias(order, h, args.x0, params, dt)
            print(f"{order},{dt},{est.mean:.6f},{est.stderr:.2e},{exact:.6f},{bias:.6f}")


if __name__ == "__main__":
    main()
