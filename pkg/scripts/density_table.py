"""Density table for the avoidance set and an above-threshold set across decades of N.

For alpha = sqrt 2 and f(x) = x^2 the avoidance set should sit at density
1/2 - 1/(2 sqrt 2) with no hits, while J = (0, 1/5) keeps collecting hits.
"""
import argparse
from fractions import Fraction

from modbm.beatty import PolynomialIntCoeffs
from modbm.density import ScanConfig, hegyvari_avoidance_set, theorem1_hit_scan, threshold
from modbm.exactnum import parse_constant
from modbm.torus import make


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alpha", default="quad:0,1,2,1")
    ap.add_argument("--poly", default="poly:0,0,1")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--J-right", default="1/5", help="J = (0, J_RIGHT)")
    ap.add_argument("--max-exp", type=int, default=4)
    args = ap.parse_args(argv)

    alpha = parse_constant(args.alpha)
    f = PolynomialIntCoeffs.parse(args.poly)
    J = make([(0, Fraction(args.J_right))])
    cfg = ScanConfig(spot_checks=2000)
    print(f"threshold 1/k - 1/(k alpha) = {float(threshold(alpha, args.k)):.6f}, mu(J) = {float(J.measure):.6f}")
    print(f"{'N':>8} {'avoid_size':>10} {'avoid_dens':>10} {'avoid_hits':>10} {'J_size':>8} {'J_hits':>8}")
    for e in range(2, args.max_exp + 1):
        N = 10 ** e
        avoid, members = hegyvari_avoidance_set(alpha, f, args.k, N, cfg)
        hits = theorem1_hit_scan(alpha, f, args.k, J, N, cfg)
        print(f"{N:>8} {len(members):>10} {len(members) / N:>10.5f} {avoid.hit_count:>10} "
              f"{hits.set_size:>8} {hits.hit_count:>8}")


if __name__ == "__main__":
    main()
