"""Solve and verify seeded random instances; print p, bound and timing per instance as CSV."""
import argparse
import csv
import random
import sys
import time

from modbm.witness import FAITHFUL, TIGHT, WitnessConfig, find_witness, random_instance, verify_trace


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--compare-tight", action="store_true", help="also report the smallest working prime")
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["i", "k", "A", "B", "delta", "prime_bound", "p_faithful", "p_tight", "verified", "seconds"])
    for i in range(args.count):
        A, B, k = random_instance(rng)
        t0 = time.perf_counter()
        tr = find_witness(A, B, k, WitnessConfig(mode=FAITHFUL))
        ok = bool(verify_trace(tr, A, B, k))
        p_tight = ""
        if args.compare_tight:
            p_tight = find_witness(A, B, k, WitnessConfig(mode=TIGHT)).p
        w.writerow([i, k, A.to_text(), B.to_text(), tr.delta, f"{float(tr.prime_bound):.1f}", tr.p, p_tight,
                    ok, f"{time.perf_counter() - t0:.3f}"])


if __name__ == "__main__":
    main()
