#!/usr/bin/env python3
"""Unbounded small-values attack demo.

Runs the hit-count distinguisher twice: on a small modulus where zero
evaluations of a(x) are frequent enough to move the count, and on a
large-modulus instance where the aggregated count barely reacts (each sample
with invertible a(alpha) contributes a constant number of hits, so only the
1/q-rare zero evaluations carry information).
"""

import argparse

from plwe_audit.campaign import config_from_dict, run_campaign
from plwe_audit.instances import USVA_INSTANCES


def run(name, doc):
    report = run_campaign(config_from_dict(doc))
    print(f"== {name}")
    print(f"   delta (Monte Carlo) = {report.plan_summary['delta']:.4f}")
    print(f"   accuracy {report.accuracy:.3f} over {report.n_trials} trials "
          f"(genuine {report.rate('plwe')}, uniform {report.rate('uniform')})")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    small_q = {
        "instance": {
            "N": 8,
            "f": [14, 2, 0, 0, 0, 0, 0, 0, 1],  # x^8 + 2x + 14, root -1 mod 13
            "q": 13,
            "sigma": 1.0,
            "truncated": False,
        },
        "attack": {"family": "unbounded_small_values", "mode": "fq",
                   "alpha": 12, "ell": 60, "delta": "mc", "trials": args.trials},
        "seed": args.seed,
    }
    run("q = 13 (counts move)", small_q)

    large_q = {
        "instance": dict(USVA_INSTANCES[1]["instance"]),
        "attack": {"family": "unbounded_small_values", "mode": "fq",
                   "alpha": USVA_INSTANCES[1]["alpha"], "ell": 50,
                   "delta": "mc", "trials": args.trials},
        "seed": args.seed,
    }
    run("q = 3677 (counts frozen at ell*(q+1)/2)", large_q)


if __name__ == "__main__":
    main()
