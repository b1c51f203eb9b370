#!/usr/bin/env python3
"""Audit the closed-form engine against brute-force oracles on random networks.

For each trial a random tiny network and evidence are drawn, then:

* sufficiency / disablement closed forms are compared against the
  definition-level counterfactual oracle,
* posteriors are compared against full joint enumeration,
* the measure desiderata (causality-zero, simplicity bound,
  consistency-at-zero, posterior recovery) are property-checked.

Prints the worst deviation per category and exits 1 if anything lands beyond
``--fail-above``. Small by design: the heavy lifting lives in the library.

Example:

    python3 scripts/crosscheck_oracle.py --trials 200 --seed 1
"""

import argparse

import numpy as np

from cfdiag.benchmark import desiderata_report
from cfdiag.inference import disease_posterior
from cfdiag.measures import rank_all_measures
from cfdiag.oracle import enumerate_joint, measure_oracle
from cfdiag.randomnets import random_evidence, random_network

DEV_FLOOR = 1e-3  # relative deviations for O(1) values, absolute near zero


def parse_args() -> argparse.Namespace:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--fail-above", type=float, default=1e-9)
    return p.parse_args()


def sample_case(rng: np.random.Generator):
    net = random_network(
        rng,
        n_risks=int(rng.integers(0, 4)),
        n_diseases=int(rng.integers(1, 5)),
        n_symptoms=int(rng.integers(1, 6)),
    )
    for _ in range(50):
        ev = random_evidence(net, rng)
        if ev.positive:
            return net, ev
    return net, random_evidence(net, rng)


def joint_posterior(table, ev, disease: str) -> float:
    num = den = 0.0
    for assign, p in table.iter_assignments():
        if any(assign[r] != v for r, v in ev.risk_map.items()):
            continue
        if any(assign[s] != 1 for s in ev.positive):
            continue
        if any(assign[s] != 0 for s in ev.negative):
            continue
        den += p
        if assign[disease]:
            num += p
    return num / den


def main() -> int:
    args = parse_args()
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0x4343]))

    worst = {"posterior": 0.0, "sufficiency": 0.0, "disablement": 0.0}
    checks = 0
    for _ in range(args.trials):
        net, ev = sample_case(rng)
        rankings = rank_all_measures(net, ev)
        table = enumerate_joint(net)
        for d in net.diseases:
            truth = {
                "posterior": joint_posterior(table, ev, d.id),
                "sufficiency": measure_oracle(net, ev, d.id, "sufficiency"),
                "disablement": measure_oracle(net, ev, d.id, "disablement"),
            }
            got = {
                "posterior": disease_posterior(net, ev, d.id),
                "sufficiency": next(
                    e.value for e in rankings["sufficiency"].entries if e.disease == d.id
                ),
                "disablement": next(
                    e.value for e in rankings["disablement"].entries if e.disease == d.id
                ),
            }
            for kind in worst:
                dev = abs(got[kind] - truth[kind]) / max(abs(truth[kind]), DEV_FLOOR)
                worst[kind] = max(worst[kind], dev)
                checks += 1

    print(f"{args.trials} trials, {checks} engine-vs-oracle comparisons")
    for kind, dev in worst.items():
        print(f"  worst {kind} deviation: {dev:.3e}")

    report = desiderata_report(args.trials, args.seed)
    print(f"desiderata on {report.trials} further nets:")
    for check in report.checks:
        print(
            f"  {check.name}: {check.violations}/{check.cases} violations, "
            f"worst {check.worst_deviation:.3e}"
        )

    ok = max(worst.values()) <= args.fail_above and report.ok
    print("OK" if ok else f"FAIL (threshold {args.fail_above:g})")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
