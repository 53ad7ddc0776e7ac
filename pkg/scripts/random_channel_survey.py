#!/usr/bin/env python3
"""Survey random two-qubit channels: validation and separability verdicts.

Draws random CP-TP channels on a 2 x 2 bipartite system, validates the
dynamical-matrix constraints, runs the operation-level best separable
approximation, and tallies the verdicts.
"""

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from choiscope.bsa import bsa_operation, is_separable_operation
from choiscope.channels import validate
from choiscope.generators import random_cp_channel


@dataclass(frozen=True)
class SurveyConfig:
    count: int = 20
    budget: int = 100
    seed: int = 0


def run(config: SurveyConfig) -> dict:
    tally = {"separable": 0, "entangled": 0, "inconclusive": 0}
    lams = []
    for k in range(config.count):
        ch = random_cp_channel(4, 4, seed=config.seed * 10_000 + k)
        report = validate(ch)
        assert report.completely_positive and report.trace_preserving
        res = bsa_operation(ch, 2, budget=config.budget, seed=config.seed)
        verdict = is_separable_operation(ch, 2, budget=config.budget,
                                         seed=config.seed)
        tally[verdict.kind] += 1
        lams.append(res.lam)
    return {"tally": tally,
            "lambda_mean": float(np.mean(lams)),
            "lambda_min": float(np.min(lams)),
            "lambda_max": float(np.max(lams))}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--budget", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    config = SurveyConfig(count=args.count, budget=args.budget, seed=args.seed)
    out = {"config": asdict(config), **run(config)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
