"""Repeat Monte Carlo runs over many seeds and sizes; count runs with max|z| >= 5."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from fractions import Fraction

from bellmodels.kupczynski import (
    evaluate_model1,
    evaluate_model3,
    loophole_demo,
    postselect,
    universal_construct,
)
from bellmodels.mcsim import compare, estimate, sample_trials
from bellmodels.probcore import CondFamily, JointDist, SettingsDist, compose, factor


@dataclass
class ConsistencyConfig:
    seeds: int = 100
    sizes: tuple[int, ...] = field(default=(1_000, 10_000, 100_000))
    threshold: float = 5.0


def pr_box() -> CondFamily:
    half = Fraction(1, 2)
    same = {(1, 1): half, (-1, -1): half, (1, -1): 0, (-1, 1): 0}
    diff = {(1, 1): 0, (-1, -1): 0, (1, -1): half, (-1, 1): half}
    return CondFamily({(1, 1): same, (1, 2): same, (2, 1): same, (2, 2): diff})


def models() -> dict[str, tuple[JointDist, bool]]:
    return {
        "uniform": (JointDist.uniform(), False),
        "pr-constructed": (compose(SettingsDist.uniform(), evaluate_model3(universal_construct(pr_box()))), False),
        "loophole-postselected": (evaluate_model1(loophole_demo(), SettingsDist.uniform()), True),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=ConsistencyConfig.seeds)
    cfg = ConsistencyConfig(seeds=parser.parse_args().seeds)
    for name, (joint, post) in models().items():
        exact = postselect(joint).conditional_family if post else factor(joint)[1]
        failures, worst = 0, 0.0
        for seed in range(cfg.seeds):
            for n in cfg.sizes:
                trials = sample_trials(joint, n, seed)
                z = compare(estimate(trials.postselected() if post else trials), exact).max_abs_z
                worst = max(worst, z)
                failures += z >= cfg.threshold
        print(f"{name}: {failures}/{cfg.seeds * len(cfg.sizes)} runs over threshold, worst max|z| = {worst:.3f}")


if __name__ == "__main__":
    main()
