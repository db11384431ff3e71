"""Revenue lost to reward misspecification, with and without robustification, against the analytic bound."""

import argparse
from dataclasses import dataclass, field
from fractions import Fraction

from delegation.generators import gen_random
from delegation.pricing import evaluate, solve_menu_k
from delegation.robust import RobustnessParams, perturb_rewards, robustify, true_response_value


@dataclass
class Config:
    deltas: list[str] = field(default_factory=lambda: ["1/10000", "1/1000", "1/100", "1/20"])
    instances: int = 40
    n: int = 3
    m: int = 3
    ell: int = 3


def run(cfg: Config) -> None:
    print(f"{'delta':>8} {'bound':>7} {'naive loss':>11} {'robust loss':>12} {'worst robust':>13}")
    for d in cfg.deltas:
        delta = Fraction(d)
        params = RobustnessParams(delta)
        naive, robust = [], []
        for s in range(cfg.instances):
            inst = gen_random(cfg.n, cfg.m, cfg.ell, 5000 + s)
            est = perturb_rewards(inst, delta, s)
            sol = solve_menu_k(est, cfg.n).solution
            planned = evaluate(est, sol)
            naive.append(planned - true_response_value(inst, sol))
            robust.append(planned - true_response_value(inst, robustify(est, sol, params)))
        mean = lambda xs: float(sum(xs, Fraction(0)) / len(xs))
        print(f"{d:>8} {float(params.loss_bound()):>7.4f} {mean(naive):>11.4f} {mean(robust):>12.4f} {float(max(robust)):>13.4f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", nargs="+", default=Config().deltas)
    ap.add_argument("--instances", type=int, default=40)
    run(Config(deltas=ap.parse_args().deltas, instances=ap.parse_args().instances))


if __name__ == "__main__":
    main()
