"""How much revenue each extra menu item buys: OPT_k / OPT_n on random instances and the single-bad family."""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from delegation.generators import gen_random, gen_single_bad
from delegation.pricing import solve_menu_k


@dataclass
class Config:
    n: int = 4
    m: int = 3
    ell: int = 4
    instances: int = 8
    seed: int = 0
    threads: int = 1


def run(cfg: Config) -> None:
    top = min(cfg.n, cfg.ell)
    ratios = {k: [] for k in range(1, top + 1)}
    for s in range(cfg.instances):
        inst = gen_random(cfg.n, cfg.m, cfg.ell, cfg.seed + s)
        vals = [solve_menu_k(inst, k, threads=cfg.threads).value for k in range(1, top + 1)]
        if vals[-1] == 0:
            continue
        for k, v in enumerate(vals, start=1):
            ratios[k].append(v / vals[-1])
    print(f"random instances n={cfg.n} m={cfg.m} ell={cfg.ell} ({len(ratios[1])} with positive OPT)")
    print(f"{'k':>3} {'k/min(n,ell)':>13} {'worst':>8} {'mean':>8}")
    for k, rs in ratios.items():
        if rs:
            mean = sum(rs, Fraction(0)) / len(rs)
            print(f"{k:>3} {k / top:>13.3f} {float(min(rs)):>8.3f} {float(mean):>8.3f}")
    print("\nsingle-bad family: OPT_k")
    for n in range(2, 6):
        inst = gen_single_bad(n)
        print(f"n={n}: " + " ".join(str(solve_menu_k(inst, k).value) for k in range(1, n + 1)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name}", type=int, default=default)
    run(Config(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
