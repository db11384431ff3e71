"""Randomized vs deterministic menus on the gap family and on random instances."""

import argparse
import time
from dataclasses import dataclass, field

from delegation.generators import gen_random, gen_randomized_gap
from delegation.pricing import solve_menu_k
from delegation.randomized import solve_randomized_lp


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [4, 8, 12])
    exact_det_up_to: int = 4  # deterministic optimum is exponential in n
    random_instances: int = 30


def run(cfg: Config) -> None:
    print(f"{'n':>3} {'LP value':>12} {'det bound':>10} {'ratio':>7} {'det OPT':>10} {'secs':>6}")
    for n in cfg.sizes:
        inst = gen_randomized_gap(n)
        total = sum(2 ** (k + 1) for k in range(1, n // 2 + 1))
        start = time.perf_counter()
        lp = solve_randomized_lp(inst).value
        secs = time.perf_counter() - start
        bound = 8 / total
        det = f"{float(solve_menu_k(inst, n).value):.5f}" if n <= cfg.exact_det_up_to else "-"
        print(f"{n:>3} {float(lp):>12.6f} {bound:>10.6f} {float(lp) / bound:>7.3f} {det:>10} {secs:>6.2f}")
    gaps = []
    for s in range(cfg.random_instances):
        inst = gen_random(3, 3, 3, s)
        lp = solve_randomized_lp(inst).value
        det = solve_menu_k(inst, 3).value
        gaps.append(lp - det)
    strict = sum(1 for g in gaps if g > 0)
    print(f"\nrandom 3x3x3: randomized strictly better on {strict}/{len(gaps)}, max gain {float(max(gaps)):.4f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 12])
    ap.add_argument("--exact-det-up-to", type=int, default=4)
    ap.add_argument("--random-instances", type=int, default=30)
    run(Config(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
