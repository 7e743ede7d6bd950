"""Exact distributional error of the corruption walk across eps and product distributions.

For each function and eps, prints the worst error over the sampled
distributions next to the 4*eps guarantee, plus the iteration histogram.
"""

from __future__ import annotations

import argparse
import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from ecquery import serialize
from ecquery.boolfn import family
from ecquery.distmeasures import random_product, uniform
from ecquery.measures import block_sensitivity
from ecquery.simulators import exact_distributional_error


@dataclass
class ProfileConfig:
    functions: list[str] = field(default_factory=lambda: ["AND:2", "OR:3", "MAJ:3", "MAJ:5", "TRIBES:2:2", "TRIBES:3:2"])
    eps: list[str] = field(default_factory=lambda: ["1/32", "1/16", "1/8", "1/4"])
    distributions: int = 10
    seed: int = 7
    out: str | None = None


def profile(cfg: ProfileConfig) -> list[dict]:
    rows = []
    for spec in cfg.functions:
        name, *params = spec.split(":")
        f = family(name, *map(int, params))
        bs = block_sensitivity(f)[0]
        rng = random.Random(f"{cfg.seed}:{spec}")
        mus = [uniform(f.n)] + [random_product(f.n, rng) for _ in range(cfg.distributions)]
        for e in map(Fraction, cfg.eps):
            worst, hist, max_q = Fraction(0), {}, 0
            for mu in mus:
                r = exact_distributional_error(f, mu, e)
                worst = max(worst, r.error)
                max_q = max(max_q, r.max_queries)
                for k, v in r.iteration_histogram.items():
                    hist[k] = hist.get(k, 0) + v
            rows.append(
                {
                    "function": spec,
                    "eps": e,
                    "worst_error": worst,
                    "bound": 4 * e,
                    "bs": bs,
                    "max_queries": max_q,
                    "iterations": dict(sorted(hist.items())),
                }
            )
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    d = ProfileConfig()
    p.add_argument("--functions", nargs="+", default=d.functions)
    p.add_argument("--eps", nargs="+", default=d.eps)
    p.add_argument("--distributions", type=int, default=d.distributions)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--out")
    cfg = ProfileConfig(**vars(p.parse_args()))
    rows = profile(cfg)
    print(f"{'function':12s} {'eps':>6s} {'worst err':>12s} {'4 eps':>6s} {'max q':>5s}  iterations")
    for r in rows:
        print(
            f"{r['function']:12s} {str(r['eps']):>6s} {float(r['worst_error']):12.6f} "
            f"{float(r['bound']):6.3f} {r['max_queries']:5d}  {r['iterations']}"
        )
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(serialize.to_jsonable({"config": asdict(cfg), "rows": rows}), fh, indent=2)


if __name__ == "__main__":
    main()
