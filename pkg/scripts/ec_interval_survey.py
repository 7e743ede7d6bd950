"""Survey the certified EC interval [FC, upper] over a corpus.

Reports how often the interval closes, the largest gap, and how far the
alternating search gets from a deliberately poor all-ones start.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass
from fractions import Fraction

from ecquery import serialize
from ecquery.ec import WeightScheme, check_ec_feasible, ec_alternating_search, ec_bounds
from ecquery.harness import build_corpus
from ecquery.measures import certificate_complexity


@dataclass
class SurveyConfig:
    corpus: str = "all-n3,families,random"
    rounds: int = 4
    max_n: int = 6
    out: str | None = None


def survey(cfg: SurveyConfig) -> dict:
    rows = []
    for label, f in build_corpus(cfg.corpus):
        if f.n > cfg.max_n or f.is_constant():
            continue
        b = ec_bounds(f, cfg.rounds)
        C = certificate_complexity(f)[0]
        ones = WeightScheme(f.n, ((Fraction(1),) * f.n,) * f.size)
        alt = None
        if check_ec_feasible(f, ones) is None:
            alt = ec_alternating_search(f, ones, cfg.rounds).value
        rows.append(
            {
                "label": label,
                "n": f.n,
                "FC": b.lower,
                "upper": b.upper,
                "C": C,
                "method": b.upper_method,
                "tight": float(b.upper) == float(b.lower),
                "alt_from_ones": alt,
            }
        )
    gaps = [float(r["upper"]) - float(r["FC"]) for r in rows]
    return {
        "config": asdict(cfg),
        "functions": len(rows),
        "tight": sum(r["tight"] for r in rows),
        "max_gap": max(gaps, default=0.0),
        "fc_below_c": sum(r["FC"] < r["C"] for r in rows),
        "alt_reaches_fc": sum(r["alt_from_ones"] == r["FC"] for r in rows),
        "alt_started": sum(r["alt_from_ones"] is not None for r in rows),
        "rows": rows,
    }


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(SurveyConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(default) if default is not None else str, default=default)
    cfg = SurveyConfig(**vars(p.parse_args()))
    res = survey(cfg)
    print(f"{res['functions']} functions, {res['tight']} tight intervals, max gap {res['max_gap']:.6g}, "
          f"FC < C on {res['fc_below_c']}")
    print(f"alternating search from all-ones reached FC on {res['alt_reaches_fc']}/{res['alt_started']}")
    for r in res["rows"]:
        if not r["tight"]:
            print(f"  {r['label']}: [{r['FC']}, {r['upper']}] C={r['C']} via {r['method']}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(serialize.to_jsonable(res), fh, indent=2)


if __name__ == "__main__":
    main()
