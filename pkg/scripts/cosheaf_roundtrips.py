"""Round trips between poset functors and spaces over the Alexandrov base,
plus the cosheaf-side checks, tallied per poset size."""

import argparse
import json
import random
from dataclasses import asdict, dataclass

from stratcat import cosheaf as cs
from stratcat import oracles as orc
from stratcat.order import random_poset


@dataclass(frozen=True)
class Config:
    seed: int = 0
    instances: int = 200
    poset_max: int = 6
    set_max: int = 4


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for k, v in asdict(Config()).items():
        ap.add_argument("--" + k.replace("_", "-"), type=int, default=v)
    a = ap.parse_args()
    cfg = Config(**{k: getattr(a, k) for k in asdict(Config())})
    rng = random.Random(cfg.seed)
    by_size: dict[int, orc.OracleReport] = {}
    for _ in range(cfg.instances):
        n = rng.randint(1, cfg.poset_max)
        p = random_poset(rng, n, rng.uniform(0.2, 0.7))
        rep = by_size.setdefault(n, orc.OracleReport(f"n{n}"))
        orc.roundtrip_checks(rep, rng, p, cfg.set_max)
        if n <= 5:
            orc.cosheaf_instance_checks(rep, rng, p, min(cfg.set_max, 3), small=n <= 4)
    named = orc.OracleReport("named")
    orc.named_model_checks(named)
    models = {
        "two_origins": cs.classify_spread(cs.two_origins_model()).to_json(),
        "crossing_lines": cs.classify_spread(cs.crossing_lines_model()).to_json(),
    }
    out = {
        "config": asdict(cfg),
        "by_size": {n: by_size[n].to_json()["checks"] for n in sorted(by_size)},
        "named": named.to_json(),
        "models": models,
    }
    print(json.dumps(out, indent=2))
    raise SystemExit(0 if named.ok and all(r.ok for r in by_size.values()) else 1)


if __name__ == "__main__":
    main()
