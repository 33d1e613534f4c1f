"""Garside equality against the free-group action, per strand count, with
timings; then parabolic membership against strand deletion."""

import argparse
import json
import time
from dataclasses import asdict, dataclass

from stratcat.oracles import braid_word_problem, parabolic_membership


@dataclass(frozen=True)
class Config:
    seed: int = 0
    pairs: int = 2000
    max_len: int = 30
    n_max: int = 6
    samples: int = 500


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for k, v in asdict(Config()).items():
        ap.add_argument("--" + k.replace("_", "-"), type=int, default=v)
    a = ap.parse_args()
    cfg = Config(**{k: getattr(a, k) for k in asdict(Config())})
    rows = []
    for n in range(3, cfg.n_max + 1):
        t0 = time.perf_counter()
        rep = braid_word_problem(cfg.seed + n, cfg.pairs, ns=(n,), max_len=cfg.max_len)
        passed, total = rep.checks[f"word_problem.n{n}"]
        rows.append({"n": n, "agree": passed, "total": total, "seconds": round(time.perf_counter() - t0, 3)})
    par = parabolic_membership(cfg.seed, cfg.samples, ns=tuple(range(2, cfg.n_max + 1)))
    out = {"config": asdict(cfg), "word_problem": rows, "parabolic": par.to_json()}
    print(json.dumps(out, indent=2))
    raise SystemExit(0 if par.ok and all(r["agree"] == r["total"] for r in rows) else 1)


if __name__ == "__main__":
    main()
