"""Table of refinement pairs P <= Q: number of double cosets (by pattern and
by brute force), codimensions and branched-cover fibre sizes."""

import argparse
import json
from dataclasses import asdict, dataclass

from stratcat import symprod as sp


@dataclass(frozen=True)
class Config:
    n: int = 5
    brute_force: bool = True


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--no-brute-force", dest="brute_force", action="store_false")
    a = ap.parse_args()
    cfg = Config(a.n, a.brute_force and a.n <= sp.BRUTE_FORCE_LIMIT)
    cover = sp.branched_cover(cfg.n) if cfg.n <= sp.BRUTE_FORCE_LIMIT else None
    strata = [
        {
            "P": str(p),
            "codimension": sp.stratum_info(p).codimension,
            "fibre": len(cover.fibre(p)) if cover else None,
        }
        for p in sp.partitions(cfg.n)
    ]
    pairs = []
    for p in sp.partitions(cfg.n):
        for q in sp.partitions(cfg.n):
            if p == q or not sp.refines(p, q):
                continue
            pats = sp.double_cosets(p, q)
            entry = {"P": str(p), "Q": str(q), "patterns": [list(map(list, d.splits)) for d in pats]}
            if cfg.brute_force:
                entry["brute_force"] = len(sp.brute_force_double_cosets(p, q))
            pairs.append(entry)
    print(json.dumps({"config": asdict(cfg), "strata": strata, "pairs": pairs}, indent=2))


if __name__ == "__main__":
    main()
