"""Presented skeleta of the fundamental category of RP^n and the vertex
groups of their localizations, for a range of n."""

import argparse
import json
import time
from dataclasses import asdict, dataclass

from stratcat.category import hom_classes, localize_vertex_group, rp_skeleton
from stratcat.groups import Inconclusive, abelianization, coset_enumerate


@dataclass(frozen=True)
class Config:
    n_min: int = 1
    n_max: int = 6
    bound: int = 1000


def row(n: int, bound: int) -> dict:
    t0 = time.perf_counter()
    c = rp_skeleton(n)
    homs = {len(hom_classes(c, i, j)) for i in range(n + 1) for j in range(i + 1, n + 1)}
    g = localize_vertex_group(c)
    try:
        order = coset_enumerate(g, bound)
    except Inconclusive:
        order = None
    return {
        "n": n,
        "arrows": len(c.arrows),
        "relations": len(c.relations),
        "hom_class_counts": sorted(homs),
        "order": order,
        "abelianization": abelianization(g).to_json(),
        "seconds": round(time.perf_counter() - t0, 4),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for k, v in asdict(Config()).items():
        ap.add_argument("--" + k.replace("_", "-"), type=int, default=v)
    cfg = Config(**{k: getattr(ap.parse_args(), k) for k in asdict(Config())})
    rows = [row(n, cfg.bound) for n in range(cfg.n_min, cfg.n_max + 1)]
    print(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2))


if __name__ == "__main__":
    main()
