"""Run configurations shared by the oracle runner, the CLI and the scripts."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 0
    pairs: int = 1000  # braid pairs per strand count
    n_max: int = 5  # largest n for the spn and poset suites
    points_max: int = 5  # largest base poset for the cosheaf suite
    per_poset: int = 2  # random functors per base poset
    trials: int = 200  # sampled morphism triples in the spn suite

    @classmethod
    def add_arguments(cls, ap: argparse.ArgumentParser) -> None:
        for f in fields(cls):
            ap.add_argument("--" + f.name.replace("_", "-"), type=int, default=f.default)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> OracleConfig:
        return cls(**{f.name: getattr(ns, f.name) for f in fields(cls)})
