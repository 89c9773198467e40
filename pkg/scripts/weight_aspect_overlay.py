#!/usr/bin/env python3
"""Weight-aspect experiment: empirical harmonic murmuration vs the
closed-form density, for a ladder of central weights.

Writes one CSV and one overlay SVG per K under --out-dir and prints the
peak offset and normalized L2 residual per rung; the residual should
shrink as K doubles.
"""

import argparse
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from murmur import arith, cli, densities, frame, petersson, specfn


@dataclass
class Config:
    weights: tuple = (40.0, 80.0, 160.0)
    y_min: float = 0.004
    y_max: float = 0.055
    sign: int = 1
    phi_a: float = 1.0
    phi_b: float = 2.0
    out_dir: Path = Path("out/weight_aspect")


def run(cfg: Config) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    phi = specfn.bump(cfg.phi_a, cfg.phi_b)
    limit = int(4 * math.pi * math.sqrt(cfg.y_max) * (max(cfg.weights) - 1)) + 64
    tables = arith.sieve(max(4096, limit))
    for K in cfg.weights:
        X = (K - 1.0) ** 2
        primes = [int(q) for q in tables.primes if cfg.y_min * X <= q <= cfg.y_max * X]
        series = petersson.harmonic_series(K, primes, phi, cfg.sign, tables=tables)
        ref = np.array(
            [densities.harmonic_murmuration_density(float(y), phi, cfg.sign, tables) for y in series.y]
        )
        support = ref != 0.0
        peak_err = abs(
            frame.peak_location(series.y, series.value) - frame.peak_location(series.y, ref)
        ) / abs(frame.peak_location(series.y, ref))
        resid = frame.shape_residual(series.value[support], ref[support])
        stem = cfg.out_dir / f"K{int(K)}"
        cli.emit_csv(
            f"{stem}.csv",
            [(float(y), float(v), int(c)) for y, v, c in zip(series.y, series.value, series.count)],
            "y,value,count",
        )
        cli.emit_svg(
            f"{stem}.svg",
            [
                ("empirical", list(map(float, series.y)), list(map(float, series.value))),
                ("density", list(map(float, series.y)), list(map(float, ref))),
            ],
            title=f"weight aspect K={K:g}, sign {cfg.sign:+d}",
        )
        print(f"K={K:6g}: {len(primes):4d} primes, peak offset {100 * peak_err:5.2f}%, L2 residual {resid:.4f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--weights", nargs="+", type=float, default=[40.0, 80.0, 160.0])
    parser.add_argument("--sign", type=int, choices=(1, -1), default=1)
    parser.add_argument("--out-dir", type=Path, default=Path("out/weight_aspect"))
    args = parser.parse_args()
    run(Config(weights=tuple(args.weights), sign=args.sign, out_dir=args.out_dir))


if __name__ == "__main__":
    main()
