"""Wall-clock comparison of the reach-grid sampler against the Tulleken baseline.

Each configuration gets ``W`` untimed warm-ups, then ``R`` timed runs per
algorithm with seeds ``0..R-1``.  The two algorithms are interleaved run by
run so slow drift on the machine hits both equally.  Times are end-to-end
(grid allocation included).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .radius import ParametricRadiusField
from .sampler import generate_anisotropic

TABLE_GAMMAS = (50, 75, 100, 125, 150)
TABLE_NUS = ((3, 1), (1, 1), (1, 3))
WARMUP_SEED = 1_000_000


@dataclass
class BenchRecord:
    algorithm: str
    gamma: float
    nu: tuple
    median: float
    min: float
    points: int
    seeds: tuple
    times: tuple


@dataclass
class BenchReport:
    records: list[BenchRecord]
    reps: int
    warmups: int

    def get(self, algorithm: str, gamma: float, nu) -> BenchRecord:
        nu = tuple(float(v) for v in nu)
        for r in self.records:
            if r.algorithm == algorithm and r.gamma == gamma and r.nu == nu:
                return r
        raise KeyError((algorithm, gamma, nu))

    def speedup(self, gamma: float, nu) -> float:
        """Tulleken median over fast median."""
        return self.get("tulleken", gamma, nu).median / self.get("fast", gamma, nu).median

    def configs(self) -> list[tuple[float, tuple]]:
        seen = []
        for r in self.records:
            if (r.gamma, r.nu) not in seen:
                seen.append((r.gamma, r.nu))
        return seen

    def mean_speedup(self) -> float:
        return float(np.mean([self.speedup(g, nu) for g, nu in self.configs()]))


def run_bench(gammas=TABLE_GAMMAS, nus=TABLE_NUS, reps: int = 11, warmups: int = 3,
              algorithms=("fast", "tulleken"), k: int | None = None, offset: float = 0.15,
              progress=None) -> BenchReport:
    if reps < 5:
        raise ValueError(f"need at least 5 repetitions, got {reps}")
    if warmups < 2:
        raise ValueError(f"need at least 2 warm-ups, got {warmups}")
    records = []
    for nu in nus:
        nu = tuple(float(v) for v in nu)
        for g in gammas:
            field = ParametricRadiusField(g, offset)
            for w in range(warmups):
                for alg in algorithms:
                    generate_anisotropic(field, nu, k, seed=WARMUP_SEED + w, algorithm=alg)
            times = {a: [] for a in algorithms}
            counts = {a: [] for a in algorithms}
            for s in range(reps):
                for alg in algorithms:
                    pat = generate_anisotropic(field, nu, k, seed=s, algorithm=alg)
                    times[alg].append(pat.meta.wall_time)
                    counts[alg].append(len(pat))
            for alg in algorithms:
                t = np.array(times[alg])
                records.append(BenchRecord(alg, float(g), nu, float(np.median(t)), float(t.min()),
                                           int(np.median(counts[alg])), tuple(range(reps)), tuple(t)))
            if progress:
                progress(records[-len(algorithms):])
    return BenchReport(records, reps, warmups)


def write_bench_csv(report: BenchReport, path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "gamma", "nu", "median_s", "min_s", "points", "reps"])
        for r in report.records:
            w.writerow([r.algorithm, r.gamma, "x".join(f"{v:g}" for v in r.nu),
                        f"{r.median:.6f}", f"{r.min:.6f}", r.points, report.reps])
    return Path(path)
