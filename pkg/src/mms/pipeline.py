"""Batch orchestration: enumerate or sample, compute MMS per lattice class,
canonicalize, shard, merge, and summarize.

Determinism contract: every shard is a pure function of (parameters, its
partition or sample-block), never of worker scheduling.  Records carry the
lex-minimal representative seen *within their shard*, so the merged minimum
is the global minimum no matter how work was distributed.  Per-process
caches (HNF orbit -> key, key -> class invariants) only skip recomputation
of values that are equal across each lattice class by invariance.
"""
from __future__ import annotations

import dataclasses
import json
import multiprocessing
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Sequence

from . import __version__
from .canon import Matrix, hnf, hnf_orbit, serialize_matrix
from .engine import Classification, HRatio, compute_mms
from .enumeration import _iter_full_rank_sets, vertex_list
from .geometry import Point, SimplicialSet
from .sampler import sample_simplex
from .store import (
    MmsRecord,
    Shard,
    StatsScope,
    StatsSummary,
    Store,
    merge,
    stats,
    stats_csv,
)

SAMPLE_BLOCK = 2000  # fixed block size; results never depend on worker count


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    worker_count: int
    shard_paths: list[str]
    started_at: str
    finished_at: str | None
    tool_version: str
    status: str

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2)
            fh.write("\n")

    @classmethod
    def read(cls, path: str) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(**payload)


# ---------------------------------------------------------------------------
# per-process caches (safe: cached values are invariants of the lattice class)

_orbit_keys: dict[Matrix, str] = {}
_class_invariants: dict[str, tuple[int, int, int, Classification, HRatio]] = {}


def _key_of_hnf(h: Matrix) -> str:
    """Canonical key for a plain HNF, via the complete column-permutation
    orbit.  One n! pass per equivalence class per process; every orbit
    member is registered, so later simplices of the class resolve by one
    dict lookup after their own single HNF."""
    key = _orbit_keys.get(h)
    if key is None:
        orbit = hnf_orbit(h)
        key = serialize_matrix(orbit[0])
        for member in orbit:
            _orbit_keys[member] = key
    return key


def _invariants_for(key: str, delta: SimplicialSet):
    inv = _class_invariants.get(key)
    if inv is None:
        result = compute_mms(delta)
        inv = (
            result.mms_size,
            result.conv_count,
            result.floor_count,
            result.classification,
            result.h_ratio,
        )
        _class_invariants[key] = inv
    return inv


def _record(key: str, rep: SimplicialSet, multiplicity: int) -> MmsRecord:
    mms_size, conv_count, floor_count, classification, h_rat = _invariants_for(key, rep)
    return MmsRecord(
        key=key,
        representative=str(rep),
        mms_size=mms_size,
        conv_count=conv_count,
        floor_count=floor_count,
        classification=classification,
        h_ratio=h_rat,
        simplex_multiplicity=multiplicity,
    )


def _aggregate_to_shard(
    groups: dict[str, list], n: int, shard_path: str
) -> str:
    origin = (0,) * n
    shard = Shard()
    for key, (count, verts) in groups.items():
        rep = SimplicialSet((origin,) + verts)
        shard.put(_record(key, rep, count))
    shard.write(shard_path)
    return shard_path


def _enum_task(args: tuple) -> str:
    n, two_d, partition, shard_path = args
    rows = vertex_list(n, two_d).rows
    by_hnf: dict[Matrix, list] = {}
    for idx in _iter_full_rank_sets(rows, n, partition):
        verts = tuple(rows[i] for i in idx)
        h = hnf(tuple(zip(*verts)))
        ent = by_hnf.get(h)
        if ent is None:
            by_hnf[h] = [1, verts]
        else:
            ent[0] += 1
            if verts < ent[1]:
                ent[1] = verts
    groups: dict[str, list] = {}
    for h, (count, verts) in by_hnf.items():
        key = _key_of_hnf(h)
        ent = groups.get(key)
        if ent is None:
            groups[key] = [count, verts]
        else:
            ent[0] += count
            if verts < ent[1]:
                ent[1] = verts
    return _aggregate_to_shard(groups, n, shard_path)


def _sample_task(args: tuple) -> str:
    n, two_d, seed, lo, hi, shard_path = args
    groups: dict[str, list] = {}
    for index in range(lo, hi):
        delta = sample_simplex(n, two_d, seed, index)
        verts = delta.points[1:]  # origin is always the lex-min point
        h = hnf(tuple(zip(*verts)))
        key = _key_of_hnf(h)
        ent = groups.get(key)
        if ent is None:
            groups[key] = [1, verts]
        else:
            ent[0] += 1
            if verts < ent[1]:
                ent[1] = verts
    return _aggregate_to_shard(groups, n, shard_path)


def _run_tasks(task_fn, task_args: list[tuple], workers: int, label: str) -> list[str]:
    done = 0
    total = len(task_args)
    step = max(1, total // 10)
    results: list[str] = []
    if workers <= 1 or total <= 1:
        for args in task_args:
            results.append(task_fn(args))
            done += 1
            if done % step == 0 or done == total:
                print(f"[mms] {label}: {done}/{total}", file=sys.stderr)
        return results
    with multiprocessing.Pool(processes=workers) as pool:
        for path in pool.imap_unordered(task_fn, task_args):
            results.append(path)
            done += 1
            if done % step == 0 or done == total:
                print(f"[mms] {label}: {done}/{total}", file=sys.stderr)
    return results


def default_workers() -> int:
    env = os.environ.get("MMS_WORKERS")
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"MMS_WORKERS must be an integer, got {env!r}") from exc
        if value < 1:
            raise ValueError("MMS_WORKERS must be at least 1")
        return value
    return os.cpu_count() or 1


def run_pipeline(
    n: int,
    two_d: int,
    mode: str,
    workers: int,
    out_dir: str,
    seed: int | None = None,
    count: int | None = None,
    audit: bool = True,
) -> tuple[StatsSummary, StatsSummary]:
    """Full batch run into ``out_dir``: shards, merged store (merged.jsonl
    plus .idx), stats.csv, stats.json, manifest.json.  Returns the
    (simplicial-set scope, lattice scope) summaries."""
    if mode not in ("full", "sample"):
        raise ValueError(f"mode must be 'full' or 'sample', got {mode!r}")
    if mode == "sample":
        if seed is None or count is None:
            raise ValueError("sample mode requires seed and count")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    os.makedirs(out_dir, exist_ok=True)
    shard_dir = os.path.join(out_dir, "shards")
    os.makedirs(shard_dir, exist_ok=True)
    params = {"n": n, "two_d": two_d, "mode": mode}
    if mode == "sample":
        params["count"] = count
        params["sample_block"] = SAMPLE_BLOCK
    manifest = RunManifest(
        command="pipeline",
        parameters=params,
        seed=seed,
        worker_count=workers,
        shard_paths=[],
        started_at=datetime.now(timezone.utc).isoformat(),
        finished_at=None,
        tool_version=__version__,
        status="running",
    )
    manifest_path = os.path.join(out_dir, "manifest.json")
    manifest.write(manifest_path)
    try:
        if mode == "full":
            rows = vertex_list(n, two_d).rows
            parts = range(0, max(0, len(rows) - n + 1))
            task_args = [
                (n, two_d, p, os.path.join(shard_dir, f"shard-{p:05d}.jsonl"))
                for p in parts
            ]
            shard_paths = _run_tasks(_enum_task, task_args, workers, "partitions")
        else:
            assert seed is not None and count is not None
            blocks = [
                (lo, min(lo + SAMPLE_BLOCK, count))
                for lo in range(0, count, SAMPLE_BLOCK)
            ]
            task_args = [
                (
                    n,
                    two_d,
                    seed,
                    lo,
                    hi,
                    os.path.join(shard_dir, f"shard-{i:05d}.jsonl"),
                )
                for i, (lo, hi) in enumerate(blocks)
            ]
            shard_paths = _run_tasks(_sample_task, task_args, workers, "sample blocks")
        manifest.shard_paths = sorted(shard_paths)
        merged_path = os.path.join(out_dir, "merged.jsonl")
        print(f"[mms] merging {len(shard_paths)} shards", file=sys.stderr)
        store = merge(manifest.shard_paths, merged_path, audit=audit)
        sim = stats(store, StatsScope.SIMPLICIAL_SETS)
        lat = stats(store, StatsScope.LATTICES)
        with open(os.path.join(out_dir, "stats.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(stats_csv([sim, lat], n, two_d))
        with open(os.path.join(out_dir, "stats.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(
                {"simplicial_sets": sim.to_json_dict(), "lattices": lat.to_json_dict()},
                fh,
                indent=2,
            )
            fh.write("\n")
        manifest.status = "complete"
        manifest.finished_at = datetime.now(timezone.utc).isoformat()
        manifest.write(manifest_path)
        return sim, lat
    except Exception:
        manifest.status = "failed"
        manifest.finished_at = datetime.now(timezone.utc).isoformat()
        manifest.write(manifest_path)
        raise


def replay(manifest_path: str, out_dir: str, workers: int | None = None) -> tuple[StatsSummary, StatsSummary]:
    """Re-run a recorded pipeline into a fresh directory.  Outputs are
    byte-identical to the original run (worker count is free to differ)."""
    manifest = RunManifest.read(manifest_path)
    if manifest.command != "pipeline":
        raise ValueError(f"manifest records command {manifest.command!r}, not a pipeline")
    params = manifest.parameters
    return run_pipeline(
        n=int(params["n"]),
        two_d=int(params["two_d"]),
        mode=str(params["mode"]),
        workers=workers if workers is not None else manifest.worker_count,
        out_dir=out_dir,
        seed=manifest.seed,
        count=params.get("count"),
    )


@dataclass(frozen=True)
class ConjectureReport:
    two_d: int
    total_simplices: int
    total_lattices: int
    h_lattice_classes: int
    m_lattice_classes: int
    intermediate_lattice_classes: int
    counterexamples: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json_dict(self) -> dict:
        return {
            "two_d": self.two_d,
            "total_simplices": self.total_simplices,
            "total_lattices": self.total_lattices,
            "h_lattice_classes": self.h_lattice_classes,
            "m_lattice_classes": self.m_lattice_classes,
            "intermediate_lattice_classes": self.intermediate_lattice_classes,
            "passed": self.passed,
            "counterexamples": list(self.counterexamples),
        }


def check_conjecture(
    two_d: int, workers: int = 1, out_dir: str | None = None, n: int = 2
) -> ConjectureReport:
    """Exhaustively classify every 2-simplex of maximal degree <= two_d and
    report any INTERMEDIATE class verbatim (vertices plus full MMS).  The
    dichotomy statement is specific to the plane, so n must be 2."""
    if n != 2:
        raise ValueError("the dichotomy check is defined for n = 2 only")
    import tempfile

    ctx = None
    if out_dir is None:
        ctx = tempfile.TemporaryDirectory(prefix="mms-conjecture-")
        out_dir = ctx.name
    try:
        sim, lat = run_pipeline(2, two_d, "full", workers, out_dir)
        store = Store.open(os.path.join(out_dir, "merged.jsonl"))
        counterexamples = []
        for rec in store:
            if rec.classification is Classification.INTERMEDIATE:
                delta = SimplicialSet.parse(rec.representative)
                result = compute_mms(delta)
                counterexamples.append(
                    {
                        "delta": str(delta),
                        "mms_points": [list(p) for p in result.mms_points],
                        "conv_count": result.conv_count,
                        "floor_count": result.floor_count,
                        "mms_size": result.mms_size,
                    }
                )
        return ConjectureReport(
            two_d=two_d,
            total_simplices=sim.total_count,
            total_lattices=lat.total_count,
            h_lattice_classes=lat.h_count,
            m_lattice_classes=lat.m_count,
            intermediate_lattice_classes=lat.intermediate_count,
            counterexamples=tuple(counterexamples),
        )
    finally:
        if ctx is not None:
            ctx.cleanup()
