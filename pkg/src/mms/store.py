"""Persistent key-value store of MMS records: sorted JSONL shards, a k-way
deterministic merge, offset-indexed lookup, statistics, export.

One record per canonical lattice key.  A record stores one representative
simplex plus the counts that are invariants of the key's equivalence class;
simplicial-set statistics are recovered by multiplicity weighting instead of
storing every simplex.
"""
from __future__ import annotations

import csv
import heapq
import io
import json
import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator

from .engine import Classification, HRatio, MmsResult, compute_mms
from .geometry import SimplicialSet

HISTOGRAM_BINS = 20
AUDIT_STRIDE = 100  # every 100th merged record is recomputed from scratch


class StoreFormatError(ValueError):
    """Malformed shard/store content; message carries path and line."""


class StoreAuditError(AssertionError):
    """A stored record disagrees with recomputation from its representative."""


class StatsScope(str, Enum):
    SIMPLICIAL_SETS = "simplicial_sets"
    LATTICES = "lattices"


@dataclass(frozen=True)
class MmsRecord:
    key: str
    representative: str  # serialized SimplicialSet
    mms_size: int
    conv_count: int
    floor_count: int
    classification: Classification
    h_ratio: HRatio
    simplex_multiplicity: int

    @classmethod
    def from_result(cls, key: str, result: MmsResult, multiplicity: int = 1) -> "MmsRecord":
        return cls(
            key=key,
            representative=str(result.delta),
            mms_size=result.mms_size,
            conv_count=result.conv_count,
            floor_count=result.floor_count,
            classification=result.classification,
            h_ratio=result.h_ratio,
            simplex_multiplicity=multiplicity,
        )

    def to_json(self) -> str:
        payload = {
            "key": self.key,
            "representative": self.representative,
            "mms_size": self.mms_size,
            "conv_count": self.conv_count,
            "floor_count": self.floor_count,
            "classification": self.classification.value,
            "h_ratio": str(self.h_ratio),
            "simplex_multiplicity": self.simplex_multiplicity,
        }
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "MmsRecord":
        payload = json.loads(line)
        return cls(
            key=str(payload["key"]),
            representative=str(payload["representative"]),
            mms_size=int(payload["mms_size"]),
            conv_count=int(payload["conv_count"]),
            floor_count=int(payload["floor_count"]),
            classification=Classification(payload["classification"]),
            h_ratio=HRatio.parse(payload["h_ratio"]),
            simplex_multiplicity=int(payload["simplex_multiplicity"]),
        )


class Shard:
    """In-memory accumulator for one worker's records, written sorted."""

    def __init__(self) -> None:
        self._records: dict[str, MmsRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def put(self, record: MmsRecord) -> None:
        prev = self._records.get(record.key)
        if prev is None:
            self._records[record.key] = record
            return
        self._records[record.key] = _combine(prev, record)

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for key in sorted(self._records):
                fh.write(self._records[key].to_json())
                fh.write("\n")


def put(shard: Shard, record: MmsRecord) -> None:
    shard.put(record)


def _combine(a: MmsRecord, b: MmsRecord) -> MmsRecord:
    if a.key != b.key:
        raise ValueError("cannot combine records with different keys")
    for field in ("mms_size", "conv_count", "floor_count"):
        if getattr(a, field) != getattr(b, field):
            raise StoreAuditError(
                f"records for key {a.key} disagree on {field}: "
                f"{getattr(a, field)} vs {getattr(b, field)}"
            )
    if a.classification != b.classification or str(a.h_ratio) != str(b.h_ratio):
        raise StoreAuditError(f"records for key {a.key} disagree on derived fields")
    rep = min(a.representative, b.representative)
    return MmsRecord(
        key=a.key,
        representative=rep,
        mms_size=a.mms_size,
        conv_count=a.conv_count,
        floor_count=a.floor_count,
        classification=a.classification,
        h_ratio=a.h_ratio,
        simplex_multiplicity=a.simplex_multiplicity + b.simplex_multiplicity,
    )


def _iter_shard(path: str) -> Iterator[tuple[str, MmsRecord]]:
    last_key: str | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = MmsRecord.from_json(line)
            except (ValueError, KeyError) as exc:
                raise StoreFormatError(f"{path}:{lineno}: bad record: {exc}") from exc
            if last_key is not None and rec.key <= last_key:
                raise StoreFormatError(f"{path}:{lineno}: keys out of order")
            last_key = rec.key
            yield rec.key, rec


def merge(shard_paths: Iterable[str], out_path: str, audit: bool = True) -> "Store":
    """K-way merge of sorted shards into one sorted store file plus its
    offset index.  Records with equal keys are combined (multiplicities sum,
    lex-min representative wins); shard order cannot affect the output.
    Every AUDIT_STRIDE-th record is recomputed from its representative.
    """
    paths = sorted(shard_paths)
    streams = [_iter_shard(p) for p in paths]
    merged = heapq.merge(*streams, key=lambda kv: kv[0])
    idx_path = out_path + ".idx"
    count = 0
    with open(out_path, "w", encoding="utf-8", newline="\n") as out, open(
        idx_path, "w", encoding="utf-8", newline="\n"
    ) as idx:
        current: MmsRecord | None = None
        offset = 0

        def emit(rec: MmsRecord) -> int:
            nonlocal offset, count
            if audit and count % AUDIT_STRIDE == 0:
                _audit_record(rec)
            line = rec.to_json() + "\n"
            idx.write(f"{rec.key}\t{offset}\n")
            out.write(line)
            offset += len(line.encode("utf-8"))
            count += 1
            return count

        for key, rec in merged:
            if current is None:
                current = rec
            elif key == current.key:
                current = _combine(current, rec)
            else:
                emit(current)
                current = rec
        if current is not None:
            emit(current)
    return Store.open(out_path)


def _audit_record(rec: MmsRecord) -> None:
    delta = SimplicialSet.parse(rec.representative)
    result = compute_mms(delta)
    ok = (
        result.mms_size == rec.mms_size
        and result.conv_count == rec.conv_count
        and result.floor_count == rec.floor_count
        and result.classification == rec.classification
        and str(result.h_ratio) == str(rec.h_ratio)
    )
    if not ok:
        raise StoreAuditError(
            f"audit failed for key {rec.key}: representative {rec.representative} "
            f"recomputes to size={result.mms_size} conv={result.conv_count} "
            f"floor={result.floor_count}"
        )


class Store:
    """A merged, sorted JSONL store with a key-to-offset sidecar index."""

    def __init__(self, path: str, index: list[tuple[str, int]]):
        self.path = path
        self._index = index

    @classmethod
    def open(cls, path: str) -> "Store":
        idx_path = path + ".idx"
        index: list[tuple[str, int]] = []
        if os.path.exists(idx_path):
            with open(idx_path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    try:
                        key, off = line.rsplit("\t", 1)
                        index.append((key, int(off)))
                    except ValueError as exc:
                        raise StoreFormatError(f"{idx_path}:{lineno}: bad index line") from exc
        else:
            offset = 0
            with open(path, "rb") as fh:
                for raw in fh:
                    line = raw.decode("utf-8").strip()
                    if line:
                        rec = MmsRecord.from_json(line)
                        index.append((rec.key, offset))
                    offset += len(raw)
        return cls(path, index)

    def __len__(self) -> int:
        return len(self._index)

    def keys(self) -> list[str]:
        return [k for k, _ in self._index]

    def get(self, key: str) -> MmsRecord | None:
        lo, hi = 0, len(self._index)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._index[mid][0] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(self._index) or self._index[lo][0] != key:
            return None
        with open(self.path, "r", encoding="utf-8") as fh:
            fh.seek(self._index[lo][1])
            return MmsRecord.from_json(fh.readline())

    def __iter__(self) -> Iterator[MmsRecord]:
        with open(self.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield MmsRecord.from_json(line)
                except (ValueError, KeyError) as exc:
                    raise StoreFormatError(f"{self.path}:{lineno}: bad record: {exc}") from exc


def get(store: Store, key: str) -> MmsRecord | None:
    return store.get(key)


@dataclass(frozen=True)
class StatsSummary:
    scope: StatsScope
    total_count: int
    h_count: int
    m_count: int
    intermediate_count: int
    mean_h_ratio: Fraction
    sd_population: float
    sd_sample: float | None
    histogram: tuple[int, ...]
    decrease_factor: Fraction | None

    @property
    def mean(self) -> float:
        return float(self.mean_h_ratio)

    def to_json_dict(self) -> dict:
        return {
            "scope": self.scope.value,
            "total_count": self.total_count,
            "h_count": self.h_count,
            "m_count": self.m_count,
            "intermediate_count": self.intermediate_count,
            "mean": f"{float(self.mean_h_ratio):.9f}",
            "mean_exact": f"{self.mean_h_ratio.numerator}/{self.mean_h_ratio.denominator}",
            "sd_population": f"{self.sd_population:.9f}",
            "sd_sample": None if self.sd_sample is None else f"{self.sd_sample:.9f}",
            "histogram_bins": HISTOGRAM_BINS,
            "histogram": list(self.histogram),
            "decrease_factor": (
                None if self.decrease_factor is None else f"{float(self.decrease_factor):.6f}"
            ),
        }


def stats(store: Store, scope: StatsScope) -> StatsSummary:
    """Weighted h-ratio statistics over the store.

    SIMPLICIAL_SETS weights each record by its multiplicity, LATTICES counts
    each key once.  Mean and variance are accumulated in exact rationals;
    only the final square root is floating point.  Both population and
    sample standard deviations are provided (the convention used by any
    given reference table is not always stated).
    """
    weight_total = 0
    simplex_total = 0
    lattice_total = 0
    h_count = 0
    m_count = 0
    mid_count = 0
    sum_h = Fraction(0)
    sum_h2 = Fraction(0)
    hist = [0] * HISTOGRAM_BINS
    for rec in store:
        w = rec.simplex_multiplicity if scope is StatsScope.SIMPLICIAL_SETS else 1
        simplex_total += rec.simplex_multiplicity
        lattice_total += 1
        weight_total += w
        value = rec.h_ratio.value
        sum_h += w * value
        sum_h2 += w * value * value
        if rec.classification is Classification.H:
            h_count += w
        elif rec.classification is Classification.M:
            m_count += w
        else:
            mid_count += w
        bin_idx = min(
            HISTOGRAM_BINS - 1,
            (value.numerator * HISTOGRAM_BINS) // value.denominator,
        )
        hist[bin_idx] += w
    if weight_total == 0:
        raise ValueError("cannot compute statistics of an empty store")
    mean = sum_h / weight_total
    var_pop = sum_h2 / weight_total - mean * mean
    if var_pop < 0:
        var_pop = Fraction(0)  # exact arithmetic: only possible at 0 by rounding-free theory
    sd_pop = math.sqrt(float(var_pop))
    if weight_total > 1:
        var_samp = (sum_h2 - weight_total * mean * mean) / (weight_total - 1)
        if var_samp < 0:
            var_samp = Fraction(0)
        sd_samp = math.sqrt(float(var_samp))
    else:
        sd_samp = None
    decrease = (
        Fraction(simplex_total, lattice_total) if scope is StatsScope.LATTICES else None
    )
    return StatsSummary(
        scope=scope,
        total_count=weight_total,
        h_count=h_count,
        m_count=m_count,
        intermediate_count=mid_count,
        mean_h_ratio=mean,
        sd_population=sd_pop,
        sd_sample=sd_samp,
        histogram=tuple(hist),
        decrease_factor=decrease,
    )


def stats_csv(
    summaries: Iterable[StatsSummary], n: int, two_d: int
) -> str:
    """Stats table as CSV text with a fixed column layout:
    scope,n,2d,total,h_count,m_count,intermediate_count,mean,sd,decrease_factor
    (sd is the population convention; decrease_factor only for lattices)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "scope",
            "n",
            "2d",
            "total",
            "h_count",
            "m_count",
            "intermediate_count",
            "mean",
            "sd",
            "decrease_factor",
        ]
    )
    for s in summaries:
        writer.writerow(
            [
                s.scope.value,
                n,
                two_d,
                s.total_count,
                s.h_count,
                s.m_count,
                s.intermediate_count,
                f"{float(s.mean_h_ratio):.6f}",
                f"{s.sd_population:.6f}",
                "" if s.decrease_factor is None else f"{float(s.decrease_factor):.6f}",
            ]
        )
    return buf.getvalue()


def export(store: Store, fmt: str, path: str) -> None:
    """Deterministic dumps: "jsonl" writes the records in key order (byte
    round-trip with the store file), "csv" writes the two-scope stats table
    with n and 2d derived from the stored representatives."""
    if fmt == "jsonl":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for rec in store:
                fh.write(rec.to_json())
                fh.write("\n")
        return
    if fmt == "csv":
        n = None
        two_d = 0
        for rec in store:
            delta = SimplicialSet.parse(rec.representative)
            n = delta.ambient_dim
            two_d = max(two_d, delta.max_degree)
        if n is None:
            raise ValueError("cannot export statistics of an empty store")
        summaries = [
            stats(store, StatsScope.SIMPLICIAL_SETS),
            stats(store, StatsScope.LATTICES),
        ]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(stats_csv(summaries, n, two_d))
        return
    raise ValueError(f"unknown export format {fmt!r}")
