"""Exhaustive search for vanishing and sign anomalies of a2 over (N, k).

For m in {2, 4} the explicit error bounds give a per-level weight k*(N) past
which the sign of a2 is certified, so every N only needs the finitely many
even weights 2 <= k < k*(N).  For other m a weight cap must be supplied.

Levels are cut into fixed contiguous blocks; blocks run in a process pool and
are written back strictly in block order, so the record stream depends only on
(m, n_limit, k_max, block_size).  After each block the output is flushed and a
checkpoint naming the next level, the byte length and the sha256 of the output
so far is replaced atomically.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .arith import DomainError, factor, is_square
from .bounds import error_budget, k_cutoff
from .characters import enumerate_characters
from .secondcoef import TRIVIAL, NONTRIVIAL, NewspaceEvaluator, a2_new
from .tracefm import exact_str

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
FIELDS = ("m", "N", "k", "a2", "dim_new", "class", "k_cutoff")
EXPECTED = "nonvanishing-expected-sign"
ANOMALOUS = "anomalous-sign"
DEFAULT_BLOCK = 32


def expected_sign(m: int) -> int:
    """Sign of the main term of a2: positive for square m, negative otherwise."""
    return 1 if is_square(m) else -1


def certified_cutoff(m: int, N: int) -> int | None:
    if m in (2, 4):
        return k_cutoff(error_budget(m, N))
    return None


def _classify(m: int, value: int, dim: int) -> str:
    if dim < 2:
        if value:
            raise ArithmeticError(f"a2 = {value} on a space of dimension {dim}")
        return TRIVIAL
    if value == 0:
        return NONTRIVIAL
    return EXPECTED if (value > 0) == (expected_sign(m) > 0) else ANOMALOUS


def level_records(m: int, N: int, k_max: int | None = None) -> list[dict]:
    """All records at level N: even k below k*(N), or up to k_max when given."""
    if math.gcd(m, N) != 1:
        return []
    cut = certified_cutoff(m, N)
    if k_max is None:
        if cut is None:
            raise DomainError(f"m = {m} has no certified cutoff; pass k_max")
        weights = range(2, cut, 2)
    else:
        weights = range(2, k_max + 1, 2)
    if not weights:
        return []
    ev = NewspaceEvaluator(m, N)
    out = []
    for k in weights:
        value = ev.a2(k)
        dim = ev.dim(k)
        out.append(
            {
                "m": m,
                "N": N,
                "k": k,
                "a2": str(value),
                "dim_new": dim,
                "class": _classify(m, value, dim),
                "k_cutoff": cut,
            }
        )
    return out


def _block_lines(args: tuple[int, int, int, int | None]) -> str:
    m, lo, hi, k_max = args
    lines = []
    for N in range(lo, hi):
        for rec in level_records(m, N, k_max):
            lines.append(json.dumps(rec, separators=(",", ":")) + "\n")
    return "".join(lines)


# --- checkpoints -------------------------------------------------------------------

@dataclass
class Checkpoint:
    m: int
    n_limit: int
    next_N: int
    k_max: int | None = None
    block_size: int = DEFAULT_BLOCK
    out_bytes: int = 0
    digest: str = hashlib.sha256().hexdigest()
    version: int = CHECKPOINT_VERSION

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "m": self.m,
            "n_limit": self.n_limit,
            "next_N": self.next_N,
            "k_max": self.k_max,
            "block_size": self.block_size,
            "out_bytes": self.out_bytes,
            "digest": self.digest,
        }

    @classmethod
    def load(cls, path: Path) -> "Checkpoint":
        data = json.loads(Path(path).read_text())
        if data.get("version") != CHECKPOINT_VERSION:
            raise DomainError(
                f"checkpoint version {data.get('version')} is not {CHECKPOINT_VERSION}"
            )
        return cls(
            m=data["m"],
            n_limit=data["n_limit"],
            next_N=data["next_N"],
            k_max=data.get("k_max"),
            block_size=data.get("block_size", DEFAULT_BLOCK),
            out_bytes=data.get("out_bytes", 0),
            digest=data.get("digest", hashlib.sha256().hexdigest()),
        )

    def save(self, path: Path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)


def _prefix_digest(path: Path, nbytes: int) -> "hashlib._Hash":
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        left = nbytes
        while left:
            chunk = fh.read(min(left, 1 << 20))
            if not chunk:
                raise DomainError(f"{path} is shorter than the checkpoint says ({nbytes} bytes)")
            h.update(chunk)
            left -= len(chunk)
    return h


# --- driver --------------------------------------------------------------------------

@dataclass
class ScanSummary:
    m: int
    n_limit: int
    records: int = 0
    counts: Counter = field(default_factory=Counter)
    nontrivial: list[tuple[int, int]] = field(default_factory=list)
    anomalous: list[tuple[int, int, str]] = field(default_factory=list)
    complete: bool = False
    next_N: int = 1

    def absorb(self, chunk: str) -> None:
        for line in chunk.splitlines():
            rec = json.loads(line)
            self.records += 1
            self.counts[rec["class"]] += 1
            if rec["class"] == NONTRIVIAL:
                self.nontrivial.append((rec["N"], rec["k"]))
            elif rec["class"] == ANOMALOUS:
                self.anomalous.append((rec["N"], rec["k"], rec["a2"]))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n_limit": self.n_limit,
            "records": self.records,
            "counts": dict(sorted(self.counts.items())),
            "nontrivial_vanishing": self.nontrivial,
            "anomalous_sign": self.anomalous,
            "complete": self.complete,
            "next_N": self.next_N,
        }


def _blocks(m: int, start: int, n_limit: int, size: int, k_max) -> Iterator[tuple]:
    # block boundaries are multiples of ``size`` (plus 1) so that they do not
    # depend on where a run was resumed
    lo = start
    while lo <= n_limit:
        hi = min(((lo - 1) // size + 1) * size + 1, n_limit + 1)
        yield (m, lo, hi, k_max)
        lo = hi


def scan(
    m: int,
    n_limit: int,
    out,
    k_max: int | None = None,
    workers: int = 1,
    checkpoint=None,
    csv_out: bool = False,
    block_size: int = DEFAULT_BLOCK,
    max_blocks: int | None = None,
) -> ScanSummary:
    """Scan all N <= n_limit coprime to m and write JSON-lines records to ``out``.

    With ``checkpoint`` naming an existing file the scan resumes from it.
    ``max_blocks`` stops after that many blocks (the checkpoint stays valid).
    """
    if n_limit < 1:
        raise DomainError("n_limit must be positive")
    if m < 1:
        raise DomainError("m must be positive")
    if k_max is None and m not in (2, 4):
        raise DomainError(f"m = {m} has no certified cutoff; pass k_max")
    if k_max is not None and k_max < 2:
        raise DomainError("k_max must be at least 2")
    out = Path(out)
    ckpt_path = Path(checkpoint) if checkpoint else None

    summary = ScanSummary(m, n_limit)
    start = 1
    h = hashlib.sha256()
    if ckpt_path is not None and ckpt_path.exists():
        ck = Checkpoint.load(ckpt_path)
        if (ck.m, ck.n_limit, ck.k_max, ck.block_size) != (m, n_limit, k_max, block_size):
            raise DomainError("checkpoint was written for a different scan")
        if not out.exists():
            raise DomainError(f"checkpoint present but output {out} is missing")
        h = _prefix_digest(out, ck.out_bytes)
        if h.hexdigest() != ck.digest:
            raise DomainError("output does not match the checkpoint digest")
        with open(out, "r+b") as fh:
            fh.truncate(ck.out_bytes)
        with open(out) as fh:
            summary.absorb(fh.read())
        start = ck.next_N
        log.info("resuming m=%d at N=%d", m, start)
        mode = "a"
    else:
        mode = "w"

    written = out.stat().st_size if mode == "a" else 0
    blocks = list(_blocks(m, start, n_limit, block_size, k_max))
    if max_blocks is not None:
        blocks = blocks[:max_blocks]

    def results() -> Iterable[str]:
        if workers <= 1:
            return map(_block_lines, blocks)
        pool = ProcessPoolExecutor(max_workers=workers)
        return _ordered(pool, blocks)

    with open(out, mode, newline="\n") as fh:
        for args, chunk in zip(blocks, results()):
            data = chunk.encode()
            fh.write(chunk)
            fh.flush()
            h.update(data)
            written += len(data)
            summary.absorb(chunk)
            summary.next_N = args[2]
            if ckpt_path is not None:
                os.fsync(fh.fileno())
                Checkpoint(m, n_limit, args[2], k_max, block_size, written, h.hexdigest()).save(
                    ckpt_path
                )
    if not blocks:
        summary.next_N = start
    summary.complete = summary.next_N > n_limit
    if csv_out and summary.complete:
        write_csv(out, out.with_suffix(".csv"))
    return summary


def _ordered(pool: ProcessPoolExecutor, blocks: list) -> Iterator[str]:
    # map() keeps submission order; the pool is shut down when the caller stops
    with pool:
        yield from pool.map(_block_lines, blocks)


def write_csv(jsonl: Path, target: Path) -> None:
    with open(jsonl) as src, open(target, "w", newline="") as dst:
        w = csv.DictWriter(dst, fieldnames=list(FIELDS), extrasaction="ignore")
        w.writeheader()
        for line in src:
            w.writerow(json.loads(line))


def read_records(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


# --- characters ----------------------------------------------------------------------

def character_records(m: int, N: int, k_max: int) -> list[dict]:
    """Records for every character mod N and every weight 2..k_max of matching parity."""
    if math.gcd(m, N) != 1:
        return []
    F = factor(N)
    out = []
    for chi in enumerate_characters(N):
        for k in range(2, k_max + 1):
            if chi.parity != (-1) ** k:
                continue
            if chi.is_trivial():
                res = a2_new(m, F, k)
                value = res.value
                cls = _classify(m, value, res.dim_new)
                a2 = str(value)
            else:
                res = a2_new(m, F, k, chi)
                value = res.value
                cls = _classify_character(m, value, res.dim_new)
                a2 = exact_str(value)
            out.append(
                {
                    "m": m,
                    "N": N,
                    "chi": chi.label(),
                    "conductor": chi.conductor,
                    "k": k,
                    "a2": a2,
                    "dim_new": res.dim_new,
                    "class": cls,
                    "k_cutoff": None,
                }
            )
    return out


def _classify_character(m: int, value, dim: int) -> str:
    if dim < 2:
        if value:
            raise ArithmeticError(f"a2 = {value} on a space of dimension {dim}")
        return TRIVIAL
    if not value:
        return NONTRIVIAL
    if value.is_rational():
        return _classify(m, int(value.to_rational()), dim)
    return "nonvanishing"


def scan_characters(m: int, n_limit: int, k_max: int, out=None) -> ScanSummary:
    """Exact scan over all characters; intended for n_limit up to a few hundred."""
    if n_limit < 1 or k_max < 2:
        raise DomainError("need n_limit >= 1 and k_max >= 2")
    summary = ScanSummary(m, n_limit)
    fh = open(out, "w") if out is not None else None
    try:
        for N in range(1, n_limit + 1):
            for rec in character_records(m, N, k_max):
                line = json.dumps(rec, separators=(",", ":")) + "\n"
                if fh is not None:
                    fh.write(line)
                summary.records += 1
                summary.counts[rec["class"]] += 1
                if rec["class"] == NONTRIVIAL:
                    summary.nontrivial.append((N, rec["k"], rec["chi"]))
                elif rec["class"] == ANOMALOUS:
                    summary.anomalous.append((N, rec["k"], rec["a2"]))
    finally:
        if fh is not None:
            fh.close()
    summary.complete = True
    summary.next_N = n_limit + 1
    return summary
