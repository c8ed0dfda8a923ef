"""Task execution: chunked key ranges, worker pool, ordered merge,
checkpoint/resume and report emission."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import FIRST_COMPLETED, Future, ProcessPoolExecutor, wait
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, IO, List, Optional, Sequence

from . import sieve

SCHEMA_VERSION = 1
CHUNK_SIZE = 256

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

FINDING_VERDICTS = frozenset({"violation", "undecided"})
FORMATS = ("csv", "jsonl")


class ValidationError(ValueError):
    pass


class CorruptCheckpoint(ValueError):
    pass


class CheckpointMismatch(ValueError):
    pass


@dataclass
class ReportRecord:
    key: int
    verdict: str  # ok | violation | undecided | witness
    payload: Dict[str, Any]
    elapsed: Optional[float] = None


@dataclass
class TaskConfig:
    task: str
    params: Dict[str, Any]
    fmt: str = "csv"
    out: Optional[str] = None
    checkpoint: Optional[str] = None
    jobs: int = 1
    sieve_limit: int = sieve.DEFAULT_CEILING
    timing: bool = False
    chunk_size: int = CHUNK_SIZE

    def param_hash(self) -> str:
        # output path, checkpoint path and worker count may change on resume
        canon = {"task": self.task, "params": self.params, "format": self.fmt,
                 "sieve_limit": self.sieve_limit, "timing": self.timing}
        blob = json.dumps(canon, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Checkpoint:
    schema_version: int
    task: str
    param_hash: str
    cursor: Optional[int]  # last work key whose records are fully written
    output_offset: int
    findings: List[Dict[str, Any]] = field(default_factory=list)


@dataclass(frozen=True)
class Task:
    name: str
    key_name: str
    columns: Sequence[str]
    params: Sequence[str]
    keys: Callable[[Dict[str, Any]], Sequence[int]]
    evaluate: Callable[[int, Dict[str, Any]], List[ReportRecord]]
    summary: Optional[Callable[[List[Dict[str, Any]]], str]] = None


TASKS: Dict[str, Task] = {}


def register(task: Task) -> Task:
    TASKS[task.name] = task
    return task


# ---------------------------------------------------------------------------
# checkpoint persistence
# ---------------------------------------------------------------------------

def checkpoint_save(state: Checkpoint, path: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(asdict(state), f, sort_keys=True)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def checkpoint_load(path: str, expected_hash: Optional[str] = None) -> Checkpoint:
    try:
        with open(path) as f:
            raw = json.load(f)
        state = Checkpoint(**raw)
    except (json.JSONDecodeError, TypeError) as exc:
        raise CorruptCheckpoint(f"cannot parse checkpoint {path}: {exc}") from exc
    if state.schema_version != SCHEMA_VERSION:
        raise CorruptCheckpoint(
            f"checkpoint schema {state.schema_version}, expected {SCHEMA_VERSION}")
    if expected_hash is not None and state.param_hash != expected_hash:
        raise CheckpointMismatch("checkpoint was written for different parameters")
    return state


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------

def _columns(task: Task, timing: bool) -> List[str]:
    cols = [task.key_name, *task.columns]
    return cols + ["elapsed_ms"] if timing else cols


def _row(task: Task, rec: ReportRecord, timing: bool) -> Dict[str, Any]:
    row = {task.key_name: rec.key, **rec.payload, "verdict": rec.verdict}
    if timing:
        row["elapsed_ms"] = round((rec.elapsed or 0.0) * 1000.0, 3)
    return {c: row.get(c) for c in _columns(task, timing)}


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) for x in v)
    return str(v)


def _json_value(v: Any) -> str:
    if isinstance(v, float) and v == v and abs(v) != float("inf"):
        return f"{v:.6f}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_json_value(x) for x in v) + "]"
    return json.dumps(v)


def format_header(task: Task, fmt: str, timing: bool = False) -> str:
    if fmt != "csv":
        return ""
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(_columns(task, timing))
    return buf.getvalue()


def format_records(task: Task, records: Sequence[ReportRecord], fmt: str,
                   timing: bool = False) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        for rec in records:
            w.writerow([_csv_cell(v) for v in _row(task, rec, timing).values()])
    else:
        for rec in records:
            row = _row(task, rec, timing)
            body = ",".join(f"{json.dumps(k)}:{_json_value(v)}" for k, v in row.items())
            buf.write("{" + body + "}\n")
    return buf.getvalue()


def emit_report(task: Task, records: Sequence[ReportRecord], fmt: str,
                path: Optional[str] = None, timing: bool = False) -> None:
    """Write a complete report (header included) to path or stdout."""
    if fmt not in FORMATS:
        raise ValidationError(f"unknown format {fmt!r}")
    keys = [r.key for r in records]
    if keys != sorted(keys):
        raise ValueError("records must be sorted by key")
    text = format_header(task, fmt, timing) + format_records(task, records, fmt, timing)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


def read_report(path: str, fmt: str) -> List[Dict[str, Any]]:
    with open(path, newline="") as f:
        if fmt == "csv":
            return list(csv.DictReader(f))
        return [json.loads(line) for line in f if line.strip()]


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _init_worker(ceiling: int) -> None:
    sieve.set_ceiling(ceiling)


def evaluate_chunk(task_name: str, params: Dict[str, Any], keys: Sequence[int],
                   ceiling: Optional[int] = None) -> List[ReportRecord]:
    if ceiling is not None:
        sieve.set_ceiling(ceiling)
    if task_name not in TASKS:
        # spawned workers start with an empty registry
        from . import tasks  # noqa: F401
    task = TASKS[task_name]
    out: List[ReportRecord] = []
    for key in keys:
        t0 = time.perf_counter()
        recs = task.evaluate(key, params)
        dt = time.perf_counter() - t0
        for r in recs:
            r.elapsed = dt
        out.extend(recs)
    return out


def _chunks(keys: Sequence[int], size: int) -> List[List[int]]:
    keys = list(keys)
    return [keys[i:i + size] for i in range(0, len(keys), size)]


class _Interrupted(Exception):
    pass


def run(config: TaskConfig, stderr: Optional[IO[str]] = None,
        interrupt_after: Optional[int] = None) -> int:
    """Execute a task; returns the process exit status.

    interrupt_after simulates a crash after that many chunks are committed.
    """
    stderr = stderr or sys.stderr
    try:
        task = TASKS.get(config.task)
        if task is None:
            raise ValidationError(f"unknown task {config.task!r}")
        if config.fmt not in FORMATS:
            raise ValidationError(f"unknown format {config.fmt!r}")
        if config.jobs < 1:
            raise ValidationError("--jobs must be >= 1")
        if config.checkpoint and not config.out:
            raise ValidationError("--checkpoint needs --out")
        sieve.set_ceiling(config.sieve_limit)
        keys = list(task.keys(config.params))
    except (ValidationError, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE

    try:
        return _execute(task, config, keys, stderr, interrupt_after)
    except (CorruptCheckpoint, CheckpointMismatch) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except _Interrupted:
        print("interrupted; rerun with the same --checkpoint to resume", file=stderr)
        return EXIT_INTERNAL
    except sieve.Overflow64 as exc:
        print(f"overflow: {exc}", file=stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - reported as internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INTERNAL


def _execute(task: Task, config: TaskConfig, keys: List[int], stderr: IO[str],
             interrupt_after: Optional[int]) -> int:
    phash = config.param_hash()
    state: Optional[Checkpoint] = None
    if config.checkpoint and os.path.exists(config.checkpoint):
        state = checkpoint_load(config.checkpoint, phash)

    out_file = None
    if config.out is not None:
        if state is not None and os.path.exists(config.out):
            out_file = open(config.out, "r+b")
            out_file.truncate(state.output_offset)
            out_file.seek(state.output_offset)
        else:
            if state is not None:
                # report vanished; start over
                state = None
            out_file = open(config.out, "wb")

    def write(text: str) -> None:
        if out_file is not None:
            out_file.write(text.encode())
        else:
            sys.stdout.write(text)

    def commit(cursor: Optional[int], findings: List[Dict[str, Any]]) -> None:
        if out_file is not None:
            out_file.flush()
            os.fsync(out_file.fileno())
        else:
            sys.stdout.flush()
        if config.checkpoint:
            checkpoint_save(Checkpoint(SCHEMA_VERSION, task.name, phash, cursor,
                                       out_file.tell(), findings), config.checkpoint)

    findings: List[Dict[str, Any]] = list(state.findings) if state else []
    if state is None:
        write(format_header(task, config.fmt, config.timing))
        commit(None, findings)
        remaining = keys
    else:
        remaining = [k for k in keys if state.cursor is None or k > state.cursor]

    chunks = _chunks(remaining, config.chunk_size)
    committed = 0
    session_rows: List[Dict[str, Any]] = []
    try:
        for chunk, recs in _ordered_results(task, config, chunks):
            if out_file is None:
                session_rows.extend(_row(task, r, config.timing) for r in recs)
            write(format_records(task, recs, config.fmt, config.timing))
            findings.extend({"key": r.key, "verdict": r.verdict}
                            for r in recs if r.verdict in FINDING_VERDICTS)
            commit(chunk[-1], findings)
            committed += 1
            if interrupt_after is not None and committed >= interrupt_after:
                raise _Interrupted()
    finally:
        if out_file is not None:
            out_file.close()

    if task.summary:
        rows = read_report(config.out, config.fmt) if config.out else session_rows
        msg = task.summary(rows)
        if msg:
            print(msg, file=stderr)
    for f in findings[:20]:
        print(f"finding: {task.key_name}={f['key']} verdict={f['verdict']}", file=stderr)
    if len(findings) > 20:
        print(f"... {len(findings) - 20} more findings", file=stderr)
    return EXIT_FINDING if findings else EXIT_OK


def _ordered_results(task: Task, config: TaskConfig, chunks: List[List[int]]):
    """Yield (chunk, records) in chunk order whatever the completion order."""
    if config.jobs == 1 or len(chunks) <= 1:
        for chunk in chunks:
            yield chunk, evaluate_chunk(task.name, config.params, chunk)
        return
    window = 4 * config.jobs
    with ProcessPoolExecutor(max_workers=config.jobs, initializer=_init_worker,
                             initargs=(config.sieve_limit,)) as pool:
        pending: Dict[int, Future] = {}
        done: Dict[int, List[ReportRecord]] = {}
        nxt_submit = 0
        nxt_emit = 0
        while nxt_emit < len(chunks):
            while nxt_submit < len(chunks) and len(pending) + len(done) < window:
                pending[nxt_submit] = pool.submit(
                    evaluate_chunk, task.name, config.params, chunks[nxt_submit],
                    config.sieve_limit)
                nxt_submit += 1
            if nxt_emit not in done:
                finished, _ = wait(pending.values(), return_when=FIRST_COMPLETED)
                for idx in [i for i, fut in pending.items() if fut in finished]:
                    done[idx] = pending.pop(idx).result()
                continue
            yield chunks[nxt_emit], done.pop(nxt_emit)
            nxt_emit += 1
