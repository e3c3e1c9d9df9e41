"""CPU/memory sampling, phase timing and external power-log handling."""

import csv
import logging
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import psutil

from .errors import EmptyLog, EmptyWindow, InvalidParam, NotFound, ParseError, ProtocolError

log = logging.getLogger(__name__)

clock = time.monotonic

POWER_LOG_HEADER = ("timestamp_ms", "voltage_mV", "current_mA", "power_mW")
PHASES = ("load", "encode", "match")


# ---------------------------------------------------------------------------
# resource sampling
# ---------------------------------------------------------------------------

def cpu_percent(cpu_seconds, wall_seconds, n_cores):
    """Process CPU share normalised so 100 means every logical core is busy."""
    if wall_seconds <= 0 or n_cores < 1:
        raise InvalidParam("wall time and core count must be positive")
    return min(100.0, max(0.0, cpu_seconds / (wall_seconds * n_cores) * 100.0))


def mem_percent(rss_bytes, total_bytes):
    if total_bytes <= 0:
        raise InvalidParam("total memory must be positive")
    return min(100.0, max(0.0, rss_bytes / total_bytes * 100.0))


@dataclass
class ResourceSample:
    t: float
    cpu_pct: float
    mem_pct: float
    sys_mem_pct: float


@dataclass
class ResourceSummary:
    n_samples: int = 0
    interval_s: float = 0.1
    cpu_mean: float = None
    cpu_max: float = None
    mem_mean: float = None
    mem_max: float = None
    sys_mem_mean: float = None
    sys_mem_max: float = None

    def to_dict(self):
        return asdict(self)


@dataclass
class ResourceTrace:
    samples: list = field(default_factory=list)
    interval_s: float = 0.1

    def summary(self):
        s = ResourceSummary(n_samples=len(self.samples), interval_s=self.interval_s)
        if self.samples:
            cpu = [x.cpu_pct for x in self.samples]
            mem = [x.mem_pct for x in self.samples]
            sysm = [x.sys_mem_pct for x in self.samples]
            s.cpu_mean, s.cpu_max = float(np.mean(cpu)), float(max(cpu))
            s.mem_mean, s.mem_max = float(np.mean(mem)), float(max(mem))
            s.sys_mem_mean, s.sys_mem_max = float(np.mean(sysm)), float(max(sysm))
        return s


class ResourceSampler:
    """Background thread sampling CPU and memory of one process.

    Use as a context manager or call :meth:`start` / :meth:`stop`; the trace
    is only complete once :meth:`stop` has returned.
    """

    def __init__(self, pid=None, interval=0.1):
        if interval < 0.01:
            raise InvalidParam(f"sampling interval must be >= 0.01 s, got {interval}")
        try:
            self._proc = psutil.Process(pid)
        except psutil.NoSuchProcess as exc:
            raise NotFound(f"no process with pid {pid}") from exc
        self.interval = interval
        self._cores = psutil.cpu_count(logical=True) or 1
        self._total = psutil.virtual_memory().total
        self._stop = threading.Event()
        self._thread = None
        self.trace = ResourceTrace(interval_s=interval)

    def _cpu_time(self):
        t = self._proc.cpu_times()
        return t.user + t.system

    def _run(self):
        try:
            prev_wall, prev_cpu = clock(), self._cpu_time()
            while not self._stop.wait(self.interval):
                now, cpu = clock(), self._cpu_time()
                rss = self._proc.memory_info().rss
                self.trace.samples.append(ResourceSample(
                    t=now,
                    cpu_pct=cpu_percent(cpu - prev_cpu, now - prev_wall, self._cores),
                    mem_pct=mem_percent(rss, self._total),
                    sys_mem_pct=float(psutil.virtual_memory().percent),
                ))
                prev_wall, prev_cpu = now, cpu
        except psutil.NoSuchProcess:
            log.warning("sampled process %s exited; sampling stopped", self._proc.pid)

    def start(self):
        if self._thread is not None:
            raise ProtocolError("sampler already started")
        self._thread = threading.Thread(target=self._run, name="vprbench-sampler", daemon=True)
        self._thread.start()
        return self

    def stop(self):
        if self._thread is None:
            raise ProtocolError("sampler was never started")
        self._stop.set()
        self._thread.join()
        return self.trace

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def sampler_run(target, interval=0.1, duration=None):
    """Start sampling process ``target``.

    With ``duration`` set, blocks for that long and returns the finished
    :class:`ResourceTrace`; otherwise returns the running sampler.
    """
    sampler = ResourceSampler(target, interval).start()
    if duration is None:
        return sampler
    time.sleep(duration)
    return sampler.stop()


# ---------------------------------------------------------------------------
# phase timing
# ---------------------------------------------------------------------------

@dataclass
class PhaseRecord:
    label: str
    query: int
    t_start: float
    t_end: float

    @property
    def duration(self):
        return self.t_end - self.t_start

    def to_dict(self):
        return asdict(self)


class PhaseTimer:
    """Collects begin/end pairs into an ordered list of :class:`PhaseRecord`."""

    def __init__(self):
        self.records = []
        self._open = None

    def begin(self, label, query=-1):
        if self._open is not None:
            raise ProtocolError(f"phase {self._open[0]!r} is still open")
        self._open = (label, query, clock())

    def end(self):
        t = clock()
        if self._open is None:
            raise ProtocolError("end() called without begin()")
        label, query, t0 = self._open
        self._open = None
        rec = PhaseRecord(label, query, t0, t)
        self.records.append(rec)
        return rec

    def phase(self, label, query=-1):
        timer = self

        class _Ctx:
            def __enter__(self):
                timer.begin(label, query)
                return self

            def __exit__(self, *exc):
                self.record = timer.end()

        return _Ctx()


def phase_timer(label, query=-1, timer=None):
    """Context manager timing one phase, appended to ``timer`` (a new one if omitted)."""
    return (timer or PhaseTimer()).phase(label, query)


def per_query_times(records):
    """Sum of load + encode + match durations per query index."""
    totals = {}
    for r in records:
        if r.label in PHASES and r.query >= 0:
            totals[r.query] = totals.get(r.query, 0.0) + r.duration
    return [totals[q] for q in sorted(totals)]


# ---------------------------------------------------------------------------
# power logs
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class PowerTrace:
    """Power samples on the benchmark clock: ``t`` in seconds, ``power_mw`` in mW."""

    t: np.ndarray
    power_mw: np.ndarray
    clock_offset: float = 0.0

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.power_mw.tolist()))


def _parse_float(text, name, line):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"{name} is not a number: {text!r}", line) from None
    if not np.isfinite(v):
        raise ParseError(f"{name} is not finite: {text!r}", line)
    return v


def ingest_power_log(path, clock_offset=0.0):
    """Parse a power-meter CSV and shift it onto the benchmark clock."""
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such power log: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyLog(f"{path} is empty")
        header = [h.strip() for h in header]
        missing = {"timestamp_ms", "power_mW"} - set(header)
        if missing:
            raise ParseError(f"header lacks {sorted(missing)}", 1)
        ti, pi = header.index("timestamp_ms"), header.index("power_mW")
        ts, ps = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= max(ti, pi):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
            t = _parse_float(row[ti], "timestamp_ms", line)
            p = _parse_float(row[pi], "power_mW", line)
            if p < 0:
                raise ParseError(f"negative power {p}", line)
            if ts and t < ts[-1]:
                raise ParseError(f"timestamp {t} goes backwards (previous {ts[-1]})", line)
            ts.append(t)
            ps.append(p)
    if not ts:
        raise EmptyLog(f"{path} has no samples")
    return PowerTrace(np.asarray(ts) / 1000.0 + clock_offset, np.asarray(ps), clock_offset)


def _power_at(trace, t):
    # linear between samples, held constant beyond the ends
    return np.interp(t, trace.t, trace.power_mw)


def window_energy(trace, t_start, t_end):
    """Energy (J) and average power (W) over ``[t_start, t_end]``, trapezoid rule."""
    if t_end < t_start:
        raise InvalidParam("window ends before it starts")
    if len(trace) == 0 or t_end < trace.t[0] or t_start > trace.t[-1]:
        raise EmptyWindow(f"no power samples cover [{t_start}, {t_end}]")
    if t_end == t_start:
        return float(_power_at(trace, t_start)) / 1000.0, 0.0
    inside = trace.t[(trace.t > t_start) & (trace.t < t_end)]
    xs = np.concatenate(([t_start], inside, [t_end]))
    ys = _power_at(trace, xs) / 1000.0
    energy = float(np.sum((ys[1:] + ys[:-1]) * np.diff(xs)) / 2.0)
    return energy / (t_end - t_start), energy


def phase_power(trace, phase):
    """``(avg_watts, energy_joules)`` for one :class:`PhaseRecord`."""
    return window_energy(trace, phase.t_start, phase.t_end)
