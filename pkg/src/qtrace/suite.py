"""Run named verification suites over a grid of dimensions and ``q`` values.

A *cell* is one ``(suite, n, q)`` triple.  Cells whose ``q`` lies outside the
hypothesis of the corresponding statement are emitted as skipped records and
never evaluated.  Cells may run in worker processes; records are always
reported in sorted ``(suite, n, q)`` order, so the output depends only on the
configuration.
"""
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple

from . import inequalities as ineq
from . import variational as var
from .deformed import is_classical, qvalue
from .errors import ConfigParseError, QTraceError, UnknownSuite
from .optimize import OptimizerSettings
from .records import RECORD_FIELDS, Tolerances, VerificationRecord

DEFAULT_DIMS = (2, 3, 4)
DEFAULT_Q_GRID = (0, 0.25, 0.5, 0.75, 0.999, 1, 1.001, 1.5, 2, 2.5, 3, 3.5)
ORACLE_MAX_N = 3
MAX_SEED = 2 ** 64


def _below_one(q):
    return q < 1 and not is_classical(q)


# suite -> (hypothesis test on q, reason recorded when the test fails)
HYPOTHESES = {
    "lemma21": (lambda q: True, ""),
    "thm22": (lambda q: q <= 3, "checked for q <= 3 only"),
    "prop25": (lambda q: q <= 3, "checked for q <= 3 only"),
    "thm31": (lambda q: q <= 3, "checked for q <= 3 only"),
    "cor32": (lambda q: 1 <= q <= 2 or is_classical(q), "requires q in [1, 2]"),
    "thm42": (lambda q: True, ""),
    "thm43": (lambda q: q <= 3, "checked for q <= 3 only"),
    "scalar_lf": (lambda q: True, ""),
    "young": (lambda q: True, ""),
    "peierls_bogolyubov": (lambda q: True, ""),
    "golden_thompson": (lambda q: (0 <= q and _below_one(q)) or is_classical(q),
                        "deformed inequality requires q in [0, 1); classical form at q = 1"),
    "cor52": (lambda q: 0 <= q and _below_one(q), "requires q in [0, 1)"),
    "curvature": (lambda q: bool(ineq.curvature_cases_for(q)),
                  "no curvature claim at this q"),
}
SUITES = tuple(HYPOTHESES)


def expand_suites(names):
    """Resolve ``all`` and reject unknown names, keeping canonical order."""
    names = list(names)
    for name in names:
        if name != "all" and name not in HYPOTHESES:
            raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}, all")
    if "all" in names:
        return list(SUITES)
    return [s for s in SUITES if s in names]


@dataclass
class TrialConfig:
    suites: List[str] = field(default_factory=lambda: ["all"])
    dims: List[int] = field(default_factory=lambda: list(DEFAULT_DIMS))
    q_grid: List[float] = field(default_factory=lambda: list(DEFAULT_Q_GRID))
    trials: int = 500
    seed: int = 42
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        self.suites = expand_suites(self.suites)
        try:
            self.dims = sorted({int(n) for n in self.dims})
            self.q_grid = sorted({float(q) for q in self.q_grid})
            self.trials = int(self.trials)
            self.seed = int(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigParseError(str(exc)) from exc
        if not self.dims or self.dims[0] < 1:
            raise ConfigParseError("dimensions must be >= 1")
        if self.trials < 1:
            raise ConfigParseError("trials must be >= 1")
        if not 0 <= self.seed < MAX_SEED:
            raise ConfigParseError("seed must be a 64-bit unsigned integer")
        if not self.q_grid or not all(math.isfinite(q) for q in self.q_grid):
            raise ConfigParseError("q values must be finite reals")
        for name, value in asdict(self.tolerances).items():
            if not (math.isfinite(value) and value > 0):
                raise ConfigParseError(f"tolerance {name} must be positive")

    def echo(self):
        return {"suites": list(self.suites), "dims": list(self.dims),
                "q_grid": list(self.q_grid), "trials": self.trials, "seed": self.seed,
                "tolerances": asdict(self.tolerances)}


def cells(config: TrialConfig):
    """All ``(suite, n, q)`` triples in report order.

    ``scalar_lf`` does not depend on the dimension and gets one cell per
    ``q`` with ``n = 1``.
    """
    out = []
    for suite in sorted(config.suites):
        dims = [1] if suite == "scalar_lf" else config.dims
        for n in dims:
            for q in config.q_grid:
                out.append((suite, n, q))
    return out


def _variational(suite, n, q, config):
    settings = OptimizerSettings(seed=config.seed) if n <= ORACLE_MAX_N else None
    return [var.run_cell(suite, n, q, config.trials, config.trials, config.seed,
                         config.tolerances, settings)]


def run_cell(suite, n, q, config: TrialConfig):
    """Records of one cell; errors inside a cell become failed records."""
    q = qvalue(q)
    allowed, reason = HYPOTHESES[suite]
    if not allowed(q):
        return [VerificationRecord.skipped_cell(suite, q, n, config.seed, reason)]
    tol = config.tolerances
    try:
        if suite in var.CELLS:
            return _variational(suite, n, q, config)
        if suite == "scalar_lf":
            return [ineq.scalar_lf_cell(q, config.trials, config.seed, tol)]
        if suite == "curvature":
            return ineq.curvature_cell(n, q, config.trials, config.seed, tol)
        runner = {"young": ineq.young_cell,
                  "peierls_bogolyubov": ineq.peierls_bogolyubov_cell,
                  "golden_thompson": ineq.golden_thompson_cell,
                  "cor52": ineq.cor52_cell}[suite]
        return [runner(n, q, config.trials, config.seed, tol)]
    except QTraceError as exc:
        return [VerificationRecord(suite, q, n, config.seed, passed=False,
                                   details={"error": f"{type(exc).__name__}: {exc}"})]


def _run_packed(args):
    start = time.perf_counter()
    records = run_cell(*args)
    return records, time.perf_counter() - start


def worker_count():
    """Process count from ``QTRACE_THREADS`` (unset or ``0`` means all CPUs)."""
    raw = os.environ.get("QTRACE_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError as exc:
        raise ConfigParseError(f"QTRACE_THREADS must be an integer, got {raw!r}") from exc
    if k < 0:
        raise ConfigParseError("QTRACE_THREADS must be >= 0")
    return k or (os.cpu_count() or 1)


@dataclass
class SuiteReport:
    config: dict
    records: List[VerificationRecord]
    wall_time_seconds: float
    cell_seconds: Dict[Tuple[str, int, float], float] = field(default_factory=dict)
    cell_records: Dict[Tuple[str, int, float], List[VerificationRecord]] = field(
        default_factory=dict)

    def suite_seconds(self, *suites):
        """Summed cell time of the named suites (not part of the written report)."""
        return sum(t for (s, _, _), t in self.cell_seconds.items() if s in suites)

    @property
    def summary(self):
        skipped = sum(r.fully_skipped for r in self.records)
        failed = sum(not r.passed for r in self.records)
        passed = len(self.records) - skipped - failed
        return {"total": passed + failed, "passed": passed, "failed": failed,
                "skipped": skipped}

    @property
    def ok(self):
        return self.summary["failed"] == 0

    def to_jsonl(self):
        lines = [json.dumps(r.to_dict()) for r in self.records]
        lines.append(json.dumps({"summary": self.summary, "config": self.config,
                                 "wall_time_seconds": round(self.wall_time_seconds, 3)}))
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=RECORD_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in self.records:
            writer.writerow(r.to_dict())
        return buf.getvalue()

    def render(self, fmt="json"):
        return self.to_csv() if fmt == "csv" else self.to_jsonl()


def run_suite(config: TrialConfig, workers=None) -> SuiteReport:
    """Execute every cell of ``config`` and collect the records."""
    start = time.perf_counter()
    jobs = [(s, n, q, config) for s, n, q in cells(config)]
    workers = worker_count() if workers is None else max(1, int(workers))
    if workers == 1 or len(jobs) <= 1:
        results = [_run_packed(job) for job in jobs]
    else:
        # map preserves submission order, which is already the report order
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_packed, jobs))
    records = [rec for group, _ in results for rec in group]
    timing = {job[:3]: seconds for job, (_, seconds) in zip(jobs, results)}
    grouped = {job[:3]: group for job, (group, _) in zip(jobs, results)}
    return SuiteReport(config.echo(), records, time.perf_counter() - start, timing, grouped)
