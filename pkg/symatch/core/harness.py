"""
Benchmark Harness
Monte Carlo logical-error-rate sweeps and exhaustive low-weight enumeration

Shots draw their noise from a generator seeded with (seed, point, shot), and
enumeration shards are fixed slices of the lexicographic pattern order, so
results do not depend on how many worker processes run them.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import islice
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import BENCH_DEFAULTS, ERROR_MESSAGES
from ..utils.logger import create_progress_logger, log_performance
from ..utils.system_utils import available_workers, provenance
from .errors import SymatchError
from .pipelines import VARIANTS, DecoderFactory, PipelineConfig
from .registry import CodeRegistry

logger = logging.getLogger(__name__)


class HarnessError(SymatchError):
    """Exception raised by the benchmark harness"""
    pass


class BudgetExceeded(HarnessError):
    """Raised when an exhaustive run would enumerate too many patterns"""
    pass


class SweepConfigError(HarnessError):
    """Raised for invalid sweep or enumeration settings"""
    pass


COUNTING_MODES = ('any-logical', 'per-logical')
TALLIES = ('vertical', 'horizontal', 'both')


@dataclass(frozen=True)
class SweepSpec:
    code: str
    decoder: str
    rates: Tuple[float, ...]
    shots: int
    seed: int = 0
    counting: str = 'any-logical'

    def __post_init__(self):
        object.__setattr__(self, 'rates', tuple(float(p) for p in self.rates))
        if self.shots < 1:
            raise SweepConfigError(f"shots must be at least 1, got {self.shots}")
        if not self.rates:
            raise SweepConfigError("At least one error rate is required")
        bad = [p for p in self.rates if not 0.0 <= p < 0.5]
        if bad:
            raise SweepConfigError(f"Error rates must lie in [0, 0.5), got {bad}")
        if self.counting not in COUNTING_MODES:
            raise SweepConfigError(f"counting must be one of {COUNTING_MODES}, got {self.counting!r}")
        if self.decoder not in VARIANTS:
            raise SweepConfigError(f"Unknown decoder '{self.decoder}'. Available: {list(VARIANTS)}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['rates'] = list(self.rates)
        return data


@dataclass(frozen=True)
class ExhaustSpec:
    code: str
    decoder: str
    weight: int
    tally: str = 'both'

    def __post_init__(self):
        if self.weight < 0:
            raise SweepConfigError(f"weight must be non-negative, got {self.weight}")
        if self.tally not in TALLIES:
            raise SweepConfigError(f"tally must be one of {TALLIES}, got {self.tally!r}")
        if self.decoder not in VARIANTS:
            raise SweepConfigError(f"Unknown decoder '{self.decoder}'. Available: {list(VARIANTS)}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SweepPoint:
    p: float
    shots: int
    failures: int
    LER: float
    stderr: float
    vertical_failures: int
    horizontal_failures: int
    logical_failures: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ExhaustRecord:
    weight: int
    patterns: int
    vertical: int
    horizontal: int
    any_logical: int
    tally: str = 'both'

    @property
    def vertical_fraction(self) -> float:
        return self.vertical / self.patterns if self.patterns else 0.0

    @property
    def horizontal_fraction(self) -> float:
        return self.horizontal / self.patterns if self.patterns else 0.0

    @property
    def any_fraction(self) -> float:
        return self.any_logical / self.patterns if self.patterns else 0.0

    @property
    def failures(self) -> int:
        """Headline failure count for the requested direction tally."""
        if self.tally == 'vertical':
            return self.vertical
        if self.tally == 'horizontal':
            return self.horizontal
        return self.any_logical

    @property
    def failure_fraction(self) -> float:
        return self.failures / self.patterns if self.patterns else 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.update(
            vertical_fraction=self.vertical_fraction,
            horizontal_fraction=self.horizontal_fraction,
            any_fraction=self.any_fraction,
            failures=self.failures,
            failure_fraction=self.failure_fraction,
        )
        return data


@dataclass
class RunResult:
    kind: str
    spec: Dict[str, Any]
    records: List[Any]
    seed: Optional[int] = None

    def to_document(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'spec': self.spec,
            'seed': self.seed,
            'provenance': provenance(),
            'records': [record.to_dict() for record in self.records],
        }


def sample_error(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Independent bit flips with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return (rng.random(n) < p).astype(np.uint8)


def shot_rng(seed: int, point: int, shot: int) -> np.random.Generator:
    return np.random.default_rng([seed, point, shot])


# ----------------------------------------------------------------------
# Worker side
# ----------------------------------------------------------------------

_WORKER: Dict[str, Any] = {}


def _init_worker(code_name: str, code_files: Sequence[str], config: Optional[Dict[str, Any]], variant: str):
    for path in code_files:
        CodeRegistry.load_yaml(path)
    code = CodeRegistry.create_code(code_name)
    _WORKER['code'] = code
    _WORKER['decoder'] = DecoderFactory.create_decoder(code, PipelineConfig.from_dict(config, variant))


def _tally(outcome, counts: Dict[str, Any]):
    counts['any'] += int(outcome.failed)
    counts['vertical'] += int(outcome.direction_failures.get('vertical', False))
    counts['horizontal'] += int(outcome.direction_failures.get('horizontal', False))
    counts['logical'] += outcome.flags.astype(np.int64)


def _empty_counts(k: int) -> Dict[str, Any]:
    return {'any': 0, 'vertical': 0, 'horizontal': 0, 'logical': np.zeros(k, dtype=np.int64), 'count': 0}


def _sweep_task(task: Tuple[int, float, int, int, int]) -> Dict[str, Any]:
    point, p, seed, start, stop = task
    code, decoder = _WORKER['code'], _WORKER['decoder']
    counts = _empty_counts(code.k)
    for shot in range(start, stop):
        error = sample_error(code.n, p, shot_rng(seed, point, shot))
        outcome = decoder.decode(code.syndrome(error), error=error, physical_p=p)
        _tally(outcome, counts)
        counts['count'] += 1
    return counts


def unrank_combination(n: int, k: int, index: int) -> Tuple[int, ...]:
    """The index-th k-subset of range(n) in lexicographic order."""
    if not 0 <= index < math.comb(n, k):
        raise ValueError(f"index {index} out of range for C({n}, {k})")
    chosen = []
    candidate = 0
    for slot in range(k):
        while True:
            following = math.comb(n - candidate - 1, k - slot - 1)
            if index < following:
                break
            index -= following
            candidate += 1
        chosen.append(candidate)
        candidate += 1
    return tuple(chosen)


def combinations_from(n: int, k: int, start: int) -> Iterator[Tuple[int, ...]]:
    """Lexicographic k-subsets of range(n), beginning at rank start."""
    if start >= math.comb(n, k):
        return
    current = list(unrank_combination(n, k, start))
    while True:
        yield tuple(current)
        slot = k - 1
        while slot >= 0 and current[slot] == n - k + slot:
            slot -= 1
        if slot < 0:
            return
        current[slot] += 1
        for following in range(slot + 1, k):
            current[following] = current[following - 1] + 1


def _exhaust_task(task: Tuple[int, int, int]) -> Dict[str, Any]:
    weight, start, stop = task
    code, decoder = _WORKER['code'], _WORKER['decoder']
    counts = _empty_counts(code.k)
    for support in islice(combinations_from(code.n, weight, start), stop - start):
        error = np.zeros(code.n, dtype=np.uint8)
        error[list(support)] = 1
        outcome = decoder.decode(code.syndrome(error), error=error)
        _tally(outcome, counts)
        counts['count'] += 1
    return counts


def _merge(total: Dict[str, Any], part: Dict[str, Any]):
    for key in ('any', 'vertical', 'horizontal', 'count'):
        total[key] += part[key]
    total['logical'] = total['logical'] + part['logical']


def _execute(
    task_fn: Callable,
    tasks: List[Tuple],
    initargs: Tuple,
    workers: int,
    on_result: Callable[[Tuple, Dict[str, Any]], None],
):
    if workers <= 1:
        _init_worker(*initargs)
        for task in tasks:
            on_result(task, task_fn(task))
        return

    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=initargs) as pool:
        for task, result in zip(tasks, pool.map(task_fn, tasks)):
            on_result(task, result)


def _chunks(total: int, size: int) -> Iterable[Tuple[int, int]]:
    for start in range(0, total, size):
        yield start, min(total, start + size)


# ----------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------

@log_performance
def run_sweep(
    spec: SweepSpec,
    config: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    code_files: Sequence[str] = (),
) -> RunResult:
    """
    Estimate logical error rates at each physical error rate.

    Args:
        spec: Sweep description
        config: Configuration dictionary (settings.py sections)
        workers: Worker processes; defaults to the physical core count
        code_files: Extra registry YAML files to load in every worker

    Returns:
        RunResult with one SweepPoint per rate
    """
    code = CodeRegistry.create_code(spec.code)
    DecoderFactory.create_decoder(code, PipelineConfig.from_dict(config, spec.decoder))
    chunk = int((config or {}).get('bench', {}).get('chunk-size', BENCH_DEFAULTS['chunk-size']))
    workers = available_workers(workers)

    tasks = [
        (point, p, spec.seed, start, stop)
        for point, p in enumerate(spec.rates)
        for start, stop in _chunks(spec.shots, chunk)
    ]
    totals = {point: _empty_counts(code.k) for point in range(len(spec.rates))}
    progress = create_progress_logger(f"Sweep {spec.code}/{spec.decoder}", len(tasks))

    def collect(task, result):
        _merge(totals[task[0]], result)
        progress.step()

    _execute(_sweep_task, tasks, (spec.code, tuple(code_files), config, spec.decoder), workers, collect)

    points = []
    for point, p in enumerate(spec.rates):
        counts = totals[point]
        if spec.counting == 'per-logical' and code.k:
            rate = float(counts['logical'].sum()) / (spec.shots * code.k)
            trials = spec.shots * code.k
        else:
            rate = counts['any'] / spec.shots
            trials = spec.shots
        points.append(SweepPoint(
            p=p,
            shots=spec.shots,
            failures=int(counts['any']),
            LER=rate,
            stderr=math.sqrt(rate * (1.0 - rate) / trials),
            vertical_failures=int(counts['vertical']),
            horizontal_failures=int(counts['horizontal']),
            logical_failures=counts['logical'].tolist(),
        ))
        logger.info(f"p={p}: {counts['any']}/{spec.shots} failures (LER {rate:.3e})")

    progress.complete()
    return RunResult(kind='sweep', spec=spec.to_dict(), records=points, seed=spec.seed)


@log_performance
def run_exhaustive(
    spec: ExhaustSpec,
    config: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    code_files: Sequence[str] = (),
    extended: bool = False,
) -> RunResult:
    """
    Decode every weight-w error pattern and tally failures per direction.

    Raises:
        BudgetExceeded: If C(n, w) exceeds the budget and extended is off
    """
    bench = {**BENCH_DEFAULTS, **(config or {}).get('bench', {})}
    code = CodeRegistry.create_code(spec.code)
    patterns = math.comb(code.n, spec.weight)
    budget = int(bench['exhaustive-budget'])
    if patterns > budget and not extended:
        raise BudgetExceeded(ERROR_MESSAGES['budget'].format(
            n=code.n, w=spec.weight, count=patterns, budget=budget,
        ))

    DecoderFactory.create_decoder(code, PipelineConfig.from_dict(config, spec.decoder))
    workers = available_workers(workers)
    tasks = [(spec.weight, start, stop) for start, stop in _chunks(patterns, int(bench['chunk-size']))]
    totals = _empty_counts(code.k)
    progress = create_progress_logger(
        f"Exhaustive {spec.code}/{spec.decoder} w={spec.weight}", patterns,
        every=int(bench['progress-every']),
    )

    def collect(task, result):
        _merge(totals, result)
        progress.step(count=result['count'])

    _execute(_exhaust_task, tasks, (spec.code, tuple(code_files), config, spec.decoder), workers, collect)

    if totals['count'] != patterns:
        raise HarnessError(f"Enumerated {totals['count']} patterns, expected {patterns}")

    record = ExhaustRecord(
        weight=spec.weight,
        patterns=patterns,
        vertical=int(totals['vertical']),
        horizontal=int(totals['horizontal']),
        any_logical=int(totals['any']),
        tally=spec.tally,
    )
    progress.complete(
        f"{record.failures} {spec.tally} failures of {patterns} ({record.failure_fraction:.3e}); "
        f"{record.vertical} vertical, {record.horizontal} horizontal, {record.any_logical} any"
    )
    return RunResult(kind='exhaustive', spec=spec.to_dict(), records=[record])
