"""Experiment configuration, summaries and reports."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from kernel_duality.errors import ValidationError
from kernel_duality.utils import get_setting


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one experiment run.

    Attributes:
        kernel_path (str): Kernel file
        n (int): Vertex count
        repetitions (int): Independent samples
        seed (int): Base seed; repetition seeds are derived from it
        k_max (int): Largest component size in spectra
        tol (float): Solver tolerance
        n_ladder (tuple): Vertex counts for the census ladder
        output (str): Report path (None prints to stdout)
        format (str): 'csv' or 'json'
        workers (int): Parallel processes for repetitions
    """

    kernel_path: Optional[str] = None
    n: int = field(default_factory=lambda: get_setting('DEFAULT_N', 20000))
    repetitions: int = field(default_factory=lambda: get_setting('DEFAULT_REPETITIONS', 20))
    seed: int = field(default_factory=lambda: get_setting('DEFAULT_SEED', 0))
    k_max: int = field(default_factory=lambda: get_setting('SPECTRUM_K_MAX', 6))
    tol: float = field(default_factory=lambda: get_setting('SURVIVAL_TOL', 1e-12))
    n_ladder: Tuple[int, ...] = field(
        default_factory=lambda: tuple(get_setting('N_LADDER', (2000, 8000, 20000)))
    )
    output: Optional[str] = None
    format: str = 'csv'
    workers: int = field(default_factory=lambda: get_setting('WORKERS', 1))

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValidationError('repetitions must be at least 1')
        if self.n < 10 or any(n < 10 for n in self.n_ladder):
            raise ValidationError('n must be at least 10')
        if self.tol <= 0:
            raise ValidationError('tolerances must be positive')
        if self.k_max < 1 or self.k_max > get_setting('TREE_MAX_K', 8):
            raise ValidationError(f'k_max must be in 1..{get_setting("TREE_MAX_K", 8)}')
        if self.format not in ('csv', 'json'):
            raise ValidationError(f'unknown report format {self.format!r}')
        if self.workers < 1:
            raise ValidationError('workers must be at least 1')


@dataclass(frozen=True, eq=False)
class StatSummary:
    """Mean and standard error over repetitions.

    Attributes:
        mean (float): Sample mean
        stderr (float): Sample stdev / sqrt(reps); 0 for a single repetition
        repetitions (int): Number of values
        values (tuple): Per-seed values in seed order
    """

    mean: float
    stderr: float
    repetitions: int
    values: Tuple[float, ...]

    @classmethod
    def from_values(cls, values):
        data = np.asarray(list(values), dtype=float)
        if data.size == 0:
            raise ValidationError('cannot summarize zero repetitions')
        stderr = float(data.std(ddof=1) / np.sqrt(data.size)) if data.size > 1 else 0.0
        return cls(float(data.mean()), stderr, int(data.size), tuple(data.tolist()))

    def z_score(self, expected):
        """(mean - expected) / stderr; 0 when both agree and stderr vanishes."""
        diff = self.mean - expected
        if self.stderr == 0:
            return 0.0 if diff == 0 else float(np.sign(diff) * np.inf)
        return diff / self.stderr

    def within(self, expected, sigmas=3.0, slack=0.0):
        return abs(self.mean - expected) <= sigmas * self.stderr + slack

    def to_dict(self):
        return {
            'mean': self.mean,
            'stderr': self.stderr,
            'repetitions': self.repetitions,
            'values': list(self.values)
        }


@dataclass(eq=False)
class ExperimentReport:
    """Tabular per-seed rows plus a summary block.

    Attributes:
        name (str): Experiment name
        columns (list): CSV header, fixed per experiment
        rows (list): One dict per repetition, keyed by `columns`
        summary (dict): Oracles and StatSummary objects
        notes (list): Caveats printed with the report
    """

    name: str
    columns: List[str]
    rows: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def column(self, name):
        return [row[name] for row in self.rows]

    def to_dict(self):
        summary = {
            key: value.to_dict() if hasattr(value, 'to_dict') else value
            for key, value in self.summary.items()
        }
        return {
            'experiment': self.name,
            'columns': list(self.columns),
            'rows': [{column: row.get(column) for column in self.columns} for row in self.rows],
            'summary': summary,
            'notes': list(self.notes)
        }
