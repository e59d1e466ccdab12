"""Domain models package.

Yeh package saare immutable data objects contain karta hai.

"""

from kernel_duality.models.measure import WeightedMeasure
from kernel_duality.models.kernel import DirectedStepFunction, StepFunction, StepKernel
from kernel_duality.models.results import (
    CutDistanceResult,
    CutNormResult,
    DualBundle,
    FiniteSizeLaw,
    SurvivalSolution,
    TreeShape,
)
from kernel_duality.models.graph import (
    ComponentDecomposition,
    DualityReport,
    EdgeProbabilityMatrix,
    SampledGraph,
)
from kernel_duality.models.experiment import ExperimentConfig, ExperimentReport, StatSummary


__all__ = [
    'WeightedMeasure',
    'DirectedStepFunction',
    'StepFunction',
    'StepKernel',
    'CutNormResult',
    'CutDistanceResult',
    'SurvivalSolution',
    'TreeShape',
    'FiniteSizeLaw',
    'DualBundle',
    'EdgeProbabilityMatrix',
    'SampledGraph',
    'ComponentDecomposition',
    'DualityReport',
    'ExperimentConfig',
    'ExperimentReport',
    'StatSummary'
]
