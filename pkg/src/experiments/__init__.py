"""
实验模块

模拟群体生成、重复实验与速率汇总
"""

from .population_generator import ThetaStarSpec, draw_theta_star, generate_simulated_population
from .runner import (
    ExperimentResult,
    PopulationRecord,
    TrialRecord,
    run_experiment,
    run_seeded_trial,
    run_trial,
    write_experiment_outputs,
)
from .summary import RateTable, summarize_rate, summarize_trials

__all__ = [
    'ExperimentResult',
    'PopulationRecord',
    'RateTable',
    'ThetaStarSpec',
    'TrialRecord',
    'draw_theta_star',
    'generate_simulated_population',
    'run_experiment',
    'run_seeded_trial',
    'run_trial',
    'summarize_rate',
    'summarize_trials',
    'write_experiment_outputs',
]
