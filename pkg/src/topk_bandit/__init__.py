"""Top-K contextual bandit ranking with neural and linear reward models."""
from .config import format_config, load_config
from .core import ExperimentConfig, ModelScorer, run_experiment, run_round, select_top_k
from .environments import EnvSpec, MnistEnv, MushroomEnv, SyntheticLinearEnv, build_env, oracle_top_k
from .errors import (BanditError, ConfigError, ConsistencyError, DataError, DivergedTrainingError, EncodingError,
                     FormatError, IncompatibleTracesError, InvalidInputError, NumericError, ParseError)
from .metrics import ComparisonTable, ExperimentTrace, accumulate, compare
from .models import ModelSpec, build_model, gradient_check
from .policies import PolicySpec, choose_arm, epsilon_schedule
from .types import ContextMatrix, History, RoundRecord, Slate

__version__ = "0.1.0"

__all__ = [
    "BanditError", "ComparisonTable", "ConfigError", "ConsistencyError", "ContextMatrix", "DataError",
    "DivergedTrainingError", "EncodingError", "EnvSpec", "ExperimentConfig", "ExperimentTrace", "FormatError",
    "History", "IncompatibleTracesError", "InvalidInputError", "MnistEnv", "ModelScorer", "ModelSpec",
    "MushroomEnv", "NumericError", "ParseError", "PolicySpec", "RoundRecord", "Slate", "SyntheticLinearEnv",
    "accumulate", "build_env", "build_model", "choose_arm", "compare", "epsilon_schedule", "format_config",
    "gradient_check", "load_config", "oracle_top_k", "run_experiment", "run_round", "select_top_k",
]
