from .catalog import CATALOG, DEFAULT_GRID, ExperimentSpec, Pipeline
from .records import HEADER, RunRecord, read_records, write_records
from .runners import (run_concentration, run_discord_histogram, run_experiment, run_negativity_sweep,
                      run_state_preparation)
from .streams import realization_streams
from .targets import target_state

__all__ = ["CATALOG", "DEFAULT_GRID", "ExperimentSpec", "HEADER", "Pipeline", "RunRecord",
           "read_records", "realization_streams", "run_concentration", "run_discord_histogram",
           "run_experiment", "run_negativity_sweep", "run_state_preparation", "target_state",
           "write_records"]
