"""Benchmark harness: records, configuration, suites and the command line."""

from .config import ConfigError, HarnessConfig, load_config, parse_config
from .records import ExperimentRecord, RecordStore, read_records
from .suite import crossover_report, qaoa_pipeline, run_suite, summary_table, paired_margins
