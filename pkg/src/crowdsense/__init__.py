"""Budget-constrained crowd-sensing over opportunistic contact traces.

Select which internal devices sense in each interval (random, greedy or
context-aware vertex-cover heuristics, with social bootstrapping) and score the
choice against the contacts every device would have seen.
"""

__version__ = "0.1.0"

from .bootstrap import bootstrap, bootstrap_friendship, bootstrap_interest, bootstrap_random
from .graph import IntervalGraph, coverage_ratio, covered_edges, ground_truth_graph, observed_graph
from .ingest import (
    DeviceInterner,
    SynthParams,
    generate_synthetic,
    parse_contacts,
    parse_profiles,
    serialize_contacts,
    serialize_profiles,
)
from .model import (
    ConfigError,
    ConsistencyError,
    ContactEvent,
    ContactTrace,
    CrowdsenseError,
    DeviceRegistry,
    OracleGuardError,
    SimConfig,
    SocialProfiles,
    TraceParseError,
    TraceSchemaError,
    resolve_budget,
    resolve_k,
)
from .selection import (
    coverage_utility,
    observability,
    select_greedy,
    select_hcontext,
    select_optimal_bruteforce,
    select_random,
)
from .simulator import RoundReport, mean_ratio, run, run_sweep
