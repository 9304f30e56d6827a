"""Agent-based simulation of decentralized cluster-forming task allocation."""
from .core import (Agent, Cluster, ConfigError, Policy, Task, TickReport, World,
                   check_invariants, init_world, run_to_completion, tick)
from .drap import DrapConfig, DrapPolicy
from .fifo import FifoPolicy
from .metrics import RunSummary, TickSample
from .workload import WorkloadSpec, generate

__version__ = "0.1.0"
