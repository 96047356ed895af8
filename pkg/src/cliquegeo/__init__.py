"""Deterministic congested-clique simulator with a distributed geometry suite.

Three node programs run on the simulated clique: a chord-stack convex hull
finishing in rounds proportional to hull size, a bridge-merging hull
finishing in logarithmically many rounds, and a corridor-splitting point
set triangulation.  Sequential oracles define ground truth for all three.
"""
from .engine import EngineConfig, Message, NodeCtx, RunMetrics, run_protocol
from .errors import (
    BudgetViolation,
    CliqueGeoError,
    CollinearTriple,
    CongestionViolation,
    DuplicatePoint,
    GenerationExhausted,
    InfeasibleRouting,
    NoMateFound,
    NonTermination,
    NotPowerOfTwo,
    PreconditionError,
    ProtocolError,
    SimulationViolation,
    VerticalLine,
)
from .experiments import TrialOutcome, run_experiment, run_trial
from .generators import generate
from .geometry import Bridge, ConvexChain, Point, cross, orientation
from .log_hull import BridgeSearch, bridge_between, log_hull_program
from .oracles import (
    ValidationReport,
    bridge_oracle,
    general_position_check,
    hull_oracle,
    triangulation_validator,
)
from .quick_hull import quick_hull_program
from .triangulation import (
    local_triangulation,
    mate_valid,
    triangulate_corridor,
    triangulation_program,
)

__version__ = "0.1.0"

__all__ = [
    "BridgeSearch",
    "Bridge",
    "BudgetViolation",
    "CliqueGeoError",
    "CollinearTriple",
    "CongestionViolation",
    "ConvexChain",
    "DuplicatePoint",
    "EngineConfig",
    "GenerationExhausted",
    "InfeasibleRouting",
    "Message",
    "NoMateFound",
    "NodeCtx",
    "NonTermination",
    "NotPowerOfTwo",
    "Point",
    "PreconditionError",
    "ProtocolError",
    "RunMetrics",
    "SimulationViolation",
    "TrialOutcome",
    "ValidationReport",
    "VerticalLine",
    "bridge_between",
    "bridge_oracle",
    "cross",
    "general_position_check",
    "generate",
    "hull_oracle",
    "local_triangulation",
    "log_hull_program",
    "mate_valid",
    "orientation",
    "quick_hull_program",
    "run_experiment",
    "run_protocol",
    "run_trial",
    "triangulate_corridor",
    "triangulation_program",
    "triangulation_validator",
]
