"""Agent-based rumor diffusion on scale-free networks.

Seed-reproducible simulator of information and misinformation spreading:
Barabasi-Albert graph generation with power-law verification, a multi-agent
diffusion engine (spontaneous visualization, collective influence,
communication persuasion, debunking, deactivation), an SIR rumor baseline,
and the analysis pipeline for activation dynamics, skepticism polarization
and echo-chamber assortativity.
"""

from ._kernels import available_backends, backend_name, get_backend
from .analysis import (
    AssortativityResult,
    AveragedSeries,
    DegenerateLabelsError,
    DegreeClassDensity,
    EmptySubgraphError,
    ThresholdHistogram,
    activation_density_series,
    assortativity_sweep,
    attribute_assortativity,
    density_by_degree,
    echo_subgraph,
    final_state_assortativity,
    is_bimodal,
    threshold_histogram,
    time_to_half_peak,
)
from .engine import (
    SimulationState,
    apply_collective_influence,
    apply_deactivation,
    apply_debunking,
    apply_persuasion,
    apply_spontaneous,
    run,
    step,
)
from .graph import (
    DegreeHistogram,
    Graph,
    InvalidParameterError,
    degree_histogram,
    generate_ba,
    read_edge_list,
    write_edge_list,
    write_gexf,
)
from .model import (
    AgentColor,
    AgentState,
    ModelParams,
    NewsSchedule,
    Population,
    SimulationTrace,
    StepReport,
    init_population,
    reliability_at,
)
from .powerlaw import (
    EnsembleFit,
    InsufficientDataError,
    PowerLawFit,
    fit_power_law,
    gamma_ensemble,
)
from .rng import Pcg32, derive_subseed
from .scenarios import (
    BatchRunError,
    ConfigError,
    ScenarioConfig,
    batch_run,
    execute_run,
    resolve_scenario,
    scenario_echo_chamber,
    scenario_higgs,
    scenario_hoax_debunk,
    scenario_polarization,
    scenario_true_news,
)
from .sir import SirParams, SirState, SirTrace, run_sir, sir_step

__version__ = "0.1.0"
