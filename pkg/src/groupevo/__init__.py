"""Group evolution discovery in temporal social networks."""

from .cpm import CPMDetector, Group, detect_groups, enumerate_maximal_cliques, k_clique_communities, undirected_projection
from .errors import (
    EmptyGroup,
    EmptyLog,
    FrameMismatch,
    GroupEvoError,
    InfeasibleScript,
    InputError,
    NonConvergence,
    UnparseableTimestamp,
    VerificationFailure,
    WindowLargerThanSpan,
)
from .ged import (
    EventType,
    EvolutionChain,
    EvolutionEvent,
    GedParams,
    build_chains,
    classify_pair,
    count_matches,
    compare_all,
    count_events,
    ged_run,
    inclusion,
)
from .harness import EventCountReport, RunConfig, run_experiment, verify_scenario
from .importance import ImportanceMap, degree_importance, frame_importance, social_position
from .temporal import (
    InteractionRecord,
    SocialNetwork,
    TemporalEventLog,
    TemporalSocialNetwork,
    Timeframe,
    WindowScheme,
    WindowSpec,
    build_snapshot,
    parse_event_log,
    read_event_log,
    slice_log,
)
from .synth import (
    FrameDirective,
    PlantedGroup,
    ScenarioScript,
    TruthEvent,
    churn_scenario,
    figure1_scenario,
    generate,
    random_scenario,
    stable_scenario,
)

__version__ = "0.1.0"
