from .params import RcmParams, EdgeConfig, ChainState
from .sampler import (
    ChainRun,
    check_subcriticality,
    cluster_identifiers,
    default_buffer,
    integrated_autocorrelation_time,
    run_chain,
    sample_fk,
    spanning_flag,
    sw_sweep,
)
from .exact import (
    Event,
    ExactModel,
    exact_conditional_edge_prob,
    exact_dac_probability,
    exact_distribution,
)
from .lemmas import LemmaReport, run_suite, sequential_monotone_coupling
