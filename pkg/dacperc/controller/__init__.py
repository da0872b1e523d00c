from .experiment_controller import (
    Estimate,
    SamplerSettings,
    TailFit,
    buffer_sensitivity,
    cluster_tail,
    crossing_prob,
    cutpoint_growth,
    duality_audit,
    finite_size_check,
    fk_range_tail,
    make_estimate,
    rc_locator,
    run_ensemble,
    theta_curve,
    uniqueness_probe,
)
from .exact_controller import exact_tables, lemma_suite, russo_suite
from .sample_controller import dump_samples
from .report_controller import open_outputs, write_summary, write_plot
