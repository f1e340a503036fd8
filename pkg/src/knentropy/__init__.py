"""Kolmogorov-Nagumo mean entropies, Renyi-type conditional entropies, and
generalized g-vulnerabilities on finite alphabets, with a property-test
harness for conditioning-reduces-entropy, data-processing, and
core-concavity claims.
"""

from .conditional import (
    AcSolution,
    AcSolverConfig,
    ac_grid_oracle,
    ac_objective,
    arimoto,
    augustin_csiszar,
    hayashi,
    hct_conditional,
    shannon_conditional,
    sharma_mittal_conditional,
)
from .entropy import (
    LIMIT,
    EntropyParams,
    alpha_norm,
    hct,
    is_limit,
    renyi,
    shannon,
    sharma_mittal,
    unified_entropy,
)
from .frameworks import (
    EAVG,
    EGM,
    EntropyFramework,
    check_ccv,
    epknavg,
    framework_cond_entropy,
    framework_entropy,
    parse_framework,
    to_eavg,
)
from .means import (
    Affine,
    Compose,
    DomainError,
    Exp,
    Log,
    MonotoneFn,
    Negate,
    Power,
    QExp,
    QLog,
    WeightedValues,
    compose,
    conditional_kn_mean,
    identity_fn,
    kn_mean,
    parse_fn,
    q_exp,
    q_log,
)
from .measures import Measure, build_measure
from .prob import (
    Channel,
    Dist,
    Joint,
    MarkovTriple,
    SimplexError,
    compose_markov,
    load_channel,
    load_dist,
    load_joint,
    make_joint,
    parse_dist,
    random_instance,
)
from .properties import (
    CounterexampleReport,
    PropertyReport,
    check_cre,
    check_dpi,
    check_example_identity,
    check_knavg_representation,
    counterexample_joint,
    run_counterexample,
)
from .vulnerability import (
    BayesSolution,
    DecisionRule,
    FiniteGain,
    GainFn,
    SoftZeroOne,
    Transformed,
    VulnSpec,
    bayes_vulnerability,
    g_bayes_entropy,
    g_entropy,
    g_posterior_entropy,
    parse_gain,
    posterior_vulnerability,
    prior_vulnerability,
    transform_spec,
)

__version__ = "0.1.0"
