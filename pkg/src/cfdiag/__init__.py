"""Counterfactual diagnosis engine for three-layer noisy-OR networks.

Exact posterior and counterfactual disease-ranking measures (expected
sufficiency and expected disablement) via an inclusion-exclusion subset walk,
a brute-force structural-causal oracle for validation, likelihood-weighted
Monte Carlo estimation over twin networks, and a vignette benchmark harness.
"""

from .errors import (
    CapExceededError,
    CfdiagError,
    EvidenceError,
    NumericsError,
    RejectionLimitError,
    ZeroLikelihoodError,
)
from .network import (
    Assignment,
    DiseaseNode,
    Edge,
    Evidence,
    NoisyOrNetwork,
    RiskFactor,
    SymptomNode,
    ValidationIssue,
    ValidationReport,
    ancestral_sample,
    check_evidence,
    load_network,
    network_from_dict,
    network_to_dict,
    off_probability,
    activation_probability,
    save_network,
    validate_network,
)
from .oracle import (
    CounterfactualDistribution,
    CounterfactualIntervention,
    JointTable,
    counterfactual_query,
    disablement_intervention,
    dual_symptom_cpt,
    dual_symptom_joint,
    enumerate_joint,
    latent_entries,
    measure_oracle,
    posterior_oracle,
    sufficiency_intervention,
)
from .inference import (
    InferenceSettings,
    ScaledValue,
    WalkResult,
    disease_posterior,
    evidence_likelihood,
    joint_off_marginal,
    walk_evidence,
)
from .measures import (
    MEASURE_KINDS,
    DiagnosisRanking,
    MeasureValue,
    TieNote,
    expected_disablement,
    expected_sufficiency,
    rank_all_measures,
    rank_diseases,
)
from .twin import TwinLatent, TwinNetwork, build_twin_network, twin_query
from .montecarlo import McEstimate, mc_estimate_measure
from .vignettes import (
    DEFAULT_RARITY_THRESHOLDS,
    RARITY_LABELS,
    MaskingPolicy,
    Vignette,
    generate_vignettes,
    load_vignettes,
    rarity_bucket,
    save_vignettes,
)
from .benchmark import (
    BenchmarkReport,
    CheckResult,
    DesiderataReport,
    MeasureOutcome,
    PairwiseOutcome,
    RarityStratum,
    TopkPoint,
    desiderata_report,
    evaluate_topk,
    wilson_interval,
)
from .randomnets import benchmark_network, random_evidence, random_network
from .subsets import SubsetTermCache, gray_code, iter_bits

__version__ = "0.1.0"
