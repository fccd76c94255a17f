"""Deep graph propagation with soft covariance whitening, residual and fuzzy
skip connections, and a label-smoothing curriculum, verified against dense
brute-force oracles at desk scale."""

from .classifier import (
    LinearClassifier,
    TrainConfig,
    accuracy,
    grad_wcls,
    make_reducer,
    predict,
    softmax_cross_entropy,
    train_linear,
)
from .config import CurriculumParams, ExperimentConfig, config_hash, load_config
from .curriculum import (
    AuxGraph,
    CurriculumSchedule,
    aux_from_graph,
    build_curriculum,
    build_knn_aux_graph,
    entropy_filter,
    estimate_labels_teacher,
    iterative_label_propagation,
    normalized_entropy,
    run_curriculum,
    smooth_labels,
    supervised_schedule,
)
from .diagnostics import DiagnosticsRecord, layer_sweep, pairwise_stats, spectral_alignment
from .errors import GraphainError
from .experiment import ResultRow, run_experiment, run_seed
from .graph import (
    Graph,
    NormalizedOperator,
    apply_centering,
    apply_doubly_centered,
    apply_operator,
    build_graph,
    normalized_adjacency,
)
from .io import load_dataset, save_dataset
from .labels import SoftLabelMatrix, one_hot, one_hot_matrix
from .linalg import (
    EigPair,
    SpectralFilterParams,
    inv_sqrt,
    orthonormal_projection,
    principal_subspace_distance,
    soft_spectral_filter,
    sym_eig,
)
from .oracles import (
    DenseSpectrum,
    dense_abar,
    dense_ahat,
    dense_spectrum,
    label_prop_closed_form,
    oversmoothing_limit_check,
    pga_oracle_hard,
    pga_oracle_residual,
    top_d_eigvectors,
)
from .propagation import (
    LayerTrace,
    PropagationConfig,
    PropagationResult,
    fuzzy_update,
    graphain_step,
    init_trace,
    pairnorm_step,
    residual_combine,
    run_fuzzy_r_softgraphain,
    sgc_propagate,
    softgraphain_step,
)
from .synthetic import (
    SyntheticSpec,
    add_feature_noise,
    circulant_graph,
    gen_gaussian_cluster_graph,
    random_connected_graph,
    split_masks,
    with_masks,
)

__version__ = "0.1.0"
