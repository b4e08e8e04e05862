"""Trainable quantum kernels benchmarked against classical SVC baselines."""

__version__ = "0.1.0"

from .datapipe import Dataset, PipelineSpec, make_synthetic
from .errors import ConfigError, DataError, EncodingError, NumericalError, QkbenchError, SizeError
from .featuremap import (
    AnsatzParams,
    EncoderSpec,
    apply_ansatz,
    cyclic_pad,
    encode_amplitude,
    encode_coherent,
    extended_variant,
    feature_state,
    resource_count,
)
from .kernels import (
    KernelMatrix,
    fidelity,
    gram_linear,
    gram_qamp,
    gram_qrbf,
    gram_quantum,
    gram_rbf,
    resolve_gamma,
)
from .kta import TrainConfig, TrainReport, init_params, kta_gradient, kta_score, train
from .search import SearchResult, SearchSpace, grid_search_classical, two_stage_random_search
from .statevec import StateVector, apply_cnot, apply_ry, apply_rz, overlap, prepare_state, zero_state
from .svm import SvcModel, accuracy, decision_function, fit_binary, fit_predict_multiclass

__all__ = [
    "AnsatzParams",
    "ConfigError",
    "DataError",
    "Dataset",
    "EncoderSpec",
    "EncodingError",
    "KernelMatrix",
    "NumericalError",
    "PipelineSpec",
    "QkbenchError",
    "SearchResult",
    "SearchSpace",
    "SizeError",
    "StateVector",
    "SvcModel",
    "TrainConfig",
    "TrainReport",
    "accuracy",
    "apply_ansatz",
    "apply_cnot",
    "apply_ry",
    "apply_rz",
    "cyclic_pad",
    "decision_function",
    "encode_amplitude",
    "encode_coherent",
    "extended_variant",
    "feature_state",
    "fidelity",
    "fit_binary",
    "fit_predict_multiclass",
    "gram_linear",
    "gram_qamp",
    "gram_qrbf",
    "gram_quantum",
    "gram_rbf",
    "grid_search_classical",
    "init_params",
    "kta_gradient",
    "kta_score",
    "make_synthetic",
    "overlap",
    "prepare_state",
    "resolve_gamma",
    "resource_count",
    "train",
    "two_stage_random_search",
    "zero_state",
]
