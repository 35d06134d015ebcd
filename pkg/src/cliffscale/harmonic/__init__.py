"""Bandlimited harmonic targets, an MLP regressor, and bandwidth regularization."""

from .basis import (
    BandwidthRegularizer,
    HarmonicFunction,
    build_basis_matrix,
    eval_harmonic,
    frequency_lattice,
    nneg,
    regularizer_gradient,
    regularizer_value,
    sample_harmonic,
)
from .network import (
    AdamState,
    MlpModel,
    adam_step,
    init_mlp,
    load_model,
    mlp_backward,
    mlp_forward,
    mlp_forward_batch,
    save_model,
)
from .training import (
    DivergenceError,
    TrainConfig,
    TrainResult,
    run_harmonic_scaling,
    train,
)

__all__ = [
    "AdamState",
    "BandwidthRegularizer",
    "DivergenceError",
    "HarmonicFunction",
    "MlpModel",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "build_basis_matrix",
    "eval_harmonic",
    "frequency_lattice",
    "init_mlp",
    "load_model",
    "mlp_backward",
    "mlp_forward",
    "mlp_forward_batch",
    "nneg",
    "regularizer_gradient",
    "regularizer_value",
    "run_harmonic_scaling",
    "sample_harmonic",
    "save_model",
    "train",
]
