from .mlp import (
    FORMAT_VERSION,
    Mlp,
    MlpConfig,
    TrainReport,
    forward,
    init_mlp,
    load_model,
    predict,
    save_model,
    train,
)
from .kernels import backend_name

__all__ = [
    "FORMAT_VERSION",
    "Mlp",
    "MlpConfig",
    "TrainReport",
    "backend_name",
    "forward",
    "init_mlp",
    "load_model",
    "predict",
    "save_model",
    "train",
]
