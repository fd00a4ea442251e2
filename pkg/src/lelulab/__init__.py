"""A small laboratory for parametric activations, from-scratch dense
networks, and staggered-mesh diffusion sensors on lattice regression data."""

from .activations import (
    ActivationKind,
    ActivationSpec,
    FlexibilityScore,
    derivative,
    evaluate,
    flexibility_score,
    param_derivative,
)
from .datasets import (
    DatasetKind,
    DatasetSpec,
    RegressionDataset,
    build_dataset,
    load_csv,
    normalize,
    power_transform,
    save_csv,
)
from .diffusion import (
    DiffusionReport,
    StructuredGrid,
    diffusion_mse,
    staggered_sensor_1d,
    staggered_sensor_nd,
    true_sensor_1d,
    true_sensor_nd,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    RunReport,
    SweepConfig,
    flexibility_table,
    load_experiment_config,
    load_sweep_config,
    run_experiment,
    run_single,
    run_sweep,
    single_neuron_study,
)
from .network import (
    Network,
    NetworkSpec,
    backward,
    forward,
    forward_batch,
    init_he_normal,
    load_checkpoint,
    predict_batch,
    save_checkpoint,
)
from .optim import (
    DivergenceError,
    History,
    LossKind,
    LRSchedule,
    RegKind,
    Regularization,
    TrainConfig,
    fit,
)

__version__ = "0.1.0"
