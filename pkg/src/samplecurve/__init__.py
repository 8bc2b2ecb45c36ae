"""Period and signal recovery from unordered clouds of sample trains."""
from .circlemap import CircleLift, PLReparam, RotationEstimate, build_lift, rho_invariance_check, rotation_number
from .curvegeom import CoveringVerdict, CyclicOrder, covering_test, hausdorff_distance, order_curve
from .embedding import (
    PairSet,
    TrainCloud,
    TrainConfig,
    embed_train,
    pair_map,
    project_left,
    project_right,
    read_cloud_csv,
    sample_cloud,
    write_cloud_csv,
)
from .recovery import (
    PeriodEstimate,
    PipelineParams,
    Reconstruction,
    align_and_rmse,
    estimate_period,
    reconstruct_signal,
)
from .signals import (
    FourierSpec,
    PeriodicSignal,
    WarpSpec,
    make_example1,
    make_fourier,
    make_sine,
    make_warped,
    shift,
    signal_from_json,
)

__version__ = "0.1.0"
