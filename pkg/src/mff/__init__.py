"""Multi-feature fusion (MFF) time-series forecasting.

Slice a univariate series with a sliding window, turn every slice into a
short feature vector, and fit a small perceptron to predict the next value.
"""

from .errors import MFFError
from .features import (
    ColumnScaler,
    FeatureFunction,
    FeatureMatrix,
    FunctionSequence,
    build_feature_matrix,
    default_function_sequence,
    feat_apen,
    feat_distance,
    feat_index,
    feat_mean,
    feat_std,
    feat_vg_degree,
    fit_standardize,
)
from .metrics import ErrorReport, error_report, naive_forecast, ols_trend_forecast, sma_forecast
from .net import MlpModel, backward, forward, mlp_new, mse_loss
from .optim import AdamState, ClrSchedule, adam_init, adam_step, clr_lr
from .series import (
    SupervisedSet,
    TimeSeries,
    TimeSlice,
    TimeSliceSet,
    load_series,
    make_supervised,
    sliding_window,
    train_test_split,
)
from .train import (
    TrainConfig,
    TrainedCheckpoint,
    evaluate_walk_forward,
    load_checkpoint,
    predict_next,
    save_checkpoint,
    train_mff,
)

__version__ = "0.1.0"
