# %% [markdown]
# # Slicing a series and turning slices into features
#
# A series of length n is cut into every contiguous window of length Ws.
# Each window becomes one row of six numbers: its position, mean, standard
# deviation, range, approximate entropy and visibility-graph degree sum.

# %%
import numpy as np

from mff import (
    TimeSeries,
    build_feature_matrix,
    default_function_sequence,
    feat_apen,
    feat_vg_degree,
    fit_standardize,
    make_supervised,
    sliding_window,
    train_test_split,
)

rng = np.random.default_rng(0)
t = np.arange(295)
series = TimeSeries(values=4700 + 17 * t + 60 * np.sin(t / 9) + rng.normal(0, 5, t.size))

# %% 295 points and a window of 180 give 116 slices
slices = sliding_window(series, 180)
print(len(slices), "slices, first starts at", slices[0].start, "last at", slices[-1].start)

# every slice but the last has a target: the value right after it
sup = make_supervised(slices, series)
train, test = train_test_split(sup, 0.8)
print(len(sup), "supervised examples ->", len(train), "train /", len(test), "test")

# %% [markdown]
# ## The two less common features
#
# Approximate entropy is near zero for regular signals and grows with
# irregularity. The visibility degree counts how many pairs of points can
# "see" each other over the points between them.

# %%
regular = np.tile([0.0, 1.0], 20)
noisy = rng.normal(size=40)
print("ApEn regular:", round(feat_apen(regular), 4), " noisy:", round(feat_apen(noisy), 4))

hill = -((np.arange(1, 11) - 5.5) ** 2)   # concave: only neighbours see each other
bowl = np.arange(1, 11) ** 2.0             # convex: everybody sees everybody
print("degree sum concave:", feat_vg_degree(hill), " convex:", feat_vg_degree(bowl))

# %% the feature matrix, raw and standardised on the training rows
fm = build_feature_matrix(slices, default_function_sequence())
print(fm.names, fm.shape)
scaled, scaler = fit_standardize(fm, range(0, len(train)))
np.set_printoptions(precision=3, suppress=True)
print("raw last row   :", fm.values[-1])
print("scaled last row:", scaled.values[-1])
