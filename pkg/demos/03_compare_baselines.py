# %% [markdown]
# # Comparing with simple baselines
#
# Every method forecasts the same held-out points one step ahead. The
# baselines only see values strictly before the point they forecast.

# %%
import numpy as np

from mff import TimeSeries, TrainConfig, evaluate_walk_forward, train_mff
from mff import metrics

rng = np.random.default_rng(1)
t = np.arange(150)
series = TimeSeries(values=300 + 25 * np.sin(t / 8) + rng.normal(0, 2, t.size))

ck = train_mff(series, TrainConfig(window_size=60, epochs=4000, max_lr=1e-3, seed=3))
wf = evaluate_walk_forward(ck, series)
v = series.values

reports = {
    "MFF(8,5)": metrics.error_report(wf.predicted, wf.actual),
    "Naive": metrics.error_report(
        metrics.walk_forward_baseline(v, wf.positions, metrics.naive_forecast), wf.actual
    ),
    "SMA(K=3)": metrics.error_report(
        metrics.walk_forward_baseline(v, wf.positions, lambda h: metrics.sma_forecast(h, 3)), wf.actual
    ),
    "OLS trend": metrics.error_report(
        metrics.walk_forward_baseline(v, wf.positions, metrics.ols_trend_forecast), wf.actual
    ),
}
print(metrics.format_table(reports))

# %% [markdown]
# The same table from the command line, after writing the series to CSV:
#
#     mff bench --input series.csv --window 60 --epochs 4000 --max-lr 1e-3 --seed 3 --sma-k 3
