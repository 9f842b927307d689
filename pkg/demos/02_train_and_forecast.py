# %% [markdown]
# # Training and forecasting
#
# Training runs a fixed number of full-batch epochs. The learning rate
# follows a triangular cycle and every update is an Adam step. The
# parameters with the lowest training loss are kept.

# %%
import numpy as np

from mff import TimeSeries, TrainConfig, evaluate_walk_forward, predict_next, train_mff
from mff.metrics import error_report

t = np.arange(120)
series = TimeSeries(values=50 + 0.4 * t + 6 * np.sin(2 * np.pi * t / 12))

config = TrainConfig(window_size=36, hidden=(8, 5), epochs=3000, max_lr=1e-3, seed=0)
ck = train_mff(series, config)
print(f"best epoch {ck.best_epoch} of {config.epochs}, loss {ck.best_loss:.5f}")

# %% learning rate and loss over the first cycle
lrs = ck.lr_history()
for epoch in (1, 250, 500, 750, 1000):
    print(f"epoch {epoch:5d}  lr {lrs[epoch - 1]:.2e}  loss {ck.loss_history[epoch - 1]:.5f}")

# %% one-step forecasts over the held-out share, then the next unseen value
wf = evaluate_walk_forward(ck, series)
print(error_report(wf.predicted, wf.actual))
print("forecast for t =", series.n + 1, ":", round(predict_next(ck, series), 3))

# %% try matplotlib if it is around; the numbers above are the point
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(1, 2, figsize=(10, 3.5))
    ax[0].semilogy(ck.loss_history)
    ax[0].set_title("training loss")
    ax[1].plot(np.arange(1, series.n + 1), series.values, label="series")
    ax[1].plot(wf.positions, wf.predicted, "o", label="forecast")
    ax[1].legend()
    fig.savefig("train_and_forecast.png", dpi=100, bbox_inches="tight")
    print("saved train_and_forecast.png")
except ImportError:
    pass
