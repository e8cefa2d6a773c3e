from app.services.pinn.losses import (
    NetworkEvaluator,
    ic_bc_losses,
    mse_on_grid,
    pde_loss,
    residual_grid,
    time_histogram,
    total_loss,
)
from app.services.pinn.trainer import HistoryRow, NodeSnapshot, TrainConfig, TrainResult, train
