from app.services.network.mlp import (
    MlpParams,
    forward,
    forward_jet,
    init_params,
    load_checkpoint,
    save_checkpoint,
)
from app.services.network.adam import AdamState, DivergenceError, adam_step
