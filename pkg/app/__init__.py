"""rang: residual-adaptive collocation node generation for PINNs."""
