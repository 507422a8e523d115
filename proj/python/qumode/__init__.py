"""Qubit-qumode variational state preparation."""

from ._core import (
    ConfigError,
    DimensionError,
    QumodeError,
    annihilation,
    apply_ansatz,
    expm_anti_hermitian,
    fidelity,
    minimize,
    objective,
    objective_from_p0,
    partial_trace_qubit,
    rotation_gate,
    run_cell,
    run_sweep,
    swap_test_p0,
    target,
    vp_gate,
    wigner,
    wigner_at,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "QumodeError",
    "annihilation",
    "apply_ansatz",
    "expm_anti_hermitian",
    "fidelity",
    "minimize",
    "objective",
    "objective_from_p0",
    "partial_trace_qubit",
    "rotation_gate",
    "run_cell",
    "run_sweep",
    "swap_test_p0",
    "target",
    "vp_gate",
    "wigner",
    "wigner_at",
]
