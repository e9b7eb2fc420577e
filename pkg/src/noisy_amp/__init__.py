"""Quantum-limited linear amplification with conditional photonic corrections.

Truncated-Fock-space models of a phase-insensitive linear amplifier followed
by probabilistic operations — photon subtraction/addition, their coherent
superposition, beam-splitter subtraction with a real detector, and quantum
scissors — plus the metrics (effective gain, fidelity, Holevo phase variance,
Wigner function) and sweep drivers that turn them into figure datasets.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    InvalidInput,
    NoBracket,
    NoisyAmpError,
    TruncationError,
    ZeroTrace,
)
from .fock import (
    DensityOperator,
    FockOperator,
    HilbertSpec,
    Ket,
    annihilation,
    coherent_ket,
    creation,
    displacement_operator,
    expectation,
    grow_dim,
    initial_dim,
    normalize,
    number_operator,
    partial_trace,
    tensor,
    thermal_density,
)
from .channels import (
    Add,
    Coherent,
    FockProjection,
    OnOff,
    Subtract,
    apply_operation,
    beam_splitter_unitary,
    bs_subtraction,
    build_operator,
    ndpa_addition,
    pila_channel,
    pila_coherent,
)
from .metrics import (
    MetricReport,
    effective_gain,
    fidelity_to_target,
    holevo_variance,
    phase_averaged,
    phase_averaged_report,
    phase_space_grid,
    wigner,
)
from .scissor import (
    ScissorConfig,
    circuit_oracle,
    pattern_multiplicity,
    scissor_amplify,
    scissor_filter,
)
from .experiments import (
    PilaOnly,
    PilaThen,
    PilaThenBsSubtraction,
    Scissor,
    SweepPlan,
    SweepRow,
    calibrate_gain,
    evaluate_scheme,
    fig1_table,
    fig2_table,
    fig3a_table,
    fig3b_table,
    fig4_table,
    fig7_table,
    fig8_table,
    fig9_table,
    run_sweep,
    scheme_label,
    wigner_table,
)
