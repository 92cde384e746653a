"""Discrete-time quantum walks with position-dependent coins, and the POVMs they realise."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .core import (
    IDENTITY,
    Angle,
    CoinOp,
    CoinState,
    Custom,
    Protocol,
    StepSpec,
    WalkState,
    apply_coins,
    apply_step,
    coin_matrix,
    coin_state_at,
    position_distribution,
    run,
    shift,
)
from .errors import (
    BadDistribution,
    DegenerateSuperposition,
    DomainError,
    LeakageError,
    NonUnitaryCoin,
    ProtocolFileError,
    WalkError,
    ZeroWeight,
)
from .povm import (
    closed_form_usd_elements,
    kraus_from_walk,
    povm_element,
    reversed_walk_element,
    verify_completeness,
)
from .usd import (
    UsdParams,
    compile_usd,
    discriminate,
    prepare_coin,
    prepare_superposition,
    success_probability,
)

__all__ = [
    "BACKEND",
    "IDENTITY",
    "Angle",
    "CoinOp",
    "CoinState",
    "Custom",
    "Protocol",
    "StepSpec",
    "WalkState",
    "apply_coins",
    "apply_step",
    "coin_matrix",
    "coin_state_at",
    "position_distribution",
    "run",
    "shift",
    "BadDistribution",
    "DegenerateSuperposition",
    "DomainError",
    "LeakageError",
    "NonUnitaryCoin",
    "ProtocolFileError",
    "WalkError",
    "ZeroWeight",
    "closed_form_usd_elements",
    "kraus_from_walk",
    "povm_element",
    "reversed_walk_element",
    "verify_completeness",
    "UsdParams",
    "compile_usd",
    "discriminate",
    "prepare_coin",
    "prepare_superposition",
    "success_probability",
]
