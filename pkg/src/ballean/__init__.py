"""Finite balleans: axioms, cellularization, ultrametrics and direct-product decompositions."""

from .ballcore import (
    AxiomReport,
    Asymorphism,
    BallStructure,
    cofinality,
    dual_ball,
    is_connected,
    radii_leq,
    set_ball,
    validate,
    verify_asymorphism,
)
from .cellular import cellularization, is_cellular, partition_at, path_ball
from .decompose import BranchingProfile, canonical_block_order, check_homogeneity, decompose
from .errors import ContractError, InputError, ResourceError
from .groupball import FiniteGroup, SubgroupChain, asymorphism_between, chain_profile, group_ballean
from .metrics import FiniteMetricSpace, is_ultrametric, metric_ballean, ultrametrize
from .product import PointedFamily, build_product_ballean, product_partition

__all__ = [
    "AxiomReport",
    "Asymorphism",
    "BallStructure",
    "BranchingProfile",
    "ContractError",
    "FiniteGroup",
    "FiniteMetricSpace",
    "InputError",
    "PointedFamily",
    "ResourceError",
    "SubgroupChain",
    "asymorphism_between",
    "build_product_ballean",
    "canonical_block_order",
    "cellularization",
    "chain_profile",
    "check_homogeneity",
    "cofinality",
    "decompose",
    "dual_ball",
    "group_ballean",
    "is_cellular",
    "is_connected",
    "is_ultrametric",
    "metric_ballean",
    "partition_at",
    "path_ball",
    "product_partition",
    "radii_leq",
    "set_ball",
    "ultrametrize",
    "validate",
    "verify_asymorphism",
]
