"""Cover systems, sheaves and the Serre-subcategory side."""

from .cover import (
    AxiomReport,
    CoverSystem,
    CoveringVerdict,
    CoveringWitness,
    Derivation,
    Mode,
    check_localizing,
    check_topology,
    covers,
    discrete_system,
    enumerate_covering_sieves,
    enumerate_sieves,
    glue_fixed_point,
    is_covering,
    minimal_cover,
    minimal_covers,
    one_sided,
    product_system,
    replay_witness,
    same_topology,
    single_deflation_system,
    tensor_topology,
    topology_inf,
    topology_sup,
    trivial_system,
    validate_system,
)
from .serre import (
    enumerate_submodules,
    gabriel_commute,
    gabriel_product_member,
    is_simple,
    sloc_hull_member,
    supported_on,
    tensor_null_member,
)
from .sheaves import (
    in_l1,
    in_l2,
    in_w1,
    in_w2,
    is_in_W,
    is_null_presheaf,
    is_sheaf,
    onesided_sheafify,
    plus_morphism,
    sheafify,
    topology_from_null_class,
)

__all__ = [
    "AxiomReport",
    "CoverSystem",
    "CoveringVerdict",
    "CoveringWitness",
    "Derivation",
    "Mode",
    "check_localizing",
    "check_topology",
    "covers",
    "discrete_system",
    "enumerate_covering_sieves",
    "enumerate_sieves",
    "enumerate_submodules",
    "gabriel_commute",
    "gabriel_product_member",
    "glue_fixed_point",
    "in_l1",
    "in_l2",
    "in_w1",
    "in_w2",
    "is_covering",
    "is_in_W",
    "is_null_presheaf",
    "is_sheaf",
    "is_simple",
    "minimal_cover",
    "minimal_covers",
    "one_sided",
    "onesided_sheafify",
    "plus_morphism",
    "product_system",
    "replay_witness",
    "same_topology",
    "sheafify",
    "single_deflation_system",
    "sloc_hull_member",
    "supported_on",
    "tensor_null_member",
    "tensor_topology",
    "topology_from_null_class",
    "topology_inf",
    "topology_sup",
    "trivial_system",
    "validate_system",
]
