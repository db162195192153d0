"""Exact-arithmetic Fourier-Mukai partner counting for projective K3 surfaces."""

from .bqf import (
    Automorph,
    BinaryQuadraticForm,
    ClassGroupData,
    TransformedForm,
    cycle,
    form_to_lattice,
    fundamental_automorph,
    genus_partition,
    genus_representative_forms,
    improper_automorph,
    improper_class_count,
    is_properly_equivalent,
    is_reduced,
    lattice_to_form,
    opposite,
    pell_fundamental,
    proper_classes,
    reduce_form,
)
from .errors import CapExceededError, K3FMError, LatticeParseError, UnsupportedError
from .finite_qform import (
    DEFAULT_CAP,
    FiniteFormMap,
    FiniteOrthogonalGroup,
    FiniteQuadraticForm,
    are_isometric,
    cyclic_form,
    double_coset_count,
    evaluate_q,
    finite_form,
    isometries_signed,
    negate_form,
    negation_map,
    orthogonal_group,
    orthogonal_sum,
    subgroup_generated,
    trivial_form,
)
from .fm_count import (
    FMCountResult,
    GENERIC_HODGE,
    HodgeGroupSpec,
    NeronSeveriSpec,
    ScanReport,
    even_hyperbolic_prime_lattice,
    fm_number,
    fm_number_nikulin,
    fm_number_rank1,
    fm_number_rank2,
    fm_table,
    gauss_scan,
    hodge_order_candidates,
)
from .gluing import (
    GluingClasses,
    GluingCountReport,
    GluingDatum,
    Overlattice,
    OverlatticeReport,
    definite_genus_lattices,
    glue,
    gluing_classes,
    recovered_gluing_map,
    trivial_overlattice,
    verify_gluing_counts,
    verify_overlattice,
)
from .lattice import (
    IntegerLattice,
    Signature,
    SmithDecomposition,
    diagonal_lattice,
    direct_sum,
    discriminant_form,
    e8_lattice,
    hyperbolic_plane,
    induced_form_map,
    invariant_factors,
    k3_lattice,
    lattice_from_obj,
    make_lattice,
    min_generators,
    parse_lattice_file,
    rescale,
    signature,
    smith_normal_form,
)

__all__ = [name for name in dir() if not name.startswith("_")]
