"""Fourier-Mukai partner counting for projective K3 surfaces.

The partner count of X is assembled from the Neron-Severi lattice alone once
the Hodge isometry group of the transcendental lattice is fixed: it is the
sum, over the isomorphism classes S_j in the genus of NS(X), of the number of
double cosets O(S_j) \\ O(A_{S_j}) / G.  Dispatch: Picard number 1 closes to
the 2^(tau(n)-1) formula, Picard number 2 runs the binary-form class engine,
rank >= 3 uses the surjectivity shortcut when rank >= l + 2 and refuses
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from . import bqf
from .errors import UnsupportedError
from .finite_qform import (
    FiniteFormMap,
    cyclic_form,
    double_coset_count,
    isometries_signed,
    negation_map,
    orthogonal_group,
    validate_map,
)
from .lattice import (
    IntegerLattice,
    diagonal_lattice,
    discriminant_form,
    induced_form_map,
    min_generators,
    signature,
)


@dataclass(frozen=True)
class NeronSeveriSpec:
    """An even hyperbolic lattice standing in for NS(X)."""

    lattice: IntegerLattice

    def __post_init__(self):
        if not self.lattice.is_even:
            raise ValueError("Neron-Severi lattice must be even")
        if signature(self.lattice).as_pair() != (1, self.lattice.rank - 1):
            raise ValueError("Neron-Severi lattice must be hyperbolic")

    @property
    def rank(self) -> int:
        return self.lattice.rank


@dataclass(frozen=True)
class HodgeGroupSpec:
    """The Hodge isometry group of the transcendental lattice: cyclic of even
    order, with -id always present.  Orders above 2 require an explicit
    generator action on the discriminant group."""

    order: int = 2
    action: FiniteFormMap | None = None

    def __post_init__(self):
        if self.order < 2 or self.order % 2:
            raise ValueError("Hodge group order must be a positive even integer")
        if self.action is not None:
            if self.action.source != self.action.target:
                raise ValueError("Hodge action must be a self-map")
            if self.action.sign != 1:
                raise ValueError("Hodge action must preserve the form")
            validate_map(self.action)
            if self.order % self.action.map_order() != 0:
                raise ValueError("Hodge action order must divide the group order")


GENERIC_HODGE = HodgeGroupSpec()


@dataclass(frozen=True)
class FMCountResult:
    total: int
    breakdown: tuple  # (genus representative form or lattice, summand)
    method: str

    def __post_init__(self):
        if self.total != sum(s for _, s in self.breakdown) or self.total < 1:
            raise ValueError("breakdown does not sum to the total")


def _euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def hodge_order_candidates(t: int) -> tuple:
    """All even orders 2I with phi(2I) dividing t.  The search is complete:
    phi(m) >= sqrt(m/2), so phi(m) <= t forces m <= 2 t^2."""
    if t < 1:
        raise ValueError("rank must be positive")
    return tuple(
        m for m in range(2, 2 * t * t + 1, 2) if t % _euler_phi(m) == 0
    )


def _tau(n: int) -> int:
    """Distinct prime count of n, by convention 1 for n = 1 (this makes the
    rank-1 partner formula uniform)."""
    if n == 1:
        return 1
    count = 0
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            count += 1
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        count += 1
    return count


def fm_number_rank1(n: int, cap: int | None = None) -> FMCountResult:
    """Partner count for NS = <2n>: 2^(tau(n)-1), cross-checked against the
    double-coset count on the brute-forced orthogonal group of (Z/2n, 1/2n)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    a = cyclic_form(2 * n, Fraction(1, 2 * n))
    group = orthogonal_group(a, cap=cap)
    neg = negation_map(a)
    counted = double_coset_count(group, [neg], [neg])
    expected = 2 ** (_tau(n) - 1)
    if counted != expected:
        raise RuntimeError(
            f"rank-1 cross-check failed for n={n}: cosets {counted}, formula {expected}"
        )
    return FMCountResult(counted, ((diagonal_lattice(2 * n), counted),), "rank1")


def fm_number_nikulin(ns: NeronSeveriSpec) -> FMCountResult | None:
    """Rank >= 3 shortcut: when rank >= l + 2 the genus is a single class and
    the natural map O(S) -> O(A_S) is onto, so the count collapses to 1."""
    if ns.rank < 3:
        raise ValueError("rank >= 3 required")
    if ns.rank >= min_generators(ns.lattice) + 2:
        return FMCountResult(1, ((ns.lattice, 1),), "nikulin")
    return None


def _transported_hodge_gens(a_target, hodge: HodgeGroupSpec, cap: int | None):
    """Generators of the Hodge group's image inside O(A_target), moved across
    the canonical anti-isometry when an explicit action is supplied.

    Negation is always included: the Hodge group has even order exactly
    because it contains -id."""
    if hodge.action is None:
        if hodge.order != 2:
            raise UnsupportedError("explicit Hodge action required")
        return [negation_map(a_target)]
    anti = isometries_signed(hodge.action.source, a_target, -1, cap=cap)
    if not anti:
        raise ValueError(
            "Hodge action lives on a form that is not anti-isometric to the target"
        )
    phi = anti[0]
    return [negation_map(a_target), phi.compose(hodge.action).compose(phi.inverse())]


def fm_number_rank2(
    ns: NeronSeveriSpec,
    hodge: HodgeGroupSpec = GENERIC_HODGE,
    cap: int | None = None,
) -> FMCountResult:
    """Partner count for Picard number 2.

    The genus of NS is cut out of the proper classes of discriminant
    D = -det by discriminant-form isometry, folded to isomorphism classes
    under the opposite involution; each representative contributes the double
    cosets of the image of its automorph group against the transported Hodge
    group.
    """
    if ns.rank != 2:
        raise ValueError("rank-2 lattice required")
    f = bqf.lattice_to_form(ns.lattice)
    cgd = bqf.proper_classes(f.disc, cap=cap)
    own = bqf.class_index_of(cgd, f)
    genus = bqf.genus_of_class(cgd, own)
    reps = cgd.representatives()
    breakdown = []
    for orbit in bqf.fold_classes(cgd, genus):
        rep = reps[orbit[0]]
        lat = bqf.form_to_lattice(rep)
        a_s = discriminant_form(lat)
        group = orthogonal_group(a_s, cap=cap)
        h_gens = [induced_form_map(lat, m) for m in bqf.lattice_isometry_generators(lat)]
        k_gens = _transported_hodge_gens(a_s, hodge, cap)
        breakdown.append((rep, double_coset_count(group, h_gens, k_gens)))
    total = sum(s for _, s in breakdown)
    return FMCountResult(total, tuple(breakdown), "rank2")


def fm_number(
    ns: NeronSeveriSpec,
    hodge: HodgeGroupSpec = GENERIC_HODGE,
    cap: int | None = None,
) -> FMCountResult:
    """Dispatch on the Picard number; see the module docstring."""
    if ns.rank == 1:
        if hodge.order != 2:
            raise ValueError(
                "Picard number 1 forces a Hodge group of order 2 (phi(2I) | 21)"
            )
        n = ns.lattice.gram[0][0] // 2
        return fm_number_rank1(n, cap=cap)
    if ns.rank == 2:
        if hodge.order > 2 and hodge.order not in hodge_order_candidates(20):
            raise ValueError("Hodge group order violates phi(2I) | 20")
        return fm_number_rank2(ns, hodge, cap=cap)
    result = fm_number_nikulin(ns)
    if result is None:
        raise UnsupportedError(
            "unsupported: rank >= 3 with l(S) > rank - 2 requires general "
            "indefinite genus enumeration (out of scope)"
        )
    return result


def even_hyperbolic_prime_lattice(p: int) -> IntegerLattice:
    """The even hyperbolic rank-2 lattice [[2, 1], [1, (1-p)/2]] of
    determinant -p, defined for p = 1 mod 4."""
    if p % 4 != 1:
        raise ValueError("p must be 1 mod 4")
    return IntegerLattice(((2, 1), (1, (1 - p) // 2)))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def fm_table(primes, cap: int | None = None) -> tuple:
    """(p, h(p), partner count) rows; the two computations (class-number fold
    and double cosets) must agree at every prime."""
    rows = []
    for p in primes:
        if not _is_prime(p) or p % 4 != 1:
            raise ValueError(f"table requires primes p = 1 mod 4, got {p}")
        cgd = bqf.proper_classes(p, cap=cap)
        ns = NeronSeveriSpec(even_hyperbolic_prime_lattice(p))
        result = fm_number_rank2(ns, cap=cap)
        if 2 * result.total != cgd.h + 1:
            raise RuntimeError(
                f"partner count and class number disagree at p={p}: "
                f"{result.total} vs (h+1)/2 with h={cgd.h}"
            )
        rows.append((p, cgd.h, result.total))
    return tuple(rows)


@dataclass(frozen=True)
class ScanReport:
    bound: int
    rows: tuple  # (p, h, fm)
    fm_one_primes: tuple
    running_max: tuple  # (p, fm) where fm first exceeds every earlier value


def _primes_one_mod_four(bound: int) -> list:
    sieve = bytearray([1]) * (bound + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = b"\x00" * len(sieve[p * p :: p])
    return [p for p in range(5, bound + 1) if sieve[p] and p % 4 == 1]


def gauss_scan(bound: int, cap: int | None = None) -> ScanReport:
    """Partner counts for all primes p = 1 mod 4 up to the bound: the primes
    with a single partner class (h = 1) and the running-maximum subsequence."""
    if bound < 5:
        raise ValueError("bound must be at least 5")
    rows = fm_table(_primes_one_mod_four(bound), cap=cap)
    ones = tuple(p for p, _, fm in rows if fm == 1)
    running = []
    best = 0
    for p, _, fm in rows:
        if fm > best:
            best = fm
            running.append((p, fm))
    return ScanReport(bound, rows, ones, tuple(running))
