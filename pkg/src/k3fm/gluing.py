"""Even unimodular overlattices from anti-isometry gluing data.

Given even lattices S and T and a bijection phi: A_T -> A_S with
q_S(phi(x)) = -q_T(x), the overlattice generated by S + T together with the
lifts phi(a) + a is integral, even and unimodular, contains T primitively,
and has T-orthogonal complement S.  Enumerating all such phi and counting
orbits under O(S) x G provides an independent check of the double-coset
counts used by the partner-counting engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import isqrt, lcm

from . import bqf, intmat
from .errors import UnsupportedError
from .finite_qform import (
    FiniteFormMap,
    double_coset_count,
    isometries_signed,
    negation_map,
    orthogonal_group,
    validate_map,
)
from .fm_count import GENERIC_HODGE, HodgeGroupSpec, _transported_hodge_gens
from .lattice import (
    DiscriminantData,
    IntegerLattice,
    discriminant_data,
    discriminant_form,
    induced_form_map,
    signature,
)


@dataclass(frozen=True)
class GluingDatum:
    """Validated input to glue(): phi must be a bijective anti-isometry from
    the discriminant form of T onto that of S."""

    s: IntegerLattice
    t: IntegerLattice
    phi: FiniteFormMap

    def __post_init__(self):
        a_s = discriminant_form(self.s)
        a_t = discriminant_form(self.t)
        if self.phi.source != a_t or self.phi.target != a_s:
            raise ValueError("gluing map must go from A_T to A_S")
        if self.phi.sign != -1:
            raise ValueError("gluing map must negate the quadratic form")
        if a_s.order != a_t.order:
            raise ValueError("discriminant groups must have equal order")
        validate_map(self.phi)


@dataclass(frozen=True)
class Overlattice:
    ambient_basis: tuple  # rows of Fractions over the S + T basis
    gram: tuple  # integral Gram of the saturated lattice
    index: int


def _dual_coords(data: DiscriminantData, coeffs) -> tuple:
    vec = [Fraction(0)] * data.lattice.rank
    for ci, gen in zip(coeffs, data.generators):
        if ci:
            for r, x in enumerate(gen):
                vec[r] += ci * x
    return tuple(vec)


def glue(s: IntegerLattice, t: IntegerLattice, phi: FiniteFormMap) -> Overlattice:
    """Saturate S + T + {phi(a) + a lifts} to an integral basis by Hermite
    reduction over the common denominator and return the glued overlattice."""
    GluingDatum(s, t, phi)
    data_s = discriminant_data(s)
    data_t = discriminant_data(t)
    n = s.rank + t.rank
    rows = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    for k in range(data_t.form.ngens):
        unit = tuple(int(i == k) for i in range(data_t.form.ngens))
        vec_t = _dual_coords(data_t, unit)
        vec_s = _dual_coords(data_s, phi.images[k])
        rows.append(vec_s + vec_t)
    denom = lcm(1, *(x.denominator for row in rows for x in row))
    scaled = tuple(tuple(int(x * denom) for x in row) for row in rows)
    basis_scaled = intmat.hermite_row_basis(scaled)
    if len(basis_scaled) != n:
        raise RuntimeError("glued lattice lost rank")
    basis = tuple(
        tuple(Fraction(x, denom) for x in row) for row in basis_scaled
    )
    gram_st = _direct_sum_gram(s, t)
    gram_frac = intmat.matmul(basis, intmat.matmul(gram_st, intmat.transpose(basis)))
    gram = []
    for i, row in enumerate(gram_frac):
        out = []
        for x in row:
            if x.denominator != 1:
                raise RuntimeError("glued pairing is not integral")
            out.append(int(x))
        if out[i] % 2:
            raise RuntimeError("glued lattice is not even")
        gram.append(tuple(out))
    gram = tuple(gram)
    index = data_t.form.order
    det_l = intmat.det(gram)
    if abs(det_l) != 1:
        raise RuntimeError("glued lattice is not unimodular")
    if index * index * abs(det_l) != abs(s.det * t.det):
        raise RuntimeError("glue index identity violated")
    return Overlattice(basis, gram, index)


def _direct_sum_gram(s: IntegerLattice, t: IntegerLattice) -> tuple:
    n = s.rank + t.rank
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < s.rank and j < s.rank:
                row.append(s.gram[i][j])
            elif i >= s.rank and j >= s.rank:
                row.append(t.gram[i - s.rank][j - s.rank])
            else:
                row.append(0)
        rows.append(tuple(row))
    return tuple(rows)


def trivial_overlattice(s: IntegerLattice, t: IntegerLattice) -> Overlattice:
    """S + T itself, with no glue vectors (index 1)."""
    n = s.rank + t.rank
    basis = tuple(
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    )
    return Overlattice(basis, _direct_sum_gram(s, t), 1)


@dataclass(frozen=True)
class OverlatticeReport:
    even: bool
    unimodular: bool
    t_primitive: bool
    complement_is_s: bool

    @property
    def all_ok(self) -> bool:
        return self.even and self.unimodular and self.t_primitive and self.complement_is_s


def _scaled_int_matrix(rows) -> tuple:
    denom = lcm(1, *(Fraction(x).denominator for row in rows for x in row))
    return tuple(tuple(int(Fraction(x) * denom) for x in row) for row in rows), denom


def _gauss_reduced_definite(a: int, b: int, c: int) -> tuple:
    """Canonical GL2 representative (a, |b|, c) of a positive definite
    integral form, by Lagrange-Gauss reduction."""
    while True:
        if c < a:
            a, c = c, a
            b = -b
        if b > a or b <= -a:
            r = b % (2 * a)
            if r > a:
                r -= 2 * a
            shift = (b - r) // (2 * a)
            c = a * shift * shift - b * shift + c
            b = r
            continue
        break
    return (a, abs(b), c)


def _rank2_isomorphic(g1: tuple, g2: tuple) -> bool:
    """Exact isomorphism test for even rank-2 Gram matrices."""
    det1 = intmat.det(g1)
    det2 = intmat.det(g2)
    if det1 != det2:
        return False
    if det1 < 0:
        f1 = bqf.lattice_to_form(IntegerLattice(g1))
        f2 = bqf.lattice_to_form(IntegerLattice(g2))
        return bqf.is_properly_equivalent(f1, f2) or bqf.is_properly_equivalent(
            f1, bqf.opposite(f2)
        )
    sign = 1 if g1[0][0] > 0 else -1
    if (g2[0][0] > 0) != (g1[0][0] > 0):
        return False
    p1 = intmat.scale(g1, sign)
    p2 = intmat.scale(g2, sign)
    red1 = _gauss_reduced_definite(p1[0][0] // 2, p1[0][1], p1[1][1] // 2)
    red2 = _gauss_reduced_definite(p2[0][0] // 2, p2[0][1], p2[1][1] // 2)
    return red1 == red2


def _grams_match(g_perp: tuple, s: IntegerLattice) -> bool:
    if len(g_perp) != s.rank:
        return False
    if s.rank == 1:
        return g_perp[0][0] == s.gram[0][0]
    if s.rank == 2:
        return _rank2_isomorphic(g_perp, s.gram)
    # rank > 2: genus fingerprint (det, signature, discriminant form)
    perp = IntegerLattice(g_perp)
    if perp.det != s.det or signature(perp) != signature(s):
        return False
    return bool(
        isometries_signed(discriminant_form(perp), discriminant_form(s), 1, _first_only=True)
    )


def verify_overlattice(over: Overlattice, s: IntegerLattice, t: IntegerLattice) -> OverlatticeReport:
    """Check the four structural facts about a glued overlattice: evenness,
    unimodularity, primitivity of T, and that the orthogonal complement of T
    recovers S."""
    n = s.rank + t.rank
    even = all(over.gram[i][i] % 2 == 0 for i in range(n))
    unimodular = abs(intmat.det(over.gram)) == 1

    basis = over.ambient_basis
    b_s = tuple(row[: s.rank] for row in basis)
    b_t = tuple(row[s.rank :] for row in basis)

    # x . basis lands in T x Q iff x kills the S block
    s_block, _ = _scaled_int_matrix(b_s)
    kernel = intmat.row_kernel_basis(s_block)
    t_part = intmat.matmul(kernel, b_t)
    t_primitive = False
    if len(t_part) == t.rank:
        scaled, denom = _scaled_int_matrix(t_part)
        if denom == 1:
            h = intmat.hermite_row_basis(scaled)
            t_primitive = h == intmat.identity(t.rank)

    gram_st = _direct_sum_gram(s, t)
    pair_t = intmat.matmul(basis, tuple(row[s.rank :] for row in gram_st))
    pair_scaled, _ = _scaled_int_matrix(pair_t)
    perp = intmat.row_kernel_basis(pair_scaled)
    complement_is_s = False
    if len(perp) == s.rank:
        vecs = intmat.matmul(perp, basis)
        gram_frac = intmat.matmul(vecs, intmat.matmul(gram_st, intmat.transpose(vecs)))
        if all(x.denominator == 1 for row in gram_frac for x in map(Fraction, row)):
            g_perp = tuple(tuple(int(x) for x in row) for row in gram_frac)
            complement_is_s = _grams_match(g_perp, s)

    return OverlatticeReport(even, unimodular, t_primitive, complement_is_s)


def recovered_gluing_map(over: Overlattice, s: IntegerLattice, t: IntegerLattice) -> FiniteFormMap:
    """Recompute the gluing map from the saturated basis alone: enumerate
    L/(S + T) and read each coset's S- and T-projections in discriminant
    coordinates."""
    data_s = discriminant_data(s)
    data_t = discriminant_data(t)
    n = s.rank + t.rank
    inv = intmat.inverse(over.ambient_basis)
    coeffs = []
    for row in inv:  # e_i = (row i of B^-1) . basis
        out = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("S + T is not a sublattice of the overlattice")
            out.append(int(x))
        coeffs.append(tuple(out))
    # quotient Z^n / rowspan(coeffs) via the Smith form
    _, d, v = intmat.smith_normal_form(tuple(coeffs))
    v_inv = intmat.unimodular_inverse(v)
    orders = [d[i][i] for i in range(n)]
    gens = [i for i in range(n) if orders[i] > 1]
    graph = {}
    count = 1
    for i in gens:
        count *= orders[i]
    for combo in product(*(range(orders[i]) for i in gens)):
        x = [0] * n
        for pos, i in enumerate(gens):
            if combo[pos]:
                for col in range(n):
                    x[col] += combo[pos] * v_inv[i][col]
        vec = intmat.mat_vec(intmat.transpose(over.ambient_basis), tuple(x))
        cls_s = data_s.classify(vec[: s.rank])
        cls_t = data_t.classify(vec[s.rank :])
        if cls_t in graph and graph[cls_t] != cls_s:
            raise ValueError("overlattice quotient is not a gluing graph")
        graph[cls_t] = cls_s
    if len(graph) != data_t.form.order or count != over.index:
        raise ValueError("overlattice quotient has the wrong size")
    units = [
        tuple(int(i == k) for i in range(data_t.form.ngens))
        for k in range(data_t.form.ngens)
    ]
    images = tuple(graph[u] for u in units)
    return FiniteFormMap(data_t.form, data_s.form, images, -1)


# ---------------------------------------------------------------------------
# orbit counting


def _definite_isometry_search(g1: tuple, g2: tuple) -> tuple:
    """All integer matrices M with M^T g1 M = g2 for positive definite rank-2
    g1, g2 (finite: column norms bound the coefficients)."""
    det1 = intmat.det(g1)
    p, q, r = g1[0][0], g1[0][1], g1[1][1]

    def vectors_of_norm(norm: int) -> list:
        if norm <= 0:
            return []
        out = []
        bx = isqrt(norm * r // det1) + 1
        by = isqrt(norm * p // det1) + 1
        for x in range(-bx, bx + 1):
            for y in range(-by, by + 1):
                if p * x * x + 2 * q * x * y + r * y * y == norm:
                    out.append((x, y))
        return out

    firsts = vectors_of_norm(g2[0][0])
    seconds = vectors_of_norm(g2[1][1])
    out = []
    for v in firsts:
        for w in seconds:
            cross = (
                p * v[0] * w[0]
                + q * (v[0] * w[1] + v[1] * w[0])
                + r * v[1] * w[1]
            )
            if cross == g2[0][1]:
                out.append(((v[0], w[0]), (v[1], w[1])))
    return tuple(out)


def lattice_isometry_generators(lat: IntegerLattice) -> tuple:
    """Generating matrices for O(lat) when the rank is at most 2."""
    if lat.rank == 1:
        return (((-1,),),)
    if lat.rank == 2:
        sig = signature(lat).as_pair()
        if sig == (1, 1):
            return bqf.lattice_isometry_generators(lat)
        g_abs = lat.gram if sig == (2, 0) else intmat.scale(lat.gram, -1)
        return _definite_isometry_search(g_abs, g_abs)
    raise UnsupportedError("isometry generators available only for rank <= 2")


@dataclass(frozen=True)
class GluingClasses:
    count: int
    representatives: tuple


def _hodge_gens_on(a_t, hodge: HodgeGroupSpec):
    """Generators of the Hodge group's image in O(A_T); -id is always a
    member, so negation is always included."""
    if hodge.action is None:
        if hodge.order != 2:
            raise UnsupportedError("explicit Hodge action required")
        return [negation_map(a_t)]
    if hodge.action.source != a_t:
        raise ValueError("Hodge action must act on the discriminant form of T")
    return [negation_map(a_t), hodge.action]


def gluing_classes(
    s: IntegerLattice,
    t: IntegerLattice,
    hodge: HodgeGroupSpec = GENERIC_HODGE,
    cap: int | None = None,
) -> GluingClasses:
    """Partition the full set of anti-isometries A_T -> A_S into orbits under
    sigma -> h o sigma o g, with h running over the image of O(S) and g over
    the image of the Hodge group in O(A_T)."""
    a_s = discriminant_form(s)
    a_t = discriminant_form(t)
    sigmas = isometries_signed(a_t, a_s, -1, cap=cap)
    if not sigmas:
        return GluingClasses(0, ())
    if a_s.order == 1:
        return GluingClasses(1, (sigmas[0],))
    h_maps = [induced_form_map(s, m) for m in lattice_isometry_generators(s)]
    g_maps = _hodge_gens_on(a_t, hodge)
    remaining = dict.fromkeys(sigmas)
    reps = []
    count = 0
    while remaining:
        start = next(iter(remaining))
        reps.append(start)
        count += 1
        frontier = [start]
        seen = {start}
        while frontier:
            sigma = frontier.pop()
            moves = [h.compose(sigma) for h in h_maps]
            moves += [sigma.compose(g) for g in g_maps]
            for nxt in moves:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        for sigma in seen:
            remaining.pop(sigma, None)
    return GluingClasses(count, tuple(reps))


@dataclass(frozen=True)
class GluingCountRow:
    s: IntegerLattice
    orbit_count: int
    coset_count: int

    @property
    def equal(self) -> bool:
        return self.orbit_count == self.coset_count


@dataclass(frozen=True)
class GluingCountReport:
    rows: tuple
    total_orbits: int
    total_cosets: int

    @property
    def all_equal(self) -> bool:
        return self.total_orbits == self.total_cosets and all(r.equal for r in self.rows)


def verify_gluing_counts(
    s_list,
    t: IntegerLattice,
    hodge: HodgeGroupSpec = GENERIC_HODGE,
    cap: int | None = None,
) -> GluingCountReport:
    """For each genus representative S_j compare the number of gluing orbits
    with the double-coset count on O(A_{S_j}); both totals must agree."""
    a_t = discriminant_form(t)
    rows = []
    for s in s_list:
        a_s = discriminant_form(s)
        classes = gluing_classes(s, t, hodge, cap=cap)
        if classes.count == 0:
            raise ValueError(
                "no gluing exists: discriminant forms of S and T are not anti-isometric"
            )
        group = orthogonal_group(a_s, cap=cap)
        if a_s.order == 1:
            h_gens = []
        else:
            h_gens = [induced_form_map(s, m) for m in lattice_isometry_generators(s)]
        if hodge.action is not None and hodge.action.source != a_t:
            raise ValueError("Hodge action must act on the discriminant form of T")
        k_gens = _transported_hodge_gens(a_s, hodge, cap)
        rows.append(GluingCountRow(s, classes.count, double_coset_count(group, h_gens, k_gens)))
    return GluingCountReport(
        tuple(rows),
        sum(r.orbit_count for r in rows),
        sum(r.coset_count for r in rows),
    )


def definite_genus_lattices(lat: IntegerLattice, cap: int | None = None) -> tuple:
    """Isomorphism-class representatives of the genus of an even definite
    rank-2 lattice, by exhausting reduced positive forms of the right
    determinant and filtering on discriminant-form isometry."""
    if lat.rank != 2:
        raise ValueError("rank-2 lattice required")
    sig = signature(lat).as_pair()
    if sig not in ((2, 0), (0, 2)):
        raise ValueError("definite lattice required")
    sign = 1 if sig == (2, 0) else -1
    target = discriminant_form(lat)
    n = abs(lat.det)
    out = []
    a = 1
    while 3 * a * a <= n:
        for b in range(0, a + 1):
            num = n + b * b
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            gram = ((2 * a * sign, b * sign), (b * sign, 2 * c * sign))
            candidate = IntegerLattice(gram)
            if isometries_signed(discriminant_form(candidate), target, 1, cap=cap, _first_only=True):
                out.append(candidate)
        a += 1
    return tuple(out)
