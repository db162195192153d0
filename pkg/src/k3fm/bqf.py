"""Indefinite binary quadratic forms of positive non-square discriminant.

Reduction convention: (a, b, c) is reduced iff 0 < b < sqrt(D) and
sqrt(D) - b < 2|a| < sqrt(D) + b.  All comparisons against sqrt(D) are done
by comparing squares, so the module never touches floating point.  Proper
classes are the cycles of reduced forms under the neighbor step; the class
number, genus partition, ambiguous classes and automorphs are all derived
from that enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from . import intmat
from .finite_qform import are_isometric
from .lattice import IntegerLattice, discriminant_form, signature


@dataclass(frozen=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        d = self.disc
        if d <= 0 or isqrt(d) ** 2 == d:
            raise ValueError("isotropic discriminant unsupported")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return gcd(gcd(abs(self.a), abs(self.b)), abs(self.c))

    def coefficients(self) -> tuple:
        return (self.a, self.b, self.c)

    def __repr__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True)
class TransformedForm:
    form: BinaryQuadraticForm
    transform: tuple
    origin: BinaryQuadraticForm


@dataclass(frozen=True)
class Automorph:
    matrix: tuple
    det: int


@dataclass(frozen=True)
class ClassGroupData:
    d: int
    cycles: tuple
    h: int
    genus_partition: tuple
    ambiguous_indices: tuple

    def representatives(self) -> tuple:
        return tuple(cycle[0] for cycle in self.cycles)


def form(a: int, b: int, c: int) -> BinaryQuadraticForm:
    return BinaryQuadraticForm(a, b, c)


def gram_of(f: BinaryQuadraticForm) -> tuple:
    return ((2 * f.a, f.b), (f.b, 2 * f.c))


def lattice_to_form(lat: IntegerLattice) -> BinaryQuadraticForm:
    """Read (a, b, c) off the Gram matrix [[2a, b], [b, 2c]] of an even
    hyperbolic rank-2 lattice; the discriminant is -det."""
    if lat.rank != 2:
        raise ValueError("rank-2 lattice required")
    if not lat.is_even:
        raise ValueError("even lattice required")
    if signature(lat).as_pair() != (1, 1):
        raise ValueError("hyperbolic signature (1,1) required")
    g = lat.gram
    return BinaryQuadraticForm(g[0][0] // 2, g[0][1], g[1][1] // 2)


def form_to_lattice(f: BinaryQuadraticForm) -> IntegerLattice:
    return IntegerLattice(gram_of(f))


def is_reduced(f: BinaryQuadraticForm) -> bool:
    d = f.disc
    b = f.b
    if b <= 0 or b * b >= d:
        return False
    ta = 2 * abs(f.a)
    if (ta + b) ** 2 <= d:  # sqrt(D) - b < 2|a|
        return False
    if ta > b and (ta - b) ** 2 >= d:  # 2|a| < sqrt(D) + b
        return False
    return True


def _rho(f: BinaryQuadraticForm) -> tuple:
    """Neighbor step (a, b, c) -> (c, b', c') with b' = -b mod 2|c| placed in
    the reduced window, or normalized into (-|c|, |c|] while |c| > sqrt(D).
    Returns the new form and the unimodular step matrix."""
    d = f.disc
    c = f.c
    ac = abs(c)
    if c * c > d:
        bp = (-f.b) % (2 * ac)
        if bp > ac:
            bp -= 2 * ac
    else:
        root = isqrt(d)
        bp = root - (root + f.b) % (2 * ac)
    s, rem = divmod(f.b + bp, 2 * c)
    if rem:
        raise RuntimeError("neighbor step congruence failed")
    cp, rem = divmod(bp * bp - d, 4 * c)
    if rem:
        raise RuntimeError("neighbor step discriminant failed")
    step = ((0, -1), (1, s))
    return BinaryQuadraticForm(c, bp, cp), step


def reduce_form(f: BinaryQuadraticForm) -> TransformedForm:
    """Reduce f, accumulating the unimodular transform M with
    M^T G_f M = G_reduced."""
    cur = f
    m = intmat.identity(2)
    guard = 0
    limit = 64 + 4 * (abs(f.a).bit_length() + abs(f.c).bit_length())
    while not is_reduced(cur):
        cur, step = _rho(cur)
        m = intmat.matmul(m, step)
        guard += 1
        if guard > limit:
            raise RuntimeError("reduction failed to terminate")
    return TransformedForm(cur, m, f)


def cycle(f: BinaryQuadraticForm) -> tuple:
    """The full cycle of reduced forms through f (equals its proper class)."""
    if not is_reduced(f):
        raise ValueError("form is not reduced")
    out = [f]
    cur, _ = _rho(f)
    while cur != f:
        out.append(cur)
        cur, _ = _rho(cur)
    return tuple(out)


def opposite(f: BinaryQuadraticForm) -> BinaryQuadraticForm:
    return BinaryQuadraticForm(f.a, -f.b, f.c)


def _divisors(n: int) -> list:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _validate_disc(d: int) -> None:
    if d <= 0:
        raise ValueError("discriminant must be positive")
    if d % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4")
    if isqrt(d) ** 2 == d:
        raise ValueError("isotropic discriminant unsupported")


def enumerate_reduced(d: int) -> tuple:
    """All reduced forms of discriminant d, sorted by coefficients."""
    _validate_disc(d)
    out = []
    for b in range(1, isqrt(d) + 1):
        if (b - d) % 2:
            continue
        n = (d - b * b) // 4
        for a in _divisors(n):
            c = n // a
            g = BinaryQuadraticForm(a, b, -c)
            if is_reduced(g):
                out.append(g)
                out.append(BinaryQuadraticForm(-a, b, c))
    return tuple(sorted(out, key=lambda f: f.coefficients()))


def _squarefree(n: int) -> bool:
    i = 2
    while i * i <= n:
        if n % (i * i) == 0:
            return False
        i += 1
    return True


def _prime_factor_count(n: int) -> int:
    count = 0
    i = 2
    while i * i <= n:
        if n % i == 0:
            count += 1
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        count += 1
    return count


def is_odd_fundamental(d: int) -> bool:
    return d % 4 == 1 and _squarefree(d)


def proper_classes(d: int, cap: int | None = None) -> ClassGroupData:
    """Enumerate the proper (SL2) classes of discriminant d as reduction
    cycles; attach the genus partition (grouped by discriminant-form isometry
    of the associated lattices) and the classes fixed by (a,b,c) -> (a,-b,c).

    For odd square-free d the classical structure constraints (2^(n-1)
    ambiguous classes and genera, all genera equinumerous) are asserted.
    """
    reduced = enumerate_reduced(d)
    remaining = set(reduced)
    cycles = []
    for f in reduced:
        if f in remaining:
            cyc = cycle(f)
            cycles.append(cyc)
            remaining -= set(cyc)
    h = len(cycles)
    index_of = {f: i for i, cyc in enumerate(cycles) for f in cyc}
    reps = [cyc[0] for cyc in cycles]

    forms_a = [discriminant_form(form_to_lattice(r)) for r in reps]
    parts: list[list[int]] = []
    for i, fa in enumerate(forms_a):
        for part in parts:
            if are_isometric(fa, forms_a[part[0]], cap=cap):
                part.append(i)
                break
        else:
            parts.append([i])

    ambiguous = tuple(
        i
        for i, rep in enumerate(reps)
        if index_of[reduce_form(opposite(rep)).form] == i
    )

    if is_odd_fundamental(d):
        expected = 2 ** (_prime_factor_count(d) - 1)
        sizes = {len(p) for p in parts}
        if len(ambiguous) != expected or len(parts) != expected or len(sizes) != 1:
            raise RuntimeError(f"genus structure violated for discriminant {d}")

    return ClassGroupData(
        d,
        tuple(cycles),
        h,
        tuple(tuple(p) for p in parts),
        ambiguous,
    )


def genus_partition(d: int, cap: int | None = None) -> tuple:
    return proper_classes(d, cap=cap).genus_partition


def class_index_of(cgd: ClassGroupData, f: BinaryQuadraticForm) -> int:
    if f.disc != cgd.d:
        raise ValueError("discriminant mismatch")
    reduced = reduce_form(f).form
    for i, cyc in enumerate(cgd.cycles):
        if reduced in cyc:
            return i
    raise RuntimeError("reduced form missing from cycle enumeration")


def opposite_class_map(cgd: ClassGroupData) -> tuple:
    """For each class index the index of its opposite class."""
    return tuple(
        class_index_of(cgd, opposite(rep)) for rep in cgd.representatives()
    )


def genus_of_class(cgd: ClassGroupData, index: int) -> tuple:
    for part in cgd.genus_partition:
        if index in part:
            return part
    raise ValueError("class index out of range")


def fold_classes(cgd: ClassGroupData, indices) -> tuple:
    """Orbits of a set of class indices under the opposite involution."""
    opp = opposite_class_map(cgd)
    seen = set()
    orbits = []
    for i in indices:
        if i in seen:
            continue
        orbit = (i,) if opp[i] == i else (i, opp[i])
        seen.update(orbit)
        orbits.append(orbit)
    return tuple(orbits)


def improper_class_count(d: int, cap: int | None = None) -> int:
    """Number of GL2(Z) classes: proper classes folded under the opposite
    involution, (h + #ambiguous) / 2."""
    cgd = proper_classes(d, cap=cap)
    return (cgd.h + len(cgd.ambiguous_indices)) // 2


def is_properly_equivalent(f, g, witness: bool = False):
    """True iff f and g reduce into the same cycle.  With witness=True also
    return a determinant +1 matrix W with W^T G_f W = G_g (or None)."""
    if f.disc != g.disc:
        raise ValueError("discriminant mismatch")
    rf = reduce_form(f)
    rg = reduce_form(g)
    cur = rf.form
    trans = intmat.identity(2)
    while True:
        if cur == rg.form:
            if not witness:
                return True
            mg = rg.transform
            mg_inv = ((mg[1][1], -mg[0][1]), (-mg[1][0], mg[0][0]))
            w = intmat.matmul(intmat.matmul(rf.transform, trans), mg_inv)
            return True, w
        cur, step = _rho(cur)
        trans = intmat.matmul(trans, step)
        if cur == rf.form:
            return (False, None) if witness else False


def principal_form(d: int) -> BinaryQuadraticForm:
    """The reduced form (1, b0, (b0^2 - d)/4) with b0 maximal of the right
    parity below sqrt(d)."""
    _validate_disc(d)
    root = isqrt(d)
    b0 = root if (root - d) % 2 == 0 else root - 1
    f = BinaryQuadraticForm(1, b0, (b0 * b0 - d) // 4)
    if not is_reduced(f):
        raise RuntimeError("principal form construction failed")
    return f


def pell_fundamental(d: int) -> tuple:
    """Minimal t, u > 0 with t^2 - d*u^2 = 4, read off the accumulated
    transform of one trip around the principal cycle (the matrix form of the
    continued-fraction expansion attached to sqrt(d))."""
    f0 = principal_form(d)
    cur, m = _rho(f0)
    while cur != f0:
        cur, step = _rho(cur)
        m = intmat.matmul(m, step)
    t = m[0][0] + m[1][1]
    if t < 0:
        m = intmat.scale(m, -1)
        t = -t
    u = m[1][0]  # leading coefficient of the principal form is 1
    if u < 0:
        m = ((m[1][1], -m[0][1]), (-m[1][0], m[0][0]))
        u = -u
    if u == 0 or t * t - d * u * u != 4:
        raise RuntimeError("automorph walk did not produce a Pell solution")
    return t, u


def automorph_matrix(f: BinaryQuadraticForm, t: int, u: int) -> tuple:
    """[[ (t-bu)/2, -cu ], [ au, (t+bu)/2 ]]; fixes every form of disc d for
    any solution of t^2 - d u^2 = 4."""
    if (t - f.b * u) % 2:
        raise ValueError("t, u do not solve the automorph congruence")
    return (
        ((t - f.b * u) // 2, -f.c * u),
        (f.a * u, (t + f.b * u) // 2),
    )


def fundamental_automorph(f: BinaryQuadraticForm) -> Automorph:
    t, u = pell_fundamental(f.disc)
    m = automorph_matrix(f, t, u)
    g = gram_of(f)
    if intmat.matmul(intmat.transpose(m), intmat.matmul(g, m)) != g:
        raise RuntimeError("automorph verification failed")
    return Automorph(m, 1)


def proper_automorph_generator(f: BinaryQuadraticForm) -> Automorph:
    """Generator of the proper automorphs of f modulo -I.  For an imprimitive
    form this is the automorph of its primitive part, which can be a proper
    root of the minimal solution for disc(f)."""
    g = f.content
    if g == 1:
        return fundamental_automorph(f)
    prim = BinaryQuadraticForm(f.a // g, f.b // g, f.c // g)
    auto = fundamental_automorph(prim)
    gram = gram_of(f)
    if intmat.matmul(intmat.transpose(auto.matrix), intmat.matmul(gram, auto.matrix)) != gram:
        raise RuntimeError("automorph verification failed")
    return Automorph(auto.matrix, 1)


def improper_automorph(f: BinaryQuadraticForm) -> Automorph | None:
    """A determinant -1 matrix fixing f, when f is properly equivalent to its
    opposite; None otherwise."""
    eq, w = is_properly_equivalent(f, opposite(f), witness=True)
    if not eq:
        return None
    j = ((1, 0), (0, -1))
    m = intmat.matmul(w, j)
    gram = gram_of(f)
    if intmat.matmul(intmat.transpose(m), intmat.matmul(gram, m)) != gram:
        raise RuntimeError("improper automorph verification failed")
    if intmat.det(m) != -1:
        raise RuntimeError("improper automorph has wrong determinant")
    return Automorph(m, -1)


def lattice_isometry_generators(lat: IntegerLattice) -> tuple:
    """Generators of O(lat) for an even hyperbolic rank-2 lattice:
    -I, the proper automorph generator, and an improper automorph if the
    class is ambiguous."""
    f = lattice_to_form(lat)
    gens = [((-1, 0), (0, -1)), proper_automorph_generator(f).matrix]
    imp = improper_automorph(f)
    if imp is not None:
        gens.append(imp.matrix)
    return tuple(gens)


def genus_representative_forms(lat: IntegerLattice, cap: int | None = None) -> tuple:
    """GL2-class representatives of the genus containing the given even
    hyperbolic rank-2 lattice (proper classes folded under the opposite
    involution), as reduced forms."""
    f = lattice_to_form(lat)
    cgd = proper_classes(f.disc, cap=cap)
    genus = genus_of_class(cgd, class_index_of(cgd, f))
    reps = cgd.representatives()
    return tuple(reps[orbit[0]] for orbit in fold_classes(cgd, genus))
