"""Finite quadratic forms (A, q) on finite abelian groups.

A form is stored in invariant-factor coordinates: generator orders
d_1 | d_2 | ... | d_k (all > 1), the values q(g_i) in Q/2Z and the pairwise
bilinear values b(g_i, g_j) in Q/Z.  Everything downstream — signed isometry
enumeration, orthogonal groups, subgroup closure, double-coset counts — is
brute force over these coordinates, guarded by a size cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, lcm, prod

from . import intmat
from .errors import CapExceededError

DEFAULT_CAP = 10_000


def _mod2(x) -> Fraction:
    return Fraction(x) % 2


def _mod1(x) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True)
class FiniteQuadraticForm:
    """A finite abelian group with a Q/2Z-valued quadratic form."""

    orders: tuple
    q_gens: tuple
    b_matrix: tuple

    def __post_init__(self):
        k = len(self.orders)
        if len(self.q_gens) != k or len(self.b_matrix) != k:
            raise ValueError("generator data lengths disagree")
        last = 1
        for d in self.orders:
            if not isinstance(d, int) or d <= 1:
                raise ValueError("orders must be integers > 1")
            if d % last != 0:
                raise ValueError("orders must form a divisibility chain")
            last = d
        for i, d in enumerate(self.orders):
            qi = self.q_gens[i]
            if not (0 <= qi < 2):
                raise ValueError("q values must be reduced into [0, 2)")
            if _mod2(d * d * qi) != 0:
                raise ValueError("q value incompatible with generator order")
            if _mod1(self.b_matrix[i][i] - qi) != 0:
                raise ValueError("b(g,g) must agree with q(g) mod Z")
            for j in range(k):
                bij = self.b_matrix[i][j]
                if not (0 <= bij < 1):
                    raise ValueError("b values must be reduced into [0, 1)")
                if bij != self.b_matrix[j][i]:
                    raise ValueError("b matrix must be symmetric")
                if _mod1(d * bij) != 0:
                    raise ValueError("b value incompatible with generator order")

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def ngens(self) -> int:
        return len(self.orders)


def finite_form(orders, q_gens, b_matrix=None) -> FiniteQuadraticForm:
    """Build a form, defaulting the bilinear matrix to diag(q mod Z)."""
    orders = tuple(int(d) for d in orders)
    q = tuple(_mod2(x) for x in q_gens)
    if b_matrix is None:
        b_matrix = [
            [_mod1(q[i]) if i == j else Fraction(0) for j in range(len(orders))]
            for i in range(len(orders))
        ]
    b = tuple(tuple(_mod1(x) for x in row) for row in b_matrix)
    return FiniteQuadraticForm(orders, q, b)


def trivial_form() -> FiniteQuadraticForm:
    return FiniteQuadraticForm((), (), ())


def cyclic_form(n: int, q) -> FiniteQuadraticForm:
    return finite_form((n,), (q,))


def negate_form(a: FiniteQuadraticForm) -> FiniteQuadraticForm:
    q = tuple(_mod2(-x) for x in a.q_gens)
    b = tuple(tuple(_mod1(-x) for x in row) for row in a.b_matrix)
    return FiniteQuadraticForm(a.orders, q, b)


def _raw_q(orders, q_raw, b_raw, coeffs) -> Fraction:
    total = Fraction(0)
    k = len(orders)
    for i in range(k):
        total += coeffs[i] * coeffs[i] * q_raw[i]
        for j in range(i + 1, k):
            total += 2 * coeffs[i] * coeffs[j] * b_raw[i][j]
    return _mod2(total)


def _raw_b(b_raw, x, y) -> Fraction:
    total = Fraction(0)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                if yj:
                    total += xi * yj * b_raw[i][j]
    return _mod1(total)


def canonical_form(orders_raw, q_raw, b_raw) -> FiniteQuadraticForm:
    """Rewrite a generator presentation (orders not necessarily a chain) in
    invariant-factor coordinates via the Smith form of the relation matrix."""
    k = len(orders_raw)
    if k == 0:
        return trivial_form()
    rel = tuple(
        tuple(orders_raw[i] if i == j else 0 for j in range(k)) for i in range(k)
    )
    u, d, _ = intmat.smith_normal_form(rel)
    w = intmat.unimodular_inverse(u)
    keep = [i for i in range(k) if d[i][i] > 1]
    gens = []
    for i in keep:
        vec = tuple(w[r][i] % orders_raw[r] for r in range(k))
        gens.append(vec)
    orders = tuple(d[i][i] for i in keep)
    q = tuple(_raw_q(orders_raw, q_raw, b_raw, g) for g in gens)
    b = tuple(tuple(_raw_b(b_raw, gi, gj) for gj in gens) for gi in gens)
    return FiniteQuadraticForm(orders, q, b)


def orthogonal_sum(a: FiniteQuadraticForm, b: FiniteQuadraticForm) -> FiniteQuadraticForm:
    orders = a.orders + b.orders
    q = a.q_gens + b.q_gens
    ka, kb = a.ngens, b.ngens
    bm = [[Fraction(0)] * (ka + kb) for _ in range(ka + kb)]
    for i in range(ka):
        for j in range(ka):
            bm[i][j] = a.b_matrix[i][j]
    for i in range(kb):
        for j in range(kb):
            bm[ka + i][ka + j] = b.b_matrix[i][j]
    return canonical_form(orders, q, bm)


# ---------------------------------------------------------------------------
# elements


def all_elements(a: FiniteQuadraticForm):
    """Lexicographic iteration over coefficient vectors mod orders."""
    return product(*(range(d) for d in a.orders))


def zero_element(a: FiniteQuadraticForm) -> tuple:
    return (0,) * a.ngens


def add_elements(a: FiniteQuadraticForm, x, y) -> tuple:
    return tuple((xi + yi) % d for xi, yi, d in zip(x, y, a.orders))


def scale_element(a: FiniteQuadraticForm, n: int, x) -> tuple:
    return tuple((n * xi) % d for xi, d in zip(x, a.orders))


def element_order(a: FiniteQuadraticForm, x) -> int:
    return lcm(1, *(d // gcd(d, xi) for xi, d in zip(x, a.orders)))


def evaluate_q(a: FiniteQuadraticForm, x) -> Fraction:
    """q(sum c_i g_i) = sum c_i^2 q(g_i) + 2 sum_{i<j} c_i c_j b(g_i, g_j) mod 2Z."""
    if len(x) != a.ngens:
        raise ValueError("coefficient vector length mismatch")
    return _raw_q(a.orders, a.q_gens, a.b_matrix, x)


def evaluate_b(a: FiniteQuadraticForm, x, y) -> Fraction:
    if len(x) != a.ngens or len(y) != a.ngens:
        raise ValueError("coefficient vector length mismatch")
    return _raw_b(a.b_matrix, x, y)


def _span_size(a: FiniteQuadraticForm, elements) -> int:
    span = {zero_element(a)}
    for y in elements:
        k = element_order(a, y)
        span = {add_elements(a, s, scale_element(a, m, y)) for s in span for m in range(k)}
    return len(span)


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class FiniteFormMap:
    """A group homomorphism with q_target(f(x)) = sign * q_source(x) mod 2Z."""

    source: FiniteQuadraticForm
    target: FiniteQuadraticForm
    images: tuple
    sign: int

    def apply(self, x) -> tuple:
        out = [0] * self.target.ngens
        for xi, img in zip(x, self.images):
            if xi:
                for j, cj in enumerate(img):
                    out[j] += xi * cj
        return tuple(c % d for c, d in zip(out, self.target.orders))

    def compose(self, other: "FiniteFormMap") -> "FiniteFormMap":
        """self after other."""
        if other.target != self.source:
            raise ValueError("maps are not composable")
        images = tuple(self.apply(img) for img in other.images)
        return FiniteFormMap(other.source, self.target, images, self.sign * other.sign)

    def inverse(self) -> "FiniteFormMap":
        back = {self.apply(x): x for x in all_elements(self.source)}
        if len(back) != self.source.order:
            raise ValueError("map is not bijective")
        units = [
            tuple(int(i == j) for j in range(self.target.ngens))
            for i in range(self.target.ngens)
        ]
        images = tuple(back[u] for u in units)
        return FiniteFormMap(self.target, self.source, images, self.sign)

    def map_order(self) -> int:
        ident = identity_map(self.source)
        power = self
        n = 1
        while power != ident:
            power = self.compose(power)
            n += 1
            if n > self.source.order * 2:
                raise RuntimeError("order computation runaway")
        return n


def identity_map(a: FiniteQuadraticForm) -> FiniteFormMap:
    images = tuple(
        tuple(int(i == j) for j in range(a.ngens)) for i in range(a.ngens)
    )
    return FiniteFormMap(a, a, images, 1)


def negation_map(a: FiniteQuadraticForm) -> FiniteFormMap:
    images = tuple(
        tuple((-int(i == j)) % a.orders[j] for j in range(a.ngens))
        for i in range(a.ngens)
    )
    return FiniteFormMap(a, a, images, 1)


def validate_map(f: FiniteFormMap) -> None:
    """Raise ValueError unless f is a bijective sign-twisted isometry."""
    a, b = f.source, f.target
    if f.sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if a.order != b.order:
        raise ValueError("source and target orders differ")
    if len(f.images) != a.ngens:
        raise ValueError("one image per source generator required")
    for i, img in enumerate(f.images):
        if len(img) != b.ngens:
            raise ValueError("image vector length mismatch")
        if a.orders[i] % element_order(b, img) != 0:
            raise ValueError("image order does not divide generator order")
        if evaluate_q(b, img) != _mod2(f.sign * a.q_gens[i]):
            raise ValueError("map does not rescale q by its sign")
        for j in range(i):
            if evaluate_b(b, img, f.images[j]) != _mod1(f.sign * a.b_matrix[i][j]):
                raise ValueError("map does not rescale b by its sign")
    if _span_size(b, f.images) != b.order:
        raise ValueError("images do not generate the target group")


def isometries_signed(
    a: FiniteQuadraticForm,
    b: FiniteQuadraticForm,
    sign: int,
    cap: int | None = None,
    _first_only: bool = False,
) -> list:
    """All bijective maps f: A -> B with q_B(f(x)) = sign * q_A(x).

    Enumeration tries generator images in lexicographic order of coefficient
    vectors, so the first entry of the result is the canonical choice.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cap = DEFAULT_CAP if cap is None else cap
    if a.order > cap or b.order > cap:
        raise CapExceededError("finite group too large")
    if a.orders != b.orders:
        return []
    k = a.ngens
    elems = list(all_elements(b))
    orders_of = {x: element_order(b, x) for x in elems}
    q_of = {x: evaluate_q(b, x) for x in elems}
    target_q = [_mod2(sign * qi) for qi in a.q_gens]
    target_b = [[_mod1(sign * a.b_matrix[i][j]) for j in range(k)] for i in range(k)]
    candidates = [
        [x for x in elems if a.orders[i] % orders_of[x] == 0 and q_of[x] == target_q[i]]
        for i in range(k)
    ]
    results: list[FiniteFormMap] = []
    images: list[tuple] = []

    def backtrack(i: int) -> bool:
        if i == k:
            if _span_size(b, images) == b.order:
                results.append(FiniteFormMap(a, b, tuple(images), sign))
                return _first_only
            return False
        for x in candidates[i]:
            if all(evaluate_b(b, x, images[j]) == target_b[i][j] for j in range(i)):
                images.append(x)
                if backtrack(i + 1):
                    return True
                images.pop()
        return False

    backtrack(0)
    return results


def are_isometric(a: FiniteQuadraticForm, b: FiniteQuadraticForm, cap: int | None = None) -> bool:
    return bool(isometries_signed(a, b, 1, cap=cap, _first_only=True))


# ---------------------------------------------------------------------------
# orthogonal groups and double cosets


@dataclass(frozen=True)
class FiniteOrthogonalGroup:
    """The full group of sign +1 self-isometries of a form, fully enumerated."""

    form: FiniteQuadraticForm
    elements: tuple
    _element_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_element_set", frozenset(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, f) -> bool:
        return f in self._element_set

    def identity(self) -> FiniteFormMap:
        return identity_map(self.form)

    def negation(self) -> FiniteFormMap:
        return negation_map(self.form)


def orthogonal_group(a: FiniteQuadraticForm, cap: int | None = None) -> FiniteOrthogonalGroup:
    elems = isometries_signed(a, a, 1, cap=cap)
    return FiniteOrthogonalGroup(a, tuple(elems))


def subgroup_generated(group: FiniteOrthogonalGroup, gens) -> tuple:
    """Closure of the generators (plus identity) under composition."""
    gens = list(gens)
    for g in gens:
        if g not in group:
            raise ValueError("generator is not an element of the group")
    ident = group.identity()
    seen = {ident}
    out = [ident]
    frontier = [ident]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = g.compose(x)
            if y not in seen:
                seen.add(y)
                out.append(y)
                frontier.append(y)
    return tuple(out)


def double_coset_count(group: FiniteOrthogonalGroup, h_gens, k_gens) -> int:
    """Number of orbits of (h, k) . x = h o x o k^-1 on the group's elements.

    Since H and K are closed under inversion the orbit of x is just the set
    {h o x o k}, computed directly per unvisited element.
    """
    h_sub = subgroup_generated(group, h_gens)
    k_sub = subgroup_generated(group, k_gens)
    visited: set[FiniteFormMap] = set()
    count = 0
    total = 0
    for x in group.elements:
        if x in visited:
            continue
        orbit = {h.compose(x).compose(k) for h in h_sub for k in k_sub}
        visited |= orbit
        total += len(orbit)
        count += 1
    if total != len(group):
        raise RuntimeError("double cosets do not partition the group")
    return count
