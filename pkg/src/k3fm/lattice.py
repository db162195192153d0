"""Integer lattices: Gram matrices, signatures, Smith form, discriminant forms.

A lattice is a free Z-module with a nondegenerate symmetric integer pairing,
held as its Gram matrix.  The discriminant group A_L = L*/L with its Q/2Z
quadratic form is computed from the Smith decomposition of the Gram matrix;
all rational arithmetic is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import intmat
from .errors import LatticeParseError
from .finite_qform import FiniteFormMap, FiniteQuadraticForm


@dataclass(frozen=True)
class IntegerLattice:
    gram: tuple
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.gram)
        if n == 0:
            raise ValueError("lattice must have positive rank")
        for row in self.gram:
            if len(row) != n:
                raise ValueError("gram must be square")
            for x in row:
                if isinstance(x, bool) or not isinstance(x, int):
                    raise ValueError("gram entries must be integers")
        for i in range(n):
            for j in range(i):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram must be symmetric")
        if intmat.det(self.gram) == 0:
            raise ValueError("degenerate lattice")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return intmat.det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))


def make_lattice(rows, name: str | None = None) -> IntegerLattice:
    return IntegerLattice(intmat.freeze(rows), name)


def direct_sum(*lattices: IntegerLattice) -> IntegerLattice:
    """Block-diagonal Gram matrix; rank and determinant multiply up."""
    if not lattices:
        raise ValueError("direct_sum needs at least one summand")
    total = sum(lat.rank for lat in lattices)
    rows = []
    offset = 0
    for lat in lattices:
        for row in lat.gram:
            rows.append((0,) * offset + row + (0,) * (total - offset - lat.rank))
        offset += lat.rank
    return IntegerLattice(tuple(rows))


def rescale(lat: IntegerLattice, k: int) -> IntegerLattice:
    if k == 0:
        raise ValueError("scale factor must be nonzero")
    return IntegerLattice(intmat.freeze(intmat.scale(lat.gram, k)))


def diagonal_lattice(*entries: int) -> IntegerLattice:
    n = len(entries)
    return IntegerLattice(
        tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n))
    )


def hyperbolic_plane() -> IntegerLattice:
    """The even unimodular lattice of signature (1,1)."""
    return IntegerLattice(((0, 1), (1, 0)), "U")


_E8_EDGES = ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4))


def e8_lattice() -> IntegerLattice:
    """The even unimodular positive-definite rank-8 lattice (2s on the
    diagonal, -1 on the standard adjacency pattern)."""
    gram = [[0] * 8 for _ in range(8)]
    for i in range(8):
        gram[i][i] = 2
    for i, j in _E8_EDGES:
        gram[i - 1][j - 1] = -1
        gram[j - 1][i - 1] = -1
    return make_lattice(gram, "E8")


def k3_lattice() -> IntegerLattice:
    """Rank-22 even unimodular lattice of signature (3,19): two copies of the
    negated E8 lattice plus three hyperbolic planes."""
    e8m = rescale(e8_lattice(), -1)
    u = hyperbolic_plane()
    out = direct_sum(e8m, e8m, u, u, u)
    return IntegerLattice(out.gram, "K3")


# ---------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class Signature:
    n_plus: int
    n_minus: int

    def as_pair(self) -> tuple:
        return (self.n_plus, self.n_minus)


def signature(lat: IntegerLattice) -> Signature:
    """Counts of positive and negative squares by exact symmetric Gaussian
    elimination over Q (Sylvester's law); no floating point.

    A zero diagonal with a nonzero pairing a = (e_i, e_j) is handled by the
    substitution e_i += e_j, which creates the diagonal entry 2a; the
    hyperbolic pair then contributes one square of each sign.
    """
    n = lat.rank
    m = [[Fraction(x) for x in row] for row in lat.gram]
    plus = minus = 0
    for s in range(n):
        pivot = next((i for i in range(s, n) if m[i][i] != 0), None)
        if pivot is None:
            pair = next(
                (
                    (i, j)
                    for i in range(s, n)
                    for j in range(i + 1, n)
                    if m[i][j] != 0
                ),
                None,
            )
            if pair is None:
                raise ValueError("degenerate lattice")
            i, j = pair
            for c in range(n):
                m[i][c] += m[j][c]
            for r in range(n):
                m[r][i] += m[r][j]
            pivot = i
        if pivot != s:
            m[s], m[pivot] = m[pivot], m[s]
            for row in m:
                row[s], row[pivot] = row[pivot], row[s]
        p = m[s][s]
        if p > 0:
            plus += 1
        else:
            minus += 1
        for i in range(s + 1, n):
            if m[i][s] != 0:
                f = m[i][s] / p
                for c in range(s, n):
                    m[i][c] -= f * m[s][c]
        for c in range(s + 1, n):
            m[s][c] = Fraction(0)
    return Signature(plus, minus)


# ---------------------------------------------------------------------------
# Smith decomposition and discriminant form


@dataclass(frozen=True)
class SmithDecomposition:
    """u * gram * v = d with u, v unimodular, d diagonal with nonnegative
    entries forming a divisibility chain."""

    u: tuple
    d: tuple
    v: tuple

    def diagonal(self) -> tuple:
        return tuple(self.d[i][i] for i in range(len(self.d)))


def smith_normal_form(gram) -> SmithDecomposition:
    gram = intmat.freeze(gram)
    n = len(gram)
    for row in gram:
        if len(row) != n:
            raise ValueError("gram must be square")
    u, d, v = intmat.smith_normal_form(gram)
    return SmithDecomposition(u, d, v)


def invariant_factors(lat: IntegerLattice) -> tuple:
    """Nontrivial invariant factors of A_L = L*/L, in divisibility order."""
    diag = smith_normal_form(lat.gram).diagonal()
    return tuple(d for d in diag if d > 1)


def min_generators(lat: IntegerLattice) -> int:
    """l(L): minimal number of generators of the discriminant group."""
    return len(invariant_factors(lat))


@dataclass(frozen=True)
class DiscriminantData:
    """Discriminant form plus the coordinate bookkeeping needed to map dual
    vectors to invariant-factor coordinates and back."""

    lattice: IntegerLattice
    form: FiniteQuadraticForm
    generators: tuple  # dual vectors in original basis coordinates
    _u: tuple = field(repr=False)
    _keep: tuple = field(repr=False)

    def classify(self, vec) -> tuple:
        """Invariant-factor coordinates of a dual vector (original basis)."""
        y = intmat.mat_vec(self.lattice.gram, vec)
        ints = []
        for x in y:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            ints.append(int(x))
        c = intmat.mat_vec(self._u, tuple(ints))
        return tuple(c[i] % self.form.orders[pos] for pos, i in enumerate(self._keep))


def discriminant_data(lat: IntegerLattice) -> DiscriminantData:
    if not lat.is_even:
        raise ValueError("even lattice required")
    snf = smith_normal_form(lat.gram)
    diag = snf.diagonal()
    w = intmat.unimodular_inverse(snf.u)
    ginv = intmat.inverse(lat.gram)
    gw = intmat.matmul(ginv, w)
    keep = tuple(i for i, d in enumerate(diag) if d > 1)
    gens = tuple(tuple(gw[r][i] for r in range(lat.rank)) for i in keep)
    orders = tuple(diag[i] for i in keep)

    def pairing(x, y) -> Fraction:
        gy = intmat.mat_vec(lat.gram, y)
        return sum((Fraction(xi) * v for xi, v in zip(x, gy)), Fraction(0))

    q = tuple(pairing(v, v) % 2 for v in gens)
    b = tuple(tuple(pairing(vi, vj) % 1 for vj in gens) for vi in gens)
    form = FiniteQuadraticForm(orders, q, b)
    if form.order != abs(lat.det):
        raise RuntimeError("discriminant group order does not match |det|")
    return DiscriminantData(lat, form, gens, snf.u, keep)


def discriminant_form(lat: IntegerLattice) -> FiniteQuadraticForm:
    """The finite quadratic form (A_L, q_L) in invariant-factor coordinates."""
    return discriminant_data(lat).form


def induced_form_map(lat: IntegerLattice, mat) -> FiniteFormMap:
    """The isometry of (A_L, q_L) induced by a lattice isometry matrix."""
    mat = intmat.freeze(mat)
    if intmat.matmul(intmat.transpose(mat), intmat.matmul(lat.gram, mat)) != lat.gram:
        raise ValueError("matrix is not an isometry of the lattice")
    data = discriminant_data(lat)
    images = tuple(data.classify(intmat.mat_vec(mat, v)) for v in data.generators)
    return FiniteFormMap(data.form, data.form, images, 1)


# ---------------------------------------------------------------------------
# lattice files


def lattice_from_obj(obj) -> IntegerLattice:
    """Validate the JSON object format {"name": ..., "gram": [[...], ...]}.

    Entries may be JSON integers or decimal strings (for values beyond double
    precision).  The first violated constraint is reported.
    """
    if not isinstance(obj, dict):
        raise LatticeParseError("top-level value must be an object")
    if "gram" not in obj:
        raise LatticeParseError("missing 'gram' key")
    gram = obj["gram"]
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise LatticeParseError("name must be a string")
    if not isinstance(gram, list) or not gram:
        raise LatticeParseError("gram must be a nonempty array of rows")
    n = len(gram)
    rows = []
    for row in gram:
        if not isinstance(row, list) or len(row) != n:
            raise LatticeParseError("gram must be square")
        out = []
        for x in row:
            if isinstance(x, bool):
                raise LatticeParseError("gram entries must be integers")
            if isinstance(x, int):
                out.append(x)
            elif isinstance(x, str):
                stripped = x.strip()
                body = stripped[1:] if stripped[:1] in "+-" else stripped
                if not body.isdigit():
                    raise LatticeParseError("gram entries must be integers")
                out.append(int(stripped))
            else:
                raise LatticeParseError("gram entries must be integers")
        rows.append(tuple(out))
    for i in range(n):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise LatticeParseError("gram must be symmetric")
    if intmat.det(tuple(rows)) == 0:
        raise LatticeParseError("gram must be nondegenerate")
    return IntegerLattice(tuple(rows), name)


def parse_lattice_file(path) -> IntegerLattice:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise LatticeParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LatticeParseError(f"invalid JSON in {path}: {exc}") from exc
    return lattice_from_obj(obj)
