"""Even integral lattices: embeddings, complements, saturation, isotropic quotients.

Vectors are plain tuples of ints, always expressed in the basis of the lattice
they belong to.  A sublattice embedding stores the images of the source basis
as the columns of an integer matrix over the target basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd

from . import matrices as mx
from .errors import (
    DegenerateEmbeddingError,
    LatticeError,
    NotIsotropicError,
    RankMismatchError,
)

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntegralLattice:
    """Finite-rank lattice given by a symmetric integer Gram matrix."""

    gram: mx.Matrix

    def __post_init__(self):
        g = mx.freeze(self.gram)
        object.__setattr__(self, "gram", g)
        if not mx.is_symmetric(g):
            raise LatticeError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        """Signed determinant of the Gram matrix (1 for rank 0)."""
        return mx.det(self.gram)

    @property
    def disc_abs(self) -> int:
        return abs(self.det)

    @property
    def is_nondegenerate(self) -> bool:
        return self.det != 0

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def pairing(self, x: Vector, y: Vector) -> int:
        if len(x) != self.rank or len(y) != self.rank:
            raise RankMismatchError("vector length does not match lattice rank")
        total = 0
        for i, row in enumerate(self.gram):
            xi = x[i]
            if xi:
                total += xi * sum(r * y[j] for j, r in enumerate(row) if y[j])
        return total

    def norm(self, x: Vector) -> int:
        return self.pairing(x, x)


def direct_sum(a: IntegralLattice, b: IntegralLattice) -> IntegralLattice:
    n, m = a.rank, b.rank
    rows = [list(row) + [0] * m for row in a.gram]
    rows += [[0] * n + list(row) for row in b.gram]
    return IntegralLattice(mx.freeze(rows))


def hyperbolic_plane() -> IntegralLattice:
    """The rank-2 even unimodular lattice U with Gram [[0,1],[1,0]]."""
    return IntegralLattice(((0, 1), (1, 0)))


def rank_one(norm: int) -> IntegralLattice:
    return IntegralLattice(((norm,),))


def polarization_lattice(n: int) -> IntegralLattice:
    """The lattice <2n> + U in the fixed basis (e, f, g).

    Models Z + Z*H + Z*omega for a degree-2n polarization class H.
    """
    if n < 1:
        raise LatticeError("polarization degree parameter must be positive")
    return IntegralLattice(((2 * n, 0, 0), (0, 0, 1), (0, 1, 0)))


@dataclass(frozen=True)
class SublatticeEmbedding:
    """Isometric embedding of a source lattice into a target lattice.

    `matrix` is target-rank x source-rank; column j holds the target
    coordinates of the j-th source basis vector.
    """

    source: IntegralLattice
    target: IntegralLattice
    matrix: mx.Matrix

    def __post_init__(self):
        m = mx.freeze(self.matrix)
        object.__setattr__(self, "matrix", m)
        rows, cols = mx.shape(m)
        if rows != self.target.rank or cols != self.source.rank:
            raise RankMismatchError(
                f"embedding matrix is {rows}x{cols}, expected "
                f"{self.target.rank}x{self.source.rank}"
            )
        induced = mx.mat_mul(mx.mat_mul(mx.transpose(m), self.target.gram), m)
        if induced != self.source.gram:
            raise LatticeError("embedding does not preserve the bilinear form")

    def column(self, j: int) -> Vector:
        return tuple(self.matrix[i][j] for i in range(self.target.rank))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.source.rank)]

    def apply(self, x: Vector) -> Vector:
        return mx.mat_vec(self.matrix, x)


def identity_embedding(lattice: IntegralLattice) -> SublatticeEmbedding:
    return SublatticeEmbedding(lattice, lattice, mx.identity(lattice.rank))


def smith_normal_form(m) -> tuple[mx.Matrix, mx.Matrix, mx.Matrix]:
    """(U, S, V) with U*m*V = S diagonal, d1 | d2 | ..., det(U), det(V) = +-1."""
    return mx.smith_normal_form(mx.freeze(m))


def is_primitive_sublattice(emb: SublatticeEmbedding) -> bool:
    """True when the image is saturated, i.e. all Smith invariants equal 1."""
    invariants = mx.smith_invariants(emb.matrix)
    if len(invariants) < emb.source.rank:
        raise DegenerateEmbeddingError("embedding matrix is rank-deficient")
    return all(d == 1 for d in invariants)


def sublattice(target: IntegralLattice, columns) -> SublatticeEmbedding:
    """Embedding of the abstract lattice spanned by `columns` inside `target`."""
    cols = [tuple(c) for c in columns]
    matrix = mx.transpose(mx.freeze(cols)) if cols else tuple(() for _ in range(target.rank))
    gram = tuple(
        tuple(target.pairing(x, y) for y in cols) for x in cols
    )
    return SublatticeEmbedding(IntegralLattice(gram), target, matrix)


def orthogonal_complement(
    lattice: IntegralLattice, vectors
) -> SublatticeEmbedding:
    """Saturated sublattice of everything orthogonal to the given vectors."""
    if not lattice.is_nondegenerate:
        raise LatticeError("orthogonal complement requires a nondegenerate lattice")
    vecs = [tuple(v) for v in vectors]
    if not vecs:
        return identity_embedding(lattice)
    constraints = mx.freeze([mx.mat_vec(lattice.gram, v) for v in vecs])
    basis = mx.kernel_basis(constraints)
    _, dim = mx.shape(basis)
    cols = [tuple(basis[i][j] for i in range(lattice.rank)) for j in range(dim)]
    return sublattice(lattice, cols)


def saturation(emb: SublatticeEmbedding) -> SublatticeEmbedding:
    """Replace the image by (image tensor Q) intersected with the target."""
    invariants = mx.smith_invariants(emb.matrix)
    if len(invariants) < emb.source.rank:
        raise DegenerateEmbeddingError("saturation requires full column rank")
    if all(d == 1 for d in invariants):
        return emb
    # The saturation is the double annihilator of the column span.
    left = mx.kernel_basis(mx.transpose(emb.matrix))
    constraints = mx.transpose(left)
    basis = mx.kernel_basis(constraints)
    _, dim = mx.shape(basis)
    cols = [tuple(basis[i][j] for i in range(emb.target.rank)) for j in range(dim)]
    return sublattice(emb.target, cols)


def index_of_sublattice(lattice: IntegralLattice, emb: SublatticeEmbedding) -> int:
    """Index [lattice : image] of a full-rank sublattice."""
    if emb.target != lattice:
        raise RankMismatchError("embedding target is not the given lattice")
    if emb.source.rank != lattice.rank:
        raise RankMismatchError("sublattice is not of full rank")
    d = mx.det(emb.matrix)
    if d == 0:
        raise DegenerateEmbeddingError("embedding matrix is singular")
    return abs(d)


def is_primitive_vector(x: Vector) -> bool:
    g = 0
    for c in x:
        g = gcd(g, c)
    return g == 1


def quotient_by_isotropic(lattice: IntegralLattice, v: Vector) -> IntegralLattice:
    """The lattice v_perp / Z*v with its induced form, for primitive isotropic v.

    The quotient basis comes from a Hermite-normal-form completion of v inside
    the saturated v_perp, so the output is deterministic; its Gram matrix is
    well defined because v pairs to zero with all of v_perp.
    """
    v = tuple(v)
    if not is_primitive_vector(v):
        raise NotIsotropicError("vector must be primitive in the lattice")
    if lattice.norm(v) != 0:
        raise NotIsotropicError("vector must be isotropic")
    perp = orthogonal_complement(lattice, [v])
    coords = mx.solve_integer(perp.matrix, v)
    if coords is None:
        raise NotIsotropicError("isotropic vector does not lie in its own complement")
    t = mx.complete_primitive_column(coords)
    # Drop the first column (v itself); the rest projects to a quotient basis.
    rest = mx.mat_mul(perp.matrix, t)
    cols = [
        tuple(rest[i][j] for i in range(lattice.rank))
        for j in range(1, perp.source.rank)
    ]
    gram = tuple(tuple(lattice.pairing(x, y) for y in cols) for x in cols)
    return IntegralLattice(gram)


def enumerate_vectors(
    lattice: IntegralLattice, norm: int, coeff_bound: int
) -> list[Vector]:
    """All x with <x,x> = norm and every |coordinate| <= coeff_bound.

    Complete within the coefficient box only; indefinite lattices have
    infinitely many vectors of a given norm outside any box.  Output is in
    lexicographic order over the box.
    """
    if coeff_bound < 1:
        raise LatticeError("coefficient bound must be at least 1")
    n = lattice.rank
    if n == 0:
        return [()] if norm == 0 else []
    out = []
    gram = lattice.gram
    rng = range(-coeff_bound, coeff_bound + 1)
    for x in itertools.product(rng, repeat=n):
        total = 0
        for i in range(n):
            xi = x[i]
            if xi:
                row = gram[i]
                total += xi * sum(row[j] * x[j] for j in range(n) if x[j])
        if total == norm:
            out.append(x)
    return out
