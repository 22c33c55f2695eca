"""Finite quadratic forms on discriminant groups and their glue arithmetic.

A discriminant form is presented by cyclic generators: a tuple of generator
orders, the Q/2Z values of the quadratic form on the generators, and the
Q/Z matrix of the bilinear form on generator pairs.  Elements are coordinate
tuples reduced modulo the generator orders.

Enumeration-based routines (subgroups, orthogonal complements, isometry
search) are exhaustive and guarded by SIZE_LIMIT; the groups this package
meets in practice have at most a few thousand elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from . import matrices as mx
from .errors import (
    InternalConsistencyError,
    LatticeError,
    OddLatticeError,
    SizeLimitError,
)
from .intlat import IntegralLattice

SIZE_LIMIT = 10_000

Element = tuple[int, ...]


def _mod2(x: Fraction) -> Fraction:
    return x % 2


def _mod1(x: Fraction) -> Fraction:
    return x % 1


@dataclass(frozen=True)
class DiscriminantForm:
    """Finite abelian group with a Q/2Z quadratic form and its Q/Z bilinear form.

    `orders` lists the orders of the cyclic generators (invariant factors for
    forms coming from a lattice); `q` holds q(g_i) in [0, 2); `b` holds
    b(g_i, g_j) in [0, 1).
    """

    orders: tuple[int, ...]
    q: tuple[Fraction, ...]
    b: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        orders = tuple(int(o) for o in self.orders)
        q = tuple(Fraction(v) for v in self.q)
        b = tuple(tuple(Fraction(v) for v in row) for row in self.b)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "b", b)
        k = len(orders)
        if len(q) != k or len(b) != k or any(len(row) != k for row in b):
            raise LatticeError("inconsistent generator data")
        for i, o in enumerate(orders):
            if o < 2:
                raise LatticeError("generator orders must be at least 2")
            if q[i] != _mod2(q[i]):
                raise LatticeError("q values must be canonical representatives in [0, 2)")
            if (o * q[i]).denominator != 1 or (o * o * q[i]) % 2 != 0:
                raise LatticeError("q value is not well defined on a generator of this order")
            if _mod1(b[i][i]) != _mod1(q[i]):
                raise LatticeError("b(g, g) must agree with q(g) modulo 1")
            for j in range(k):
                if b[i][j] != _mod1(b[i][j]) or b[i][j] != b[j][i]:
                    raise LatticeError("b must be a symmetric matrix of representatives in [0, 1)")
                if (o * b[i][j]).denominator != 1:
                    raise LatticeError("b value is not well defined on generators of these orders")

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @cached_property
    def order(self) -> int:
        total = 1
        for o in self.orders:
            total *= o
        return total

    def zero(self) -> Element:
        return (0,) * self.ngens

    def reduce(self, x) -> Element:
        return tuple(int(c) % o for c, o in zip(x, self.orders, strict=True))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % o for a, b, o in zip(x, y, self.orders, strict=True))

    def neg(self, x: Element) -> Element:
        return tuple((-a) % o for a, o in zip(x, self.orders, strict=True))

    def scale(self, n: int, x: Element) -> Element:
        return tuple((n * a) % o for a, o in zip(x, self.orders, strict=True))

    def element_order(self, x: Element) -> int:
        n = 1
        cur = self.reduce(x)
        while any(cur):
            cur = self.add(cur, x)
            n += 1
            if n > self.order:
                raise InternalConsistencyError("element order exceeded group order")
        return n

    def q_of(self, x) -> Fraction:
        """Value of the quadratic form, canonical representative in [0, 2)."""
        x = self.reduce(x)
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                total += xi * xi * self.q[i]
                for j in range(i + 1, self.ngens):
                    if x[j]:
                        total += 2 * xi * x[j] * self.b[i][j]
        return _mod2(total)

    def b_of(self, x, y) -> Fraction:
        """Value of the bilinear form, canonical representative in [0, 1)."""
        x = self.reduce(x)
        y = self.reduce(y)
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                total += xi * sum(self.b[i][j] * yj for j, yj in enumerate(y) if yj)
        return _mod1(total)

    def elements(self) -> list[Element]:
        if self.order > SIZE_LIMIT:
            raise SizeLimitError(
                f"group of order {self.order} exceeds the enumeration limit {SIZE_LIMIT}"
            )
        return list(itertools.product(*(range(o) for o in self.orders)))

    def product_with_negated(self, other: "DiscriminantForm") -> "DiscriminantForm":
        """The form q_self + (-q_other) on the direct sum, coordinates concatenated."""
        orders = self.orders + other.orders
        q = self.q + tuple(_mod2(-v) for v in other.q)
        n, m = self.ngens, other.ngens
        rows = []
        for i in range(n):
            rows.append(self.b[i] + (Fraction(0),) * m)
        for i in range(m):
            rows.append((Fraction(0),) * n + tuple(_mod1(-v) for v in other.b[i]))
        return DiscriminantForm(orders, q, tuple(rows))

    def to_json_dict(self) -> dict:
        return {
            "orders": list(self.orders),
            "q": [str(v) for v in self.q],
            "b": [[str(v) for v in row] for row in self.b],
        }


TRIVIAL_FORM = DiscriminantForm((), (), ())


@dataclass(frozen=True)
class LatticeDiscriminantData:
    """Discriminant form of a lattice plus the change-of-coordinates data.

    `dual_gens[i]` is a representative of the i-th generator as a rational
    vector in the lattice basis.
    """

    lattice: IntegralLattice
    form: DiscriminantForm
    dual_gens: tuple[tuple[Fraction, ...], ...]
    _u: mx.Matrix
    _snf_diag: tuple[int, ...]
    _kept: tuple[int, ...]

    def class_of(self, dual_vector) -> Element:
        """Class in the discriminant group of a rational vector lying in the dual."""
        xs = tuple(Fraction(v) for v in dual_vector)
        n = self.lattice.rank
        if len(xs) != n:
            raise LatticeError("dual vector has wrong length")
        z = []
        for row in self.lattice.gram:
            val = sum(Fraction(r) * x for r, x in zip(row, xs))
            if val.denominator != 1:
                raise LatticeError("vector does not lie in the dual lattice")
            z.append(int(val))
        w = mx.mat_vec(self._u, tuple(z))
        full = [w[i] % self._snf_diag[i] for i in range(n)]
        return tuple(full[i] for i in self._kept)

    def dual_representative(self, x: Element) -> tuple[Fraction, ...]:
        """A dual-lattice vector representing the class x."""
        x = self.form.reduce(x)
        n = self.lattice.rank
        out = [Fraction(0)] * n
        for c, gen in zip(x, self.dual_gens, strict=True):
            if c:
                out = [acc + c * g for acc, g in zip(out, gen)]
        return tuple(out)


@lru_cache(maxsize=None)
def discriminant_data(lattice: IntegralLattice) -> LatticeDiscriminantData:
    """Discriminant group of an even nondegenerate lattice, with coordinates."""
    if not lattice.is_even:
        raise OddLatticeError("discriminant form requires an even lattice")
    if not lattice.is_nondegenerate:
        raise LatticeError("discriminant form requires a nondegenerate lattice")
    n = lattice.rank
    if n == 0:
        return LatticeDiscriminantData(lattice, TRIVIAL_FORM, (), (), (), ())
    u, s, _ = mx.smith_normal_form(lattice.gram)
    diag = tuple(abs(s[i][i]) for i in range(n))
    # Smith diagonal entries of a nondegenerate Gram are nonzero.
    u_inv = mx.inverse_unimodular(u)
    g_inv = mx.inverse_rational(lattice.gram)
    kept = tuple(i for i in range(n) if diag[i] > 1)
    dual_gens = []
    for i in kept:
        z = tuple(u_inv[r][i] for r in range(n))
        gen = tuple(
            sum(g_inv[r][c] * z[c] for c in range(n)) for r in range(n)
        )
        dual_gens.append(gen)

    def pair(i: int, j: int) -> Fraction:
        return sum(
            dual_gens[i][r] * Fraction(lattice.gram[r][c]) * dual_gens[j][c]
            for r in range(n)
            for c in range(n)
        )

    k = len(kept)
    q = tuple(_mod2(pair(i, i)) for i in range(k))
    b = tuple(tuple(_mod1(pair(i, j)) for j in range(k)) for i in range(k))
    form = DiscriminantForm(tuple(diag[i] for i in kept), q, b)
    if form.order != lattice.disc_abs:
        raise InternalConsistencyError("discriminant group order does not match |det|")
    return LatticeDiscriminantData(
        lattice, form, tuple(dual_gens), u, diag, kept
    )


def discriminant_form(lattice: IntegralLattice) -> DiscriminantForm:
    return discriminant_data(lattice).form


def q_value(form: DiscriminantForm, x) -> Fraction:
    return form.q_of(x)


def b_value(form: DiscriminantForm, x, y) -> Fraction:
    return form.b_of(x, y)


@dataclass(frozen=True)
class FiniteSubgroup:
    """Subgroup of a discriminant group, stored by canonical HNF generators."""

    ambient: DiscriminantForm
    gens: tuple[Element, ...]

    def __post_init__(self):
        gens = tuple(self.ambient.reduce(g) for g in self.gens)
        object.__setattr__(self, "gens", _canonical_gens(self.ambient, gens))

    @staticmethod
    def generated_by(ambient: DiscriminantForm, gens) -> "FiniteSubgroup":
        return FiniteSubgroup(ambient, tuple(tuple(g) for g in gens))

    @staticmethod
    def trivial(ambient: DiscriminantForm) -> "FiniteSubgroup":
        return FiniteSubgroup(ambient, ())

    @staticmethod
    def full(ambient: DiscriminantForm) -> "FiniteSubgroup":
        k = ambient.ngens
        return FiniteSubgroup(
            ambient, tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))
        )

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        """All elements, sorted; computed by closure under addition."""
        seen = {self.ambient.zero()}
        frontier = [self.ambient.zero()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.gens:
                    y = self.ambient.add(x, g)
                    if y not in seen:
                        if len(seen) >= SIZE_LIMIT:
                            raise SizeLimitError("subgroup enumeration limit exceeded")
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    @cached_property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _element_set(self) -> frozenset:
        return frozenset(self.elements)

    def __contains__(self, x) -> bool:
        return self.ambient.reduce(x) in self._element_set

    @cached_property
    def _structure(self) -> tuple[tuple[int, ...], tuple[Element, ...]]:
        """Invariant factors and an independent generating set realizing them."""
        k = self.ambient.ngens
        if k == 0:
            return ((), ())
        rows = [list(g) for g in self.gens]
        rows += [
            [self.ambient.orders[i] if i == j else 0 for j in range(k)]
            for i in range(k)
        ]
        basis, _ = mx.hermite_row_form(mx.freeze(rows))
        basis = mx.freeze([row for row in basis if any(row)])
        if len(basis) != k:
            raise InternalConsistencyError("subgroup lattice is not of full rank")
        diag = mx.freeze(
            [[self.ambient.orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
        )
        # basis * c = diag has an integer solution since diag's columns lie in the span.
        c_rows = []
        for i in range(k):
            col = tuple(diag[r][i] for r in range(k))
            sol = mx.solve_rational(mx.transpose(basis), col)
            if any(v.denominator != 1 for v in sol):
                raise InternalConsistencyError("order lattice not contained in subgroup lattice")
            c_rows.append([int(v) for v in sol])
        c = mx.transpose(mx.freeze(c_rows))
        uc, sc, _ = mx.smith_normal_form(c)
        uc_inv = mx.inverse_unimodular(uc)
        invariants = []
        sgens = []
        for i in range(k):
            d = abs(sc[i][i])
            if d <= 1:
                continue
            vec = tuple(uc_inv[r][i] for r in range(k))
            elem = self.ambient.reduce(mx.mat_vec(mx.transpose(basis), vec))
            invariants.append(d)
            sgens.append(elem)
        return (tuple(invariants), tuple(sgens))

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self._structure[0]

    @property
    def structure_gens(self) -> tuple[Element, ...]:
        return self._structure[1]

    @cached_property
    def _coords(self) -> dict[Element, tuple[int, ...]]:
        invariants, sgens = self._structure
        table: dict[Element, tuple[int, ...]] = {}
        for combo in itertools.product(*(range(s) for s in invariants)):
            x = self.ambient.zero()
            for c, g in zip(combo, sgens):
                if c:
                    x = self.ambient.add(x, self.ambient.scale(c, g))
            table[x] = combo
        if len(table) != self.order:
            raise InternalConsistencyError("independent generators do not span the subgroup")
        return table

    def coordinates(self, x) -> tuple[int, ...]:
        return self._coords[self.ambient.reduce(x)]


def _canonical_gens(ambient: DiscriminantForm, gens: tuple[Element, ...]) -> tuple[Element, ...]:
    k = ambient.ngens
    if k == 0:
        return ()
    rows = [list(g) for g in gens]
    rows += [[ambient.orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
    h, _ = mx.hermite_row_form(mx.freeze(rows))
    out = []
    for row in h:
        red = ambient.reduce(row)
        if any(red):
            out.append(red)
    return tuple(out)


@dataclass(frozen=True)
class SubgroupMap:
    """Group homomorphism between subgroups, given on structure generators."""

    domain: FiniteSubgroup
    codomain: FiniteSubgroup
    images: tuple[Element, ...]

    def __call__(self, x) -> Element:
        coords = self.domain.coordinates(x)
        out = self.codomain.ambient.zero()
        for c, img in zip(coords, self.images, strict=True):
            if c:
                out = self.codomain.ambient.add(out, self.codomain.ambient.scale(c, img))
        return out

    @cached_property
    def is_bijective(self) -> bool:
        image = {self(x) for x in self.domain.elements}
        return len(image) == self.domain.order and self.domain.order == self.codomain.order

    @cached_property
    def preserves_q(self) -> bool:
        aq = self.domain.ambient.q_of
        bq = self.codomain.ambient.q_of
        return all(bq(self(x)) == aq(x) for x in self.domain.elements)


def subgroup_isometries(v: FiniteSubgroup, w: FiniteSubgroup) -> list[SubgroupMap]:
    """All group isomorphisms V -> W preserving the restricted quadratic forms."""
    if v.order != w.order:
        return []
    if v.invariant_factors != w.invariant_factors:
        return []
    invariants, _ = v._structure
    if not invariants:
        return [SubgroupMap(v, w, ())]
    candidates = []
    for s in invariants:
        cands = [x for x in w.elements if not any(w.ambient.scale(s, x))]
        candidates.append(cands)
    out = []
    for images in itertools.product(*candidates):
        gamma = SubgroupMap(v, w, images)
        if gamma.is_bijective and gamma.preserves_q:
            out.append(gamma)
    out.sort(key=lambda g: g.images)
    return out


@dataclass(frozen=True)
class GlueQuotient:
    """Graph, orthogonal complement and induced quotient form of a gluing map.

    Lives in the product form q_src + (-q_amb); `reps` are product-group
    representatives of the quotient generators.
    """

    product: DiscriminantForm
    gamma: FiniteSubgroup
    gamma_perp: FiniteSubgroup
    quotient: DiscriminantForm
    reps: tuple[Element, ...]
    _basis: mx.Matrix
    _uc: mx.Matrix
    _sc_diag: tuple[int, ...]
    _kept: tuple[int, ...]

    def project(self, x) -> Element:
        """Quotient coordinates of an element of gamma_perp."""
        if x not in self.gamma_perp:
            raise LatticeError("element does not lie in the orthogonal complement")
        k = self.product.ngens
        if k == 0:
            return ()
        lift = self.product.reduce(x)
        # Solve basis*y = lift modulo the ambient orders.
        aug = mx.freeze(
            [
                list(self._basis[i])
                + [self.product.orders[i] if i == j else 0 for j in range(k)]
                for i in range(k)
            ]
        )
        sol = mx.solve_integer(aug, lift)
        if sol is None:
            raise InternalConsistencyError("perp element not in the perp lattice")
        y = sol[:k]
        w = mx.mat_vec(self._uc, y)
        return tuple(w[i] % self._sc_diag[i] for i in self._kept)


def glue_perp_quotient(
    a_src: DiscriminantForm, a_amb: DiscriminantForm, gamma: SubgroupMap
) -> GlueQuotient:
    """Graph of gamma, its orthogonal complement, and the induced quotient form."""
    if gamma.domain.ambient != a_src or gamma.codomain.ambient != a_amb:
        raise LatticeError("gluing map does not match the given forms")
    if not (gamma.is_bijective and gamma.preserves_q):
        raise LatticeError("gluing map must be a form-respecting isomorphism")
    product = a_src.product_with_negated(a_amb)
    n_src = a_src.ngens
    graph_gens = []
    for g in gamma.domain.structure_gens:
        img = gamma(g)
        graph_gens.append(tuple(g) + tuple(img))
    graph = FiniteSubgroup.generated_by(product, graph_gens)
    for x in graph.elements:
        if product.q_of(x) != 0:
            raise InternalConsistencyError("graph of a form-respecting map must be isotropic")
    perp_elems = [
        x
        for x in product.elements()
        if all(product.b_of(x, g) == 0 for g in graph.gens)
    ]
    perp = FiniteSubgroup.generated_by(product, perp_elems)
    for g in graph.gens:
        if g not in perp:
            raise InternalConsistencyError("graph is not contained in its own perp")
    return _quotient_form(product, perp, graph)


def _quotient_form(
    product: DiscriminantForm, perp: FiniteSubgroup, graph: FiniteSubgroup
) -> GlueQuotient:
    k = product.ngens
    if k == 0:
        return GlueQuotient(
            product, graph, perp, TRIVIAL_FORM, (), (), (), (), ()
        )
    rows = [list(g) for g in perp.gens]
    rows += [[product.orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
    basis_rows, _ = mx.hermite_row_form(mx.freeze(rows))
    basis_rows = mx.freeze([row for row in basis_rows if any(row)])
    basis = mx.transpose(basis_rows)  # columns span the perp lattice

    sub_rows = [list(g) for g in graph.gens]
    sub_rows += [[product.orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
    sub_basis_rows, _ = mx.hermite_row_form(mx.freeze(sub_rows))
    sub_basis_rows = mx.freeze([row for row in sub_basis_rows if any(row)])
    sub_basis = mx.transpose(sub_basis_rows)

    c_cols = []
    for j in range(k):
        col = tuple(sub_basis[i][j] for i in range(k))
        sol = mx.solve_rational(basis, col)
        if any(v.denominator != 1 for v in sol):
            raise InternalConsistencyError("graph lattice is not inside the perp lattice")
        c_cols.append(tuple(int(v) for v in sol))
    c = mx.transpose(mx.freeze(c_cols))
    uc, sc, _ = mx.smith_normal_form(c)
    uc_inv = mx.inverse_unimodular(uc)
    diag = tuple(abs(sc[i][i]) for i in range(k))
    kept = tuple(i for i in range(k) if diag[i] > 1)
    reps = []
    for i in kept:
        vec = tuple(uc_inv[r][i] for r in range(k))
        reps.append(product.reduce(mx.mat_vec(basis, vec)))
    orders = tuple(diag[i] for i in kept)
    q = tuple(product.q_of(r) for r in reps)
    b = tuple(tuple(product.b_of(r1, r2) for r2 in reps) for r1 in reps)
    quotient = DiscriminantForm(orders, q, b)
    return GlueQuotient(
        product, graph, perp, quotient, tuple(reps), basis, uc, diag, kept
    )


def all_subgroups(form: DiscriminantForm) -> list[FiniteSubgroup]:
    """Every subgroup, by exhaustive closure of small generating sets."""
    elems = form.elements()
    max_gens = max(1, form.ngens)
    seen: dict[tuple[Element, ...], FiniteSubgroup] = {}
    trivial = FiniteSubgroup.trivial(form)
    seen[trivial.gens] = trivial
    for size in range(1, max_gens + 1):
        for combo in itertools.combinations(elems, size):
            sub = FiniteSubgroup.generated_by(form, combo)
            seen.setdefault(sub.gens, sub)
    return [seen[key] for key in sorted(seen)]
