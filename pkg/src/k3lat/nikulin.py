"""Gluing tuples (V, W, gamma, t) classifying primitive embeddings of a rank-2
positive-definite even lattice into <2n> + U, following Nikulin's criterion,
plus the congruence-driven extension from ambient degree 2d to degree 2md.

A tuple is valid when the quadratic form induced on the orthogonal complement
of the graph of gamma, modulo the graph, is cyclic of order 2t with a
generator of q-value 1/(2t).  That value equals minus the discriminant form
of the rank-1 complement <-2t>, so matching "as stated" is what honest
computations produce; a tolerant mode accepting -1/(2t) as well is available
through the sign-convention flag.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt, lcm

from . import matrices as mx
from .discform import (
    DiscriminantForm,
    FiniteSubgroup,
    GlueQuotient,
    SubgroupMap,
    all_subgroups,
    discriminant_data,
    discriminant_form,
    glue_perp_quotient,
    subgroup_isometries,
)
from .errors import (
    InadmissibleError,
    InternalConsistencyError,
    LatticeError,
)
from .intlat import (
    IntegralLattice,
    SublatticeEmbedding,
    enumerate_vectors,
    is_primitive_sublattice,
    orthogonal_complement,
    polarization_lattice,
    rank_one,
)
from .modarith import crt, is_prime, legendre, sqrt_mod_prime


class SignConvention(enum.Enum):
    """How a quotient generator's q-value is matched against 1/(2t)."""

    AS_STATED = "as_stated"
    GLOBAL_SIGN = "global_sign"


DEFAULT_SIGN = SignConvention.GLOBAL_SIGN


def _polarization_degree(lattice: IntegralLattice) -> int:
    """n such that the lattice is <2n> + U in the basis (e, f, g)."""
    if lattice.rank == 3 and lattice.gram[0][0] > 0 and lattice.gram[0][0] % 2 == 0:
        n = lattice.gram[0][0] // 2
        if lattice.gram == polarization_lattice(n).gram:
            return n
    raise LatticeError("ambient lattice must be <2n> + U in the basis (e, f, g)")


def _matches_reference(q_val: Fraction, two_t: int, sign: SignConvention) -> bool:
    """True when some unit multiple lambda^2 * q_val hits 1/(2t) (or +-1/(2t))."""
    targets = {Fraction(1, two_t) % 2}
    if sign is SignConvention.GLOBAL_SIGN:
        targets.add((-Fraction(1, two_t)) % 2)
    for lam in range(1, two_t + 1):
        if gcd(lam, two_t) != 1:
            continue
        if (lam * lam * q_val) % 2 in targets:
            return True
    return False


@dataclass(frozen=True)
class GluingData:
    """Nikulin tuple (V, W, gamma, t) for an embedding into <2n> + U."""

    v_group: FiniteSubgroup
    w_group: FiniteSubgroup
    gamma: SubgroupMap
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise LatticeError("t must be a positive integer")
        if self.gamma.domain != self.v_group or self.gamma.codomain != self.w_group:
            raise LatticeError("gluing map endpoints do not match the given subgroups")
        amb = self.w_group.ambient
        if amb.ngens != 1 or amb.orders[0] % 2 != 0:
            raise LatticeError("ambient discriminant group must be cyclic of even order")
        if amb.q[0] != Fraction(1, amb.orders[0]):
            raise LatticeError("ambient form must be the standard one on Z/2n")

    @property
    def source_form(self) -> DiscriminantForm:
        return self.v_group.ambient

    @property
    def ambient_n(self) -> int:
        return self.w_group.ambient.orders[0] // 2

    @cached_property
    def quotient_result(self) -> GlueQuotient:
        return glue_perp_quotient(self.source_form, self.w_group.ambient, self.gamma)

    def is_valid(self, sign: SignConvention = DEFAULT_SIGN) -> bool:
        try:
            self.validate(sign)
        except (LatticeError, InternalConsistencyError):
            return False
        return True

    def validate(self, sign: SignConvention = DEFAULT_SIGN) -> None:
        if not (self.gamma.is_bijective and self.gamma.preserves_q):
            raise LatticeError("gluing map must be a form-respecting isomorphism")
        q = self.quotient_result.quotient
        if q.orders != (2 * self.t,):
            raise LatticeError(
                f"glue quotient has generator orders {q.orders}, expected ({2 * self.t},)"
            )
        if not _matches_reference(q.q[0], 2 * self.t, sign):
            raise LatticeError(
                f"glue quotient generator has q = {q.q[0]}, which never matches 1/{2 * self.t}"
            )

    def to_json_dict(self) -> dict:
        return {
            "t": self.t,
            "ambient_n": self.ambient_n,
            "v_generators": [list(g) for g in self.v_group.gens],
            "w_generators": [list(g) for g in self.w_group.gens],
            "gamma_images": [list(g) for g in self.gamma.images],
            "source_form": self.source_form.to_json_dict(),
        }


@dataclass(frozen=True)
class ExtensionCertificate:
    """Witness data for one extension step from degree 2d to degree 2md."""

    x0: tuple[int, ...]
    y0: int
    lam: int
    m: int
    new_t: int

    def to_json_dict(self) -> dict:
        return {
            "x0": list(self.x0),
            "y0": self.y0,
            "lambda": self.lam,
            "m": self.m,
            "new_t": self.new_t,
        }


def embedding_to_glue(emb: SublatticeEmbedding) -> GluingData:
    """The gluing tuple classifying a primitive embedding into <2n> + U.

    V is the subgroup of classes in the source discriminant group represented
    by dual vectors of the ambient lattice whose complement component is
    integral; gamma pushes such a class into the ambient discriminant group;
    t is read off the rank-1 orthogonal complement <-2t>.
    """
    src = emb.source
    if src.rank != 2 or src.gram[0][0] <= 0 or src.det <= 0:
        raise LatticeError("source must be a rank-2 positive-definite lattice")
    if not is_primitive_sublattice(emb):
        raise LatticeError("embedding is not primitive")
    target = emb.target
    _polarization_degree(target)

    comp = orthogonal_complement(target, emb.columns())
    if comp.source.rank != 1 or comp.source.gram[0][0] >= 0:
        raise LatticeError("complement is not negative definite of rank 1")
    norm = -comp.source.gram[0][0]
    if norm % 2 != 0:
        raise InternalConsistencyError("complement of an even lattice must be even")
    t = norm // 2

    src_data = discriminant_data(src)
    amb_data = discriminant_data(target)

    # Classes in A_src of the source components of the ambient basis vectors,
    # taken in the splitting over Q given by source + complement.
    basis = mx.freeze(
        [
            [emb.matrix[i][0], emb.matrix[i][1], comp.matrix[i][0]]
            for i in range(3)
        ]
    )
    glue_gens = []
    for i in range(3):
        e_i = tuple(1 if r == i else 0 for r in range(3))
        coeffs = mx.solve_rational(basis, e_i)
        glue_gens.append(src_data.class_of(coeffs[:2]))
    source_glue = FiniteSubgroup.generated_by(src_data.form, glue_gens)

    v_elems = [
        x
        for x in src_data.form.elements()
        if all(src_data.form.b_of(x, g) == 0 for g in source_glue.gens)
    ]
    v_group = FiniteSubgroup.generated_by(src_data.form, v_elems)

    images = []
    for g in v_group.structure_gens:
        dual = src_data.dual_representative(g)
        pushed = tuple(
            sum(Fraction(emb.matrix[r][c]) * dual[c] for c in range(2))
            for r in range(3)
        )
        images.append(amb_data.class_of(pushed))
    w_group = FiniteSubgroup.generated_by(amb_data.form, images)
    gamma = SubgroupMap(v_group, w_group, tuple(images))
    if not (gamma.is_bijective and gamma.preserves_q):
        raise InternalConsistencyError("extracted gluing map is not a form isometry")

    glue = GluingData(v_group, w_group, gamma, t)
    glue.validate()
    return glue


@dataclass(frozen=True)
class ExtensionConstants:
    """Congruence modulus and the two quadratic-residue constraints."""

    modulus: int
    a: int
    b: int


def extension_constants(glue: GluingData, d: int) -> ExtensionConstants:
    """(N, a, b): admissible m satisfy m = 1 mod N with a, b residues mod m.

    N = lcm(4dt, |A_source|), a = -d, b = t.  Admissibility additionally
    requires gcd(m, 24) = 1: the relevant moduli space has dimension 4, so the
    factorial bound (2n)! is 24.
    """
    if glue.ambient_n != d:
        raise LatticeError("glue ambient degree does not match d")
    modulus = lcm(4 * d * glue.t, max(glue.source_form.order, 1))
    return ExtensionConstants(modulus, -d, glue.t)


def admissible_m(glue: GluingData, d: int, m: int) -> tuple[bool, list[str]]:
    """Check the extension congruences for m; m = 1 is trivially admissible."""
    if m < 1:
        return False, ["m must be a positive integer"]
    if m == 1:
        return True, []
    reasons = []
    consts = extension_constants(glue, d)
    if not is_prime(m):
        reasons.append(f"{m} is not prime")
        return False, reasons
    if m % consts.modulus != 1:
        reasons.append(f"{m} is not 1 modulo {consts.modulus}")
    if gcd(m, 24) != 1:
        reasons.append(f"{m} shares a factor with 24")
    if m > 2:
        if legendre(consts.a, m) != 1:
            reasons.append(f"{consts.a} is not a quadratic residue modulo {m}")
        if legendre(consts.b, m) != 1:
            reasons.append(f"{consts.b} is not a quadratic residue modulo {m}")
    _, y0, _ = _find_q_generator(glue)
    if gcd(m, y0) != 1:
        reasons.append(f"{m} divides the quotient generator lift y0 = {y0}")
    return (not reasons), reasons


def _find_q_generator(glue: GluingData) -> tuple[tuple[int, ...], int, tuple[int, ...]]:
    """Lexicographically first perp element generating the quotient with
    q_src(x0) - y0^2/(2d) = 1/(2t); returns (x0, y0 in [1, 2d], full element)."""
    res = glue.quotient_result
    two_t = 2 * glue.t
    two_d = glue.w_group.ambient.orders[0]
    n_src = glue.source_form.ngens
    target = Fraction(1, two_t) % 2
    for elem in res.gamma_perp.elements:
        cls = res.project(elem)
        if len(cls) != 1 or gcd(cls[0], two_t) != 1:
            continue
        if res.product.q_of(elem) != target:
            continue
        x0 = elem[:n_src]
        y_class = elem[n_src]
        y0 = y_class if y_class >= 1 else two_d
        return x0, y0, elem
    raise InternalConsistencyError(
        "no quotient generator satisfies the q-normalization; glue data is inconsistent"
    )


def extend_glue(
    glue: GluingData,
    d: int,
    m: int,
    sign: SignConvention = DEFAULT_SIGN,
) -> tuple[GluingData, ExtensionCertificate]:
    """Extend a glue for <2d> + U to one for <2md> + U along an admissible prime m.

    Multiplication by m embeds Z/2d into Z/2md compatibly with the forms; the
    congruence lambda^2 t y0^2 + d = 0 mod m, lambda = 1 mod 4dt renormalizes
    the quotient generator to q-value 1/(2tm).  The returned glue is
    re-validated from scratch.
    """
    glue.validate(sign)
    if glue.ambient_n != d:
        raise LatticeError("glue ambient degree does not match d")
    t = glue.t
    x0, y0, perp_elem = _find_q_generator(glue)
    if m == 1:
        cert = ExtensionCertificate(x0, y0, 1, 1, t)
        return glue, cert
    ok, reasons = admissible_m(glue, d, m)
    if not ok:
        raise InadmissibleError("; ".join(reasons))

    rhs = (-d) * pow(t * y0 * y0 % m, -1, m) % m
    if legendre(rhs, m) == -1:
        raise InadmissibleError(
            f"lambda congruence unsolvable: {rhs} is not a square modulo {m}"
        )
    root = sqrt_mod_prime(rhs, m)
    lam = crt([(1, 4 * d * t), (root, m)])
    if gcd(lam, 2 * m * t) != 1:
        raise InternalConsistencyError("lambda is not prime to 2mt")

    amb_new = discriminant_form(rank_one(2 * m * d))
    images = tuple(((m * img[0]) % (2 * m * d),) for img in glue.gamma.images)
    w_new = FiniteSubgroup.generated_by(amb_new, images)
    gamma_new = SubgroupMap(glue.v_group, w_new, images)
    if not (gamma_new.is_bijective and gamma_new.preserves_q):
        raise InternalConsistencyError("extended gluing map is not a form isometry")
    extended = GluingData(glue.v_group, w_new, gamma_new, t * m)
    extended.validate(sign)

    # The certificate generator must land on q = 1/(2tm) after scaling by lambda.
    res = extended.quotient_result
    elem = x0 + (y0 % (2 * m * d),)
    cls = res.project(elem)
    order = res.quotient.element_order(cls)
    if order != 2 * t * m:
        raise InternalConsistencyError(
            f"certificate element has order {order} in the new quotient, expected {2 * t * m}"
        )
    scaled = res.quotient.scale(lam, cls)
    if res.quotient.q_of(scaled) != Fraction(1, 2 * t * m) % 2:
        raise InternalConsistencyError(
            "scaled generator does not have q = 1/(2tm); lambda congruence failed"
        )
    cert = ExtensionCertificate(x0, y0, lam, m, t * m)
    return extended, cert


@dataclass(frozen=True)
class EmbeddingSearchResult:
    """Outcome of realize_embedding: a witness, or the glue certificate alone."""

    status: str  # "witness" or "certificate_only"
    embedding: SublatticeEmbedding | None
    glue: GluingData

    @property
    def found(self) -> bool:
        return self.embedding is not None


def _signed_range(bound: int):
    yield 0
    for k in range(1, bound + 1):
        yield k
        yield -k


def _divisor_pairs(p: int, bound: int):
    """Ordered integer pairs (f, g) with f*g = p; for p = 0 the free coordinate
    is limited by `bound`."""
    if p == 0:
        yield (0, 0)
        for k in range(1, bound + 1):
            yield (k, 0)
            yield (-k, 0)
            yield (0, k)
            yield (0, -k)
        return
    divisors = [d for d in range(1, abs(p) + 1) if p % d == 0]
    for d in divisors:
        yield (d, p // d)
        yield (-d, -(p // d))


def _y_candidates(x, q12, q22, n, bound):
    """Integer vectors y with <x, y> = q12 and y^2 = q22, scanning y_e."""
    xe, xf, xg = x
    for ye in _signed_range(bound):
        r = q12 - 2 * n * xe * ye
        s = q22 - 2 * n * ye * ye  # needs 2*yf*yg = s
        if xf == 0 and xg == 0:
            if r != 0 or s % 2 != 0:
                continue
            for yf, yg in _divisor_pairs(s // 2, bound):
                yield (ye, yf, yg)
        elif xf == 0:
            if r % xg != 0:
                continue
            yf = r // xg
            if yf == 0:
                if s == 0:
                    for yg in _signed_range(bound):
                        yield (ye, yf, yg)
            elif s % (2 * yf) == 0:
                yield (ye, yf, s // (2 * yf))
        elif xg == 0:
            if r % xf != 0:
                continue
            yg = r // xf
            if yg == 0:
                if s == 0:
                    for yf in _signed_range(bound):
                        yield (ye, yf, yg)
            elif s % (2 * yg) == 0:
                yield (ye, s // (2 * yg), yg)
        else:
            disc = r * r - 2 * xf * xg * s
            if disc < 0:
                continue
            rt = isqrt(disc)
            if rt * rt != disc:
                continue
            roots = [r + rt] if rt == 0 else [r + rt, r - rt]
            for num in roots:
                if num % (2 * xg) != 0:
                    continue
                yf = num // (2 * xg)
                if (r - xg * yf) % xf != 0:
                    continue
                yield (ye, yf, (r - xg * yf) // xf)


def realize_embedding(
    source: IntegralLattice,
    n: int,
    glue: GluingData,
    search_bound: int,
    sign: SignConvention = DEFAULT_SIGN,
) -> EmbeddingSearchResult:
    """Search for explicit columns realizing a valid glue inside <2n> + U.

    The first branch fixes the image of the first basis vector to
    (0, 1, q11/2) and scans the hyperbolic coordinate; later branches run the
    same scan over the other norm-q11 divisor shapes (x_e, x_f, x_g).  On
    exhaustion the glue itself is the (existence-only) certificate.
    """
    glue.validate(sign)
    if glue.ambient_n != n:
        raise LatticeError("glue ambient degree does not match n")
    if discriminant_form(source) != glue.source_form:
        raise LatticeError("glue source form does not match the given lattice")
    if search_bound < 0:
        raise LatticeError("search bound must be nonnegative")
    target = polarization_lattice(n)
    q11 = source.gram[0][0]
    q12 = source.gram[0][1]
    q22 = source.gram[1][1]
    if search_bound > 0:
        for xe in _signed_range(search_bound):
            p = q11 // 2 - n * xe * xe
            for xf, xg in _divisor_pairs(p, search_bound):
                x = (xe, xf, xg)
                if target.norm(x) != q11:
                    raise InternalConsistencyError("x candidate has wrong norm")
                for y in _y_candidates(x, q12, q22, n, search_bound):
                    matrix = mx.freeze([[x[i], y[i]] for i in range(3)])
                    invariants = mx.smith_invariants(matrix)
                    if len(invariants) != 2 or any(v != 1 for v in invariants):
                        continue
                    emb = SublatticeEmbedding(source, target, matrix)
                    return EmbeddingSearchResult("witness", emb, glue)
    return EmbeddingSearchResult("certificate_only", None, glue)


def brute_force_embeddings(
    source: IntegralLattice, n: int, coeff_bound: int
) -> list[SublatticeEmbedding]:
    """All primitive isometric embeddings of a rank-2 lattice into <2n> + U
    whose column coordinates lie in the coefficient box."""
    if source.rank != 2:
        raise LatticeError("brute force is implemented for rank-2 sources")
    target = polarization_lattice(n)
    q11 = source.gram[0][0]
    q12 = source.gram[0][1]
    q22 = source.gram[1][1]
    first = enumerate_vectors(target, q11, coeff_bound)
    second = enumerate_vectors(target, q22, coeff_bound)
    out = []
    for x in first:
        for y in second:
            if target.pairing(x, y) != q12:
                continue
            matrix = mx.freeze([[x[i], y[i]] for i in range(3)])
            invariants = mx.smith_invariants(matrix)
            if len(invariants) != 2 or any(v != 1 for v in invariants):
                continue
            out.append(SublatticeEmbedding(source, target, matrix))
    return out


def enumerate_valid_glues(
    source: IntegralLattice, n: int, sign: SignConvention = DEFAULT_SIGN
) -> list[GluingData]:
    """All valid gluing tuples for embeddings of `source` into <2n> + U."""
    a_src = discriminant_form(source)
    a_amb = discriminant_form(rank_one(2 * n))
    out = []
    for v in all_subgroups(a_src):
        for w in all_subgroups(a_amb):
            if v.order != w.order:
                continue
            for gamma in subgroup_isometries(v, w):
                res = glue_perp_quotient(a_src, a_amb, gamma)
                orders = res.quotient.orders
                if len(orders) != 1 or orders[0] % 2 != 0:
                    continue
                t = orders[0] // 2
                candidate = GluingData(v, w, gamma, t)
                if candidate.is_valid(sign):
                    out.append(candidate)
    return out
