"""Graded semigroup algebras on face cones, their interior-monomial canonical
modules, quotients by face-derivative parameters, socle degrees and Poincare
series.

The grading is the unique linear form equal to 1 on the face; its denominator
is cleared so graded pieces are indexed by integers.  Pieces are enumerated by
exact lattice-point scans of bounded cone sections.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

from .errors import InputError, VerificationError
from .fan import Cone, cone_from_rays
from .linalg import dot, in_row_span, rank, rref, solve
from .polylattice import FaceDescriptor, SparsePoly, face_part


@dataclass(frozen=True)
class FaceCone:
    """A compact face not inside a coordinate hyperplane, together with the
    cone it spans; ``r`` is the codimension bookkeeping n - 1 - dim(face)."""

    delta: FaceDescriptor
    sigma: Cone
    r: int


def face_cone(face):
    if not face.compact:
        raise InputError("face cone needs a compact face")
    if face.in_coordinate_hyperplane:
        raise InputError("face lies in a coordinate hyperplane")
    n = face.polyhedron.nvars
    sigma = cone_from_rays(face.vertices())
    fc = FaceCone(face, sigma, n - 1 - face.dim)
    if sigma.dim != n - fc.r:
        raise VerificationError("span of the face has unexpected dimension")
    return fc


@dataclass(frozen=True)
class GradingForm:
    """Rational covector equal to 1 on the face, positive on the cone minus
    the origin; ``denominator`` clears it to an integer form on the lattice."""

    covector: tuple
    denominator: int

    def value(self, m):
        return dot(self.covector, m)

    def scaled(self, m):
        v = self.value(m) * self.denominator
        if v.denominator != 1:
            raise VerificationError("grading denominator does not clear %r" % (m,))
        return int(v)


def grading_form(fc):
    """The unique linear form on span(sigma) taking the value 1 on the face,
    represented by the covector in the row space of the vertex matrix."""
    verts = [tuple(map(Fraction, v)) for v in fc.delta.vertices()]
    gram = [tuple(dot(u, v) for v in verts) for u in verts]
    y = solve(gram, [Fraction(1)] * len(verts))
    if y is None:
        raise InputError("no grading form")
    n = len(verts[0])
    covector = tuple(sum(y[i] * verts[i][k] for i in range(len(verts)))
                     for k in range(n))
    denominator = 1
    for x in covector:
        denominator = denominator * x.denominator // math.gcd(denominator, x.denominator)
    form = GradingForm(covector, denominator)
    for ray in fc.sigma.rays:
        if form.value(ray) <= 0:
            raise VerificationError("grading not positive on the cone")
    return form


def grading_from_covector(covector, sigma):
    covector = tuple(map(Fraction, covector))
    denominator = 1
    for x in covector:
        denominator = denominator * x.denominator // math.gcd(denominator, x.denominator)
    form = GradingForm(covector, denominator)
    for ray in sigma.rays:
        if form.value(ray) <= 0:
            raise InputError("non-positive grading")
    return form


def face_derivatives(f, face):
    """The face parts of x_i df/dx_i; each is homogeneous of degree 1 for the
    grading of the face."""
    fp = face_part(f, face)
    return [fp.x_ddx(i) for i in range(f.nvars)]


def graded_monomials(sigma, grading, scaled_degree, interior):
    """Lattice points of the cone (or its relative interior) on which the
    cleared grading takes the given integer value."""
    if scaled_degree < 0:
        return []
    if scaled_degree == 0:
        if interior and sigma.dim > 0:
            return []
        n = len(sigma.rays[0]) if sigma.rays else len(sigma.equations[0])
        origin = (0,) * n
        return [origin] if sigma.contains(origin) else []
    n = len(sigma.rays[0])
    scaled_cov = tuple(x * grading.denominator for x in grading.covector)
    corners = []
    for ray in sigma.rays:
        h = dot(scaled_cov, ray)
        corners.append(tuple(Fraction(scaled_degree * x, h) for x in ray))
    lo = [min(c[i] for c in corners) for i in range(n)]
    hi = [max(c[i] for c in corners) for i in range(n)]
    out = []
    test = sigma.relative_interior_contains if interior else sigma.contains

    def scan(prefix, k):
        if k == n:
            m = tuple(prefix)
            if dot(scaled_cov, m) == scaled_degree and test(m):
                out.append(m)
            return
        for x in range(math.ceil(lo[k]), math.floor(hi[k]) + 1):
            scan(prefix + [x], k + 1)

    scan([], 0)
    return sorted(out)


@dataclass(frozen=True)
class GradedPiece:
    degree: Fraction
    monomials: tuple


def graded_piece(sigma, grading, degree, interior=False):
    """The lattice points of the cone (or its relative interior) at the given
    rational degree, as a GradedPiece."""
    if isinstance(sigma, FaceCone):
        if grading is None:
            grading = grading_form(sigma)
        sigma = sigma.sigma
    if isinstance(grading, (tuple, list)):
        grading = grading_from_covector(grading, sigma)
    scaled = Fraction(degree) * grading.denominator
    if scaled.denominator != 1:
        return GradedPiece(Fraction(degree), ())
    monos = graded_monomials(sigma, grading, int(scaled), interior)
    return GradedPiece(Fraction(degree), tuple(monos))


@dataclass(frozen=True)
class CanonicalQuotient:
    """The canonical module of the face ring modulo the chosen parameters:
    graded dimensions, socle degree and a monomial socle basis."""

    sigma: Cone
    grading: GradingForm
    parameters: tuple
    graded_dims: dict
    socle_degree: Fraction
    socle_basis: tuple

    def to_json(self):
        return {
            "parameters": [str(p) for p in self.parameters],
            "graded_dims": {str(k): v for k, v in sorted(self.graded_dims.items())},
            "socle_degree": str(self.socle_degree),
            "socle_basis": [str(b) for b in self.socle_basis],
        }


def _parameter_degree(p, grading):
    degs = {grading.scaled(e) for e in p.support()}
    if len(degs) != 1:
        raise InputError("parameter is not homogeneous")
    return degs.pop()


def _image_matrix(sigma, grading, params, scaled_degree, param_degrees):
    """Rows spanning the image of multiplication by the parameters inside the
    interior-monomial piece of the given scaled degree; returns (rows, piece,
    index of piece monomials)."""
    piece = graded_monomials(sigma, grading, scaled_degree, interior=True)
    index = {m: i for i, m in enumerate(piece)}
    rows = []
    for p, pd in zip(params, param_degrees):
        below = graded_monomials(sigma, grading, scaled_degree - pd, interior=True)
        for m in below:
            row = [Fraction(0)] * len(piece)
            for e, c in p.terms.items():
                key = tuple(a + b for a, b in zip(e, m))
                row[index[key]] += c
            rows.append(tuple(row))
    return rows, piece, index


def canonical_quotient(fc, params, grading=None, margin=1):
    """Graded dimensions of the quotient of the interior-monomial module by
    the parameter ideal, computed degree by degree as corank of the
    multiplication map.

    The dimensions are checked against the Poincare-series prediction
    P(K) * prod(1 - t^deg) through the expected socle degree plus ``margin``;
    any mismatch, or a nonzero dimension past the expected socle, raises.
    Accepts a FaceCone (grading derived) or a bare Cone with a grading."""
    if isinstance(fc, FaceCone):
        sigma = fc.sigma
        if grading is None:
            grading = grading_form(fc)
    else:
        sigma = fc
        if grading is None:
            raise InputError("a bare cone needs an explicit grading")
    params = tuple(params)
    if not params:
        raise InputError("no parameters")
    d = grading.denominator
    param_degrees = [_parameter_degree(p, grading) for p in params]
    expected_scaled = sum(param_degrees)
    top_scaled = expected_scaled + max(1, margin) * d

    k_dims = {}
    q_dims = {}
    socle_rows = None
    socle_piece = None
    for k in range(0, top_scaled + 1):
        k_dims[k] = len(graded_monomials(sigma, grading, k, interior=True))
    for k in range(0, top_scaled + 1):
        rows, piece, _ = _image_matrix(sigma, grading, params, k, param_degrees)
        q_dims[k] = len(piece) - rank(rows)
        if k == expected_scaled:
            socle_rows, socle_piece = rows, piece

    # Poincare prediction: coefficients of P(K) * prod(1 - t^pd)
    predicted = dict(k_dims)
    for pd in param_degrees:
        nxt = {}
        for k in range(0, top_scaled + 1):
            nxt[k] = predicted.get(k, 0) - predicted.get(k - pd, 0)
        predicted = nxt
    for k in range(0, top_scaled + 1):
        if q_dims[k] != predicted[k]:
            raise InputError(
                "not a system of parameters: dimension %d at scaled degree %d, "
                "Poincare prediction %d" % (q_dims[k], k, predicted[k]))
    for k in range(expected_scaled + 1, top_scaled + 1):
        if q_dims[k] != 0:
            raise InputError("not a system of parameters: "
                             "nonzero dimension beyond the expected socle")
    nonzero = [k for k, v in q_dims.items() if v > 0]
    if not nonzero or max(nonzero) != expected_scaled:
        raise InputError("not a system of parameters: socle degree mismatch")

    reduced, pivots = rref(socle_rows)
    pivset = set(pivots)
    basis = [SparsePoly.monomial(m) for i, m in enumerate(socle_piece)
             if i not in pivset]
    graded_dims = {Fraction(k, d): v for k, v in q_dims.items() if v > 0}
    return CanonicalQuotient(sigma, grading, params, graded_dims,
                             Fraction(expected_scaled, d), tuple(basis))


def select_parameters(derivs, fc, verify=True):
    """Lexicographically first subset of the face derivatives spanning their
    linear span, which must have the full dimension n - r; verified to be a
    system of parameters through the quotient dimension count."""
    target = fc.sigma.dim
    support = sorted({e for p in derivs for e in p.support()})
    index = {e: i for i, e in enumerate(support)}
    chosen = []
    rows = []
    for p in derivs:
        if p.is_zero():
            continue
        row = [Fraction(0)] * len(support)
        for e, c in p.terms.items():
            row[index[e]] = c
        if rank(rows + [tuple(row)]) > len(rows):
            rows.append(tuple(row))
            chosen.append(p)
        if len(chosen) == target:
            break
    if len(chosen) < target:
        raise InputError("degenerate face data")
    if verify:
        canonical_quotient(fc, chosen)
    return chosen


@dataclass(frozen=True)
class PoincareSeries:
    """Truncated graded dimension counts for the face ring and its canonical
    module, plus (simplicial cones) the closed rational form and its value at
    infinity."""

    grading_denominator: int
    ring_dims: dict
    module_dims: dict
    numerator: dict        # simplicial case: scaled degree -> coefficient
    denominator_degrees: tuple
    infinity_value: object

    def to_json(self):
        out = {
            "ring_dims": {str(k): v for k, v in sorted(self.ring_dims.items())},
            "module_dims": {str(k): v for k, v in sorted(self.module_dims.items())},
        }
        if self.numerator is not None:
            out["numerator"] = {str(k): v for k, v in sorted(self.numerator.items())}
            out["denominator_degrees"] = [str(a) for a in self.denominator_degrees]
            out["infinity_value"] = str(self.infinity_value)
        return out


def _parallelepiped_half_open_above(rays):
    """Lattice points sum(a_i * m_i) with 0 < a_i <= 1 over independent rays."""
    n = len(rays[0])
    corners = []
    for bits in range(1 << len(rays)):
        corners.append(tuple(sum(rays[i][k] for i in range(len(rays))
                                 if bits >> i & 1) for k in range(n)))
    lo = [min(c[i] for c in corners) for i in range(n)]
    hi = [max(c[i] for c in corners) for i in range(n)]
    mat = [tuple(r[k] for r in rays) for k in range(n)]
    pts = []

    def scan(prefix, k):
        if k == n:
            coeffs = solve(mat, prefix)
            if coeffs is not None and all(0 < t <= 1 for t in coeffs):
                pts.append(tuple(prefix))
            return
        for x in range(math.ceil(lo[k]), math.floor(hi[k]) + 1):
            scan(prefix + [x], k + 1)

    scan([], 0)
    return pts


def poincare_series(sigma, grading, truncation):
    """Graded dimensions of the cone monomials and the interior monomials up
    to the given degree.

    For simplicial cones the closed form of the interior series is computed
    from the half-open parallelepiped decomposition; its truncated expansion
    is checked against the enumerated dimensions, and the value at infinity is
    attached."""
    if isinstance(sigma, FaceCone):
        if grading is None:
            grading = grading_form(sigma)
        sigma = sigma.sigma
    if isinstance(grading, (tuple, list)):
        grading = grading_from_covector(grading, sigma)
    for ray in sigma.rays:
        if grading.value(ray) <= 0:
            raise InputError("non-positive grading")
    d = grading.denominator
    top = int(Fraction(truncation) * d)
    ring_dims = {}
    module_dims = {}
    for k in range(0, top + 1):
        q = Fraction(k, d)
        a = len(graded_monomials(sigma, grading, k, interior=False))
        m = len(graded_monomials(sigma, grading, k, interior=True))
        if a:
            ring_dims[q] = a
        if m:
            module_dims[q] = m

    numerator = None
    den_degrees = None
    infinity = None
    if sigma.rays and len(sigma.rays) == sigma.dim:
        numerator = {}
        for w in _parallelepiped_half_open_above(list(sigma.rays)):
            k = grading.scaled(w)
            numerator[k] = numerator.get(k, 0) + 1
        den_degrees = tuple(sorted(grading.scaled(r) for r in sigma.rays))
        # expand numerator / prod(1 - t^a) and compare with the enumeration
        series = [0] * (top + 1)
        for k, c in numerator.items():
            if k <= top:
                series[k] += c
        for a in den_degrees:
            for k in range(a, top + 1):
                series[k] += series[k - a]
        for k in range(0, top + 1):
            enum = module_dims.get(Fraction(k, d), 0)
            if series[k] != enum:
                raise VerificationError(
                    "closed form disagrees with enumeration at scaled degree %d"
                    % k)
        num_top = max(numerator)
        if num_top != sum(den_degrees):
            raise VerificationError("numerator degree differs from the "
                                    "denominator degree")
        infinity = Fraction(numerator[num_top], (-1) ** len(den_degrees))
    return PoincareSeries(d, ring_dims, module_dims, numerator,
                          den_degrees, infinity)


def class_nonzero(g, quotient):
    """Whether g represents a nonzero class in the quotient module at its own
    degree (exact rank test against the parameter image)."""
    if g.is_zero():
        return False
    sigma = quotient.sigma
    grading = quotient.grading
    degs = {grading.scaled(e) for e in g.support()}
    if len(degs) != 1:
        raise InputError("g is not homogeneous for the grading")
    k = degs.pop()
    for e in g.support():
        if not sigma.relative_interior_contains(e):
            raise InputError("g is not supported in the interior of the cone")
    param_degrees = [_parameter_degree(p, grading) for p in quotient.parameters]
    rows, piece, index = _image_matrix(sigma, grading, quotient.parameters,
                                       k, param_degrees)
    vec = [Fraction(0)] * len(piece)
    for e, c in g.terms.items():
        vec[index[e]] = c
    return not in_row_span(rows, tuple(vec))
