"""Cone and fan combinatorics on the positive orthant: dual cones, face
lattices, the coarsest fan on which the support function is linear, exact
regular subdivision (continued fractions in 2D, stellar subdivision in 3D),
ray multiplicities and pole components.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
import json
import math

from .errors import InputError, RegularizationError, VerificationError
from .linalg import det, dot, primitive, rank, solve, vec_sub
from .polylattice import (INFINITY, faces, newton_order, newton_polyhedron,
                          polar_generators, polyhedron_hull)


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone by primitive generators and inequalities.

    The cone is {a : l(a) >= 0 for l in facet_normals, e(a) = 0 for e in
    equations}; ``rays`` generate it (extreme rays, plus +/- pairs spanning the
    lineality when the cone is not pointed).
    """

    rays: tuple
    facet_normals: tuple
    equations: tuple
    dim: int

    def contains(self, point):
        return (all(dot(l, point) >= 0 for l in self.facet_normals)
                and all(dot(e, point) == 0 for e in self.equations))

    def relative_interior_contains(self, point):
        return (all(dot(l, point) > 0 for l in self.facet_normals)
                and all(dot(e, point) == 0 for e in self.equations))

    def is_pointed(self):
        return not any(tuple(-x for x in r) in set(self.rays) for r in self.rays) \
            or self.dim == 0


def cone_from_rays(rays):
    """Canonical cone spanned by the given vectors."""
    if not rays:
        raise InputError("cone needs an ambient dimension; give at least the zero vector")
    n = len(rays[0])
    gens = [primitive(r) for r in rays if any(x != 0 for x in r)]
    if not gens:
        return zero_cone(n)
    lin_n, normals = polar_generators(gens, dim=n)
    equations = tuple(sorted(lin_n))
    lin_c, extreme = polar_generators(list(normals), [e for e in equations], dim=n)
    allrays = list(extreme)
    for l in lin_c:
        allrays.append(l)
        allrays.append(tuple(-x for x in l))
    d = rank(gens)
    return Cone(tuple(sorted(set(allrays))), tuple(sorted(normals)),
                equations, d)


def _std_basis(n):
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def zero_cone(n):
    eqs = tuple(sorted(tuple(int(i == j) for j in range(n)) for i in range(n)))
    return Cone((), (), eqs, 0)


def dual_cone(cone, nvars=None):
    """The dual {x : <a, x> >= 0 for all a in the cone}."""
    n = nvars if nvars is not None else _cone_ambient(cone)
    if not cone.rays:
        # dual of the zero cone is everything
        gens = []
        for b in _std_basis(n):
            gens.append(b)
            gens.append(tuple(-x for x in b))
        return cone_from_rays(gens)
    return cone_from_rays(_dual_generators(cone.rays))


def _dual_generators(rays):
    n = len(rays[0])
    lin, extreme = polar_generators(list(rays), dim=n)
    gens = list(extreme)
    for l in lin:
        gens.append(l)
        gens.append(tuple(-x for x in l))
    return gens


def _cone_ambient(cone):
    for coll in (cone.rays, cone.facet_normals, cone.equations):
        for v in coll:
            return len(v)
    raise InputError("cannot infer ambient dimension of the zero cone; pass nvars")


def cone_faces(cone, nvars=None):
    """All faces of the cone (itself and its minimal face included)."""
    n = nvars if nvars is not None else _cone_ambient(cone)
    seen = {}
    nfac = len(cone.facet_normals)
    for size in range(nfac + 1):
        for subset in combinations(range(nfac), size):
            tight_rays = [r for r in cone.rays
                          if all(dot(cone.facet_normals[j], r) == 0 for j in subset)]
            key = frozenset(tight_rays)
            if key in seen:
                continue
            seen[key] = cone_from_rays(tight_rays) if tight_rays else zero_cone(n)
    return sorted(seen.values(), key=lambda c: (c.dim, c.rays))


def check_face_duality(cone, nvars=None):
    """Verify that tau -> tau-perp intersected with the dual cone is a dimension
    complementing bijection between the face lattices of a cone and its dual."""
    n = nvars if nvars is not None else _cone_ambient(cone)
    dual = dual_cone(cone, n)
    faces_c = cone_faces(cone, n)
    faces_d = {c: i for i, c in enumerate(cone_faces(dual, n))}
    pairs = []
    hit = set()
    ok = True
    notes = []
    for tau in faces_c:
        ineqs = list(cone.rays) if cone.rays else []
        eqs = list(tau.rays)
        lin, extreme = polar_generators(ineqs, eqs, dim=n)
        gens = list(extreme)
        for l in lin:
            gens.append(l)
            gens.append(tuple(-x for x in l))
        image = cone_from_rays(gens) if gens else zero_cone(n)
        if image not in faces_d:
            ok = False
            notes.append("image of a face is not a face of the dual: %r" % (tau.rays,))
            continue
        if image.dim != n - tau.dim:
            ok = False
            notes.append("dimension mismatch on face %r" % (tau.rays,))
        idx = faces_d[image]
        if idx in hit:
            ok = False
            notes.append("map is not injective at %r" % (tau.rays,))
        hit.add(idx)
        pairs.append({"face_rays": [list(r) for r in tau.rays],
                      "dual_face_rays": [list(r) for r in image.rays],
                      "dims": [tau.dim, image.dim]})
    if len(hit) != len(faces_d):
        ok = False
        notes.append("map is not surjective")
    return {"ok": ok, "n_faces": len(faces_c), "pairs": pairs, "notes": notes}


# ---------------------------------------------------------------------------
# Fans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fan:
    """A fan supported on the positive orthant, closed under taking faces."""

    nvars: int
    cones: tuple
    rays: tuple

    def maximal_cones(self):
        return [c for c in self.cones if c.dim == self.nvars]

    def incidence(self):
        """Map cone index -> sorted indices of its proper faces within the fan."""
        out = {}
        for i, c in enumerate(self.cones):
            rset = set(c.rays)
            out[i] = tuple(j for j, d in enumerate(self.cones)
                           if j != i and set(d.rays) <= rset
                           and all(c.contains(r) for r in d.rays))
        return out

    def contains_cone(self, cone):
        return cone in set(self.cones)

    def to_json(self):
        ray_index = {r: i for i, r in enumerate(self.rays)}
        cones = sorted(sorted(ray_index[r] for r in c.rays)
                       for c in self.maximal_cones())
        return {"rays": [list(r) for r in self.rays], "cones": cones}


def fan_from_cones(nvars, max_cones, validate=True):
    """Close the given cones under faces and assemble a fan."""
    all_cones = {}
    for c in max_cones:
        for f in cone_faces(c, nvars):
            all_cones[(f.rays, f.equations)] = f
    cones = sorted(all_cones.values(), key=lambda c: (c.dim, c.rays))
    rays = sorted({c.rays[0] for c in cones if c.dim == 1})
    fan = Fan(nvars, tuple(cones), tuple(rays))
    if validate:
        validate_fan(fan)
    return fan


def fan_from_json(obj, validate=True):
    if isinstance(obj, str):
        obj = json.loads(obj)
    rays = [tuple(int(x) for x in r) for r in obj["rays"]]
    if not rays:
        raise InputError("fan JSON needs rays")
    n = len(rays[0])
    max_cones = [cone_from_rays([rays[i] for i in c]) for c in obj["cones"]]
    return fan_from_cones(n, max_cones, validate=validate)


def validate_fan(fan):
    """Check the fan axioms and that the support is the whole orthant."""
    n = fan.nvars
    for c in fan.cones:
        for r in c.rays:
            if any(x < 0 for x in r):
                raise VerificationError("fan ray %r leaves the orthant" % (r,))
    maxs = fan.maximal_cones()
    if not maxs:
        raise VerificationError("fan has no full-dimensional cone")
    # pairwise intersections are common faces
    cone_set = set(fan.cones)
    for c1, c2 in combinations(fan.cones, 2):
        inter = _intersect_cones(c1, c2, n)
        if inter not in cone_set:
            raise VerificationError(
                "intersection of two cones is not in the fan: %r, %r"
                % (c1.rays, c2.rays))
        if not (set(inter.rays) <= set(c1.rays) and set(inter.rays) <= set(c2.rays)):
            raise VerificationError(
                "intersection of %r and %r is not a common face"
                % (c1.rays, c2.rays))
    # support equals the orthant: every (n-1)-face of a maximal cone either
    # lies in the orthant boundary or is shared by exactly two maximal cones
    facet_count = {}
    for c in maxs:
        for f in cone_faces(c, n):
            if f.dim != n - 1:
                continue
            facet_count[f.rays] = facet_count.get(f.rays, 0) + 1
    for rays_key, count in facet_count.items():
        on_boundary = any(all(r[i] == 0 for r in rays_key) for i in range(n))
        expected = 1 if on_boundary else 2
        if count != expected:
            raise VerificationError(
                "support is not the orthant near face %r" % (rays_key,))
    return True


def _intersect_cones(c1, c2, n):
    ineqs = list(c1.facet_normals) + list(c2.facet_normals)
    eqs = list(c1.equations) + list(c2.equations)
    lin, extreme = polar_generators(ineqs, eqs, dim=n)
    gens = list(extreme)
    for l in lin:
        gens.append(l)
        gens.append(tuple(-x for x in l))
    return cone_from_rays(gens) if gens else zero_cone(n)


# ---------------------------------------------------------------------------
# The coarsest fan with linear support function
# ---------------------------------------------------------------------------

def face_normal_cone(poly, face):
    """The cone of covectors whose minimum on the polyhedron is attained on
    the whole face."""
    n = poly.nvars
    verts = face.vertices()
    v0 = verts[0]
    ineqs = list(_std_basis(n))
    ineqs += [vec_sub(w, v0) for w in poly.vertices]
    eqs = [vec_sub(v, v0) for v in verts[1:]]
    eqs += [tuple(int(i == k) for k in range(n)) for i in face.recession_axes]
    lin, rays = polar_generators(ineqs, eqs, dim=n)
    if lin:
        raise VerificationError("normal cone unexpectedly has lineality")
    return cone_from_rays(rays) if rays else zero_cone(n)


def dual_fan(poly):
    """The coarsest fan on the orthant on which the support function of the
    polyhedron is linear; its cones biject with the faces of the polyhedron.

    The orthant boundary must come out unsubdivided (all proper boundary
    cones of the orthant belong to the fan); a subdivided boundary means the
    complement of the polyhedron in the orthant is unbounded in a way the
    downstream resolution cannot use, and is rejected."""
    n = poly.nvars
    cones = []
    for face in faces(poly):
        c = face_normal_cone(poly, face)
        if c.dim != n - face.dim:
            raise VerificationError("normal cone dimension mismatch")
        cones.append(c)
    maxs = [c for c in cones if c.dim == n]
    fan = fan_from_cones(n, maxs)
    units = set(_std_basis(n))
    for r in fan.rays:
        if any(x == 0 for x in r) and r not in units:
            raise InputError("coordinate-axis condition violated")
    # the construction visits every face, so all cones must already be present
    got = set(fan.cones)
    for c in cones:
        if c not in got:
            raise VerificationError("normal cone missing from assembled fan")
    return fan


# ---------------------------------------------------------------------------
# Regular subdivision
# ---------------------------------------------------------------------------

def is_regular(fan):
    """True iff every maximal cone's rays form a lattice basis."""
    n = fan.nvars
    for c in fan.maximal_cones():
        if len(c.rays) != n:
            raise InputError("non-simplicial cone %r" % (c.rays,))
        if abs(det(list(c.rays))) != 1:
            return False
    return True


def _angle_cmp(u, v):
    d = u[0] * v[1] - u[1] * v[0]
    if d > 0:
        return -1
    if d < 0:
        return 1
    return 0


def _hj_chain(u, v):
    """Rays of the regular subdivision of the 2D cone <u, v>: the lattice
    points on the bounded boundary of the convex hull of the nonzero lattice
    points of the cone.  Endpoints included, consecutive determinants +-1."""
    corners = [(0, 0), u, v, (u[0] + v[0], u[1] + v[1])]
    lo = [min(c[i] for c in corners) for i in (0, 1)]
    hi = [max(c[i] for c in corners) for i in (0, 1)]
    mat = [(u[0], v[0]), (u[1], v[1])]
    candidates = []
    for x in range(math.ceil(lo[0]), math.floor(hi[0]) + 1):
        for y in range(math.ceil(lo[1]), math.floor(hi[1]) + 1):
            if (x, y) == (0, 0):
                continue
            ab = solve(mat, (x, y))
            if ab is None:
                continue
            if all(0 <= t <= 1 for t in ab):
                candidates.append((x, y))
    _, facets = polyhedron_hull(candidates, [u, v])
    chain = set()
    for normal, c in facets:
        if dot(normal, u) > 0 and dot(normal, v) > 0:
            for p in candidates:
                if dot(normal, p) == c:
                    chain.add(p)
    ordered = sorted(chain, key=cmp_to_key(_angle_cmp))
    if ordered[0] != tuple(u) or ordered[-1] != tuple(v):
        raise VerificationError("hull boundary chain lost an endpoint")
    for a, b in zip(ordered, ordered[1:]):
        if abs(a[0] * b[1] - a[1] * b[0]) != 1:
            raise VerificationError("chain step with determinant != 1")
    return ordered


def _regularize_2d(fan):
    rays = sorted(fan.rays, key=cmp_to_key(_angle_cmp))
    if rays[0] != (1, 0) or rays[-1] != (0, 1):
        raise InputError("fan must contain the coordinate rays")
    new_rays = [rays[0]]
    for u, v in zip(rays, rays[1:]):
        expected = cone_from_rays([u, v])
        if expected not in set(fan.cones):
            raise InputError("2D fan is not a chain of adjacent cones")
        new_rays.extend(_hj_chain(u, v)[1:])
    max_cones = [cone_from_rays([a, b]) for a, b in zip(new_rays, new_rays[1:])]
    return fan_from_cones(2, max_cones)


def _parallelepiped_points(rays):
    """Nonzero lattice points with coordinates in [0, 1) with respect to the
    given (independent) generators."""
    n = len(rays[0])
    corners = []
    for bits in range(1 << len(rays)):
        corners.append(tuple(sum(rays[i][k] for i in range(len(rays))
                                 if bits >> i & 1) for k in range(n)))
    lo = [min(c[i] for c in corners) for i in range(n)]
    hi = [max(c[i] for c in corners) for i in range(n)]
    mat = [tuple(r[k] for r in rays) for k in range(n)]
    pts = []
    for point in _box_points(lo, hi):
        if all(x == 0 for x in point):
            continue
        coeffs = solve(mat, point)
        if coeffs is None:
            continue
        if all(0 <= t < 1 for t in coeffs):
            pts.append(tuple(point))
    return pts


def _box_points(lo, hi):
    if not lo:
        yield ()
        return
    for x in range(math.ceil(lo[0]), math.floor(hi[0]) + 1):
        for rest in _box_points(lo[1:], hi[1:]):
            yield (x,) + rest


def _coeffs_in_cone(point, rays):
    """Coefficients of ``point`` over linearly independent rays, or None when
    the point is outside their span."""
    n = len(point)
    rows = [tuple(r[k] for r in rays) for k in range(n)]
    return solve(rows, point)


def _regularize_3d(fan, max_iterations=400):
    n = 3
    # star-triangulate non-simplicial maximal cones without new rays
    triangles = []
    for c in fan.maximal_cones():
        if len(c.rays) == n:
            triangles.append(tuple(sorted(c.rays)))
            continue
        apex = c.rays[0]
        for f in cone_faces(c, n):
            if f.dim == n - 1 and not f.contains(apex):
                if len(f.rays) != 2:
                    raise VerificationError("2-face of a 3-cone with != 2 rays")
                triangles.append(tuple(sorted((apex,) + f.rays)))
    triangles = sorted(set(triangles))

    for _ in range(max_iterations):
        worst = None
        worst_det = 1
        for t in triangles:
            d = abs(det(list(t)))
            if d > worst_det or (d == worst_det > 1 and (worst is None or t < worst)):
                worst, worst_det = t, d
        if worst_det == 1:
            max_cones = [cone_from_rays(list(t)) for t in triangles]
            return fan_from_cones(3, max_cones)
        pts = _parallelepiped_points(list(worst))
        center = primitive(min(pts, key=lambda p: (sum(x * x for x in p), p)))
        new_triangles = []
        for t in triangles:
            coeffs = _coeffs_in_cone(center, list(t))
            if coeffs is None or any(x < 0 for x in coeffs):
                new_triangles.append(t)
                continue
            for pair in combinations(t, 2):
                cpair = _coeffs_in_cone(center, list(pair))
                if cpair is not None and all(x >= 0 for x in cpair):
                    continue  # center lies on this face; keep it undivided
                new_triangles.append(tuple(sorted(pair + (center,))))
        triangles = sorted(set(new_triangles))
    partial = fan_from_cones(3, [cone_from_rays(list(t)) for t in triangles],
                             validate=False)
    raise RegularizationError("stellar subdivision hit the iteration cap",
                              partial_fan=partial)


def regularize(fan):
    """A regular subdivision of the fan: exact continued-fraction insertion in
    2D, iterated stellar subdivision at a shortest parallelepiped lattice
    point in 3D.  The output refines the input, keeps the support and the
    coordinate rays, and passes is_regular."""
    n = fan.nvars
    if n == 1:
        return fan
    if n == 2:
        out = _regularize_2d(fan)
    elif n == 3:
        out = _regularize_3d(fan)
    else:
        raise InputError("regularization not implemented; supply fan")
    if not is_regular(out):
        raise VerificationError("regularization produced a singular cone")
    _check_refines(out, fan)
    for r in fan.rays:
        if r not in set(out.rays):
            raise VerificationError("regularization dropped a ray")
    return out


def _check_refines(fine, coarse):
    for c in fine.maximal_cones():
        if not any(all(big.contains(r) for r in c.rays)
                   for big in coarse.maximal_cones()):
            raise VerificationError("output cone not contained in any input cone")


# ---------------------------------------------------------------------------
# Ray data for a fixed polynomial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RayData:
    """A non-coordinate ray with its multiplicity for a reference polynomial
    and the multiplicity-normalized covector (None when the multiplicity is
    zero)."""

    generator: tuple
    multiplicity: object
    normalized: object

    def to_json(self):
        return {"generator": list(self.generator),
                "multiplicity": str(self.multiplicity),
                "normalized": [str(x) for x in self.normalized]
                if self.normalized else None}


def multiplicity(ray, h):
    """min of the ray covector over the support of h."""
    gen = ray.generator if isinstance(ray, RayData) else tuple(ray)
    if h.is_zero():
        raise InputError("multiplicity of the zero polynomial is undefined")
    return min(dot(gen, m) for m in h.support())


def interior_rays(fan, f):
    """All fan rays except the coordinate rays, with multiplicity data for f.

    Requires the fan to leave the orthant boundary unsubdivided (the
    coordinate rays present and no other ray in a coordinate hyperplane).
    """
    n = fan.nvars
    units = set(_std_basis(n))
    rays = set(fan.rays)
    if not units <= rays:
        raise InputError("missing coordinate rays")
    for r in rays - units:
        if any(x == 0 for x in r):
            raise InputError("boundary of the orthant is subdivided at %r" % (r,))
    out = []
    for r in sorted(rays - units):
        v = multiplicity(r, f)
        normalized = tuple(Fraction(x, v) for x in r) if v > 0 else None
        out.append(RayData(r, v, normalized))
    return out


def pole_components(g, f, r, fan):
    """Rays along which the pullback of g vanishes to exactly (n-r) times the
    order of f.  When the support of g sits in the relative interior of the
    (n-r)-dilate of a face, each returned ray is checked to lie in that face's
    normal cone."""
    n = f.nvars
    poly = newton_polyhedron(f)
    nu_g = newton_order(g, poly)
    if nu_g is not INFINITY and nu_g < n - r:
        raise InputError("g is not supported in the (n-r)-dilate")
    rays = interior_rays(fan, f)
    if g.is_zero():
        return []
    qualifying = [rd for rd in rays
                  if multiplicity(rd, g) == (n - r) * rd.multiplicity]
    # carrier face of supp(g) inside the (n-r)-dilate
    tight = tuple(j for j, fc in enumerate(poly.facets)
                  if all(dot(fc.normal, m) == (n - r) * fc.offset
                         for m in g.support()))
    carrier = None
    for face in faces(poly):
        if face.tight_facets == tight:
            carrier = face
            break
    if carrier is not None and all(
            carrier.relative_interior_contains(m, n - r) for m in g.support()):
        normal_cone = face_normal_cone(poly, carrier)
        for rd in qualifying:
            if not normal_cone.contains(rd.generator):
                raise VerificationError(
                    "pole ray %r outside the normal cone of the carrier face"
                    % (rd.generator,))
    return qualifying


def orbit_closure_intersection(fan, cone1, cone2):
    """Smallest fan cone containing both cones, or None when the corresponding
    orbit closures do not meet."""
    cone_set = set(fan.cones)
    if cone1 not in cone_set or cone2 not in cone_set:
        raise InputError("cones are not members of the fan")
    need = list(cone1.rays) + list(cone2.rays)
    candidates = [c for c in fan.cones if all(c.contains(r) for r in need)]
    if not candidates:
        return None
    best = min(candidates, key=lambda c: c.dim)
    for c in candidates:
        if not all(c.contains(r) for r in best.rays):
            raise VerificationError("minimal containing cone is not unique")
    return best
