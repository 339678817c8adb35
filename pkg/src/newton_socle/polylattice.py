"""Exact polyhedral layer: sparse polynomials, Newton polyhedra, faces,
support function, Newton order and normalized volume.

All geometry is done in exact rational arithmetic.  The one nontrivial
primitive is the double description computation in :func:`polar_generators`,
which converts between the generator and inequality views of a rational cone;
hulls of Newton polyhedra are obtained from it by homogenization.
"""

from fractions import Fraction
from dataclasses import dataclass
from itertools import combinations
import json
import math
import re

from .errors import InputError
from .linalg import (det, dot, kernel_basis, primitive, rank, rref, solve,
                     vec_sub)


class _Infinity:
    """Newton order of the zero series; compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "Infinity"


INFINITY = _Infinity()


# ---------------------------------------------------------------------------
# Sparse polynomials
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?((?:x\d+(?:\^\d+)?(?:\s*\*\s*)?)*)\s*$")
_VAR_RE = re.compile(r"x(\d+)(?:\^(\d+))?")


class SparsePoly:
    """Finitely supported exponent -> rational coefficient map.

    Immutable; zero coefficients are never stored and every exponent tuple has
    length ``nvars``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms):
        clean = {}
        for e, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise InputError("exponent length %d != nvars %d" % (len(e), nvars))
            if any(x < 0 for x in e):
                raise InputError("negative exponent in %r" % (e,))
            clean[e] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, *a):
        raise AttributeError("SparsePoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def monomial(cls, exponent, coeff=1):
        return cls(len(exponent), {tuple(exponent): Fraction(coeff)})

    @classmethod
    def parse(cls, text, nvars=None):
        """Parse ``c*x1^a1*...*xn^an`` terms joined by ``+``/``-``.

        Coefficients are integers or ``p/q``; ``nvars`` is inferred from the
        largest variable index when not given.
        """
        text = text.strip()
        if not text:
            raise InputError("empty polynomial text")
        chunks = []
        sign = 1
        buf = ""
        for ch in text:
            if ch in "+-":
                if buf.strip():
                    chunks.append((sign, buf))
                elif chunks:
                    raise InputError("dangling sign in %r" % text)
                sign = 1 if ch == "+" else -1
                buf = ""
            else:
                buf += ch
        if not buf.strip():
            raise InputError("trailing operator in %r" % text)
        chunks.append((sign, buf))

        raw = []
        maxvar = 0
        for sign, chunk in chunks:
            m = _TERM_RE.match(chunk)
            if not m:
                raise InputError("cannot parse term %r" % chunk.strip())
            coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            exps = {}
            for vm in _VAR_RE.finditer(m.group(2) or ""):
                idx = int(vm.group(1))
                if idx < 1:
                    raise InputError("variable indices start at x1")
                power = int(vm.group(2)) if vm.group(2) else 1
                exps[idx] = exps.get(idx, 0) + power
                maxvar = max(maxvar, idx)
            if m.group(1) is None and not exps:
                raise InputError("cannot parse term %r" % chunk.strip())
            raw.append((sign * coeff, exps))
        if nvars is None:
            nvars = max(maxvar, 1)
        elif maxvar > nvars:
            raise InputError("variable x%d exceeds nvars=%d" % (maxvar, nvars))
        terms = {}
        for coeff, exps in raw:
            e = tuple(exps.get(i + 1, 0) for i in range(nvars))
            terms[e] = terms.get(e, Fraction(0)) + coeff
        return cls(nvars, terms)

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {tuple(t["e"]): Fraction(str(t["c"])) for t in obj["terms"]}
        return cls(int(obj["nvars"]), terms)

    # -- basic queries -----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def support(self):
        return list(self.terms.keys())

    def coeff(self, exponent):
        return self.terms.get(tuple(exponent), Fraction(0))

    def order(self):
        """Minimal total degree of a term (INFINITY for the zero polynomial)."""
        if not self.terms:
            return INFINITY
        return min(sum(e) for e in self.terms)

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return SparsePoly(self.nvars, terms)

    def __sub__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) - c
        return SparsePoly(self.nvars, terms)

    def __neg__(self):
        return SparsePoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def scale(self, c):
        c = Fraction(c)
        return SparsePoly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        return self.mul_truncated(other, None)

    def mul_truncated(self, other, max_total_degree):
        """Product, dropping terms of total degree beyond the cap."""
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if max_total_degree is not None and sum(e) > max_total_degree:
                    continue
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return SparsePoly(self.nvars, terms)

    def power(self, k, max_total_degree=None):
        result = SparsePoly.monomial((0,) * self.nvars)
        for _ in range(k):
            result = result.mul_truncated(self, max_total_degree)
        return result

    def truncate(self, max_total_degree):
        return SparsePoly(self.nvars, {e: c for e, c in self.terms.items()
                                       if sum(e) <= max_total_degree})

    def x_ddx(self, i):
        """The operator x_i * d/dx_i (keeps the support inside the original)."""
        return SparsePoly(self.nvars,
                          {e: c * e[i] for e, c in self.terms.items()})

    def weighted_derivative(self, w):
        """Apply the degree-zero derivation with weight covector ``w``:
        each term x^m is scaled by <w, m>."""
        return SparsePoly(self.nvars,
                          {e: c * dot(w, e) for e, c in self.terms.items()})

    def restrict_to_axis(self, i):
        """Terms supported on the i-th coordinate axis only."""
        return SparsePoly(self.nvars,
                          {e: c for e, c in self.terms.items()
                           if all(x == 0 for j, x in enumerate(e) if j != i)})

    # -- output ------------------------------------------------------------

    def to_json(self):
        return {"nvars": self.nvars,
                "terms": [{"e": list(e), "c": str(c)}
                          for e, c in sorted(self.terms.items())]}

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            factors = []
            if c != 1 or not any(e):
                factors.append(str(c))
            for i, a in enumerate(e):
                if a == 1:
                    factors.append("x%d" % (i + 1))
                elif a > 1:
                    factors.append("x%d^%d" % (i + 1, a))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return "SparsePoly(%s)" % self

    def __eq__(self, other):
        return (isinstance(other, SparsePoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))


# ---------------------------------------------------------------------------
# Double description: generators of a cone cut out by inequalities
# ---------------------------------------------------------------------------

def _dd_extreme_rays(rows, dim):
    """Extreme rays of the pointed cone {x : r.x >= 0 for all r in rows}.

    Requires rank(rows) == dim (pointedness).  Incremental double description:
    start from a simplicial subcone given by ``dim`` independent rows, insert
    the remaining inequalities one at a time, combining adjacent positive and
    negative rays.  Adjacency is the algebraic test: the constraints tight on
    both rays have rank dim - 2.
    """
    if dim == 0:
        return []
    base = []
    rest = []
    for r in rows:
        if len(base) < dim and rank(base + [r]) > len(base):
            base.append(r)
        else:
            rest.append(r)
    if len(base) < dim:
        raise ValueError("cone is not pointed")
    rays = []
    for i in range(dim):
        rhs = [Fraction(int(j == i)) for j in range(dim)]
        rays.append(primitive(solve(base, rhs)))
    processed = list(base)

    for a in rest:
        vals = {r: dot(a, r) for r in rays}
        if all(v >= 0 for v in vals.values()):
            processed.append(a)
            continue
        pos = [r for r in rays if vals[r] > 0]
        zero = [r for r in rays if vals[r] == 0]
        neg = [r for r in rays if vals[r] < 0]
        new = []
        for rp in pos:
            for rn in neg:
                tight = [p for p in processed
                         if dot(p, rp) == 0 and dot(p, rn) == 0]
                if rank(tight) != dim - 2:
                    continue
                w = tuple(vals[rp] * x - vals[rn] * y
                          for x, y in zip(rn, rp))
                new.append(primitive(w))
        seen = set()
        rays = []
        for r in pos + zero + new:
            if r not in seen:
                seen.add(r)
                rays.append(r)
        processed.append(a)
    return sorted(rays)


def polar_generators(ineqs, equations=(), dim=None):
    """Generators of C = {x : r.x >= 0 for r in ineqs, e.x = 0 for e in equations}.

    Returns ``(lineality_basis, extreme_rays)``: a basis of the largest linear
    subspace of C plus the extreme rays of a pointed complement.  Both lists
    hold primitive integer vectors in the ambient space.
    """
    if dim is None:
        if ineqs:
            dim = len(ineqs[0])
        elif equations:
            dim = len(equations[0])
        else:
            raise ValueError("ambient dimension unknown")
    sub = kernel_basis(list(equations), ncols=dim) if equations else \
        [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    if not sub:
        return [], []
    # inequality matrix in subspace coordinates
    restricted = [tuple(dot(r, w) for w in sub) for r in ineqs]
    lin_coords = kernel_basis(restricted, ncols=len(sub))
    lineality = [primitive(tuple(sum(Fraction(y) * w[k] for y, w in zip(lc, sub))
                                 for k in range(dim)))
                 for lc in lin_coords]
    # complement of the lineality inside the subspace
    red, pivots = rref(lin_coords) if lin_coords else ([], [])
    comp_idx = [i for i in range(len(sub)) if i not in pivots]
    comp = [sub[i] for i in comp_idx]
    if not comp:
        return lineality, []
    pointed_rows = []
    for r in ineqs:
        pointed_rows.append(tuple(dot(r, w) for w in comp))
    rays_coords = _dd_extreme_rays(pointed_rows, len(comp))
    rays = [primitive(tuple(sum(Fraction(y) * w[k] for y, w in zip(rc, comp))
                            for k in range(dim)))
            for rc in rays_coords]
    return lineality, sorted(rays)


def polyhedron_hull(points, recession=()):
    """Facet description of conv(points) + cone(recession).

    Returns ``(equations, facets)``: affine-hull equations as ``(normal, c)``
    with normal.x = c on the polyhedron, and facets as ``(normal, c)`` with
    normal.x >= c.  Normals are primitive integer vectors; offsets exact.
    Obtained from the polar of the homogenization cone.
    """
    if not points:
        raise ValueError("no points")
    n = len(points[0])
    gens = [tuple(list(map(Fraction, p)) + [Fraction(1)]) for p in points]
    gens += [tuple(list(map(Fraction, r)) + [Fraction(0)]) for r in recession]
    lin, rays = polar_generators([primitive(g) for g in gens], dim=n + 1)
    equations = []
    for l in lin:
        normal, c = l[:n], l[n]
        if any(x != 0 for x in normal):
            equations.append((normal, -c))
        elif c != 0:
            raise ValueError("inconsistent hull (empty polyhedron?)")
    facets = []
    for l in rays:
        normal, c = l[:n], l[n]
        if all(x == 0 for x in normal):
            continue  # homogenization artifact, no facet of P
        facets.append((normal, -c))
    return equations, facets


def hull_vertices(points, recession=()):
    """Vertices of conv(points) + cone(recession), as a sublist of ``points``."""
    n = len(points[0])
    equations, facets = polyhedron_hull(points, recession)
    verts = []
    seen = set()
    for p in points:
        p = tuple(map(Fraction, p))
        if p in seen:
            continue
        seen.add(p)
        tight = [eq[0] for eq in equations]
        tight += [f[0] for f in facets if dot(f[0], p) == f[1]]
        if rank(tight) == n:
            verts.append(p)
    return verts


# ---------------------------------------------------------------------------
# Newton polyhedra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Facet:
    normal: tuple          # primitive integer covector l, l(m) >= offset on the polyhedron
    offset: int
    compact: bool          # the facet is a bounded set (normal strictly positive)


@dataclass(frozen=True)
class NewtonPolyhedron:
    """conv(supp f) + R_+^n by vertices and facet inequalities."""

    nvars: int
    vertices: tuple
    facets: tuple

    def contains(self, m, dilation=1):
        """Membership of m in dilation * polyhedron."""
        return all(dot(f.normal, m) >= dilation * f.offset for f in self.facets)

    def interior_contains(self, m, dilation=1):
        return all(dot(f.normal, m) > dilation * f.offset for f in self.facets)

    def positive_facets(self):
        return [f for f in self.facets if f.offset > 0]

    def to_json(self):
        return {"vertices": [list(v) for v in self.vertices],
                "facets": [{"l": list(f.normal), "s": f.offset}
                           for f in self.facets]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        verts = tuple(tuple(int(x) for x in v) for v in obj["vertices"])
        n = len(verts[0])
        facets = []
        for f in obj["facets"]:
            normal = tuple(int(x) for x in f["l"])
            facets.append(Facet(normal, int(f["s"]), all(x > 0 for x in normal)))
        return cls(n, verts, tuple(facets))


def newton_polyhedron(f):
    """Vertices and facet inequalities of conv(supp f) + R_+^n."""
    if f.is_zero():
        raise InputError("empty support")
    n = f.nvars
    supp = f.support()
    minimal = [p for p in supp
               if not any(q != p and all(a <= b for a, b in zip(q, p))
                          for q in supp)]
    unit = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    equations, raw_facets = polyhedron_hull(minimal, unit)
    if equations:
        raise ValueError("Newton polyhedron must be full-dimensional")
    facets = []
    for normal, _ in raw_facets:
        normal = primitive(normal)
        offset = min(dot(normal, p) for p in minimal)
        facets.append(Facet(tuple(int(x) for x in normal), int(offset),
                            all(x > 0 for x in normal)))
    facets.sort(key=lambda fc: (fc.normal, fc.offset))
    verts = []
    for p in minimal:
        tight = [fc.normal for fc in facets if dot(fc.normal, p) == fc.offset]
        if rank(tight) == n:
            verts.append(tuple(int(x) for x in p))
    verts.sort()
    return NewtonPolyhedron(n, tuple(verts), tuple(facets))


def support_function(poly, a):
    """min a(Delta) over the polyhedron; requires a >= 0 componentwise."""
    if any(x < 0 for x in a):
        raise InputError("unbounded below")
    return min(dot(a, v) for v in poly.vertices)


@dataclass(frozen=True)
class FaceDescriptor:
    """A face of a Newton polyhedron.

    The face equals conv(listed vertices) + cone(e_i : i in recession_axes);
    ``tight_facets`` indexes every facet of the polyhedron containing it, and
    ``normal_certificate`` is a nonnegative covector whose minimum on the
    polyhedron is attained exactly on this face.
    """

    polyhedron: NewtonPolyhedron
    vertex_indices: tuple
    tight_facets: tuple
    recession_axes: tuple
    dim: int
    compact: bool
    in_coordinate_hyperplane: bool
    normal_certificate: tuple

    def vertices(self):
        return [self.polyhedron.vertices[i] for i in self.vertex_indices]

    def contains(self, m, dilation=1):
        """Membership of m in dilation * face."""
        poly = self.polyhedron
        if not poly.contains(m, dilation):
            return False
        tight = set(self.tight_facets)
        return all(dot(poly.facets[j].normal, m) == dilation * poly.facets[j].offset
                   for j in tight)

    def relative_interior_contains(self, m, dilation=1):
        poly = self.polyhedron
        tight = set(self.tight_facets)
        for j, fc in enumerate(poly.facets):
            v = dot(fc.normal, m)
            bound = dilation * fc.offset
            if j in tight:
                if v != bound:
                    return False
            elif v <= bound:
                return False
        return True


def faces(poly):
    """All faces of the polyhedron, the polyhedron itself included.

    Enumerated from facet-subset intersections, deduplicated by the full set
    of tight facets; exponential in the facet count, fine at desk scale.
    """
    n = poly.nvars
    nfac = len(poly.facets)
    seen = {}
    for size in range(nfac + 1):
        for subset in combinations(range(nfac), size):
            vidx = [i for i, v in enumerate(poly.vertices)
                    if all(dot(poly.facets[j].normal, v) == poly.facets[j].offset
                           for j in subset)]
            if not vidx:
                continue
            axes = [i for i in range(n)
                    if all(poly.facets[j].normal[i] == 0 for j in subset)]
            # closure: every facet tight on the whole face
            tight = []
            for j, fc in enumerate(poly.facets):
                if all(dot(fc.normal, poly.vertices[i]) == fc.offset for i in vidx) \
                        and all(fc.normal[i] == 0 for i in axes):
                    tight.append(j)
            key = tuple(tight)
            if key in seen:
                continue
            v0 = poly.vertices[vidx[0]]
            spanning = [vec_sub(poly.vertices[i], v0) for i in vidx[1:]]
            spanning += [tuple(int(i == k) for k in range(n)) for i in axes]
            dim = rank(spanning)
            compact = not axes
            in_hyp = any(all(poly.vertices[i][k] == 0 for i in vidx) and k not in axes
                         for k in range(n))
            if tight:
                cert = tuple(sum(poly.facets[j].normal[k] for j in tight)
                             for k in range(n))
            else:
                cert = (0,) * n
            seen[key] = FaceDescriptor(poly, tuple(vidx), key, tuple(axes),
                                       dim, compact, in_hyp, cert)
    return sorted(seen.values(), key=lambda f: (f.dim, f.vertex_indices))


def compact_faces(poly):
    return [f for f in faces(poly) if f.compact]


def face_part(g, face):
    """Restriction of g to the terms whose exponents lie on the face."""
    return SparsePoly(g.nvars, {e: c for e, c in g.terms.items()
                                if face.contains(e)})


def newton_order(g, poly):
    """nu(g): the largest a with supp(g) inside a*Delta (INFINITY for g = 0).

    Facets with offset 0 never constrain (exponents and normals are both
    nonnegative), so the order is the minimum of l(m)/s over support points
    and positive-offset facets.
    """
    if g.is_zero():
        return INFINITY
    pos = poly.positive_facets()
    if not pos:
        return INFINITY
    return min(Fraction(dot(f.normal, m), f.offset)
               for m in g.support() for f in pos)


# ---------------------------------------------------------------------------
# Volume and lattice points
# ---------------------------------------------------------------------------

def _triangulate(points):
    """Triangulation of conv(points) into simplices on its vertex set.

    Recursive pyramid decomposition: star every facet not containing a chosen
    base vertex.  Works in any affine dimension; returns lists of points.
    """
    pts = sorted(set(tuple(map(Fraction, p)) for p in points))
    if len(pts) == 1:
        return [pts]
    p0 = pts[0]
    d = rank([vec_sub(p, p0) for p in pts[1:]])
    if len(pts) == d + 1:
        return [pts]
    equations, facets = polyhedron_hull(pts)
    verts = []
    for p in pts:
        tight = [eq[0] for eq in equations]
        tight += [fn for fn, c in facets if dot(fn, p) == c]
        if rank(tight) == len(p0):
            verts.append(p)
    if len(verts) == d + 1:
        return [verts]
    v0 = verts[0]
    simplices = []
    for normal, c in facets:
        if dot(normal, v0) == c:
            continue
        fpts = [p for p in verts if dot(normal, p) == c]
        for sub in _triangulate(fpts):
            simplices.append([v0] + sub)
    return simplices


def normalized_volume(points):
    """n! times the Euclidean volume of conv(points), as an exact integer."""
    pts = [tuple(map(Fraction, p)) for p in points]
    n = len(pts[0])
    if rank([vec_sub(p, pts[0]) for p in pts[1:]]) < n:
        raise ValueError("not full-dimensional")
    total = Fraction(0)
    for simplex in _triangulate(pts):
        mat = [vec_sub(p, simplex[0]) for p in simplex[1:]]
        total += abs(det(mat))
    if total.denominator != 1:
        raise ValueError("normalized volume came out non-integer")
    return int(total)


def polytope_lattice_points(points, interior=False, dilation=1):
    """Lattice points of dilation*conv(points); relative interior on request."""
    pts = [tuple(Fraction(x) * dilation for x in p) for p in points]
    equations, facets = polyhedron_hull(pts)
    n = len(pts[0])
    lo = [min(p[i] for p in pts) for i in range(n)]
    hi = [max(p[i] for p in pts) for i in range(n)]
    ranges = [range(math.ceil(lo[i]), math.floor(hi[i]) + 1) for i in range(n)]
    out = []

    def scan(prefix, k):
        if k == n:
            m = tuple(prefix)
            if any(dot(eq, m) != c for eq, c in equations):
                return
            for normal, c in facets:
                v = dot(normal, m)
                if v < c or (interior and v == c):
                    return
            out.append(m)
            return
        for x in ranges[k]:
            scan(prefix + [x], k + 1)

    scan([], 0)
    return out
