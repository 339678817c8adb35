"""Finite-dimensional truncations of the local ring: ideal spans, membership,
socles, and the Newton order of socle cosets.

An ideal is represented by an echelon basis of the span of all shifted
generators inside C[x]/m^(D+1).  Once every monomial of some degree D0 lies in
the span, Nakayama promotes truncated answers to honest local-ring answers,
and D0 is recorded as the certificate.
"""

from dataclasses import dataclass
from fractions import Fraction
import random

from .errors import InputError, TruncationError, VerificationError
from .grobner import degrevlex_key
from .linalg import kernel_basis, rank
from .polylattice import (INFINITY, SparsePoly, newton_order,
                          newton_polyhedron)


def monomials_of_degree(nvars, degree):
    """All exponent tuples with the given total degree."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree + 1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            yield (first,) + rest


class TruncatedLocalAlgebra:
    """The space of polynomials of total degree <= D, indexed by monomials in
    descending degrevlex order."""

    def __init__(self, nvars, D):
        if D < 1:
            raise InputError("truncation degree must be at least 1")
        self.nvars = nvars
        self.D = D
        monos = []
        for d in range(D + 1):
            monos.extend(monomials_of_degree(nvars, d))
        monos.sort(key=degrevlex_key, reverse=True)
        self.monomials = monos

    def truncate_terms(self, poly):
        return {e: c for e, c in poly.terms.items() if sum(e) <= self.D}


class _Echelon:
    """Sparse row-echelon span of polynomials, pivoting on the maximal
    monomial under ``key``."""

    def __init__(self, key):
        self.key = key
        self.rows = {}

    def reduce(self, terms):
        work = dict(terms)
        out = {}
        while work:
            m = max(work, key=self.key)
            c = work.pop(m)
            if c == 0:
                continue
            row = self.rows.get(m)
            if row is None:
                out[m] = c
                continue
            for m2, c2 in row.items():
                if m2 == m:
                    continue
                w = work.get(m2, Fraction(0)) - c * c2
                if w == 0:
                    work.pop(m2, None)
                else:
                    work[m2] = w
        return out

    def insert(self, terms):
        red = self.reduce(terms)
        if not red:
            return False
        pivot = max(red, key=self.key)
        inv = 1 / red[pivot]
        self.rows[pivot] = {m: c * inv for m, c in red.items()}
        return True


@dataclass
class IdealSpan:
    """Span of {x^a * g_j} inside the degree-D truncation, with the smallest
    degree whose monomials all lie in the span as colength certificate."""

    algebra: TruncatedLocalAlgebra
    generators: tuple
    echelon: _Echelon
    m_power_bound: object   # int, or None when no certificate was found

    def reduce(self, poly):
        if isinstance(poly, SparsePoly):
            poly = self.algebra.truncate_terms(poly)
        return self.echelon.reduce(poly)

    def quotient_basis(self):
        """Monomials spanning the quotient (all of degree < m_power_bound)."""
        pivots = set(self.echelon.rows)
        return [m for m in reversed(self.algebra.monomials)
                if m not in pivots and sum(m) < self.m_power_bound]


def build_ideal(gens, D):
    """Echelon span of the shifted generators in the degree-D truncation."""
    gens = tuple(gens)
    if not gens:
        raise InputError("no generators")
    nvars = gens[0].nvars
    for g in gens:
        if g.is_zero() or g.order() < 1:
            raise InputError("generators must lie in the maximal ideal")
    alg = TruncatedLocalAlgebra(nvars, D)
    ech = _Echelon(degrevlex_key)
    for g in gens:
        o = g.order()
        shifts = []
        for d in range(D - o + 1):
            shifts.extend(monomials_of_degree(nvars, d))
        shifts.sort(key=degrevlex_key)
        for a in shifts:
            shifted = SparsePoly.monomial(a).mul_truncated(g, D)
            if not shifted.is_zero():
                ech.insert(shifted.terms)
    bound = None
    for k in range(1, D + 1):
        if all(not ech.reduce({m: Fraction(1)})
               for m in monomials_of_degree(nvars, k)):
            bound = k
            break
    return IdealSpan(alg, gens, ech, bound)


def certified_ideal(gens, D=None, min_D=0, cap=None):
    """Build an ideal span whose finite colength is certified.

    With D given, that truncation must already certify.  Otherwise escalate
    from twice the largest generator degree until a certificate appears, then
    settle at m_power_bound + 4 (never below ``min_D``).  The escalation cap
    shrinks with the variable count to keep hopeless inputs from grinding."""
    gens = tuple(gens)
    if not gens:
        raise InputError("no generators")
    if cap is None:
        cap = 40 if gens[0].nvars <= 2 else 20
    if D is not None:
        if D < min_D:
            raise TruncationError(
                "truncation D=%d below the required minimum %d" % (D, min_D))
        span = build_ideal(gens, D)
        if span.m_power_bound is None:
            raise TruncationError("increase truncation: no certificate at D=%d" % D)
        return span
    d = max(4, 2 * max(g.total_degree() for g in gens), min_D)
    while d <= cap:
        span = build_ideal(gens, d)
        if span.m_power_bound is not None:
            target = max(span.m_power_bound + 4, min_D)
            if target > d:
                span = build_ideal(gens, target)
            return span
        d += 2
    raise TruncationError("no finite-colength certificate up to D=%d" % cap)


def member(h, span):
    """Exact local-ring ideal membership of h (valid once the colength
    certificate exists; the degree-(D+1) tail of h is then irrelevant)."""
    if span.m_power_bound is None:
        raise TruncationError("increase truncation")
    return not span.reduce(h)


def socle(span):
    """Coset representatives of the annihilator of the maximal ideal in the
    quotient by the ideal."""
    if span.m_power_bound is None:
        raise TruncationError("increase truncation")
    basis = span.quotient_basis()
    if not basis:
        return []
    index = {m: i for i, m in enumerate(basis)}
    nvars = span.algebra.nvars
    rows = []
    for v in range(nvars):
        ev = tuple(int(i == v) for i in range(nvars))
        cols = []
        for b in basis:
            shifted = tuple(x + y for x, y in zip(b, ev))
            red = span.reduce({shifted: Fraction(1)})
            col = [Fraction(0)] * len(basis)
            for m, c in red.items():
                col[index[m]] = c
            cols.append(col)
        for i in range(len(basis)):
            rows.append(tuple(cols[j][i] for j in range(len(basis))))
    reps = []
    for vec in kernel_basis(rows, ncols=len(basis)):
        reps.append(SparsePoly(nvars, {basis[j]: c for j, c in enumerate(vec)
                                       if c != 0}))
    return reps


def ideal_generators(f):
    """The systems (x_i f_xi) and (f_xi) attached to f."""
    n = f.nvars
    log_gens = tuple(f.x_ddx(i) for i in range(n))
    jac_gens = []
    for i in range(n):
        terms = {}
        for e, c in f.terms.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            terms[tuple(e2)] = terms.get(tuple(e2), Fraction(0)) + c * e[i]
        jac_gens.append(SparsePoly(n, terms))
    return log_gens, tuple(jac_gens)


def _nu_level_key(poly):
    """Sort key putting the smallest Newton-order monomial first."""
    pos = poly.positive_facets()

    def level(m):
        return min(Fraction(sum(l * x for l, x in zip(f.normal, m)), f.offset)
                   for f in pos)

    def key(m):
        return (-level(m), degrevlex_key(m))

    return level, key


def _nu_echelon(span, poly):
    """Re-echelonized ideal span pivoting on the lowest Newton-order part.

    A normal form against this basis has, in every reachable Newton level, no
    component that the ideal could cancel, so its order is the supremum of the
    orders over the whole coset.
    """
    level, key = _nu_level_key(poly)
    ech = _Echelon(key)
    for pivot_row in sorted(span.echelon.rows.values(),
                            key=lambda r: degrevlex_key(max(r, key=degrevlex_key)),
                            reverse=True):
        ech.insert(pivot_row)
    return ech, level


def coset_newton_order(h, span, poly):
    """Newton order of the coset h + ideal: sup over representatives.

    INFINITY when h lies in the ideal.  Exact within the truncation; callers
    arrange the truncation so that every discarded monomial has order above
    the range of interest."""
    ech, level = _nu_echelon(span, poly)
    red = ech.reduce(span.algebra.truncate_terms(h) if isinstance(h, SparsePoly) else h)
    if not red:
        return INFINITY
    return min(level(m) for m in red)


def socle_newton_order(f, D=None, primes=3, seed=0):
    """Newton order of the socle of the quotient by (x_i f_xi), with the
    predicted value n - nu(x1...xn) checked exactly.

    Returns a report dict; the order itself is under ``nu_socle``."""
    n = f.nvars
    poly = newton_polyhedron(f)
    pos = poly.positive_facets()
    if not pos:
        raise InputError("polynomial has order zero")
    slack = min(Fraction(min(fc.normal), fc.offset) for fc in pos)
    if slack == 0:
        raise InputError("coordinate-axis condition violated")
    # every monomial beyond the truncation must have order above n
    min_D = int(n / slack) + 1
    log_gens, _ = ideal_generators(f)
    span = certified_ideal(log_gens, D=D, min_D=min_D)
    reps = socle(span)
    if not reps:
        raise VerificationError("socle of the quotient is zero")
    orders = [coset_newton_order(h, span, poly) for h in reps]
    nu_socle = max(orders)
    x_all = SparsePoly.monomial((1,) * n)
    expected = n - newton_order(x_all, poly)
    report = {
        "truncation": span.algebra.D,
        "m_power_bound": span.m_power_bound,
        "socle_basis": [str(h) for h in reps],
        "coset_orders": [str(o) for o in orders],
        "nu_socle": nu_socle,
        "n_minus_nu_x": expected,
        "match": nu_socle == expected,
    }
    if nu_socle != expected:
        raise VerificationError(
            "socle Newton order %s differs from n - nu(x1...xn) = %s: %r"
            % (nu_socle, expected, report))
    return report


def jacobian_multiplication_check(f, samples=5, D=None, seed=0):
    """Multiplication by x1...xn from the Jacobian quotient to the quotient by
    (x_i f_xi): well-definedness and injectivity on a truncated basis."""
    n = f.nvars
    log_gens, jac_gens = ideal_generators(f)
    span_i = certified_ideal(log_gens, D=D)
    span_j = certified_ideal(jac_gens, D=span_i.algebra.D)
    x_all = SparsePoly.monomial((1,) * n)
    well_defined = all(member(x_all * g, span_i) for g in jac_gens)

    basis_j = span_j.quotient_basis()
    images = []
    for b in basis_j:
        red = span_i.reduce(x_all * SparsePoly.monomial(b))
        images.append(red)
    support = sorted({m for red in images for m in red})
    index = {m: i for i, m in enumerate(support)}
    rows = []
    for red in images:
        row = [Fraction(0)] * len(support)
        for m, c in red.items():
            row[index[m]] = c
        rows.append(tuple(row))
    injective = rank(rows) == len(basis_j) if basis_j else True

    rng = random.Random(seed)
    sample_ok = True
    pivot_rows = list(span_j.echelon.rows.values())
    for _ in range(samples):
        if not pivot_rows:
            break
        picks = rng.sample(pivot_rows, min(3, len(pivot_rows)))
        u_terms = {}
        for row in picks:
            c = Fraction(rng.randint(1, 5))
            for m, v in row.items():
                u_terms[m] = u_terms.get(m, Fraction(0)) + c * v
        u = SparsePoly(n, u_terms)
        if not member(x_all * u, span_i):
            sample_ok = False
            break
    return {
        "truncation": span_i.algebra.D,
        "well_defined": well_defined,
        "quotient_basis_j": [str(SparsePoly.monomial(b)) for b in basis_j],
        "injective": injective,
        "random_image_samples_ok": sample_ok,
        "ok": well_defined and injective and sample_ok,
    }


def verify_interior_membership(f, h, D=None):
    """Membership of h in (x_i f_xi) under the strict-interior support
    hypothesis on x1...xn*h (asserted by the supporting theory to hold)."""
    n = f.nvars
    poly = newton_polyhedron(f)
    x_all = SparsePoly.monomial((1,) * n)
    g = x_all * h
    for m in g.support():
        if not poly.interior_contains(m, n):
            raise InputError("support of x1...xn*h is not strictly interior "
                             "to the n-dilate at %r" % (m,))
    log_gens, _ = ideal_generators(f)
    span = certified_ideal(log_gens, D=D)
    return member(h, span)
