"""Minimal Buchberger engine over Q and prime fields, used to decide whether
face-derivative systems have a common zero in the torus.

Only the degree-reverse-lexicographic order is implemented; torus conditions
go through a Rabinowitsch variable; the characteristic-zero question is
settled by reduction modulo several random large primes (one-sided Monte
Carlo, disagreements trigger a retry)."""

from dataclasses import dataclass
from fractions import Fraction
import random

from .errors import InputError, VerificationError
from .polylattice import SparsePoly, compact_faces, face_part, newton_polyhedron


def degrevlex_key(m):
    return (sum(m), tuple(-x for x in reversed(m)))


def leading_monomial(poly_dict):
    return max(poly_dict, key=degrevlex_key)


class _BadPrime(Exception):
    pass


# -- coefficient fields ------------------------------------------------------

class _FieldQ:
    p = None

    @staticmethod
    def convert(c):
        return Fraction(c)

    @staticmethod
    def inv(c):
        return 1 / c


class _FieldFp:
    def __init__(self, p):
        self.p = p

    def convert(self, c):
        c = Fraction(c)
        if c.denominator % self.p == 0:
            raise _BadPrime(self.p)
        return c.numerator * pow(c.denominator, self.p - 2, self.p) % self.p

    def inv(self, c):
        return pow(c, self.p - 2, self.p)


def _field(p):
    return _FieldQ() if p is None else _FieldFp(p)


def _to_dict(poly, fld):
    out = {}
    for e, c in poly.terms.items():
        v = fld.convert(c)
        if fld.p is not None:
            v %= fld.p
        if v != 0:
            out[e] = v
    return out


def _sub_scaled(f, g, c, mono, fld):
    """f - c * x^mono * g in the field."""
    out = dict(f)
    for e, v in g.items():
        key = tuple(a + b for a, b in zip(e, mono))
        w = out.get(key, 0) - c * v
        if fld.p is not None:
            w %= fld.p
        if w == 0:
            out.pop(key, None)
        else:
            out[key] = w
    return out


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def normal_form(f, basis, fld):
    """Full reduction of f modulo the basis (leading-term division)."""
    rem = {}
    work = dict(f)
    while work:
        m = leading_monomial(work)
        c = work[m]
        for g in basis:
            lg = leading_monomial(g)
            if _divides(lg, m):
                quot = tuple(a - b for a, b in zip(m, lg))
                factor = c * fld.inv(g[lg])
                if fld.p is not None:
                    factor %= fld.p
                work = _sub_scaled(work, g, factor, quot, fld)
                break
        else:
            rem[m] = c
            del work[m]
    return rem


@dataclass(frozen=True)
class GB:
    """A reduced Groebner basis in degrevlex order over Q (p=None) or F_p."""

    generators: tuple
    basis: tuple          # tuples of (exponent, coefficient) pairs, sorted
    p: object
    nvars: int

    def _polys(self):
        return [dict(g) for g in self.basis]

    def reduce(self, h):
        fld = _field(self.p)
        if isinstance(h, SparsePoly):
            h = _to_dict(h, fld)
        return normal_form(h, self._polys(), fld)

    def contains(self, h):
        return not self.reduce(h)

    def is_unit_ideal(self):
        return any(len(g) == 1 and not any(g[0][0]) for g in self.basis)


def buchberger(gens, p=None):
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Standard Buchberger loop with the product (coprime lead) criterion and
    the chain criterion, followed by minimalization and inter-reduction."""
    if not gens:
        raise InputError("empty generator list")
    nvars = gens[0].nvars
    if any(g.nvars != nvars for g in gens):
        raise InputError("coefficient ring mismatch: differing nvars")
    fld = _field(p)
    basis = [d for d in (_to_dict(g, fld) for g in gens) if d]
    if not basis:
        raise InputError("all generators are zero")

    def lcm(a, b):
        return tuple(max(x, y) for x, y in zip(a, b))

    def spoly(f, g):
        lf, lg = leading_monomial(f), leading_monomial(g)
        l = lcm(lf, lg)
        cf = fld.inv(f[lf])
        cg = fld.inv(g[lg])
        sf = _sub_scaled({}, f, -cf if p is None else (-cf) % p,
                         tuple(a - b for a, b in zip(l, lf)), fld)
        return _sub_scaled(sf, g, cg, tuple(a - b for a, b in zip(l, lg)), fld)

    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}
    done = set()
    while pairs:
        i, j = min(pairs)
        pairs.discard((i, j))
        done.add((i, j))
        li, lj = leading_monomial(basis[i]), leading_monomial(basis[j])
        l = lcm(li, lj)
        if all(a + b == m for a, b, m in zip(li, lj, l)):
            continue  # coprime leading terms
        chain = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if _divides(leading_monomial(basis[k]), l):
                pik = (max(i, k), min(i, k))
                pjk = (max(j, k), min(j, k))
                if pik in done and pjk in done:
                    chain = True
                    break
        if chain:
            continue
        r = normal_form(spoly(basis[i], basis[j]), basis, fld)
        if r:
            new_idx = len(basis)
            basis.append(r)
            pairs.update((new_idx, k) for k in range(new_idx))

    # minimalize: drop elements whose lead is divisible by another lead
    leads = [leading_monomial(g) for g in basis]
    keep = []
    for i, g in enumerate(basis):
        if any(j != i and _divides(leads[j], leads[i])
               and (leads[j] != leads[i] or j < i) for j in range(len(basis))):
            continue
        keep.append(g)
    # inter-reduce and normalize to monic
    reduced = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        r = normal_form(g, others, fld)
        if not r:
            continue
        lead = leading_monomial(r)
        c = fld.inv(r[lead])
        monic = {}
        for e, v in r.items():
            w = c * v
            if p is not None:
                w %= p
            monic[e] = w
        reduced.append(monic)
    reduced.sort(key=lambda g: degrevlex_key(leading_monomial(g)))
    frozen = tuple(tuple(sorted(g.items())) for g in reduced)
    return GB(tuple(gens), frozen, p, nvars)


# -- torus zeros and nondegeneracy -------------------------------------------

def _is_probable_prime(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng, bits=31):
    while True:
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_probable_prime(cand):
            return cand


def torus_has_zero(polys, p):
    """Whether the system has a common zero with all coordinates nonzero,
    over the algebraic closure of F_p.

    Adjoins t*x1*...*xn - 1 and tests for the unit ideal; False is a proof of
    emptiness over the closure.  Raises _BadPrime when p divides an input
    denominator (callers retry with a fresh prime)."""
    polys = [g for g in polys if not g.is_zero()]
    if not polys:
        return True
    n = polys[0].nvars
    extended = [SparsePoly(n + 1, {e + (0,): c for e, c in g.terms.items()})
                for g in polys]
    rabinowitsch = SparsePoly(n + 1, {(1,) * (n + 1): 1, (0,) * (n + 1): -1})
    gb = buchberger(extended + [rabinowitsch], p)
    return not gb.is_unit_ideal()


def torus_has_zero_char0(polys, primes=3, seed=0, max_rounds=3):
    """Monte Carlo answer over the complex numbers via random-prime reduction.

    Runs ``primes`` independent primes; on disagreement retries with fresh
    primes and reports the retries.  Returns (answer, detail)."""
    rng = random.Random(seed)
    detail = {"primes": [], "retries": 0}
    for round_no in range(max_rounds):
        answers = []
        used = []
        k = 0
        while k < primes:
            p = random_prime(rng)
            try:
                answers.append(torus_has_zero(polys, p))
            except _BadPrime:
                continue
            used.append(p)
            k += 1
        detail["primes"].append(used)
        if all(a == answers[0] for a in answers):
            detail["answers"] = answers
            return answers[0], detail
        detail["retries"] += 1
    raise VerificationError(
        "random primes kept disagreeing on a torus-zero question: %r" % detail)


def _monomial_system(polys):
    return all(len(g.terms) <= 1 for g in polys)


def nondegeneracy_report(f, primes=3, seed=0):
    """Per-face nondegeneracy data for f.

    For every compact face of the Newton polyhedron, the face parts of the
    operators x_i d/dx_i must have no common torus zero.  Monomial face
    systems are decided by the short-circuit (a nonzero monomial never
    vanishes on the torus); the rest go through the Groebner path."""
    if not isinstance(f.order(), int) or f.order() < 2:
        raise InputError("order too small: f must lie in the square of the maximal ideal")
    n = f.nvars
    report = {"nvars": n, "axis_condition": True, "faces": [], "nondegenerate": True}
    for i in range(n):
        if f.restrict_to_axis(i).is_zero():
            report["axis_condition"] = False
            report["nondegenerate"] = False
            report["faces"] = []
            return report
    poly = newton_polyhedron(f)
    rng = random.Random(seed)
    for face in compact_faces(poly):
        derivs = [face_part(f, face).x_ddx(i) for i in range(n)]
        entry = {"vertices": [list(v) for v in face.vertices()], "dim": face.dim}
        if _monomial_system(derivs):
            entry["method"] = "monomial"
            entry["torus_zero"] = False
        else:
            entry["method"] = "groebner"
            has_zero, detail = torus_has_zero_char0(
                derivs, primes=primes, seed=rng.getrandbits(32))
            entry["torus_zero"] = has_zero
            entry["primes"] = detail["primes"]
        if entry["torus_zero"]:
            report["nondegenerate"] = False
        report["faces"].append(entry)
    return report


def nondegenerate(f, primes=3, seed=0):
    """Kouchnirenko nondegeneracy plus the coordinate-axis condition."""
    return nondegeneracy_report(f, primes=primes, seed=seed)["nondegenerate"]
