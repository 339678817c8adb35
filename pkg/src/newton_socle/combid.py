"""Weight-system selection and the determinant identities behind the residue
computation: the signed-permutation sum of chain coefficients equals a minor,
and for full index sets it collapses to the determinant with a ones column.

Coefficients c_j^J making a unit combination on the affine slice E_J are
produced two ways, by a direct linear solve on the slice and by the Cramer
chain from the underlying linear system, and cross-checked."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
import random

from .errors import InputError, VerificationError
from .fan import dual_fan, face_normal_cone, interior_rays, multiplicity, \
    regularize
from .grobner import torus_has_zero_char0
from .linalg import det, dot, kernel_basis, rank, solve
from .polylattice import face_part, faces, support_function


# ---------------------------------------------------------------------------
# Abstract determinant identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinorTable:
    """An (r+1) x n rational matrix with independent rows and its minors."""

    matrix: tuple

    def __post_init__(self):
        rows = [tuple(map(Fraction, r)) for r in self.matrix]
        object.__setattr__(self, "matrix", tuple(rows))
        if rank(list(rows)) != len(rows):
            raise InputError("rows are linearly dependent")

    @property
    def nrows(self):
        return len(self.matrix)

    @property
    def ncols(self):
        return len(self.matrix[0])

    def minor(self, row_set, col_set):
        rows = sorted(row_set)
        cols = sorted(col_set)
        if len(rows) != len(cols):
            raise InputError("minor needs equal index counts")
        if not rows:
            return Fraction(1)
        return det([tuple(self.matrix[i][j] for j in cols) for i in rows])


def _sign_of_sequence(seq):
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def chain_coefficients_cramer(table, index_set):
    """The coefficients c_k^I, ..., c_n^I of the unit combination on the slice
    cut out by the rows in I, via the Cramer system sum(b_j) = 1,
    sum(b_j a_jl) = 0 for l < k.  None when that system is singular."""
    rows = sorted(index_set)
    k = len(rows)
    sys_rows = [tuple(Fraction(1) for _ in rows)]
    for l in range(k - 1):
        sys_rows.append(tuple(table.matrix[j][l] for j in rows))
    if rank(sys_rows) < k:
        return None
    b = solve(sys_rows, [Fraction(1)] + [Fraction(0)] * (k - 1))
    if b is None:
        return None
    return {l: sum(b[t] * table.matrix[j][l] for t, j in enumerate(rows))
            for l in range(k - 1, table.ncols)}


def chain_coefficients_direct(table, index_set):
    """Same coefficients from the defining property: the combination of the
    coordinate covectors k..n restricted to the slice E_I equals 1.  None when
    the restricted system is singular."""
    rows = sorted(index_set)
    k = len(rows)
    n = table.ncols
    a_rows = [table.matrix[j] for j in rows]
    x0 = solve(a_rows, [Fraction(1)] * k)
    if x0 is None:
        return None
    directions = kernel_basis(a_rows, ncols=n)
    sys_rows = [tuple(x0[l] for l in range(k - 1, n))]
    sys_rows += [tuple(v[l] for l in range(k - 1, n)) for v in directions]
    rhs = [Fraction(1)] + [Fraction(0)] * len(directions)
    if rank(sys_rows) < n - k + 1:
        return None
    c = solve(sys_rows, rhs)
    if c is None:
        return None
    return {l: c[l - (k - 1)] for l in range(k - 1, n)}


def check_minor_identity(table, k_max=None):
    """For each row subset I the signed sum over orderings of the chain
    products c_1 ... c_k equals the minor on the first k columns.

    Subsets whose Cramer systems are singular are skipped with a note; both
    coefficient routes are cross-checked wherever both exist."""
    r1 = table.nrows
    if k_max is None:
        k_max = r1
    coeffs = {}
    skipped = []
    for size in range(1, min(k_max, r1) + 1):
        for subset in combinations(range(r1), size):
            cc = chain_coefficients_cramer(table, subset)
            cd = chain_coefficients_direct(table, subset)
            if cc is not None and cd is not None and cc != cd:
                raise VerificationError(
                    "coefficient routes disagree on %r" % (subset,))
            coeffs[frozenset(subset)] = cc if cc is not None else cd
            if coeffs[frozenset(subset)] is None:
                skipped.append(subset)
    checked = 0
    failures = []
    for size in range(1, min(k_max, r1) + 1):
        for subset in combinations(range(r1), size):
            needed = [frozenset(s) for sz in range(1, size + 1)
                      for s in combinations(subset, sz)]
            if any(coeffs[s] is None for s in needed):
                continue
            total = Fraction(0)
            for perm in permutations(subset):
                product = Fraction(1)
                for j in range(size):
                    prefix = frozenset(perm[:j + 1])
                    product *= coeffs[prefix][j]
                total += _sign_of_sequence(perm) * product
            expected = table.minor(subset, range(size))
            checked += 1
            if total != expected:
                failures.append({"rows": list(subset),
                                 "sum": str(total), "minor": str(expected)})
    return {"ok": not failures, "checked": checked,
            "skipped": [list(s) for s in skipped], "failures": failures}


def check_ones_column_identity(table):
    """For the full row set, the signed sum of chain products of length r
    equals the alternating sum of row-deleted minors; for a square matrix
    with unit row sums both equal the plain determinant (the ones-column
    form)."""
    r1 = table.nrows
    subset = tuple(range(r1))
    coeffs = {}
    for size in range(1, r1):
        for s in combinations(subset, size):
            coeffs[frozenset(s)] = chain_coefficients_cramer(table, s)
    total = Fraction(0)
    for perm in permutations(subset):
        product = Fraction(1)
        usable = True
        for j in range(r1 - 1):
            prefix = frozenset(perm[:j + 1])
            if coeffs[prefix] is None:
                usable = False
                break
            product *= coeffs[prefix][j]
        if not usable:
            return {"ok": False, "note": "singular chain system",
                    "skipped": True}
        total += _sign_of_sequence(perm) * product
    minor_sum = Fraction(0)
    for pos, i in enumerate(subset, start=1):
        rest = [j for j in subset if j != i]
        minor_sum += (-1) ** (r1 + pos) * table.minor(rest, range(r1 - 1))
    out = {"ok": total == minor_sum, "sum": str(total),
           "minor_sum": str(minor_sum), "skipped": False}
    if table.ncols == r1 and all(sum(row) == 1 for row in table.matrix):
        ones_det = det([row[:r1 - 1] + (Fraction(1),)
                        for row in table.matrix])
        plain_det = det(list(table.matrix))
        out["ones_column_det"] = str(ones_det)
        out["det"] = str(plain_det)
        out["ok"] = out["ok"] and total == ones_det == plain_det
    return out


def random_minor_identity_trials(rows, cols, trials, seed):
    """Seeded random matrices fed through the minor identity; returns the
    first counterexample if any (expected none)."""
    rng = random.Random(seed)
    ran = 0
    skipped = 0
    for t in range(trials):
        matrix = []
        for _ in range(rows):
            matrix.append(tuple(Fraction(rng.randint(-9, 9),
                                         rng.randint(1, 3))
                                for _ in range(cols)))
        try:
            table = MinorTable(tuple(matrix))
        except InputError:
            skipped += 1
            continue
        report = check_minor_identity(table)
        ran += 1
        if not report["ok"]:
            return {"ok": False, "trial": t, "matrix":
                    [[str(x) for x in row] for row in matrix],
                    "failures": report["failures"]}
        if table.ncols == table.nrows:
            sums = [sum(row) for row in matrix]
            if any(s == 0 for s in sums):
                continue
            stochastic = tuple(tuple(x / s for x in row)
                               for row, s in zip(matrix, sums))
            try:
                st = MinorTable(stochastic)
            except InputError:
                continue
            rep2 = check_ones_column_identity(st)
            if not rep2.get("skipped") and not rep2["ok"]:
                return {"ok": False, "trial": t, "stochastic": True,
                        "report": rep2}
    return {"ok": True, "trials": ran, "degenerate_skipped": skipped}


# ---------------------------------------------------------------------------
# Weight systems on a face
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSystem:
    """Covectors w_1..w_n adapted to a face: the first r+1 span the normal
    cone's span and restrict to 1 on the face, the whole family is a basis,
    and every slice system from the fan's subcones is solvable."""

    weights: tuple
    face: object
    normal_cone: object
    r: int
    fan: object
    admissible_sets: tuple    # tuples of RayData, one per (r+1)-dim subcone

    def derived_polynomials(self, f):
        return [f.weighted_derivative(w) for w in self.weights]


@dataclass(frozen=True)
class CSystem:
    ray_subset: tuple
    base_point: tuple
    directions: tuple
    coefficients: dict        # 0-based weight index -> Fraction

    def to_json(self):
        return {"rays": [list(r.generator) for r in self.ray_subset],
                "coefficients": {str(k + 1): str(v)
                                 for k, v in sorted(self.coefficients.items())}}


def _slice_of_rays(ray_subset):
    """Base point and direction basis of the affine slice where every
    normalized ray covector equals 1."""
    covs = [r.normalized for r in ray_subset]
    n = len(covs[0])
    x0 = solve(covs, [Fraction(1)] * len(covs))
    if x0 is None:
        return None, None
    dirs = kernel_basis(covs, ncols=n)
    return x0, tuple(dirs)


def _restriction_matrix(weights, start, x0, dirs):
    """Values of the weights w_start..w_n on (base point, directions)."""
    rows = []
    for w in weights[start:]:
        rows.append(tuple([dot(w, x0)] + [dot(w, v) for v in dirs]))
    return rows


def admissible_ray_subsets(fan, face, poly, f=None):
    """Nonempty subsets of the interior-ray sets of the fan cones of dimension
    r+1 inside the normal cone of the face."""
    normal = face_normal_cone(poly, face)
    target_dim = normal.dim
    if f is not None:
        rays = {rd.generator: rd for rd in interior_rays(fan, f)}
    else:
        # multiplicities straight from the support function of the polyhedron
        rays = {}
        for r in fan.rays:
            if not _is_unit(r):
                v = support_function(poly, r)
                norm = tuple(Fraction(x, v) for x in r) if v > 0 else None
                rays[r] = _PlainRay(r, v, norm)
    groups = []
    for cone in fan.cones:
        if cone.dim != target_dim:
            continue
        if not all(normal.contains(r) for r in cone.rays):
            continue
        group = tuple(rays[r] for r in cone.rays)
        groups.append(group)
    subsets = set()
    for group in groups:
        for size in range(1, len(group) + 1):
            for sub in combinations(group, size):
                subsets.add(tuple(sorted(sub, key=lambda rd: rd.generator)))
    return sorted(subsets, key=lambda s: (len(s), [r.generator for r in s]))


@dataclass(frozen=True)
class _PlainRay:
    generator: tuple
    multiplicity: object
    normalized: object


def _is_unit(r):
    return sum(1 for x in r if x != 0) == 1 and max(r) == 1


def choose_weights(poly, face, seed=0, fan=None, f=None, max_attempts=100):
    """Random rational weights adapted to the face, resampled until the
    spanning, normalization, vertex-nonvanishing and slice-basis conditions
    all hold."""
    n = poly.nvars
    normal = face_normal_cone(poly, face)
    r = normal.dim - 1
    if fan is None:
        fan = regularize(dual_fan(poly))
    admissible = admissible_ray_subsets(fan, face, poly, f=f)
    rng = random.Random(seed)
    basis_v = [tuple(map(Fraction, ray)) for ray in normal.rays]
    last_failure = "no attempt run"
    for _ in range(max_attempts):
        weights = []
        ok = True
        for _ in range(r + 1):
            w = tuple(sum(rng.randint(-4, 4) * b[k] for b in basis_v)
                      for k in range(n))
            c = dot(w, face.vertices()[0])
            if c == 0:
                ok = False
                last_failure = "weight vanished on the face"
                break
            weights.append(tuple(x / c for x in w))
        if not ok:
            continue
        for _ in range(n - r - 1):
            weights.append(tuple(Fraction(rng.randint(-9, 9)) for _ in range(n)))
        # full Newton polyhedron of every derived polynomial: nonvanishing on
        # all vertices of the polyhedron
        if any(dot(w, v) == 0 for w in weights for v in poly.vertices):
            last_failure = "a weight vanishes on a vertex"
            continue
        if det(weights) == 0:
            last_failure = "weights are not a basis"
            continue
        # normalization on the face (spanning weights are constant there)
        bad = False
        for w in weights[:r + 1]:
            if any(dot(w, v) != 1 for v in face.vertices()):
                bad = True
                last_failure = "weight not constant 1 on the face"
                break
        if bad:
            continue
        # slice-basis condition for every admissible ray subset
        for sub in admissible:
            x0, dirs = _slice_of_rays(sub)
            if x0 is None:
                bad = True
                last_failure = "slice is empty for %r" % ([r_.generator for r_ in sub],)
                break
            k = len(sub)
            rows = _restriction_matrix(weights, k - 1, x0, dirs)
            if rank(rows) != n - k + 1 or len(rows) != n - k + 1:
                bad = True
                last_failure = "restricted weights not a slice basis"
                break
        if bad:
            continue
        return WeightSystem(tuple(weights), face, normal, r, fan,
                            tuple(admissible))
    raise InputError("weight sampling failed after %d attempts: %s"
                     % (max_attempts, last_failure))


def solve_c_system(ws, ray_subset):
    """Exact coefficients making the tail weights sum to 1 on the slice of
    the given rays; singularity means the slice-basis condition failed."""
    x0, dirs = _slice_of_rays(ray_subset)
    if x0 is None:
        raise InputError("slice is empty")
    k = len(ray_subset)
    n = len(ws.weights)
    rows = _restriction_matrix(ws.weights, k - 1, x0, dirs)
    cols = list(zip(*rows))
    rhs = [Fraction(1)] + [Fraction(0)] * len(dirs)
    c = solve(cols, rhs)
    if c is None:
        raise InputError("slice-basis condition violated")
    coefficients = {k - 1 + i: c[i] for i in range(len(c))}
    # defining identity on a spanning set of the slice
    for idx, val in ((None, x0),) + tuple(enumerate(dirs)):
        got = sum(coefficients[j] * dot(ws.weights[j], val)
                  for j in coefficients)
        want = Fraction(1) if idx is None else Fraction(0)
        if got != want:
            raise VerificationError("unit combination fails on the slice")
    return CSystem(tuple(ray_subset), tuple(x0), tuple(dirs), coefficients)


def check_resolution_assumptions(fan, f, ws, primes=3, seed=0):
    """The computable parts of the resolution hypotheses for the derived
    system g_j: equal ray multiplicities, no common torus zero of the tail
    face systems on each stratum, and solvable slice systems."""
    n = f.nvars
    poly = ws.face.polyhedron
    gs = ws.derived_polynomials(f)
    report = {"multiplicities_ok": True, "strata": [], "slices": [],
              "ok": True}
    rays = interior_rays(fan, f)
    for rd in rays:
        for j, g in enumerate(gs):
            if g.is_zero() or multiplicity(rd, g) != rd.multiplicity:
                report["multiplicities_ok"] = False
                report.setdefault("multiplicity_failures", []).append(
                    {"ray": list(rd.generator), "weight": j + 1})
    rng = random.Random(seed)
    all_faces = faces(poly)
    for cone in fan.cones:
        if not any(all(x > 0 for x in r) for r in cone.rays):
            continue
        k = cone.dim
        carrier = None
        for face in all_faces:
            verts = [poly.vertices[i] for i in face.vertex_indices]
            if all(dot(r, v) == support_function(poly, r)
                   for r in cone.rays for v in verts) \
                    and set(face.recession_axes) == {
                        i for i in range(n)
                        if all(r[i] == 0 for r in cone.rays)}:
                if carrier is None or face.dim > carrier.dim:
                    carrier = face
        if carrier is None:
            report["ok"] = False
            report["strata"].append({"cone": [list(r) for r in cone.rays],
                                     "error": "no carrier face"})
            continue
        systems = [face_part(g, carrier) for g in gs[k - 1:]]
        has_zero, detail = torus_has_zero_char0(
            systems, primes=primes, seed=rng.getrandbits(32))
        entry = {"cone": [list(r) for r in cone.rays], "dim": k,
                 "torus_zero": has_zero}
        if has_zero:
            report["ok"] = False
        report["strata"].append(entry)
    for sub in ws.admissible_sets:
        entry = {"rays": [list(r.generator) for r in sub]}
        try:
            solve_c_system(ws, sub)
            entry["solvable"] = True
        except InputError:
            entry["solvable"] = False
            report["ok"] = False
        report["slices"].append(entry)
    if not report["multiplicities_ok"]:
        report["ok"] = False
    return report
