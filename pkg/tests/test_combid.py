import random
from fractions import Fraction

import pytest

from newton_socle import (MinorTable, check_minor_identity,
                          check_ones_column_identity,
                          check_resolution_assumptions, choose_weights,
                          compact_faces, dual_fan, newton_polyhedron,
                          random_minor_identity_trials, regularize,
                          solve_c_system)
from newton_socle.combid import (chain_coefficients_cramer,
                                 chain_coefficients_direct)
from newton_socle.errors import InputError
from newton_socle.linalg import det, dot

from conftest import poly


def table(rows):
    return MinorTable(tuple(tuple(Fraction(x) for x in r) for r in rows))


def test_base_case_coefficient_is_entry():
    A = table([[2, 5, 7], [1, -1, 3]])
    for i in range(2):
        cc = chain_coefficients_cramer(A, (i,))
        assert cc[0] == A.matrix[i][0]


def test_coefficient_routes_agree():
    A = table([[2, 1, 3, -1], [1, -2, 1, 4], [3, 1, 0, 1]])
    for subset in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)):
        cc = chain_coefficients_cramer(A, subset)
        cd = chain_coefficients_direct(A, subset)
        assert cc == cd


def test_minor_identity_small():
    A = table([[2, 1, 3, -1, 1], [1, -2, 1, 4, 0], [3, 1, 0, 1, 2]])
    rep = check_minor_identity(A)
    assert rep["ok"] and rep["checked"] == 7 and not rep["skipped"]


def test_minor_identity_two_rows_expansion():
    # with two rows the identity reads c1^{1} c2^{12} - c1^{2} c2^{12} summed
    # over the two orderings equals the 2x2 minor on the first two columns
    A = table([[3, 1, 2], [1, 2, -1]])
    rep = check_minor_identity(A)
    assert rep["ok"]
    c1 = chain_coefficients_cramer(A, (0,))
    c2 = chain_coefficients_cramer(A, (1,))
    c12 = chain_coefficients_cramer(A, (0, 1))
    lhs = c1[0] * c12[1] - c2[0] * c12[1]
    assert lhs == A.minor((0, 1), (0, 1))


def test_ones_column_row_stochastic():
    A = table([[Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)],
               [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)],
               [2, -3, 2]])
    rep = check_ones_column_identity(A)
    assert rep["ok"]
    assert Fraction(rep["det"]) == det(A.matrix)
    assert rep["ones_column_det"] == rep["det"]


def test_ones_column_r_zero():
    rep = check_ones_column_identity(table([[1]]))
    assert rep["ok"]
    assert Fraction(rep["sum"]) == 1


def test_ones_column_random_nonsquare():
    rng = random.Random(6)
    for _ in range(10):
        rows = 1 + rng.randint(0, 3)
        cols = rows + rng.randint(0, 2)
        mat = [[Fraction(rng.randint(-6, 6)) for _ in range(cols)]
               for _ in range(rows)]
        try:
            A = table(mat)
        except InputError:
            continue
        rep = check_ones_column_identity(A)
        if not rep.get("skipped"):
            assert rep["ok"]


def test_random_trials_clean():
    rep = random_minor_identity_trials(3, 5, 60, seed=9)
    assert rep["ok"]
    rep2 = random_minor_identity_trials(4, 4, 40, seed=10)
    assert rep2["ok"]


def test_minor_table_rejects_dependent_rows():
    with pytest.raises(InputError):
        table([[1, 2, 3], [2, 4, 6]])


def test_singular_subsets_are_skipped():
    # equal first-column entries make the size-2 chain system singular, and
    # on the slice the tail coordinates are dependent, so no unit combination
    # exists; the subset must be skipped, not reported as a failure
    A = table([[2, 1, 3], [2, 5, -1]])
    assert chain_coefficients_cramer(A, (0, 1)) is None
    assert chain_coefficients_direct(A, (0, 1)) is None
    rep = check_minor_identity(A)
    assert rep["ok"]
    assert [0, 1] in rep["skipped"]


# ---------------------------------------------------------------------------
# Weight systems on faces
# ---------------------------------------------------------------------------

def _edge(f_text):
    D = newton_polyhedron(poly(f_text))
    return D, [fc for fc in compact_faces(D)
               if fc.dim == 1 and not fc.in_coordinate_hyperplane][0]


def _vertex(f_text):
    D = newton_polyhedron(poly(f_text))
    return D, [fc for fc in compact_faces(D)
               if fc.dim == 0 and not fc.in_coordinate_hyperplane][0]


def test_choose_weights_cusp_edge_forced():
    f = poly("x1^2 + x2^3")
    D, edge = _edge("x1^2 + x2^3")
    ws = choose_weights(D, edge, seed=1, f=f)
    assert ws.r == 0
    assert ws.weights[0] == (Fraction(1, 2), Fraction(1, 3))
    assert det(ws.weights) != 0
    for v in edge.vertices():
        assert dot(ws.weights[0], v) == 1


def test_choose_weights_vertex_face():
    f = poly("x1^2 + x1*x2 + x2^3")
    D, vert = _vertex("x1^2 + x1*x2 + x2^3")
    ws = choose_weights(D, vert, seed=2, f=f)
    assert ws.r == 1
    for w in ws.weights[:2]:
        assert dot(w, (1, 1)) == 1
    assert {tuple(r.generator for r in s) for s in ws.admissible_sets} == \
        {((1, 1),), ((2, 1),), ((1, 1), (2, 1))}


def test_choose_weights_reverified_with_fresh_seed():
    f = poly("x1^2 + x2^3")
    D, edge = _edge("x1^2 + x2^3")
    for seed in (3, 4, 5):
        ws = choose_weights(D, edge, seed=seed, f=f)
        # re-verify the defining conditions independently
        assert det(ws.weights) != 0
        for w in ws.weights:
            assert all(dot(w, v) != 0 for v in D.vertices)
        for w in ws.weights[:ws.r + 1]:
            assert all(dot(w, v) == 1 for v in edge.vertices())
        for sub in ws.admissible_sets:
            solve_c_system(ws, sub)  # raises when condition (iv)-style fails


def test_solve_c_cusp_is_unit_on_first_weight():
    f = poly("x1^2 + x2^3")
    D, edge = _edge("x1^2 + x2^3")
    ws = choose_weights(D, edge, seed=1, f=f)
    cs = solve_c_system(ws, ws.admissible_sets[0])
    assert cs.coefficients == {0: Fraction(1), 1: Fraction(0)}


def test_solve_c_point_slice():
    f = poly("x1^2 + x1*x2 + x2^3")
    D, vert = _vertex("x1^2 + x1*x2 + x2^3")
    ws = choose_weights(D, vert, seed=2, f=f)
    two = [s for s in ws.admissible_sets if len(s) == 2][0]
    cs = solve_c_system(ws, two)
    # E_J is a point p: the combination must hit 1 at p
    p = cs.base_point
    assert not cs.directions
    total = sum(c * dot(ws.weights[j], p) for j, c in cs.coefficients.items())
    assert total == 1


def test_resolution_assumptions_cusp():
    f = poly("x1^2 + x2^3")
    D, edge = _edge("x1^2 + x2^3")
    ws = choose_weights(D, edge, seed=1, f=f)
    rep = check_resolution_assumptions(ws.fan, f, ws)
    assert rep["ok"] and rep["multiplicities_ok"]
    assert all(not s["torus_zero"] for s in rep["strata"])
    assert all(s["solvable"] for s in rep["slices"])


def test_resolution_assumptions_catch_bad_weights():
    f = poly("x1^2 + x2^3")
    D, edge = _edge("x1^2 + x2^3")
    ws = choose_weights(D, edge, seed=1, f=f)
    # sabotage: replace the weights by ones vanishing on the vertex (0, 3),
    # so the derived polynomial drops that vertex and a multiplicity shifts
    bad = ws.__class__(weights=((Fraction(1), Fraction(0)),) * 2,
                       face=ws.face, normal_cone=ws.normal_cone, r=ws.r,
                       fan=ws.fan, admissible_sets=ws.admissible_sets)
    rep = check_resolution_assumptions(ws.fan, f, bad)
    assert not rep["multiplicities_ok"]
    assert not rep["ok"]


def test_resolution_assumptions_degenerate_polynomial():
    f = poly("x1^2 + 2*x1*x2 + x2^2")
    D = newton_polyhedron(f)
    edge = [fc for fc in compact_faces(D)
            if fc.dim == 1 and not fc.in_coordinate_hyperplane][0]
    ws = choose_weights(D, edge, seed=6, f=f)
    rep = check_resolution_assumptions(ws.fan, f, ws)
    assert any(s["torus_zero"] for s in rep["strata"])
    assert not rep["ok"]
