import math

import pytest

from a2tp.coinv import (
    AnalysisReport,
    analyze,
    check_lemma_q2,
    check_lower_bound,
    cyclics_to_invariant_factors,
    expected_epsilon_order,
    gamma_ab_matrix,
    predicted_group,
    relation_matrix,
)
from a2tp.plane import build_plane
from a2tp.presentation import gen_t0, gen_t0_dual, twist_by_name
from a2tp.zlinalg import FpAbelianGroup


@pytest.fixture(scope="module")
def planes():
    return {q: build_plane(q) for q in (2, 3, 4, 5, 7)}


@pytest.fixture(scope="module")
def reports(planes):
    out = {}
    for q, pl in planes.items():
        out[(q, "t0")] = analyze(gen_t0(pl))
        out[(q, "t0dual")] = analyze(gen_t0_dual(pl))
    return out


def test_matrix_shape_q2(planes):
    T = gen_t0(planes[2])
    mat = relation_matrix(T, "acb")
    assert mat.n_cols == 8
    assert len(mat.rows) == 7 + 21 + 1


def test_matrix_shape_bcd(planes):
    T = gen_t0(planes[2])
    mat = relation_matrix(T, "bcd")
    assert len(mat.rows) == 21 + 1 + 7


def test_acb_row_structure_q2(planes):
    # char 2: x is never on its own line, so the (3a) row for x has a net 0
    # coefficient at x and +1 at the 3 other off-line points
    T = gen_t0(planes[2])
    mat = relation_matrix(T, "acb")
    for x, row in enumerate(mat.rows[:7]):
        coeffs = dict(row)
        assert coeffs.get(x, 0) == 0
        plus_ones = [c for c, v in coeffs.items() if v == 1 and c < 7]
        assert len(plus_ones) == 3
        assert all(c not in T.lam_sets[x] for c in plus_ones)


def test_degenerate_triple_row_char3(planes):
    T = gen_t0(planes[3])
    mat = relation_matrix(T, "acb")
    N = T.N
    # (0,0,0) is a triple; its row carries coefficient 3 at point 0, -1 at eps
    assert ((0, 3), (N, -1)) in mat.rows


def test_all_points_row(planes):
    T = gen_t0(planes[2])
    mat = relation_matrix(T, "acb")
    last = mat.rows[-1]
    assert last == tuple((c, 1) for c in range(7)) + ((7, -1),)


def test_analysis_q3(reports):
    rep = reports[(3, "t0")]
    assert rep.invariant_factors == (2,)
    assert rep.epsilon_order == 2
    assert rep.free_rank == 0


def test_analysis_q4_golden(reports):
    rep = reports[(4, "t0")]
    assert rep.invariant_factors == (3, 3)
    assert rep.epsilon_order == 1  # eps = 0


def test_analysis_q2_dual(reports):
    rep = reports[(2, "t0dual")]
    assert rep.invariant_factors == (2, 2, 2)
    assert rep.epsilon_order == 1


def test_analysis_q7(reports):
    rep = reports[(7, "t0")]
    assert rep.invariant_factors == (3, 6)
    assert rep.epsilon_order == 2


def test_dual_groups_not_isomorphic(reports):
    for q in (2, 3, 4, 5, 7):
        assert reports[(q, "t0")].invariant_factors != reports[(q, "t0dual")].invariant_factors


def test_all_checks_pass(reports):
    for key, rep in reports.items():
        assert rep.all_checks_pass, (key, rep.checks)
        assert rep.conjecture_holds, key
        assert not rep.flags


def test_schemes_agree(planes):
    for q, pl in planes.items():
        T = gen_t0(pl)
        a = analyze(T, schemes=("acb",))
        b = analyze(T, schemes=("bcd",))
        assert a.invariant_factors == b.invariant_factors
        assert a.epsilon_order == b.epsilon_order
        assert a.quotient_invariant_factors == b.quotient_invariant_factors


def test_twisted_analysis(planes):
    pl = planes[4]
    for name in ("frob1", "frob2", "omega"):
        rep = analyze(twist_by_name(pl, gen_t0(pl), name))
        assert rep.all_checks_pass, (name, rep.checks)
        assert rep.epsilon_order is not None
        assert (pl.q - 1) % rep.epsilon_order == 0


def test_lemma_q2():
    assert check_lemma_q2(3, 2)
    assert check_lemma_q2(4, 1)
    assert check_lemma_q2(5, 4)
    assert not check_lemma_q2(3, 5)
    assert not check_lemma_q2(3, None)


def test_lower_bound_row_annihilation(planes):
    for q, pl in planes.items():
        T = gen_t0(pl)
        assert check_lower_bound(T, expected_epsilon_order(q))


def test_lower_bound_3c_row_arithmetic():
    # (q^2+q+1)(q+1) - 3(q+1) = (q+1)(q-1)(q+2) = 0 mod q^2-1
    for q in (2, 3, 4, 5, 7, 8, 9):
        assert ((q * q + q + 1) * (q + 1) - 3 * (q + 1)) % (q * q - 1) == 0


def test_expected_epsilon_order():
    assert expected_epsilon_order(2) == 1
    assert expected_epsilon_order(4) == 1
    assert expected_epsilon_order(7) == 2
    assert expected_epsilon_order(8) == 7
    assert expected_epsilon_order(13) == 4


def test_gamma_ab_divides(planes):
    for q in (2, 4):
        T = gen_t0(planes[q])
        rep = analyze(T)
        gamma = FpAbelianGroup(T.N, gamma_ab_matrix(T))
        quotient_order = math.prod(rep.quotient_invariant_factors) if rep.quotient_invariant_factors else 1
        assert gamma.order() is not None
        assert gamma.order() % quotient_order == 0


def test_gamma_ab_q4_contains_z3_z3(planes):
    # A_T/<eps> = A_T = Z3+Z3 at q=4 since eps = 0; order 9 divides |Gamma_ab|
    T = gen_t0(planes[4])
    rep = analyze(T)
    assert rep.quotient_invariant_factors == (3, 3)
    gamma = FpAbelianGroup(T.N, gamma_ab_matrix(T))
    assert gamma.order() % 9 == 0


def test_epsilon_order_divides_exponent(reports):
    for key, rep in reports.items():
        if rep.invariant_factors:
            exponent = rep.invariant_factors[-1]
            assert exponent % rep.epsilon_order == 0


def test_singer_relabeling_invariance(planes):
    from a2tp.presentation import TrianglePresentation, validate

    pl = planes[3]
    T = gen_t0(pl)
    N = pl.N
    k = 4
    shifted = TrianglePresentation(
        q=T.q,
        N=N,
        lam=tuple(
            tuple(sorted((y + k) % N for y in T.lam[(x - k) % N])) for x in range(N)
        ),
        triples=frozenset(
            ((x + k) % N, (y + k) % N, (z + k) % N) for (x, y, z) in T.triples
        ),
        origin="shifted",
    )
    assert validate(shifted).ok
    a, b = analyze(T), analyze(shifted)
    assert a.invariant_factors == b.invariant_factors
    assert a.epsilon_order == b.epsilon_order


def test_report_json_roundtrip(reports):
    import json

    for rep in reports.values():
        back = AnalysisReport.from_dict(json.loads(rep.to_json()))
        assert back == rep


def test_cyclics_to_invariant_factors():
    assert cyclics_to_invariant_factors([2, 3]) == (6,)
    assert cyclics_to_invariant_factors([2, 2, 2]) == (2, 2, 2)
    assert cyclics_to_invariant_factors([4, 6]) == (2, 12)
    assert cyclics_to_invariant_factors([]) == ()


def test_predicted_group():
    assert predicted_group(2, 2, 1, "t0") == ()
    assert predicted_group(4, 2, 2, "t0") == (3, 3)
    assert predicted_group(2, 2, 1, "t0dual") == (2, 2, 2)
    assert predicted_group(9, 3, 2, "t0dual") == (3, 3, 3, 3, 3, 24)
    assert predicted_group(13, 13, 1, "t0") == (3, 12)
