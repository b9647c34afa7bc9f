import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rankone.algebra import GF, QQ, Field, Matrix, mat_inverse, mat_mul, mat_rank, mat_trace, \
    scalar_inverse, solve_linear
from rankone.errors import DimensionMismatch, DivisionByZero, FieldMismatch, Singular
from rankone.idempotents import make_idempotent


def units(F, n):
    return {(i, j): Matrix.unit(F, n, i, j) for i in range(n) for j in range(n)}


def random_matrix(F, n, rng):
    if F.is_finite:
        return Matrix.from_rows(F, [[rng.randrange(F.char) for _ in range(n)] for _ in range(n)])
    return Matrix.from_rows(F, [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
                                for _ in range(n)])


def det_leibniz(M):
    F, n = M.field, M.n
    total = F.zero
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[a] > perm[b] for a in range(n) for b in range(a + 1, n))
        term = F.one if inversions % 2 == 0 else F.neg(F.one)
        for i in range(n):
            term = F.mul(term, M[i, perm[i]])
        total = F.add(total, term)
    return total


def rank_by_minors(M):
    F, n = M.field, M.n
    for k in range(n, 0, -1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                sub = Matrix(F, tuple(tuple(M[r, c] for c in cols) for r in rows))
                if det_leibniz(sub) != 0:
                    return k
    return 0


class TestScalars:
    def test_inverse_of_one(self):
        assert scalar_inverse(GF(7), 1) == 1

    def test_inverse_mod_7_matches_scan(self):
        F = GF(7)
        expected = next(r for r in range(1, 7) if 3 * r % 7 == 1)
        assert expected == 5
        assert scalar_inverse(F, 3) == expected

    def test_rational_reciprocal(self):
        assert scalar_inverse(QQ, Fraction(2, 3)) == Fraction(3, 2)

    @pytest.mark.parametrize("F", [GF(5), QQ])
    def test_zero_has_no_inverse(self, F):
        with pytest.raises(DivisionByZero):
            scalar_inverse(F, F.zero)

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            Field(9)

    def test_coercion_and_encoding(self):
        assert GF(7)(Fraction(1, 2)) == 4
        assert GF(7)(-1) == 6
        assert QQ("6/4") == Fraction(3, 2)
        assert QQ.encode(Fraction(-3, 6)) == "-1/2"
        assert QQ.encode(QQ(2)) == "2/1"
        assert GF(5).decode("13") == 3

    def test_sqrt(self):
        assert GF(7).sqrt(2) in (3, 4)
        assert GF(7).sqrt(3) is None
        assert QQ.sqrt(Fraction(9, 25)) == Fraction(3, 5)
        assert QQ.sqrt(Fraction(2)) is None

    def test_sign_convention(self):
        assert [a for a in range(7) if GF(7).is_positive(a)] == [1, 2, 3]
        assert QQ.is_positive(Fraction(1, 9)) and not QQ.is_positive(Fraction(-1, 9))


fields = st.sampled_from([GF(3), GF(5), GF(7), GF(11), QQ])


@st.composite
def field_triples(draw):
    F = draw(fields)
    if F.is_finite:
        elem = st.integers(0, F.char - 1)
    else:
        elem = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 100)
    return F, draw(elem), draw(elem), draw(elem)


@given(field_triples())
def test_field_axioms(t):
    F, a, b, c = t
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    if a != 0:
        assert F.mul(a, F.inv(a)) == 1


class TestMatrixProducts:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_unit_products(self, n):
        F = GF(5)
        E = units(F, n)
        assert mat_mul(E[0, 1], E[1, 0]) == E[0, 0]
        assert mat_mul(E[0, 1], E[0, 1]).is_zero()

    def test_unit_product_rule(self):
        F, n = QQ, 3
        E = units(F, n)
        for (i, j), (k, l) in itertools.product(E, E):
            expected = E[i, l] if j == k else Matrix.zeros(F, n)
            assert E[i, j] @ E[k, l] == expected

    def test_identity_is_neutral(self):
        A = random_matrix(GF(7), 3, random.Random(1))
        assert mat_mul(Matrix.identity(GF(7), 3), A) == A

    def test_mismatches(self):
        with pytest.raises(DimensionMismatch):
            Matrix.identity(GF(3), 2) @ Matrix.identity(GF(3), 3)
        with pytest.raises(FieldMismatch):
            Matrix.identity(GF(3), 2) @ Matrix.identity(GF(5), 2)
        with pytest.raises(DimensionMismatch):
            Matrix(GF(3), ((1, 0),))


class TestInverse:
    def test_identity(self):
        I = Matrix.identity(QQ, 3)
        assert mat_inverse(I) == I

    def test_unipotent_rational(self):
        A = Matrix.from_rows(QQ, [[1, 1], [0, 1]])
        assert mat_inverse(A) == Matrix.from_rows(QQ, [[1, -1], [0, 1]])

    def test_unipotent_gf3(self):
        F = GF(3)
        A = Matrix.from_rows(F, [[1, 1], [0, 1]])
        candidate = Matrix.from_rows(F, [[1, 2], [0, 1]])
        assert A @ candidate == Matrix.identity(F, 2)
        assert mat_inverse(A) == candidate

    def test_singular(self):
        with pytest.raises(Singular):
            Matrix.from_rows(GF(5), [[1, 2], [2, 4]]).inverse()

    @pytest.mark.parametrize("F", [GF(3), GF(5), GF(7), QQ])
    def test_round_trip(self, F):
        rng = random.Random(F.char)
        for n in (1, 2, 3, 4):
            for _ in range(10):
                A = random_matrix(F, n, rng)
                if not A.is_invertible():
                    continue
                I = Matrix.identity(F, n)
                assert A @ A.inverse() == I
                assert A.inverse() @ A == I


class TestRank:
    def test_examples(self):
        assert mat_rank(Matrix.zeros(GF(3), 2)) == 0
        assert mat_rank(Matrix.unit(GF(3), 3, 0, 0)) == 1
        assert mat_rank(Matrix.identity(QQ, 3)) == 3

    def test_all_2x2_over_gf3_match_minors(self):
        F = GF(3)
        for entries in itertools.product(range(3), repeat=4):
            M = Matrix(F, (entries[:2], entries[2:]))
            assert mat_rank(M) == rank_by_minors(M)

    def test_random_3x3_over_gf3_match_minors(self):
        F, rng = GF(3), random.Random(7)
        for _ in range(200):
            M = random_matrix(F, 3, rng)
            assert mat_rank(M) == rank_by_minors(M)


class TestTrace:
    def test_examples(self):
        assert mat_trace(Matrix.identity(QQ, 4)) == 4
        assert mat_trace(Matrix.unit(QQ, 3, 0, 1)) == 0

    def test_random_idempotents_have_trace_one(self):
        F, rng = GF(5), random.Random(3)
        made = 0
        while made < 20:
            x = [rng.randrange(5) for _ in range(3)]
            f = [rng.randrange(5) for _ in range(3)]
            if not any(x) or sum(a * b for a, b in zip(x, f)) % 5 == 0:
                continue
            P = make_idempotent(x, f, F, rescale=True)
            assert mat_trace(P.matrix) == 1
            made += 1

    @given(st.sampled_from([GF(3), GF(7), QQ]), st.integers(1, 4), st.integers(0, 10 ** 6))
    def test_trace_is_cyclic(self, F, n, seed):
        rng = random.Random(seed)
        A, T = random_matrix(F, n, rng), random_matrix(F, n, rng)
        assert (T @ A).trace() == (A @ T).trace()


class TestSolve:
    def test_identity(self):
        assert solve_linear(Matrix.identity(QQ, 2), [3, 4]) == (3, 4)

    def test_diagonal_scaling(self):
        A = Matrix.from_rows(QQ, [[2, 0], [0, 2]])
        assert solve_linear(A, [1, 1]) == (Fraction(1, 2), Fraction(1, 2))

    def test_gf3(self):
        A = Matrix.from_rows(GF(3), [[1, 1], [0, 1]])
        x = solve_linear(A, [1, 1])
        assert A.apply(x) == (1, 1)
        assert x == (0, 1)

    def test_singular(self):
        with pytest.raises(Singular):
            solve_linear(Matrix.zeros(GF(3), 2), [1, 0])


@pytest.mark.parametrize("F", [GF(7), QQ])
def test_json_round_trip(F):
    A = random_matrix(F, 3, random.Random(5))
    data = A.to_json()
    assert data["field"] == {"char": F.char} and data["n"] == 3
    assert all(isinstance(v, str) for row in data["entries"] for v in row)
    assert Matrix.from_json(data) == A
