import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import random_invertible, random_signed_permutation, rational_rotation
from rankone.algebra import GF, QQ, Matrix
from rankone.decompose import (Branch, OrthogonalForm, PreserverForm, apply_form, batch_images,
                               decompose, form_map, forms_equal_up_to_scalar, normalize,
                               recover_conjugation, recover_orthogonal)
from rankone.errors import NoSquareRoot, NotAPreserver, NotInnerForm
from rankone.extension import LinearExtension, SymmetryMap, extend_map, identity_map, probe_set
from rankone.idempotents import (enumerate_idempotents, enumerate_symmetric_idempotents,
                                 idempotent_arrays, make_idempotent, trace_pairing)


def extension_of(form, n, F):
    return extend_map(form_map(form, n, F))


class TestRecoverConjugation:
    def test_identity(self):
        F = GF(5)
        Phi = extend_map(identity_map(3, F, probe_set(3, F)))
        assert recover_conjugation(Phi) == Matrix.identity(F, 3)

    def test_unipotent_round_trip(self):
        F = GF(3)
        A = Matrix.from_rows(F, [[1, 1], [0, 1]])
        got = recover_conjugation(extension_of(PreserverForm(A), 2, F))
        assert got == A
        assert forms_equal_up_to_scalar(got, A)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_transpose_is_not_inner(self, n):
        F = GF(7)
        Phi = extend_map(SymmetryMap(n, F, lambda P: P.transpose()))
        with pytest.raises(NotInnerForm):
            recover_conjugation(Phi)


class TestDecompose:
    def test_identity(self):
        F = GF(3)
        form = decompose(extend_map(identity_map(2, F, probe_set(2, F))))
        assert form == PreserverForm(Matrix.identity(F, 2), Branch.IDENTITY)

    def test_transpose(self):
        F = GF(3)
        form = decompose(extend_map(SymmetryMap(2, F, lambda P: P.transpose())))
        assert form == PreserverForm(Matrix.identity(F, 2), Branch.TRANSPOSE)

    def test_random_transpose_branch_gf5(self):
        F, n, rng = GF(5), 3, random.Random(100)
        dom = enumerate_idempotents(n, F)
        for _ in range(100):
            A = random_invertible(F, n, rng)
            truth = PreserverForm(A, Branch.TRANSPOSE)
            form = decompose(extension_of(truth, n, F))
            assert form.branch is Branch.TRANSPOSE
            assert forms_equal_up_to_scalar(form.A, A)
            for P in dom[::7]:
                assert apply_form(form, P) == apply_form(truth, P)

    @pytest.mark.parametrize("p", [3, 5, 7])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_round_trip_induced_maps(self, p, n):
        F, rng = GF(p), random.Random(p * 10 + n)
        X, Fa = idempotent_arrays(n, p)
        for branch in Branch:
            A = random_invertible(F, n, rng)
            truth = PreserverForm(A, branch)
            form = decompose(extension_of(truth, n, F))
            assert form.A == A.normalized()
            assert np.array_equal(batch_images(form, X, Fa, p), batch_images(truth, X, Fa, p))

    def test_n1_is_trivial(self):
        F = GF(5)
        form = decompose(extend_map(identity_map(1, F, probe_set(1, F))))
        assert form == PreserverForm(Matrix.identity(F, 1), Branch.IDENTITY)

    def test_verification_is_total(self):
        F, rng = GF(7), random.Random(3)
        for _ in range(10):
            A = random_invertible(F, 3, rng)
            Phi = extension_of(PreserverForm(A, Branch.IDENTITY), 3, F)
            form = decompose(Phi)
            assert all(form.matrix_map(Matrix.unit(F, 3, i, j)) == Phi.images[i, j]
                       for i in range(3) for j in range(3))

    def test_swap_is_not_a_preserver(self):
        F = GF(3)
        e11 = make_idempotent([1, 0], [1, 0], F)
        p = make_idempotent([1, 0], [1, 1], F)
        table = {P: P for P in enumerate_idempotents(2, F)}
        table[e11], table[p] = p, e11
        with pytest.raises(NotAPreserver):
            decompose(extend_map(SymmetryMap(2, F, table)))


class TestRecoverOrthogonal:
    def test_identity(self):
        F = GF(5)
        Phi = extend_map(identity_map(3, F, probe_set(3, F, "symmetric"), "symmetric"))
        assert recover_orthogonal(Phi).U == Matrix.identity(F, 3)

    def test_rational_rotation(self):
        U = Matrix.from_rows(QQ, [["3/5", "4/5"], ["-4/5", "3/5"]])
        form = recover_orthogonal(extension_of(OrthogonalForm(U), 2, QQ))
        assert form.U in (U, -U)
        assert form.U.T @ form.U == Matrix.identity(QQ, 2)
        assert QQ.is_positive(form.U[0, 0])
        E = {k: Matrix.unit(QQ, 2, *k) for k in [(0, 0), (1, 1), (0, 1), (1, 0)]}
        for X in (E[0, 0], E[1, 1], E[0, 1] + E[1, 0]):
            assert form.matrix_map(X) == U @ X @ U.T

    def test_signed_permutations_gf7(self):
        F, rng = GF(7), random.Random(50)
        for _ in range(50):
            U = random_signed_permutation(F, 3, rng)
            form = recover_orthogonal(extension_of(OrthogonalForm(U), 3, F))
            assert form.U in (U, -U)

    def test_random_rational_rotations(self):
        rng = random.Random(8)
        for n in (2, 3):
            for _ in range(10):
                U = rational_rotation(QQ, n, rng)
                assert U.T @ U == Matrix.identity(QQ, n)
                assert recover_orthogonal(extension_of(OrthogonalForm(U), n, QQ)).U in (U, -U)

    def test_non_square_similitude(self):
        # A = [[1, 1], [1, -1]] has AᵗA = 2I and 2 is not a square mod 3
        F = GF(3)
        A = Matrix.from_rows(F, [[1, 1], [1, -1]])
        dom = enumerate_symmetric_idempotents(2, F)
        conj = PreserverForm(A)
        phi = SymmetryMap(2, F, {P: apply_form(conj, P) for P in dom}, "symmetric")
        with pytest.raises(NoSquareRoot):
            recover_orthogonal(extend_map(phi))


class TestApplyForm:
    def test_identity(self):
        F = GF(5)
        form = PreserverForm(Matrix.identity(F, 2))
        for P in enumerate_idempotents(2, F):
            assert apply_form(form, P) == P

    def test_transpose(self):
        F = GF(3)
        form = PreserverForm(Matrix.identity(F, 2), Branch.TRANSPOSE)
        P = make_idempotent([1, 0], [1, 1], F)
        want = Matrix.unit(F, 2, 0, 0) + Matrix.unit(F, 2, 1, 0)
        assert apply_form(form, P).matrix == want

    def test_conjugate_e22_over_rationals(self):
        A = Matrix.from_rows(QQ, [[1, 1], [0, 1]])
        E22 = make_idempotent([0, 1], [0, 1], QQ)
        image = apply_form(PreserverForm(A), E22)
        direct = A @ E22.matrix @ A.inverse()
        assert direct == Matrix.from_rows(QQ, [[0, 1], [0, 1]])
        assert image.matrix == direct
        assert image.x == (1, 1) and image.f == (0, 1)
        M = image.matrix
        assert M @ M == M and M.rank() == 1

    @pytest.mark.parametrize("branch", list(Branch))
    def test_preserves_pairing(self, branch):
        F = GF(3)
        form = PreserverForm(Matrix.from_rows(F, [[2, 1], [1, 1]]), branch)
        dom = enumerate_idempotents(2, F)
        images = {P: apply_form(form, P) for P in dom}
        for P in dom:
            for Q in dom:
                assert trace_pairing(images[P], images[Q]) == trace_pairing(P, Q)

    def test_batch_matches_scalar_path(self):
        F, p, n = GF(5), 5, 3
        X, Fa = idempotent_arrays(n, p)
        dom = enumerate_idempotents(n, F)
        A = random_invertible(F, n, random.Random(1))
        for branch in Branch:
            form = PreserverForm(A, branch)
            mats = batch_images(form, X, Fa, p)
            for k in range(0, len(dom), 11):
                assert tuple(map(tuple, mats[k].tolist())) == apply_form(form, dom[k]).matrix.rows


class TestScalarEquivalence:
    def test_examples(self):
        F = GF(5)
        I = Matrix.identity(F, 2)
        assert forms_equal_up_to_scalar(I, I.scale(2))
        assert not forms_equal_up_to_scalar(I, Matrix.unit(F, 2, 0, 0))

    def test_normalization(self):
        F, rng = GF(7), random.Random(2)
        for _ in range(50):
            A = random_invertible(F, 3, rng)
            N = normalize(A)
            assert N.first_nonzero() == 1
            assert forms_equal_up_to_scalar(A, N)


def test_form_json_round_trip():
    F = GF(7)
    form = PreserverForm(Matrix.from_rows(F, [[1, 2], [3, 4]]), Branch.TRANSPOSE)
    data = form.to_json()
    assert data["branch"] == "transpose"
    assert PreserverForm.from_json(data) == form
    oform = OrthogonalForm(Matrix.from_rows(QQ, [["3/5", "4/5"], ["-4/5", "3/5"]]))
    assert OrthogonalForm.from_json(oform.to_json()) == oform
