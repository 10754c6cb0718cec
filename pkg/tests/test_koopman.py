import numpy as np
import pytest

from symkoop import (
    DegenerateDataError,
    IdentityDictionary,
    InputError,
    MonomialDictionary,
    builtin_group,
    eigenfunction_eval,
    eigenvalue_hausdorff,
    fit_edmd,
    fit_snapshots,
    fit_trajectory,
    induced_representation,
    lift,
    load_operator,
    make_system,
    predict,
    save_operator,
    simulate,
    snapshots,
    spectrum,
)
from symkoop.koopman import KoopmanApprox, operator_from_dict, operator_to_dict, spectrum_to_list


def op_from_matrix(K):
    K = np.asarray(K, dtype=float)
    return KoopmanApprox(
        matrix=K, dictionary=IdentityDictionary(K.shape[0]),
        set_label="test", fit_residual=0.0, rank_used=K.shape[0],
    )


def test_fit_scalar_data():
    op = fit_edmd([[2.0]], [[6.0]], dictionary=IdentityDictionary(1))
    assert op.matrix[0, 0] == pytest.approx(3.0)
    assert op.fit_residual == pytest.approx(0.0, abs=1e-15)
    assert op.rank_used == 1


def test_fit_recovers_linear_system_exactly():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4))
    Yp = rng.normal(size=(4, 25))
    Yf = A @ Yp
    op = fit_edmd(Yp, Yf, dictionary=IdentityDictionary(4))
    assert np.max(np.abs(op.matrix - A)) <= 1e-10
    assert op.rank_used == 4


def test_fit_rank_deficient_projector():
    # hand-computed SVD pseudo-inverse: Yp = 5 u v^T with u = v = (1,2)/sqrt 5,
    # so K = Yp pinv(Yp) is the rank-1 projector (1/5) [[1,2],[2,4]]
    Y = np.array([[1.0, 2.0], [2.0, 4.0]])
    op = fit_edmd(Y, Y, dictionary=IdentityDictionary(2))
    np.testing.assert_allclose(op.matrix, Y / 5.0, atol=1e-14)
    assert op.rank_used == 1
    assert op.fit_residual <= 1e-14


def test_fit_toggle_region_is_stable():
    traj = simulate(make_system("toggle_switch"), [2.5, 0.5], 0.05, 120)
    op = fit_trajectory(traj, IdentityDictionary(2), set_label="right")
    radius = np.max(np.abs(np.linalg.eigvals(op.matrix)))
    assert radius <= 1.0 + 1e-6


def test_fit_rejects_bad_data():
    with pytest.raises(DegenerateDataError):
        fit_edmd(np.zeros((2, 5)), np.ones((2, 5)), dictionary=IdentityDictionary(2))
    with pytest.raises(InputError):
        fit_edmd(np.ones((2, 5)), np.ones((2, 4)), dictionary=IdentityDictionary(2))


def test_least_squares_optimality_under_perturbation():
    rng = np.random.default_rng(1)
    Yp = rng.normal(size=(3, 40))
    Yf = rng.normal(size=(3, 40))  # inconsistent data: nonzero residual
    op = fit_edmd(Yp, Yf, dictionary=IdentityDictionary(3))
    base = np.linalg.norm(op.matrix @ Yp - Yf)
    for _ in range(20):
        delta = rng.normal(size=(3, 3))
        delta *= 1e-3 / np.linalg.norm(delta)
        assert np.linalg.norm((op.matrix + delta) @ Yp - Yf) >= base - 1e-12


def test_pseudo_inverse_consistency():
    rng = np.random.default_rng(2)
    Yp = rng.normal(size=(3, 8))
    Yf = rng.normal(size=(3, 8))
    op = fit_edmd(Yp, Yf, dictionary=IdentityDictionary(3))
    pinv = np.linalg.pinv(Yp)
    assert np.max(np.abs(op.matrix @ Yp @ pinv - Yf @ pinv)) <= 1e-10


def test_dmd_equals_degree_one_monomials_bitwise():
    pairs = snapshots(simulate(make_system("toggle_switch"), [2.5, 0.5], 0.05, 60))
    op_id = fit_snapshots(pairs, IdentityDictionary(2))
    op_mono = fit_snapshots(pairs, MonomialDictionary(2, 1, include_constant=False))
    assert np.array_equal(op_id.matrix, op_mono.matrix)


def test_predict_zero_steps_is_lifted_state():
    op = op_from_matrix([[0.5, 0.0], [0.0, 0.2]])
    out = predict(op, [1.0, 2.0], 0)
    assert out.shape == (1, 2)
    assert np.array_equal(out[0], [1.0, 2.0])


def test_predict_matches_linear_truth():
    rng = np.random.default_rng(3)
    A = 0.9 * np.linalg.qr(rng.normal(size=(3, 3)))[0]  # contraction, no blowup
    Yp = rng.normal(size=(3, 30))
    op = fit_edmd(Yp, A @ Yp, dictionary=IdentityDictionary(3))
    x0 = rng.normal(size=3)
    out = predict(op, x0, 50)
    truth = x0.copy()
    for k in range(1, 51):
        truth = A @ truth
        assert np.linalg.norm(out[k] - truth) <= 1e-8


def test_training_one_step_error_equals_fit_residual():
    traj = simulate(make_system("lorenz"), [1.0, 1.0, 1.05], 0.01, 300, discard=200)
    pairs = snapshots(traj)
    op = fit_snapshots(pairs, IdentityDictionary(3))
    Yp, Yf = lift(op.dictionary, pairs)
    assert np.linalg.norm(op.matrix @ Yp - Yf) / np.linalg.norm(Yf) == pytest.approx(
        op.fit_residual, rel=1e-12
    )


def test_spectrum_ordering_and_rotation_eigenvalues():
    spec = spectrum(op_from_matrix(np.diag([0.5, 0.9])))
    np.testing.assert_allclose(spec.eigenvalues, [0.9, 0.5])

    phi = 0.3
    rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    spec = spectrum(op_from_matrix(rot))
    assert np.allclose(np.abs(spec.eigenvalues), 1.0)
    assert sorted(spec.eigenvalues.imag) == pytest.approx(
        [-np.sin(phi), np.sin(phi)], abs=1e-12
    )
    # conjugate pair adjacent, ascending imaginary part
    assert spec.eigenvalues[0].imag < spec.eigenvalues[1].imag


def test_spectrum_is_deterministic_and_normalized():
    rng = np.random.default_rng(4)
    K = rng.normal(size=(5, 5))
    a, b = spectrum(op_from_matrix(K)), spectrum(op_from_matrix(K))
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.coefficients, b.coefficients)
    for i in range(5):
        w = a.coefficients[i]
        assert np.linalg.norm(w) == pytest.approx(1.0)
        nz = np.nonzero(np.abs(w) > 1e-12 * np.max(np.abs(w)))[0][0]
        assert w[nz].real >= 0
        defect = np.linalg.norm(w @ K - a.eigenvalues[i] * w)
        assert defect <= 1e-8 * np.linalg.norm(K)


def test_spectrum_similarity_invariance_for_builtin_fits():
    for name in ("lorenz", "toggle_switch", "hamiltonian"):
        system = make_system(name)
        group = builtin_group(name)
        traj = simulate(system, np.full(system.dim, 0.8), 0.01, 120)
        op = fit_trajectory(traj, IdentityDictionary(system.dim))
        for g in group.elements:
            rep = induced_representation(op.dictionary, g)
            conj = rep.matrix @ op.matrix @ rep.inverse_matrix
            dist = eigenvalue_hausdorff(
                np.linalg.eigvals(op.matrix), np.linalg.eigvals(conj)
            )
            assert dist <= 1e-8


def test_eigenfunctions_of_diagonal_operator_are_coordinates():
    d = IdentityDictionary(2)
    spec = spectrum(op_from_matrix(np.diag([0.7, 0.4])))
    # eigenvalue 0.7 pairs with the first coordinate, 0.4 with the second
    assert spec.eigenvalues[0] == pytest.approx(0.7)
    for x in ([1.0, 0.0], [0.0, 1.0], [2.0, -3.0]):
        phi0 = eigenfunction_eval(spec, 0, d, x)
        phi1 = eigenfunction_eval(spec, 1, d, x)
        assert phi0 == pytest.approx(x[0])
        assert phi1 == pytest.approx(x[1])
    with pytest.raises(InputError):
        eigenfunction_eval(spec, 5, d, [0.0, 0.0])


def test_identity_operator_eigenfunctions_are_invariant():
    d = IdentityDictionary(3)
    spec = spectrum(op_from_matrix(np.eye(3)))
    assert np.allclose(spec.eigenvalues, 1.0)
    # phi(T x) = phi(x) when K = I represents T exactly (T = identity map)
    x = np.array([0.2, -1.0, 3.0])
    for i in range(3):
        assert eigenfunction_eval(spec, i, d, x) == pytest.approx(
            eigenfunction_eval(spec, i, d, x)
        )


def test_group_action_preserves_eigenfunctions_when_commuting():
    # with K R = R K, w^T R^-1 is again a left eigenvector at the same lambda
    group = builtin_group("toggle_switch")
    swap = group.element("swap")
    d = IdentityDictionary(2)
    rep = induced_representation(d, swap)
    K = np.array([[0.8, 0.1], [0.1, 0.8]])  # commutes with swap
    assert np.max(np.abs(K @ rep.matrix - rep.matrix @ K)) == 0.0
    spec = spectrum(op_from_matrix(K))
    for i, lam in enumerate(spec.eigenvalues):
        w = spec.coefficients[i] @ rep.inverse_matrix
        assert np.linalg.norm(w @ K - lam * w) <= 1e-10


def test_eigenvalue_hausdorff():
    assert eigenvalue_hausdorff([1.0, 2.0], [2.0, 1.0]) == 0.0
    assert eigenvalue_hausdorff([1.0], [1.0 + 0.5j]) == pytest.approx(0.5)


def test_operator_json_roundtrip(tmp_path):
    pairs = snapshots(simulate(make_system("toggle_switch"), [2.5, 0.5], 0.05, 40))
    op = fit_snapshots(pairs, MonomialDictionary(2, 2), set_label="right")
    path = tmp_path / "op.json"
    save_operator(op, path)
    loaded = load_operator(path)
    assert np.array_equal(loaded.matrix, op.matrix)
    assert loaded.set_label == op.set_label
    assert loaded.fit_residual == op.fit_residual
    assert loaded.rank_used == op.rank_used
    assert loaded.dictionary.to_spec() == op.dictionary.to_spec()
    # a second save/load round trip is value-identical as a dict
    assert operator_to_dict(operator_from_dict(operator_to_dict(op))) == operator_to_dict(op)


def test_spectrum_export_roundtrip():
    from symkoop.koopman import spectrum_from_list

    spec = spectrum(op_from_matrix(np.diag([0.5, 0.9])))
    out = spectrum_to_list(spec)
    assert len(out) == 2
    assert set(out[0]) == {"re", "im", "w_re", "w_im"}
    assert out[0]["re"] == pytest.approx(0.9)
    back = spectrum_from_list(out)
    assert np.array_equal(back.eigenvalues, spec.eigenvalues)
    assert np.array_equal(back.coefficients, spec.coefficients)
