import numpy as np
import pytest

from masm import (
    LinearizedConstraint,
    SolverFailure,
    build_codebook,
    build_pair_matrices,
    linearize,
    min_distance,
    sca_beamforming,
    solve_w_subproblem,
)
from masm.beamforming import default_inner_tol, surrogate_value


def _rand_channel(rng, n_rx, n_tx):
    return (rng.normal(size=(n_rx, n_tx)) + 1j * rng.normal(size=(n_rx, n_tx))) / np.sqrt(2)


def _rand_w(rng, n_tx, power):
    w = rng.normal(size=n_tx) + 1j * rng.normal(size=n_tx)
    return w * np.sqrt(power) / np.linalg.norm(w)


def test_pair_matrix_identity_channel_is_diagonal():
    cb = build_codebook(2, 2)
    pairs = build_pair_matrices(np.eye(2), cb)
    for pq in pairs:
        p = list(cb.pair_index).index(tuple(pq.pair_id)) if False else None
    # H = I: A = diag(|d_t|^2)
    for idx, pq in enumerate(pairs):
        d = cb.diffs[:, idx]
        assert np.allclose(pq.A, np.diag(np.abs(d) ** 2), atol=1e-14)


def test_pair_quadratic_matches_direct_norm():
    rng = np.random.default_rng(0)
    cb = build_codebook(4, 4)
    H = _rand_channel(rng, 4, 4)
    pairs = build_pair_matrices(H, cb)
    for _ in range(20):
        w = _rand_w(rng, 4, 1.0)
        p = rng.integers(0, cb.n_pairs)
        direct = np.linalg.norm(H @ (w * cb.diffs[:, p])) ** 2
        assert pairs[p].value(w) == pytest.approx(direct, rel=1e-12)


def test_pair_matrices_are_hermitian_psd():
    rng = np.random.default_rng(5)
    cb = build_codebook(4, 2)
    H = _rand_channel(rng, 3, 4)
    for pq in build_pair_matrices(H, cb):
        assert np.allclose(pq.A, pq.A.conj().T, atol=0)
        evals = np.linalg.eigvalsh(pq.A)
        assert evals.min() >= -1e-10 * max(np.linalg.norm(pq.A), 1e-300)


def test_linearization_tight_at_expansion_point():
    rng = np.random.default_rng(1)
    cb = build_codebook(4, 2)
    H = _rand_channel(rng, 4, 4)
    pairs = build_pair_matrices(H, cb)
    w = _rand_w(rng, 4, 1.0)
    for pq in pairs[:10]:
        con = linearize(pq, w)
        assert con.b <= 1e-12
        assert surrogate_value(con, w) == pytest.approx(pq.value(w), rel=1e-12)


def test_linearization_identity_quadratic():
    # A = I: surrogate at the expansion point equals ||w||^2
    con = linearize(type("PQ", (), {"A": np.eye(3), "pair_id": (0, 1),
                                    "value": lambda self, w: 0.0})(), np.array([1.0, 1j, -1.0]))
    assert surrogate_value(con, np.array([1.0, 1j, -1.0])) == pytest.approx(3.0)


def test_linearization_global_under_estimator():
    rng = np.random.default_rng(2)
    cb = build_codebook(4, 4)
    H = _rand_channel(rng, 4, 4)
    pairs = build_pair_matrices(H, cb)
    w_ref = _rand_w(rng, 4, 1.0)
    cons = [linearize(pq, w_ref) for pq in pairs]
    for _ in range(1000):
        w = _rand_w(rng, 4, rng.uniform(0.1, 2.0))
        p = rng.integers(0, cb.n_pairs)
        assert surrogate_value(cons[p], w) <= pairs[p].value(w) + 1e-10


def test_linearization_first_order_consistent():
    # finite differences of the quadratic match the surrogate's gradient
    rng = np.random.default_rng(3)
    cb = build_codebook(2, 2)
    H = _rand_channel(rng, 2, 2)
    pq = build_pair_matrices(H, cb)[1]
    w0 = _rand_w(rng, 2, 1.0)
    con = linearize(pq, w0)
    h = 1e-6
    for t in range(2):
        for direction in (1.0, 1j):
            e = np.zeros(2, complex)
            e[t] = direction
            fd_f = (pq.value(w0 + h * e) - pq.value(w0 - h * e)) / (2 * h)
            fd_s = (surrogate_value(con, w0 + h * e) - surrogate_value(con, w0 - h * e)) / (2 * h)
            assert fd_s == pytest.approx(fd_f, rel=1e-6, abs=1e-9)


def test_solve_w_subproblem_single_constraint_closed_form():
    rng = np.random.default_rng(4)
    for power in (0.5, 1.0, 3.0):
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = -abs(rng.normal())
        w, eta = solve_w_subproblem([LinearizedConstraint(a=a, b=b)], power, 1e-12)
        w_star = np.sqrt(power) * a / np.linalg.norm(a)
        eta_star = np.sqrt(power) * np.linalg.norm(a) + b
        assert eta == pytest.approx(eta_star, abs=1e-10 * max(1, abs(eta_star)))
        assert np.linalg.norm(w - w_star) < 1e-5 * np.linalg.norm(w_star)


def test_solve_w_subproblem_t1_grid_oracle():
    # magnitude x phase grid over the complex disc of radius sqrt(power)
    rng = np.random.default_rng(6)
    for trial in range(10):
        cons = []
        for _ in range(rng.integers(2, 6)):
            a = rng.normal() + 1j * rng.normal()
            cons.append(LinearizedConstraint(a=np.array([a]), b=-abs(rng.normal())))
        power = 1.0
        w, eta = solve_w_subproblem(cons, power, 1e-10)
        mags = np.linspace(0, np.sqrt(power), 201)
        phases = np.linspace(0, 2 * np.pi, 361, endpoint=False)
        zs = mags[:, None] * np.exp(1j * phases[None, :])
        vals = np.full(zs.shape, np.inf)
        for c in cons:
            vals = np.minimum(vals, np.real(np.conj(c.a[0]) * zs) + c.b)
        grid_best = vals.max()
        slack = 1e-10 + 0.05 * sum(abs(c.a[0]) for c in cons) / len(cons) * (np.pi / 360)
        assert eta >= grid_best - 1e-9
        assert eta <= grid_best + slack + 1e-9


def test_solve_w_subproblem_feasible_and_consistent():
    rng = np.random.default_rng(7)
    cb = build_codebook(2, 4)
    for trial in range(20):
        H = _rand_channel(rng, 3, 2)
        power = float(rng.uniform(0.2, 2.0))
        w_ref = _rand_w(rng, 2, power * rng.uniform(0.3, 1.0) ** 2)
        cons = [linearize(pq, w_ref) for pq in build_pair_matrices(H, cb)]
        w, eta = solve_w_subproblem(cons, power, 1e-9, w_start=w_ref)
        assert np.sum(np.abs(w) ** 2) <= power + 1e-9
        direct = min(surrogate_value(c, w) for c in cons)
        assert direct == pytest.approx(eta, abs=1e-8 * max(1.0, abs(eta)))


def test_solve_w_subproblem_zero_matrix_degenerate():
    cons = [LinearizedConstraint(a=np.zeros(2, complex), b=0.0)]
    w, eta = solve_w_subproblem(cons, 1.0, 1e-10)
    assert eta == 0.0


def test_solve_w_subproblem_validates():
    with pytest.raises(ValueError):
        solve_w_subproblem([], 1.0, 1e-9)
    with pytest.raises(ValueError):
        solve_w_subproblem([LinearizedConstraint(a=np.ones(1, complex), b=0.0)], -1.0, 1e-9)


def test_sca_fixed_point_returns_unchanged_weights():
    # T=1: any full-power weight is optimal, so the start is a fixed point
    cb = build_codebook(1, 4)
    H = np.array([[0.7 - 0.2j], [0.1 + 1.1j]])
    w0 = np.array([1.0 + 0.0j])
    w, hist = sca_beamforming(H, cb, w0, 1.0)
    assert np.array_equal(w, w0)
    assert len(hist) == 2  # initial value plus the single stalled iteration


def test_sca_monotone_and_improves():
    rng = np.random.default_rng(8)
    cb = build_codebook(4, 4)
    for trial in range(5):
        H = _rand_channel(rng, 4, 4)
        w0 = np.full(4, 0.5 + 0j)
        w, hist = sca_beamforming(H, cb, w0, 1.0)
        assert all(b >= a - 1e-12 for a, b in zip(hist, hist[1:]))
        assert hist[-1] >= hist[0] - 1e-9
        assert np.sum(np.abs(w) ** 2) <= 1.0 + 1e-9
        assert min_distance(H, w, cb).d_min == pytest.approx(hist[-1], rel=1e-9)


def test_sca_rejects_infeasible_start():
    cb = build_codebook(2, 2)
    with pytest.raises(ValueError):
        sca_beamforming(np.eye(2), cb, np.array([2.0, 2.0 + 0j]), 1.0)


def test_sca_t2_matches_sphere_grid_oracle():
    # exhaustive search over the power sphere (global phase is irrelevant)
    rng = np.random.default_rng(11)
    cb = build_codebook(2, 2)
    for trial in range(3):
        H = _rand_channel(rng, 2, 2)
        w0 = np.full(2, np.sqrt(0.5) + 0j)
        w, hist = sca_beamforming(H, cb, w0, 1.0)
        angles = np.linspace(0, np.pi / 2, 181)
        phases = np.linspace(0, 2 * np.pi, 361, endpoint=False)
        best = 0.0
        for ang in angles:
            ws = np.stack([np.full(phases.size, np.cos(ang)),
                           np.sin(ang) * np.exp(1j * phases)])
            rx = np.einsum("rt,tp->rp", H, ws[:, None, :] * cb.diffs[:, :, None]
                           if False else ws)
            # evaluate all pairs for all phase points
            vals = None
            for p in range(cb.n_pairs):
                d = cb.diffs[:, p]
                v = np.sum(np.abs(H @ (ws * d[:, None])) ** 2, axis=0)
                vals = v if vals is None else np.minimum(vals, v)
            best = max(best, vals.max())
        assert hist[-1] >= 0.98 * best


def test_default_inner_tol_scales():
    cb = build_codebook(2, 2)
    pairs = build_pair_matrices(np.eye(2), cb)
    tol = default_inner_tol(pairs, 2.0)
    assert tol > 0
    pairs10 = build_pair_matrices(10 * np.eye(2), cb)
    assert default_inner_tol(pairs10, 2.0) == pytest.approx(100 * tol, rel=1e-9)
