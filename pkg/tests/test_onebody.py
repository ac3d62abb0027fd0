import numpy as np
import pytest
from numpy.testing import assert_allclose

from gplimit import eigen
from gplimit.onebody import (ConfinementError, FieldConfig, Grid,
                             SpectralCutoff, boundary_mass, build_h,
                             build_htilde, check_confinement,
                             lowest_eigenpairs)


def random_state(grid, seed=0):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return u / grid.norm(u)


def test_grid_momentum_lattice():
    g = Grid(1, 2.0, 8)
    expect = np.pi / g.L * np.array([0, 1, 2, 3, -4, -3, -2, -1])
    assert_allclose(g.k_axis, expect, atol=1e-14)


def test_spectral_roundtrip_identity():
    g = Grid(2, 3.0, 16)
    u = random_state(g)
    back = np.fft.ifftn(np.fft.fftn(u))
    assert np.max(np.abs(back - u)) < 1e-12


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(4, 1.0, 8)
    with pytest.raises(ValueError):
        Grid(1, 1.0, 12)  # not a power of two
    with pytest.raises(ValueError):
        Grid(1, -1.0, 8)


def test_plane_wave_is_eigenvector():
    g = Grid(1, np.pi, 16)
    h = build_h(g, FieldConfig(V_kind="zero"))
    k = 2.0  # on the lattice for L = pi
    u = np.exp(1j * k * g.x_axis)
    ratio = h(u) / u
    assert_allclose(ratio.real, k * k, atol=1e-10)
    assert np.max(np.abs(ratio.imag)) < 1e-10


def test_operator_symmetry_random_pairs():
    g = Grid(2, 5.0, 16)
    h = build_h(g, FieldConfig(A_kind="rotation", omega=0.7))
    for seed in range(5):
        u, v = random_state(g, seed), random_state(g, seed + 50)
        lhs = g.inner(u, h(v))
        rhs = np.conj(g.inner(v, h(u)))
        assert abs(lhs - rhs) < 1e-10


def test_harmonic_1d_spectrum():
    g = Grid(1, 8.0, 64)
    h = build_h(g, FieldConfig())
    vals = [v for v, _ in lowest_eigenpairs(h, 3)]
    assert_allclose(vals, [1.0, 3.0, 5.0], atol=1e-4)


def test_free_torus_spectrum_with_degeneracy():
    g = Grid(1, np.pi, 32)
    h = build_h(g, FieldConfig(V_kind="zero"))
    vals = [v for v, _ in lowest_eigenpairs(h, 5, force_iterative=True,
                                            tol=1e-10)]
    assert_allclose(vals, [0.0, 1.0, 1.0, 4.0, 4.0], atol=1e-9)


def test_iterative_matches_dense():
    g = Grid(1, 6.0, 32)
    h = build_h(g, FieldConfig())
    dense = [v for v, _ in lowest_eigenpairs(h, 4)]
    iterative = [v for v, _ in lowest_eigenpairs(h, 4, force_iterative=True,
                                                 tol=1e-11)]
    assert_allclose(iterative, dense, atol=1e-9)


def test_eigenvectors_orthonormal_and_accurate():
    g = Grid(1, 8.0, 64)
    h = build_h(g, FieldConfig())
    pairs = lowest_eigenpairs(h, 3)
    for (vi, ui) in pairs:
        assert abs(g.norm(ui) - 1.0) < 1e-10
        assert g.norm(h(ui) - vi * ui) < 1e-7
    for i in range(3):
        for j in range(i):
            assert abs(g.inner(pairs[i][1], pairs[j][1])) < 1e-9


def test_harmonic_3d_ground_energy():
    g = Grid(3, 6.0, 32)
    h = build_h(g, FieldConfig())
    val, vec = lowest_eigenpairs(h, 1, tol=1e-7)[0]
    assert abs(val - 3.0) < 1e-3
    assert boundary_mass(g, vec) < 1e-8


def test_rotation_fock_darwin_spectrum():
    # literal (p + A)^2 + V with A = Omega(-y, x), V = |x|^2 has levels
    # sqrt(1 + Omega^2) (2N + 2) + 2 Omega m; the ground state rises
    # (diamagnetic inequality) while the m = -1 level is pulled down
    om = 0.5
    g = Grid(2, 6.0, 32)
    h = build_h(g, FieldConfig(A_kind="rotation", omega=om))
    vals = [v for v, _ in lowest_eigenpairs(h, 2)]
    w = np.sqrt(1.0 + om * om)
    assert_allclose(vals[0], 2.0 * w, atol=1e-6)
    assert_allclose(vals[1], 4.0 * w - 2.0 * om, atol=1e-6)
    h0 = build_h(g, FieldConfig())
    vals0 = [v for v, _ in lowest_eigenpairs(h0, 2)]
    assert vals[1] < vals0[1]  # rotation lowers the angular-momentum state


def test_gauge_shift_constant_A():
    g = Grid(1, np.pi, 16)
    a0 = 0.7
    const = (np.zeros(g.shape) + a0,)
    h = build_h(g, FieldConfig(V_kind="zero", A_kind="custom_samples",
                               A_samples=const))
    vals = np.array([v for v, _ in lowest_eigenpairs(h, 4)])
    shifted = np.sort((g.k_axis + a0) ** 2)[:4]
    assert_allclose(vals, shifted, atol=1e-9)


def test_cutoff_multiplier_plateaus():
    g = Grid(1, np.pi, 64)
    cut = SpectralCutoff(0.5, 4.0)
    mult = cut.multiplier(g)
    kmag = np.abs(g.k_axis)
    assert np.all(mult[kmag <= 4.0] == 0.0)
    assert np.all(mult[kmag >= 8.0] == 1.0)


def test_htilde_inactive_cutoff():
    g = Grid(1, 8.0, 32)
    fields = FieldConfig()
    s = 2.0 * g.k_max  # theta_s vanishes on the whole lattice
    ht, kappa = build_htilde(g, fields, 0.5, s)
    h = build_h(g, fields)
    e0 = lowest_eigenpairs(h, 1)[0][0]
    assert_allclose(kappa, e0 - 1.0, atol=1e-9)
    u = random_state(g)
    assert np.max(np.abs(ht(u) - (h(u) - kappa * u))) < 1e-10


def test_htilde_min_eigenvalue_is_one():
    g = Grid(1, 8.0, 64)
    ht, _ = build_htilde(g, FieldConfig(), 0.5, 2.0)
    val = lowest_eigenpairs(ht, 1)[0][0]
    assert abs(val - 1.0) < 1e-8


def test_htilde_as_operator_at_least_one():
    g = Grid(1, 8.0, 32)
    ht, _ = build_htilde(g, FieldConfig(), 0.3, 3.0)
    for seed in range(100):
        u = random_state(g, seed)
        assert ht.expectation(u) >= 1.0 - 1e-8


def test_kappa_bounds_over_s_family():
    g = Grid(1, 8.0, 32)
    fields = FieldConfig()
    h = build_h(g, fields)
    e0 = lowest_eigenpairs(h, 1)[0][0]
    eps = 0.25
    for s in (0.5, 1.0, 2.0, 4.0, 8.0):
        _, kappa = build_htilde(g, fields, eps, s)
        assert kappa <= e0 - 1.0 + 1e-9
        # A = 0: h - (1-eps) p^2 theta_s >= eps p^2 + V >= 0, so kappa >= -1
        assert kappa >= -1.0 - 1e-9


def test_energy_cutoff_projector_bound():
    # ||(1 - P_Lambda) v|| <= Lambda^{-1/5} ||htilde^{1/5} v|| on mixtures
    g = Grid(1, 6.0, 32)
    ht, _ = build_htilde(g, FieldConfig(), 0.5, 2.0)
    H = ht.to_dense()
    H = 0.5 * (H + H.conj().T)
    vals, vecs = np.linalg.eigh(H)
    rng = np.random.default_rng(3)
    for Lam in (5.0, 20.0, 80.0):
        inside = vals <= Lam
        for _ in range(20):
            c = rng.standard_normal(len(vals)) + 1j * rng.standard_normal(len(vals))
            c /= np.linalg.norm(c)
            tail = np.linalg.norm(c[~inside])
            weighted = np.linalg.norm(c * vals**0.2)
            assert tail <= Lam**-0.2 * weighted + 1e-12


def test_confinement_check():
    g = Grid(1, 2.0, 32)  # box too small for this stiffness
    h = build_h(g, FieldConfig(V_stiffness=0.01))
    _, vec = lowest_eigenpairs(h, 1)[0]
    with pytest.raises(ConfinementError):
        check_confinement(g, vec)
    g2 = Grid(1, 8.0, 64)
    h2 = build_h(g2, FieldConfig())
    _, vec2 = lowest_eigenpairs(h2, 1)[0]
    assert check_confinement(g2, vec2) < 1e-8


def test_field_config_validation():
    g = Grid(1, 2.0, 8)
    with pytest.raises(ValueError):
        FieldConfig(A_kind="rotation", omega=1.0).vector_potential(g)
    with pytest.raises(ValueError):
        FieldConfig(V_kind="custom_samples",
                    V_samples=np.zeros(4)).potential(g)
    with pytest.raises(ValueError):
        FieldConfig(V_kind="custom_samples",
                    V_samples=-np.ones(g.shape)).potential(g)


def test_eigensolver_nonconvergence_reports_residual():
    rng = np.random.default_rng(5)
    n = 200
    A = rng.standard_normal((n, n))
    A = A + A.T
    with pytest.raises(eigen.EigensolverError) as err:
        eigen.block_lanczos_lowest(lambda v: A @ v, n, 3, tol=1e-14,
                                   max_krylov=8, max_restarts=2,
                                   dtype=np.float64,
                                   rng=np.random.default_rng(0))
    assert err.value.best_residual is not None
    assert err.value.best_residual > 0.0
