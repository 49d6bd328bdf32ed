import numpy as np
import pytest

from dsrn_scatter import (
    BlackHoleParams,
    GAMMA1,
    build_profile,
    compute_smatrix,
    extract_scattering,
    matrix_AL,
    reflection_L,
    smatrix_hat,
    smatrix_physical,
)
from dsrn_scatter.jost import JostMatrix
from dsrn_scatter.scattering import ExtractionInconsistencyError
from conftest import CANONICAL, rel_dev
from oracles import decoupled_jost

LAM_SET = (-1.0, 0.0, 1.0)
N_SET = (1, 2, 4, 8, 16)


def test_zero_potential_hook_identity():
    p = BlackHoleParams(M=1.0, Q=0.5, Lambda=0.05, m_dirac=0.0, q_dirac=0.0)
    prof0 = build_profile(p)
    data, _, _ = extract_scattering(1.0, 0.0, prof0, tol=1e-11)
    assert np.abs(data.AL - np.eye(4)).max() < 1e-11


def test_relations_over_test_matrix(scatter_cache):
    for lam in LAM_SET:
        for n in N_SET:
            data, _, _ = scatter_cache(lam, n)
            assert data.x_spread < 1e-7
            for name, value in data.residuals.items():
                assert value < 1e-8, (lam, n, name, value)


def test_both_forms_of_L_and_R(scatter_cache):
    for lam in (-1.0, 1.0):
        for n in (1, 4, 16):
            data, _, _ = scatter_cache(lam, n)
            s = smatrix_hat(lam, n, data)
            assert s.residuals["L_two_forms"] < 1e-8
            assert s.residuals["R_two_forms"] < 1e-8


def test_unitarity_hat_and_physical(prof, scatter_cache):
    beta = prof.phase_beta()
    for lam in LAM_SET:
        for n in N_SET:
            data, _, _ = scatter_cache(lam, n)
            hat = smatrix_hat(lam, n, data)
            assert hat.unitarity_defect() < 1e-7
            phys = smatrix_physical(lam, n, hat, beta)
            assert phys.unitarity_defect() < 1e-7
            # unimodular dressing: entry moduli unchanged
            for a, b in ((hat.T_L, phys.T_L), (hat.T_R, phys.T_R),
                         (hat.R, phys.R), (hat.L, phys.L)):
                assert np.abs(np.abs(a) - np.abs(b)).max() < 1e-15


def test_physical_equals_hatted_when_uncharged():
    p = BlackHoleParams(M=1.0, Q=0.5, Lambda=0.05, m_dirac=0.1, q_dirac=0.0)
    prof0 = build_profile(p)
    assert prof0.phase_beta() == 0.0
    hat = compute_smatrix(1.0, 2, prof0, physical=False)
    phys = smatrix_physical(1.0, 2, hat, prof0.phase_beta())
    assert np.array_equal(hat.matrix, phys.matrix)


def test_smatrix_physical_requires_hatted(prof):
    hat = compute_smatrix(1.0, 1, prof, physical=False)
    phys = smatrix_physical(1.0, 1, hat, prof.phase_beta())
    with pytest.raises(ValueError):
        smatrix_physical(1.0, 1, phys, prof.phase_beta())


def test_transmission_decay_rate(prof):
    # |T_L(lam, n)| e^{+nA} converges to a constant (the A_L1 prefactor)
    lam = 0.1
    A = prof.width_A()
    vals = []
    for n in (8, 12, 16, 20, 24, 28, 32):
        data, _, _ = extract_scattering(lam, n, prof)
        t = smatrix_hat(lam, n, data).T_L
        vals.append(np.linalg.norm(t, 2) * np.exp(n * A))
    vals = np.array(vals)
    assert np.all(np.isfinite(vals))
    ratios = vals[1:] / vals[:-1]
    assert np.abs(ratios - 1.0).max() < 0.1
    assert abs(ratios[-1] - 1.0) < 0.02


def test_x_independence_diagnostic(prof):
    # solutions at mismatched energies are not connected by a constant
    # matrix: the extraction-inconsistency gate must trip
    from dsrn_scatter.jost import faddeev_right_ode, jost_left

    n = 2
    pts = np.linspace(-20.0, 40.0, 10)
    fr = faddeev_right_ode(1.0, n, prof, x_samples=pts)
    fl = jost_left(1.02, n, prof, x_samples=pts)
    with pytest.raises(ExtractionInconsistencyError):
        matrix_AL(1.0, n, fr, fl, pts, spread_tol=1e-7)


def test_reflection_batch_and_determinism(prof):
    lam = 1.0
    out1 = reflection_L(lam, [1, 2, 4], prof)
    out2 = reflection_L(lam, [1, 2, 4], prof)
    for n in (1, 2, 4):
        assert np.array_equal(out1[n], out2[n])
        assert np.abs(out1[n]).max() <= 1.0 + 1e-7
    with pytest.raises(ValueError):
        reflection_L(lam, [], prof)
    with pytest.raises(ValueError):
        reflection_L(lam, [0], prof)
    with pytest.raises(ValueError):
        reflection_L(lam, [1.5], prof)


def test_massless_reduction_matches_decoupled_oracle(prof_massless):
    lam = 1.0
    for n in (1, 2):
        ref = reflection_L(lam, [n], prof_massless)[n]
        x_min, x_max, _ = __import__("dsrn_scatter").truncation_range(
            prof_massless, n)
        pts = x_min + (x_max - x_min) * np.linspace(0.25, 0.75, 10)
        fr = decoupled_jost(prof_massless, lam, n, "right", pts)
        fl = decoupled_jost(prof_massless, lam, n, "left", pts)
        data = matrix_AL(lam, n, fr, fl, pts, spread_tol=1e-5)
        s = smatrix_hat(lam, n, data)
        assert np.abs(s.L - ref).max() < 1e-8


def test_cam_parity_of_scattering_data(prof):
    # A_L(lam, -z) ~ G1 A_L(lam, z) G1 (diagonal blocks even, off-diagonal
    # odd): exact only without the mass term, asymptotic here, so the
    # deviation must sit inside the O(1/|z|) budget at |z| = 32
    lam, z = 0.5, 32.0
    dplus, _, _ = extract_scattering(lam, z, prof)
    dminus, _, _ = extract_scattering(lam, -z, prof, spread_tol=1e-5)
    flip = GAMMA1 @ dplus.AL @ GAMMA1
    dev = rel_dev(dminus.AL, flip)
    assert dev < 3.0 / abs(z)
    # massless configuration: the parity is exact up to solver noise
    p0 = BlackHoleParams(M=1.0, Q=0.5, Lambda=0.05, m_dirac=0.0,
                         q_dirac=0.2)
    prof0 = build_profile(p0)
    ap, _, _ = extract_scattering(lam, 8.0, prof0)
    am, _, _ = extract_scattering(lam, -8.0, prof0, spread_tol=1e-5)
    assert rel_dev(am.AL, GAMMA1 @ ap.AL @ GAMMA1) < 1e-8


def test_complex_z_extraction_runs(prof):
    lam, z = 0.5, 4.0 + 2.0j
    data, _, _ = extract_scattering(lam, z, prof, spread_tol=1e-5)
    assert data.x_spread < 1e-5
    # hatted S assembles (poles absent at this z)
    s = smatrix_hat(lam, z, data)
    assert np.all(np.isfinite(s.matrix))


def test_smatrix_json_schema(prof):
    s = compute_smatrix(1.0, 2, prof)
    d = s.to_dict()
    assert d["lambda"] == 1.0 and d["n"] == 2
    assert set(d["blocks"]) == {"TL", "R", "L", "TR"}
    for block in d["blocks"].values():
        assert len(block) == 4 and all(len(pair) == 2 for pair in block)
    assert "unitarity" in d["residuals"] and "x_spread" in d["residuals"]
