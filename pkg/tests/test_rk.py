import numpy as np

from dsrn_scatter._rk import rk78_order_probe, tableau


def test_tableau_consistency():
    A, B8, C = tableau()
    assert np.allclose(A.sum(axis=1), C, atol=1e-14)
    assert abs(B8.sum() - 1.0) < 1e-14


def test_free_oscillation_accuracy():
    omega, x1 = 3.0, 50.0
    for rtol in (1e-8, 1e-11):
        Y, nsteps = rk78_order_probe(omega, x1, rtol, hmax=0.5)
        got = Y[0, 2]
        exact = np.exp(1j * omega * x1)
        # global error tracks rtol times the step count
        assert abs(got - exact) < 200 * nsteps * rtol


def test_step_count_scales_at_eighth_order():
    omega, x1 = 3.0, 50.0
    _, n_loose = rk78_order_probe(omega, x1, 1e-6, hmax=10.0)
    _, n_tight = rk78_order_probe(omega, x1, 1e-12, hmax=10.0)
    ratio = n_tight / n_loose
    # an order-p error controller spaces steps like rtol^(1/(p+1));
    # 10^(6/9) ~ 4.6 for the 8(7) pair, far below a low-order method's slope
    assert 2.0 < ratio < 8.0
