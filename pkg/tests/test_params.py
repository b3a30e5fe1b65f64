"""Model parametrization: (c_in, c_out) <-> (d, lambda) and the connectivity matrix."""

import numpy as np
import pytest

from sbmbounds.errors import DomainError
from sbmbounds.params import (
    ModelParams,
    average_degree,
    connectivity_matrix,
    from_d_lambda,
    params_from_dict,
    second_eigenvalue,
)


def test_from_d_lambda_hand_values():
    p = from_d_lambda(k=2, n=100, d=2.0, lam=0.5)
    assert p.c_in == pytest.approx(3.0, abs=1e-12)
    assert p.c_out == pytest.approx(1.0, abs=1e-12)

    # lambda = 0 is Erdos-Renyi: both rates equal d
    p = from_d_lambda(k=7, n=100, d=3.5, lam=0.0)
    assert p.c_in == pytest.approx(3.5, abs=1e-12)
    assert p.c_out == pytest.approx(3.5, abs=1e-12)

    # planted-coloring endpoint
    p = from_d_lambda(k=5, n=100, d=4.0, lam=-0.25)
    assert p.c_in == pytest.approx(0.0, abs=1e-12)
    assert p.c_out == pytest.approx(5.0, abs=1e-12)


def test_round_trip_d_lambda():
    gen = np.random.default_rng(11)
    for _ in range(200):
        k = int(gen.integers(2, 12))
        d = float(gen.uniform(0.1, 50.0))
        lam = float(gen.uniform(-1.0 / (k - 1), 1.0))
        p = from_d_lambda(k=k, n=1000, d=d, lam=lam)
        assert average_degree(p) == pytest.approx(d, abs=1e-12)
        assert second_eigenvalue(p) == pytest.approx(lam, abs=1e-12)


def test_connectivity_matrix_values():
    p = ModelParams(k=2, n=10, c_in=3.0, c_out=1.0)
    np.testing.assert_allclose(
        connectivity_matrix(p), [[0.75, 0.25], [0.25, 0.75]], atol=1e-15
    )
    flat = connectivity_matrix(from_d_lambda(k=4, n=10, d=2.0, lam=0.0))
    np.testing.assert_allclose(flat, np.full((4, 4), 0.25), atol=1e-15)
    ident = connectivity_matrix(from_d_lambda(k=3, n=10, d=2.0, lam=1.0))
    np.testing.assert_allclose(ident, np.eye(3), atol=1e-15)


def test_connectivity_matrix_spectrum_and_stochasticity():
    gen = np.random.default_rng(5)
    for _ in range(100):
        k = int(gen.integers(2, 10))
        lam = float(gen.uniform(-1.0 / (k - 1), 1.0))
        p = from_d_lambda(k=k, n=10_000, d=float(gen.uniform(0.5, 20.0)), lam=lam)
        g = connectivity_matrix(p)
        assert np.allclose(g.sum(axis=0), 1.0, atol=1e-12)
        assert np.allclose(g.sum(axis=1), 1.0, atol=1e-12)
        # gamma = lambda I + (1 - lambda) J/k has eigenvalues {1, lambda^(k-1)}
        eig = np.sort(np.linalg.eigvalsh(g))
        assert eig[-1] == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(eig[:-1], lam, atol=1e-10)


def test_domain_errors():
    with pytest.raises(DomainError):
        ModelParams(k=1, n=10, c_in=1.0, c_out=1.0)
    with pytest.raises(DomainError):
        ModelParams(k=2, n=10, c_in=11.0, c_out=1.0)  # probability > 1
    with pytest.raises(DomainError):
        ModelParams(k=2, n=10, c_in=-1.0, c_out=1.0)
    with pytest.raises(DomainError):
        from_d_lambda(k=4, n=10, d=2.0, lam=-0.5)  # below -1/(k-1)
    with pytest.raises(DomainError):
        from_d_lambda(k=4, n=10, d=0.0, lam=0.1)
    with pytest.raises(DomainError):
        second_eigenvalue(ModelParams(k=2, n=10, c_in=0.0, c_out=0.0))


def test_params_from_dict_forms():
    p = params_from_dict({"k": 2, "n": 8, "c_in": 3, "c_out": 1})
    assert (p.c_in, p.c_out) == (3.0, 1.0)
    q = params_from_dict({"k": 2, "n": 8, "d": 2.0, "lambda": 0.5})
    assert (q.c_in, q.c_out) == (3.0, 1.0)
    with pytest.raises(DomainError):
        params_from_dict({"k": 2, "n": 8, "c_in": 3, "d": 2.0})  # mixed forms
    with pytest.raises(DomainError):
        params_from_dict({"k": 2, "n": 8, "c_in": 3})  # missing c_out
    with pytest.raises(DomainError):
        params_from_dict({"k": 2, "n": 8})
    with pytest.raises(DomainError):
        params_from_dict({"n": 8, "d": 1.0, "lambda": 0.0})
