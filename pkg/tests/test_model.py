import numpy as np
import pytest

from viscid.model import eval_system, make_burgers, make_burgers_transport, make_system


def test_burgers_examples():
    s = make_burgers()
    assert s.flux(np.array([2.0]))[0] == 2.0
    assert s.jacobian(np.array([0.0]))[0, 0] == 0.0
    assert s.diffusion(np.array([5.0]))[0, 0] == 1.0
    assert s.n_components == 1 and s.speed_constant == 1.0


def test_eval_system_examples():
    f, a, b = eval_system(make_burgers(), [0.0])
    assert (f[0], a[0, 0], b[0, 0]) == (0.0, 0.0, 1.0)
    f, a, b = eval_system(make_burgers(), [3.0])
    assert (f[0], a[0, 0], b[0, 0]) == (4.5, 3.0, 1.0)
    f, _, _ = eval_system(make_burgers_transport(2.0), [1.0, 5.0])
    assert f.tolist() == [0.5, -5.0]


def test_eval_system_errors():
    with pytest.raises(ValueError):
        eval_system(make_burgers(), [1.0, 2.0])
    with pytest.raises(ValueError):
        eval_system(make_burgers(), [np.nan])


def test_transport_examples():
    s = make_burgers_transport(2.0)
    assert s.jacobian(np.zeros(2)).tolist() == [[0.0, 0.0], [0.0, -1.0]]
    grad = np.array([0.7, -3.0])
    assert s.diffusion(np.zeros(2))[1] @ grad == pytest.approx(2.0 * 0.7)
    b0 = make_burgers_transport(0.0).diffusion(np.zeros(2))
    assert np.count_nonzero(b0) == 1
    assert s.speed_constant == 2.0


@pytest.mark.parametrize("system", [make_burgers(), make_burgers_transport(1.0),
                                    make_burgers_transport(0.0)], ids=lambda s: s.label)
def test_structural_hypotheses(system):
    n = system.n_components
    a0 = system.jacobian(np.zeros(n))
    b0 = system.diffusion(np.zeros(n))
    assert np.array_equal(a0, np.diag(np.diag(a0))) and a0[0, 0] == 0.0
    assert b0[0, 0] == system.cubic.b_diff > 0


@pytest.mark.parametrize("system", [make_burgers(), make_burgers_transport(1.0)],
                         ids=lambda s: s.label)
def test_jacobian_consistency(system):
    rng = np.random.default_rng(0)
    n, h = system.n_components, 1e-6
    for _ in range(20):
        psi = rng.uniform(-2, 2, n)
        fd = np.column_stack([
            (system.flux(psi + h * e) - system.flux(psi - h * e)) / (2 * h) for e in np.eye(n)
        ])
        jac = system.jacobian(psi)
        assert np.allclose(fd, jac, rtol=1e-6, atol=1e-6 * np.max(np.abs(jac)))


def test_vectorized_shapes():
    s = make_burgers_transport(1.0)
    psi = np.zeros((2, 3, 4))
    assert s.flux(psi).shape == (2, 3, 4)
    assert s.jacobian(psi).shape == (2, 2, 3, 4)
    assert s.diffusion(psi).shape == (2, 2, 3, 4)


def test_make_system_labels():
    assert make_system("burgers").label == "burgers"
    assert make_system("burgers-transport", 0.5).label == "burgers-transport"
    with pytest.raises(ValueError):
        make_system("euler")
