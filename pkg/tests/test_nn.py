import numpy as np
import pytest

from padgan import nn


def naive_forward(net, x):
    out = np.array(x, dtype=float)
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        rows = []
        for row in out:
            z = [sum(row[k] * w[k, j] for k in range(w.shape[0])) + b[j] for j in range(w.shape[1])]
            if i < len(net.weights) - 1:
                z = [v if v > 0 else net.leaky_slope * v for v in z]
            elif net.output_activation == "sigmoid":
                z = [1 / (1 + np.exp(-v)) for v in z]
            rows.append(z)
        out = np.array(rows)
    return out


def rel_err(a, b):
    a, b = np.ravel(a), np.ravel(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def fd_param_grads(net, x, seed_grad, h=1e-4):
    """Central differences of sum(outputs * seed_grad) with respect to every parameter."""
    out = []
    for group in ("weights", "biases"):
        for i, p in enumerate(getattr(net, group)):
            g = np.zeros_like(p)
            for idx in np.ndindex(p.shape):
                vals = []
                for sign in (1, -1):
                    q = p.copy()
                    q[idx] += sign * h
                    params = list(getattr(net, group))
                    params[i] = q
                    other = dict(weights=net.weights, biases=net.biases)
                    other[group] = tuple(params)
                    moved = nn.DenseNetwork(net.layer_sizes, other["weights"], other["biases"],
                                            net.hidden_activation, net.output_activation, net.leaky_slope)
                    vals.append(np.sum(nn.forward(moved, x)[0] * seed_grad))
                g[idx] = (vals[0] - vals[1]) / (2 * h)
            out.append(g)
    return np.concatenate([g.ravel() for g in out])


def test_zero_network_outputs_zero():
    net = nn.init_network([3, 4, 2], seed=0)
    zero = nn.DenseNetwork(net.layer_sizes, tuple(0 * w for w in net.weights), net.biases)
    x = np.random.default_rng(1).normal(size=(5, 3))
    assert np.all(zero(x) == 0)


def test_identity_layer_passes_input_through():
    net = nn.DenseNetwork((3, 3), (np.eye(3),), (np.zeros(3),), output_activation="identity")
    x = np.random.default_rng(0).normal(size=(4, 3))
    np.testing.assert_array_equal(net(x), x)
    _, tape = nn.forward(net, x)
    _, dx = nn.backward(net, tape, np.ones_like(x))
    np.testing.assert_array_equal(dx, np.ones_like(x))


@pytest.mark.parametrize("out_act", ["identity", "sigmoid"])
def test_forward_matches_naive(out_act):
    net = nn.init_network([2, 16, 16, 2], output_activation=out_act, seed=3)
    x = np.random.default_rng(4).normal(size=(7, 2))
    np.testing.assert_allclose(net(x), naive_forward(net, x), rtol=1e-12, atol=1e-12)


def test_forward_rejects_bad_shape():
    net = nn.init_network([2, 4, 1], seed=0)
    with pytest.raises(ValueError):
        nn.forward(net, np.zeros((3, 5)))
    with pytest.raises(ValueError):
        nn.forward(net, np.array([[np.nan, 0.0]]))


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("sizes,out_act", [([5, 8, 8, 2], "identity"), ([2, 8, 8, 1], "sigmoid")])
def test_backward_matches_finite_differences(seed, sizes, out_act):
    rng = np.random.default_rng(seed)
    net = nn.init_network(sizes, output_activation=out_act, seed=seed)
    x = rng.normal(size=(4, sizes[0]))
    seed_grad = rng.normal(size=(4, sizes[-1]))
    _, tape = nn.forward(net, x)
    grads, dx = nn.backward(net, tape, seed_grad)
    assert rel_err(grads.flat(), fd_param_grads(net, x, seed_grad)) < 1e-3

    h = 1e-4
    fd_x = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = h
        fd_x[idx] = (np.sum(net(x + e) * seed_grad) - np.sum(net(x - e) * seed_grad)) / (2 * h)
    assert rel_err(dx, fd_x) < 1e-3


def test_from_logits_skips_sigmoid():
    net = nn.init_network([2, 4, 1], output_activation="sigmoid", seed=0)
    x = np.random.default_rng(0).normal(size=(3, 2))
    out, tape = nn.forward(net, x)
    g_logits = np.random.default_rng(1).normal(size=out.shape)
    a, _ = nn.backward(net, tape, g_logits, from_logits=True)
    b, _ = nn.backward(net, tape, g_logits / (out * (1 - out)))
    np.testing.assert_allclose(a.flat(), b.flat(), rtol=1e-10)


def test_zero_seed_gives_zero_gradients():
    net = nn.init_network([5, 8, 2], seed=0)
    x = np.random.default_rng(0).normal(size=(3, 5))
    _, tape = nn.forward(net, x)
    grads, dx = nn.backward(net, tape, np.zeros((3, 2)))
    assert not grads.flat().any() and not dx.any()


def test_sigmoid_outputs_in_open_interval():
    net = nn.init_network([2, 8, 1], output_activation="sigmoid", seed=0)
    y = net(np.random.default_rng(1).normal(scale=5.0, size=(500, 2)))
    assert np.all((y > 0) & (y < 1))


def test_forward_is_pure():
    net = nn.init_network([2, 8, 2], seed=0)
    x = np.random.default_rng(0).normal(size=(3, 2))
    np.testing.assert_array_equal(net(x), net(x))


def test_init_reproducible_and_seed_dependent():
    a = nn.init_network([5, 64, 2], seed=11)
    b = nn.init_network([5, 64, 2], seed=11)
    c = nn.init_network([5, 64, 2], seed=12)
    for wa, wb in zip(a.parameters(), b.parameters()):
        np.testing.assert_array_equal(wa, wb)
    assert not np.array_equal(a.weights[0], c.weights[0])
    assert all(not bias.any() for bias in a.biases)


def test_init_variance_is_he_scaled():
    net = nn.init_network([10, 100], seed=0)
    var = net.weights[0].var()
    assert abs(var / (2 / 10) - 1) < 0.2


def test_init_rejects_short_layer_list():
    with pytest.raises(ValueError):
        nn.init_network([3])
    with pytest.raises(ValueError):
        nn.init_network([])


def _grads_like(net, fill):
    return nn.ParamGrads([np.full_like(w, fill) for w in net.weights], [np.full_like(b, fill) for b in net.biases])


def test_adam_zero_gradient_keeps_parameters():
    net = nn.init_network([3, 4, 2], seed=0)
    state = nn.OptimizerState.for_network(net, learning_rate=1e-3)
    new, st = nn.adam_step(net, state, _grads_like(net, 0.0))
    for a, b in zip(net.parameters(), new.parameters()):
        np.testing.assert_array_equal(a, b)
    assert st.step == 1


def test_adam_first_step_moves_by_learning_rate():
    net = nn.init_network([3, 4, 2], seed=0)
    state = nn.OptimizerState.for_network(net, learning_rate=1e-3)
    rng = np.random.default_rng(0)
    grads = nn.ParamGrads([rng.normal(size=w.shape) for w in net.weights],
                          [rng.normal(size=b.shape) for b in net.biases])
    new, _ = nn.adam_step(net, state, grads)
    for p, q, g in zip(net.parameters(), new.parameters(), (*grads.weights, *grads.biases)):
        # m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps)
        np.testing.assert_allclose(p - q, 1e-3 * np.sign(g), rtol=1e-5)


def test_adam_deterministic_and_counts_steps():
    net = nn.init_network([3, 4, 2], seed=0)
    state = nn.OptimizerState.for_network(net)
    g = _grads_like(net, 0.3)
    a, sa = nn.adam_step(*nn.adam_step(net, state, g), g)
    b, sb = nn.adam_step(*nn.adam_step(net, state, g), g)
    for x, y in zip(a.parameters(), b.parameters()):
        np.testing.assert_array_equal(x, y)
    assert sa.step == sb.step == 2
    assert all(m.shape == w.shape for m, w in zip(sa.m_weights, net.weights))


def test_adam_rejects_non_finite():
    net = nn.init_network([3, 4, 2], seed=0)
    state = nn.OptimizerState.for_network(net)
    g = _grads_like(net, 0.0)
    g.weights[0][0, 0] = np.nan
    with pytest.raises(FloatingPointError):
        nn.adam_step(net, state, g)
