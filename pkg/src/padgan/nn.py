"""Dense feed-forward networks with hand-written backprop and Adam."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

HIDDEN_ACTIVATIONS = ("relu", "leaky_relu", "tanh")
OUTPUT_ACTIVATIONS = ("identity", "sigmoid")


@dataclass(frozen=True)
class DenseNetwork:
    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    hidden_activation: str = "leaky_relu"
    output_activation: str = "identity"
    leaky_slope: float = 0.2

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("a network needs at least an input and an output layer")
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("parameter count does not match layer_sizes")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[i], self.layer_sizes[i + 1])
            if w.shape != expected or b.shape != (expected[1],):
                raise ValueError(f"layer {i}: weight {w.shape} / bias {b.shape}, expected {expected}")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"unknown output activation {self.output_activation!r}")

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def __call__(self, inputs: np.ndarray) -> np.ndarray:
        return forward(self, inputs)[0]


@dataclass(frozen=True)
class Tape:
    """Cached activations of one forward pass.

    ``inputs[i]`` is the input to layer ``i`` and ``preacts[i]`` its affine
    output before the activation. ``outputs`` is the network output.
    """

    inputs: list[np.ndarray]
    preacts: list[np.ndarray]
    outputs: np.ndarray

    @property
    def logits(self) -> np.ndarray:
        return self.preacts[-1]


@dataclass
class ParamGrads:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def flat(self) -> np.ndarray:
        return np.concatenate([g.ravel() for g in (*self.weights, *self.biases)])

    def __add__(self, other: ParamGrads) -> ParamGrads:
        return ParamGrads(
            [a + b for a, b in zip(self.weights, other.weights)],
            [a + b for a, b in zip(self.biases, other.biases)],
        )

    def scaled(self, factor: float) -> ParamGrads:
        return ParamGrads([factor * g for g in self.weights], [factor * g for g in self.biases])


def sigmoid(a: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(a, dtype=float)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def _hidden(net: DenseNetwork, z: np.ndarray) -> np.ndarray:
    if net.hidden_activation == "relu":
        return np.maximum(z, 0.0)
    if net.hidden_activation == "leaky_relu":
        return np.where(z > 0, z, net.leaky_slope * z)
    return np.tanh(z)


def _hidden_grad(net: DenseNetwork, z: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    if net.hidden_activation == "relu":
        return upstream * (z > 0)
    if net.hidden_activation == "leaky_relu":
        return np.where(z > 0, upstream, net.leaky_slope * upstream)
    t = np.tanh(z)
    return upstream * (1.0 - t * t)


def forward(net: DenseNetwork, inputs: np.ndarray) -> tuple[np.ndarray, Tape]:
    x = np.asarray(inputs, dtype=float)
    if x.ndim != 2 or x.shape[1] != net.in_dim:
        raise ValueError(f"expected inputs of shape (batch, {net.in_dim}), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite network input")
    layer_inputs, preacts = [], []
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        layer_inputs.append(x)
        z = x @ w + b
        preacts.append(z)
        if i < last:
            x = _hidden(net, z)
        elif net.output_activation == "sigmoid":
            x = sigmoid(z)
        else:
            x = z
    return x, Tape(layer_inputs, preacts, x)


def backward(
    net: DenseNetwork,
    tape: Tape,
    output_gradients: np.ndarray,
    from_logits: bool = False,
) -> tuple[ParamGrads, np.ndarray]:
    """Backpropagate ``dLoss/d(outputs)`` to parameters and inputs.

    With ``from_logits=True`` the gradient is taken to be with respect to the
    final pre-activation, which skips the output nonlinearity. Losses on
    sigmoid outputs use this to stay finite when the network saturates.
    """
    delta = np.asarray(output_gradients, dtype=float)
    if len(tape.preacts) != len(net.weights) or delta.shape != tape.outputs.shape:
        raise ValueError("tape or output gradient does not match the network")
    if net.output_activation == "sigmoid" and not from_logits:
        delta = delta * tape.outputs * (1.0 - tape.outputs)

    n_layers = len(net.weights)
    grad_w: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    grad_b: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    for i in range(n_layers - 1, -1, -1):
        grad_w[i] = tape.inputs[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        upstream = delta @ net.weights[i].T
        if i > 0:
            delta = _hidden_grad(net, tape.preacts[i - 1], upstream)
    return ParamGrads(grad_w, grad_b), upstream


def init_network(
    layer_sizes,
    hidden_activation: str = "leaky_relu",
    output_activation: str = "identity",
    seed=None,
    leaky_slope: float = 0.2,
) -> DenseNetwork:
    """He-initialised network: weights ~ N(0, 2/fan_in), zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2:
        raise ValueError("layer_sizes must list at least two layers")
    if any(s < 1 for s in sizes):
        raise ValueError("layer sizes must be positive")
    rng = np.random.default_rng(seed)
    weights = tuple(
        rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:])
    )
    biases = tuple(np.zeros(s) for s in sizes[1:])
    return DenseNetwork(sizes, weights, biases, hidden_activation, output_activation, leaky_slope)


@dataclass(frozen=True)
class OptimizerState:
    m_weights: tuple[np.ndarray, ...]
    m_biases: tuple[np.ndarray, ...]
    v_weights: tuple[np.ndarray, ...]
    v_biases: tuple[np.ndarray, ...]
    step: int = 0
    learning_rate: float = 1e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_network(cls, net: DenseNetwork, **hyper) -> OptimizerState:
        zw = tuple(np.zeros_like(w) for w in net.weights)
        zb = tuple(np.zeros_like(b) for b in net.biases)
        return cls(zw, zb, zw, zb, **hyper)


def adam_step(
    net: DenseNetwork, state: OptimizerState, grads: ParamGrads
) -> tuple[DenseNetwork, OptimizerState]:
    """One bias-corrected Adam update. Inputs are left untouched."""
    for g, p in zip((*grads.weights, *grads.biases), net.parameters()):
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite gradient rejected")

    t = state.step + 1
    b1, b2 = state.beta1, state.beta2
    lr_t = state.learning_rate * np.sqrt(1.0 - b2**t) / (1.0 - b1**t)
    eps_t = state.eps * np.sqrt(1.0 - b2**t)

    def update(params, grads_, ms, vs):
        new_p, new_m, new_v = [], [], []
        for p, g, m, v in zip(params, grads_, ms, vs):
            m = b1 * m + (1.0 - b1) * g
            v = b2 * v + (1.0 - b2) * g * g
            new_p.append(p - lr_t * m / (np.sqrt(v) + eps_t))
            new_m.append(m)
            new_v.append(v)
        return tuple(new_p), tuple(new_m), tuple(new_v)

    w, mw, vw = update(net.weights, grads.weights, state.m_weights, state.v_weights)
    b, mb, vb = update(net.biases, grads.biases, state.m_biases, state.v_biases)
    if not all(np.all(np.isfinite(p)) for p in (*w, *b)):
        raise FloatingPointError("update would produce non-finite parameters")
    return (
        replace(net, weights=w, biases=b),
        replace(state, m_weights=mw, m_biases=mb, v_weights=vw, v_biases=vb, step=t),
    )
