"""Layered networks of thermodynamic neurons.

Layers run one after the other: every neuron in layer l+1 reads, as its
input bath temperatures, the steady outputs of the layer-l neurons it is
wired to (an ideal infinite bath at that temperature).  Training happens
on the equivalent sigmoid network with backpropagation and ADAM, after
which each unit's weights are rescaled to unit margin and compiled with
`weights_to_neuron`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, StructuralError, TrainingError
from .designer import DesignConfig, TruthTable, weights_to_neuron
from .neuron import NeuronSpec, steady_output

__all__ = ["NetworkSpec", "NetworkResponse", "eval_network", "train_network"]


@dataclass(frozen=True)
class NetworkSpec:
    """Strictly layered, acyclic wiring of neurons sharing common rails."""

    n_inputs: int
    layers: tuple[tuple[NeuronSpec, ...], ...]
    wiring: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if self.n_inputs < 1:
            raise StructuralError("network needs at least one primary input")
        if len(self.layers) != len(self.wiring) or not self.layers:
            raise StructuralError("layers and wiring must align and be non-empty")
        rails = None
        width = self.n_inputs
        for li, (layer, wires) in enumerate(zip(self.layers, self.wiring)):
            if len(layer) != len(wires) or not layer:
                raise StructuralError(f"layer {li}: neuron/wiring count mismatch")
            for ni, (neuron, feed) in enumerate(zip(layer, wires)):
                if neuron.n != len(feed):
                    raise StructuralError(
                        f"layer {li} neuron {ni}: arity {neuron.n} != "
                        f"wiring width {len(feed)}")
                if any(not 0 <= k < width for k in feed):
                    raise StructuralError(
                        f"layer {li} neuron {ni}: wiring index out of range")
                r = (neuron.beta_hot, neuron.beta_cold)
                if rails is None:
                    rails = r
                elif r != rails:
                    raise StructuralError("all neurons must share the same rails")
            width = len(layer)

    @property
    def n_layers(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class NetworkResponse:
    """Per-layer steady outputs plus the final reservoir temperature."""

    layer_outputs: tuple[tuple[float, ...], ...]
    final: float


def eval_network(net: NetworkSpec, inputs: Sequence[float]) -> NetworkResponse:
    """Sequential steady-state composition, layer by layer."""
    values = tuple(float(b) for b in inputs)
    if len(values) != net.n_inputs:
        raise StructuralError(f"expected {net.n_inputs} inputs, got {len(values)}")
    per_layer = []
    for layer, wires in zip(net.layers, net.wiring):
        outs = tuple(steady_output(neuron, tuple(values[k] for k in feed)).beta_z_inf
                     for neuron, feed in zip(layer, wires))
        per_layer.append(outs)
        values = outs
    return NetworkResponse(layer_outputs=tuple(per_layer), final=per_layer[-1][-1])


def _forward(x, weights, biases):
    acts = [x]
    for w, b in zip(weights, biases):
        z = acts[-1] @ w.T + b
        acts.append(1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0))))
    return acts


def _binarized_margins(x_rows, weights, biases):
    """Propagate hard 0/1 activations; collect per-unit margins over rows."""
    acts = x_rows
    margins = []
    for w, b in zip(weights, biases):
        pre = acts @ w.T + b
        margins.append(np.abs(pre).min(axis=0))
        acts = (pre > 0).astype(float)
    return margins, acts[:, -1]


def train_network(table: TruthTable, topology: Sequence[int],
                  config: DesignConfig | None = None) -> NetworkSpec:
    """Backprop + ADAM on the equivalent sigmoid network, then compile each unit.

    The topology lists layer widths after the inputs and must end in 1.
    Training is deterministic for a given seed.  Raises `TrainingError`
    with the final loss if the trained design does not reproduce the table.
    """
    config = config or DesignConfig()
    topology = tuple(int(s) for s in topology)
    if not topology or topology[-1] != 1:
        raise ConfigError("topology must end in a single output neuron")
    if any(s < 1 for s in topology):
        raise ConfigError("layer sizes must be positive")
    sizes = (table.n,) + topology
    rng = np.random.default_rng(config.seed)
    weights = [rng.normal(0.0, 1.0, (sizes[i + 1], sizes[i]))
               for i in range(len(topology))]
    biases = [rng.normal(0.0, 1.0, sizes[i + 1]) for i in range(len(topology))]

    x_rows = np.array([bits for bits, _ in table.rows()], dtype=float)
    targets = np.array(table.outputs, dtype=float)

    adam_m = [np.zeros_like(w) for w in weights] + [np.zeros_like(b) for b in biases]
    adam_v = [np.zeros_like(w) for w in weights] + [np.zeros_like(b) for b in biases]
    beta1, beta2, eps_adam = 0.9, 0.999, 1e-8
    loss = np.inf
    for step in range(1, config.net_epochs + 1):
        acts = _forward(x_rows, weights, biases)
        out = acts[-1][:, 0]
        loss = float(-(targets * np.log(out + 1e-12)
                       + (1 - targets) * np.log(1 - out + 1e-12)).mean())
        delta = (out - targets)[:, None] / len(targets)
        grads_w, grads_b = [], []
        for li in reversed(range(len(weights))):
            grads_w.insert(0, delta.T @ acts[li])
            grads_b.insert(0, delta.sum(axis=0))
            if li > 0:
                a = acts[li]
                delta = (delta @ weights[li]) * a * (1.0 - a)
        params = weights + biases
        grads = grads_w + grads_b
        for i, (p, g) in enumerate(zip(params, grads)):
            adam_m[i] = beta1 * adam_m[i] + (1 - beta1) * g
            adam_v[i] = beta2 * adam_v[i] + (1 - beta2) * g * g
            m_hat = adam_m[i] / (1 - beta1 ** step)
            v_hat = adam_v[i] / (1 - beta2 ** step)
            p -= config.net_learning_rate * m_hat / (np.sqrt(v_hat) + eps_adam)
        if step % 25 == 0:
            margins, final_bits = _binarized_margins(x_rows, weights, biases)
            if (np.all(final_bits == targets)
                    and min(m.min() for m in margins) >= 1.0):
                break

    margins, final_bits = _binarized_margins(x_rows, weights, biases)
    if not np.all(final_bits == targets):
        bad = [bits for (bits, _), fb, tg in
               zip(table.rows(), final_bits, targets) if fb != tg]
        raise TrainingError(
            f"network training failed on rows {bad} after "
            f"{config.net_epochs} epochs (final loss {loss:.4g}); "
            "try a different seed", loss=loss)

    layers, wiring = [], []
    for li, (w, b) in enumerate(zip(weights, biases)):
        units, feeds = [], []
        for j in range(w.shape[0]):
            margin = margins[li][j]
            if margin <= 0:
                raise TrainingError(
                    f"layer {li} unit {j} has zero margin; try a different seed",
                    loss=loss)
            unit_w = np.concatenate(([b[j]], w[j])) / margin
            units.append(weights_to_neuron(unit_w, config))
            feeds.append(tuple(range(w.shape[1])))
        layers.append(tuple(units))
        wiring.append(tuple(feeds))
    net = NetworkSpec(n_inputs=table.n, layers=tuple(layers), wiring=tuple(wiring))

    # Behavioral check through the exact steady-state composition.
    rails = (config.beta_hot, config.beta_cold)
    span = rails[1] - rails[0]
    lo_edge, hi_edge = rails[0] + 0.1 * span, rails[1] - 0.1 * span
    for bits, out in table.rows():
        betas = tuple(rails[1] if b else rails[0] for b in bits)
        final = eval_network(net, betas).final
        decoded = 0 if final <= lo_edge else (1 if final >= hi_edge else None)
        if decoded != out:
            raise TrainingError(
                f"trained network mis-decodes row {bits}: beta_z = {final:.4g}; "
                "try a different seed or a larger alpha", loss=loss)
    return net
