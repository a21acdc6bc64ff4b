"""Compile linearly-separable truth tables into thermodynamic neurons.

The pipeline mirrors a perceptron: train (or fix by hand) a separating
weight vector w = (w_0, ..., w_n), then map weights to machine
parameters.  Signs of the weights pick the interaction vector, magnitudes
(scaled by the steepness knob alpha) become qubit gaps, and the bias
weight sets the reference bath temperature.  The construction makes

    eps_z_machine * beta_v = alpha * (w_0 + sum_k w_k beta_k)

an algebraic identity, so the machine's virtual temperature is exactly
the perceptron's weighted sum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DesignError, NotSeparableError
from .neuron import NeuronSpec, build_neuron, steady_output
from .virtual import virtual_gap

__all__ = [
    "TruthTable",
    "DesignConfig",
    "gate_table",
    "train_perceptron",
    "weights_to_neuron",
    "preset",
    "perceptron_identity_residual",
    "search_alpha",
    "PRESET_WEIGHTS",
]


@dataclass(frozen=True)
class TruthTable:
    """Complete n-input boolean function; row index has x_1 as its MSB."""

    n: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("truth table needs at least one input")
        if len(self.outputs) != 1 << self.n:
            raise ConfigError(
                f"truth table for {self.n} inputs needs {1 << self.n} rows, "
                f"got {len(self.outputs)}")
        if any(o not in (0, 1) for o in self.outputs):
            raise ConfigError("truth table outputs must be bits")

    @classmethod
    def from_function(cls, n: int, fn: Callable[[tuple[int, ...]], int]) -> "TruthTable":
        outs = []
        for idx in range(1 << n):
            bits = tuple((idx >> (n - 1 - i)) & 1 for i in range(n))
            outs.append(int(fn(bits)))
        return cls(n=n, outputs=tuple(outs))

    @classmethod
    def from_text(cls, text: str) -> "TruthTable":
        """Parse lines of the form 'b1 b2 ... bn : r' (the colon is optional)."""
        rows = {}
        n = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.replace(":", " ").split()
            if len(tokens) < 2:
                raise ConfigError(f"truth table line {lineno}: need bits and an output")
            try:
                bits = tuple(int(t) for t in tokens[:-1])
                out = int(tokens[-1])
            except ValueError:
                raise ConfigError(f"truth table line {lineno}: non-integer token")
            if any(b not in (0, 1) for b in bits) or out not in (0, 1):
                raise ConfigError(f"truth table line {lineno}: entries must be bits")
            if n is None:
                n = len(bits)
            elif len(bits) != n:
                raise ConfigError(f"truth table line {lineno}: inconsistent arity")
            key = 0
            for b in bits:
                key = (key << 1) | b
            if key in rows:
                raise ConfigError(f"truth table line {lineno}: duplicate row")
            rows[key] = out
        if n is None:
            raise ConfigError("truth table is empty")
        if len(rows) != 1 << n:
            missing = sorted(set(range(1 << n)) - set(rows))
            raise ConfigError(
                f"truth table incomplete: {len(rows)}/{1 << n} rows "
                f"(missing indices {missing})")
        return cls(n=n, outputs=tuple(rows[k] for k in range(1 << n)))

    def rows(self):
        for idx, out in enumerate(self.outputs):
            bits = tuple((idx >> (self.n - 1 - i)) & 1 for i in range(self.n))
            yield bits, out

    def output(self, bits: Sequence[int]) -> int:
        key = 0
        for b in bits:
            key = (key << 1) | int(b)
        return self.outputs[key]


_GATE_FUNCTIONS = {
    "NOT": (1, lambda x: 1 - x[0]),
    "NOR": (2, lambda x: int(x[0] == 0 and x[1] == 0)),
    "OR": (2, lambda x: int(x[0] == 1 or x[1] == 1)),
    "AND": (2, lambda x: int(x[0] == 1 and x[1] == 1)),
    "NAND": (2, lambda x: int(not (x[0] == 1 and x[1] == 1))),
    "XOR": (2, lambda x: x[0] ^ x[1]),
    "MAJ3": (3, lambda x: int(sum(x) >= 2)),
}


def gate_table(name: str) -> TruthTable:
    """Truth table of a named gate (NOT, NOR, OR, AND, NAND, XOR, MAJ3)."""
    key = name.upper()
    if key not in _GATE_FUNCTIONS:
        raise ConfigError(f"unknown gate '{name}'; "
                          f"choose from {sorted(_GATE_FUNCTIONS)}")
    n, fn = _GATE_FUNCTIONS[key]
    return TruthTable.from_function(n, fn)


@dataclass(frozen=True)
class DesignConfig:
    """Steepness, nominal target gap, trainer settings, and physical defaults."""

    alpha: float = 20.0
    eps_z: float = 0.1
    learning_rate: float = 0.5
    epochs: int = 20_000
    seed: int = 0
    net_learning_rate: float = 0.01
    net_epochs: int = 5_000
    mu: float = 1e-4
    gamma: float = 1.0
    chi: float = 1.0
    beta_hot: float = 0.0
    beta_cold: float = 1.0
    capacity: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ConfigError("alpha must be positive")
        if not (self.eps_z > 0):
            raise ConfigError("eps_z must be positive")
        if self.epochs < 1 or self.net_epochs < 1:
            raise ConfigError("epoch counts must be positive")

    def physical(self) -> dict:
        return dict(mu=self.mu, gamma=self.gamma, chi=self.chi,
                    beta_hot=self.beta_hot, beta_cold=self.beta_cold,
                    capacity=self.capacity)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _design_matrix(table: TruthTable):
    x = np.array([bits for bits, _ in table.rows()], dtype=float)
    t = np.array(table.outputs, dtype=float)
    xb = np.hstack([np.ones((x.shape[0], 1)), x])
    return xb, t


def train_perceptron(table: TruthTable, config: DesignConfig) -> np.ndarray:
    """Cross-entropy gradient descent on a single sigmoid unit.

    Returns weights (w_0, ..., w_n) rescaled so the smallest row margin is
    exactly 1, making alpha the sole steepness knob downstream.  Raises
    `NotSeparableError` (listing the violating rows) if any row is still
    misclassified after the epoch budget.
    """
    xb, t = _design_matrix(table)
    signs = 2.0 * t - 1.0
    rng = np.random.default_rng(config.seed)
    w = rng.normal(0.0, 0.1, xb.shape[1])
    for _ in range(config.epochs):
        p = _sigmoid(xb @ w)
        w -= config.learning_rate * (xb.T @ (p - t)) / len(t)
        margins = signs * (xb @ w)
        if margins.min() >= 1.0:
            break
    margins = signs * (xb @ w)
    if margins.min() <= 0.0:
        bad = [bits for (bits, _), m in zip(table.rows(), margins) if m <= 0]
        rows = [" ".join(map(str, b)) for b in bad]
        raise NotSeparableError(
            f"table is not linearly separable: rows {rows} cannot be "
            "classified by any hyperplane found", rows=rows)
    return w / margins.min()


def weights_to_neuron(w: Sequence[float], config: DesignConfig) -> NeuronSpec:
    """Map classifier weights to a calibrated machine.

    h_k follows sign(w_k) (zero weights decouple as h_k = 0, eps_k = 0),
    gaps are alpha-scaled magnitudes with the reference gap absorbing the
    resonance bookkeeping, and beta_0 carries the bias.  The target-qubit
    gap is set to the resulting virtual gap and the modulator recalibrated.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or len(w) < 2:
        raise DesignError("need a bias weight plus at least one input weight")
    if not np.all(np.isfinite(w)):
        raise DesignError("weights must be finite")
    tail = float(w[1:].sum())
    denom = config.eps_z - tail
    if abs(denom) < 1e-9:
        raise DesignError(
            f"degenerate design: |eps_z - sum(w_k)| = {abs(denom):.3e} < 1e-9 "
            "(the bias temperature is undefined); rescale the weights")
    # h_0 must track the sign of (eps_z - sum w_k), not of w_0, so that the
    # signed virtual gap comes out at +alpha*eps_z; when the two signs agree
    # (every textbook gate) this reduces to h_0 = [w_0 < 0] with beta_0 >= 0,
    # otherwise the reference bath is population-inverted (beta_0 < 0).
    h = (0 if denom > 0 else 1,) + tuple(0 if wk >= 0 else 1 for wk in w[1:])
    eps = (config.alpha * abs(denom),) + tuple(config.alpha * abs(wk)
                                               for wk in w[1:])
    beta0 = float(w[0]) / denom
    signed_gap = -virtual_gap(h, eps)
    spec = build_neuron(eps, h, beta0, signed_gap, **config.physical())
    resid = perceptron_identity_residual(spec, w, config.alpha)
    if resid > 1e-9 * max(1.0, config.alpha * float(np.abs(w).max())):
        raise DesignError(f"perceptron identity violated (residual {resid:.3e})")
    return spec


def perceptron_identity_residual(spec: NeuronSpec, w: Sequence[float],
                                 alpha: float, trials: int = 8,
                                 seed: int = 1234) -> float:
    """max |eps_z * beta_v - alpha (w_0 + sum w_k beta_k)| over random inputs."""
    w = np.asarray(w, dtype=float)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        betas = rng.uniform(0.0, 1.0, spec.n)
        point = steady_output(spec, betas)
        target = alpha * (w[0] + float(w[1:] @ betas))
        worst = max(worst, abs(spec.eps_z * point.beta_v - target))
    return worst


PRESET_WEIGHTS = {
    # NOT is (1, -2) scaled by 1/2 so that alpha plays the role of the input gap.
    "NOT": (0.5, -1.0),
    "NOR": (1.0, -2.0, -2.0),
    "MAJ3": (-4.0, 3.0, 3.0, 3.0),
}


def preset(gate: str, config: DesignConfig | None = None) -> NeuronSpec:
    """Machine for a named gate from its fixed textbook weight vector."""
    key = gate.upper()
    if key not in PRESET_WEIGHTS:
        raise ConfigError(f"no preset weights for '{gate}'; "
                          f"choose from {sorted(PRESET_WEIGHTS)}")
    return weights_to_neuron(PRESET_WEIGHTS[key], config or DesignConfig())


def search_alpha(table: TruthTable, config: DesignConfig,
                 decode_fn: Callable[[float], int | None],
                 weights: Sequence[float] | None = None,
                 alpha_max: float = 4096.0) -> float:
    """Smallest power-of-two multiple of config.alpha that decodes every row."""
    w = (np.asarray(weights, dtype=float) if weights is not None
         else train_perceptron(table, config))
    alpha = config.alpha
    while alpha <= alpha_max:
        spec = weights_to_neuron(w, replace(config, alpha=alpha))
        ok = all(decode_fn(steady_output(spec, bits).beta_z_inf) == out
                 for bits, out in table.rows())
        if ok:
            return alpha
        alpha *= 2.0
    raise DesignError(f"no steepness up to {alpha_max} decodes the table")
