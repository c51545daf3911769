"""Small dense networks with hand-written batched backprop.

Everything here is deliberately tiny and explicit: affine layers, three
activations, a scalar-output MLP used for baseline and surrogate nets,
and a momentum accumulator.  No autodiff; callers control exactly which
gradients flow.

Sign convention: Momentum.ascend moves parameters UP the supplied
gradient (we maximize objectives); pass negated gradients to descend.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "log_sigmoid",
    "sigmoid",
    "bern_ll",
    "bern_ll_grad_t",
    "bern_ll_grad_s",
    "Affine",
    "MLP",
    "Momentum",
]


def log_sigmoid(t: np.ndarray) -> np.ndarray:
    """log sigma(t), stable for large |t|."""
    return -np.logaddexp(0.0, -np.asarray(t, dtype=np.float64))


def sigmoid(t: np.ndarray) -> np.ndarray:
    return np.exp(log_sigmoid(t))


def bern_ll(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """log probability of outcome s in {-1,+1} under logit t, extended
    linearly to fractional s: ((1+s)/2) log sigma(t) + ((1-s)/2) log sigma(-t)."""
    s = np.asarray(s, dtype=np.float64)
    return 0.5 * (1.0 + s) * log_sigmoid(t) + 0.5 * (1.0 - s) * log_sigmoid(-t)


def bern_ll_grad_t(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """d bern_ll / d t = (1+s)/2 - sigma(t)."""
    return 0.5 * (1.0 + np.asarray(s, dtype=np.float64)) - sigmoid(t)


def bern_ll_grad_s(t: np.ndarray) -> np.ndarray:
    """d bern_ll / d s = (log sigma(t) - log sigma(-t)) / 2 = t / 2."""
    return 0.5 * np.asarray(t, dtype=np.float64)


def _act(name: str):
    if name == "tanh":
        return np.tanh, lambda pre, out: 1.0 - out * out
    if name == "relu":
        return (lambda z: np.maximum(z, 0.0)), (lambda pre, out: (pre > 0.0) * 1.0)
    if name == "identity":
        return (lambda z: z), (lambda pre, out: np.ones_like(pre))
    raise ValueError("unknown activation %r" % name)


class Affine:
    """y = x @ W.T + b with W shape (n_out, n_in)."""

    def __init__(self, rng: np.random.Generator, n_in: int, n_out: int,
                 scale: float | None = None):
        s = (1.0 / np.sqrt(n_in)) if scale is None else scale
        self.W = rng.normal(0.0, s, size=(n_out, n_in))
        self.b = np.zeros(n_out)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x @ self.W.T + self.b

    def grads(self, x: np.ndarray, dout: np.ndarray):
        """Parameter grads and input grad for a batch: dout is (B, n_out)."""
        return dout.T @ x, dout.sum(axis=0), dout @ self.W

    def params(self) -> list[np.ndarray]:
        return [self.W, self.b]


class MLP:
    """Feedforward net with a scalar head: sizes like (n_in, h1, h2, 1).

    Hidden layers share one activation; the head is linear.  forward
    returns the (B,) outputs plus a cache for backward.
    """

    def __init__(self, rng: np.random.Generator, sizes: tuple[int, ...],
                 hidden_act: str = "tanh"):
        if len(sizes) < 2 or sizes[-1] != 1:
            raise ValueError("sizes must end in a scalar head")
        self.layers = [Affine(rng, sizes[i], sizes[i + 1])
                       for i in range(len(sizes) - 1)]
        self.act_name = hidden_act
        self._act, self._dact = _act(hidden_act)

    def forward(self, x: np.ndarray):
        x = np.asarray(x, dtype=np.float64)
        inputs, pres, outs = [], [], []
        h = x
        for k, layer in enumerate(self.layers):
            inputs.append(h)
            z = layer.forward(h)
            pres.append(z)
            h = self._act(z) if k < len(self.layers) - 1 else z
            outs.append(h)
        return h[:, 0], (inputs, pres, outs)

    def backward(self, cache, dout: np.ndarray):
        """dout is (B,) on the scalar output; returns (param grads, dx)."""
        inputs, pres, outs = cache
        grads: list[np.ndarray] = []
        d = np.asarray(dout, dtype=np.float64)[:, None]
        for k in range(len(self.layers) - 1, -1, -1):
            if k < len(self.layers) - 1:
                d = d * self._dact(pres[k], outs[k])
            gW, gb, d = self.layers[k].grads(inputs[k], d)
            grads.append(gb)
            grads.append(gW)
        grads.reverse()
        return grads, d

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def params(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    def zero_(self):
        """Set every parameter to zero in place (diagnostic use)."""
        for p in self.params():
            p[...] = 0.0


class Momentum:
    """Classic momentum accumulator over a fixed parameter list."""

    def __init__(self, params: list[np.ndarray], momentum: float):
        if not 0.0 <= momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        self.params = params
        self.momentum = momentum
        self.vel = [np.zeros_like(p) for p in params]

    def ascend(self, grads: list[np.ndarray], lr: float):
        if len(grads) != len(self.params):
            raise ValueError("gradient list length mismatch")
        for p, v, g in zip(self.params, self.vel, grads):
            v *= self.momentum
            v += g
            p += lr * v
