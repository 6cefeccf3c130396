"""Small tanh MLPs with hand-rolled gradients.

Two hidden layers of 64 by default.  The policy is a diagonal Gaussian whose
mean comes from an MLP and whose log standard deviation is a free parameter
vector; the critic is an MLP over the concatenated state and action.  Both
expose exactly what the one-step actor-critic update needs: the gradient of
log pi (policy) and of Q (critic) with respect to their own parameters,
scaled and added in place.
"""

from __future__ import annotations

import numpy as np

HIDDEN = (64, 64)


class MLP:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, hidden=HIDDEN):
        sizes = (in_dim, *hidden, out_dim)
        self.weights = [
            rng.normal(0.0, 1.0 / np.sqrt(a), size=(a, b)) for a, b in zip(sizes, sizes[1:])
        ]
        self.biases = [np.zeros(b) for b in sizes[1:]]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list]:
        h = np.asarray(x, dtype=float)
        cache = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            pre = h @ w + b
            out = pre if i == last else np.tanh(pre)
            cache.append((h, out, i == last))
            h = out
        return h, cache

    def backward(self, cache: list, grad_out: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Gradients of sum(grad_out * output) w.r.t. weights and biases."""
        grads = []
        g = np.asarray(grad_out, dtype=float)
        for (inp, out, is_last), w in zip(reversed(cache), reversed(self.weights)):
            if not is_last:
                g = g * (1.0 - out**2)
            grads.append((np.outer(inp, g), g.copy()))
            g = g @ w.T
        grads.reverse()
        return grads

    def apply(self, grads: list, scale: float) -> None:
        for (gw, gb), w, b in zip(grads, self.weights, self.biases):
            w += scale * gw
            b += scale * gb

    def params_flat(self) -> np.ndarray:
        return np.concatenate([w.ravel() for w in self.weights] + [b for b in self.biases])

    def save_into(self, store: dict, prefix: str) -> None:
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            store[f"{prefix}_w{i}"] = w
            store[f"{prefix}_b{i}"] = b

    def load_from(self, store, prefix: str) -> None:
        for i in range(len(self.weights)):
            self.weights[i] = np.array(store[f"{prefix}_w{i}"])
            self.biases[i] = np.array(store[f"{prefix}_b{i}"])


class GaussianPolicy:
    """pi(a|s) = N(mean(s), diag(exp(log_std))^2), actions squashed by clip at use."""

    def __init__(self, obs_dim: int, action_dim: int, rng: np.random.Generator, init_log_std=-0.5):
        self.net = MLP(obs_dim, action_dim, rng)
        self.log_std = np.full(action_dim, float(init_log_std))

    def mean(self, obs: np.ndarray) -> np.ndarray:
        out, _ = self.net.forward(obs)
        return out

    def sample(self, obs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mean, _ = self.net.forward(obs)
        return mean + np.exp(self.log_std) * rng.standard_normal(mean.shape)

    def update(self, obs: np.ndarray, action: np.ndarray, scale: float) -> None:
        """parameters += scale * grad log pi(action | obs)."""
        mean, cache = self.net.forward(obs)
        var = np.exp(2.0 * self.log_std)
        d_mean = (action - mean) / var
        self.net.apply(self.net.backward(cache, d_mean), scale)
        d_log_std = (action - mean) ** 2 / var - 1.0
        self.log_std += scale * d_log_std
        np.clip(self.log_std, -3.0, 1.0, out=self.log_std)

    def save(self, path) -> None:
        store: dict = {"log_std": self.log_std}
        self.net.save_into(store, "pi")
        np.savez(path, **store)

    @classmethod
    def load(cls, path, obs_dim: int, action_dim: int) -> "GaussianPolicy":
        data = np.load(path)
        policy = cls(obs_dim, action_dim, np.random.default_rng(0))
        policy.net.load_from(data, "pi")
        policy.log_std = np.array(data["log_std"])
        return policy


class QCritic:
    def __init__(self, obs_dim: int, action_dim: int, rng: np.random.Generator):
        self.net = MLP(obs_dim + action_dim, 1, rng)

    def value(self, obs: np.ndarray, action: np.ndarray) -> float:
        out, _ = self.net.forward(np.concatenate([obs, np.asarray(action, dtype=float)]))
        return float(out[0])

    def update(self, obs: np.ndarray, action: np.ndarray, scale: float) -> None:
        """parameters += scale * grad Q(obs, action)."""
        _, cache = self.net.forward(np.concatenate([obs, np.asarray(action, dtype=float)]))
        self.net.apply(self.net.backward(cache, np.ones(1)), scale)
