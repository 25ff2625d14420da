"""Minimal numpy layers with hand-written backward passes.

Every layer caches what it needs from ``forward`` and consumes it in
``backward``.  Parameters are drawn in float64 and cast to the network's
compute dtype; keep float64 wherever finite-difference checks matter.

Modes: ``"point"`` disables dropout, ``"train"`` and ``"sample"`` enable it.
"""
import numpy as np

STOCHASTIC_MODES = ("train", "sample")


class Layer:
    def __init__(self):
        self.params = {}
        self.grads = {}

    def forward(self, x, mode="point", rng=None):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def zero_grad(self):
        for k, v in self.params.items():
            self.grads[k] = np.zeros_like(v)

    def astype(self, dtype):
        self.params = {k: v.astype(dtype) for k, v in self.params.items()}
        self.zero_grad()


class Dense(Layer):
    """Affine map ``x @ W + b``.

    ``init="he"`` draws normal weights with variance 2/fan_in (rectifier
    friendly); ``init="small"`` draws uniform weights in +-1/sqrt(fan_in).
    """

    def __init__(self, n_in, n_out, rng, init="he"):
        super().__init__()
        if init == "he":
            w = rng.normal(0.0, np.sqrt(2.0 / n_in), size=(n_in, n_out))
        elif init == "small":
            lim = 1.0 / np.sqrt(n_in)
            w = rng.uniform(-lim, lim, size=(n_in, n_out))
        else:
            raise ValueError(f"unknown init {init!r}")
        self.params = {"W": w, "b": np.zeros(n_out)}
        self.zero_grad()

    def forward(self, x, mode="point", rng=None):
        self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, dout):
        self.grads["W"] += self._x.T @ dout
        self.grads["b"] += dout.sum(axis=0)
        return dout @ self.params["W"].T


class ReLU(Layer):
    def forward(self, x, mode="point", rng=None):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dout):
        return np.where(self._mask, dout, 0.0)

    def decision_masks(self):
        return (self._mask,)


class Dropout(Layer):
    """Inverted dropout: kept units are scaled by 1/(1-rate)."""

    def __init__(self, rate):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        self.rate = rate

    def forward(self, x, mode="point", rng=None):
        # rate 0 must not touch the rng so stochastic and point modes agree exactly
        if mode not in STOCHASTIC_MODES or self.rate == 0.0:
            self._scale = None
            return x
        keep = rng.random(x.shape) >= self.rate
        self._scale = (keep / (1.0 - self.rate)).astype(x.dtype)
        return x * self._scale

    def backward(self, dout):
        if self._scale is None:
            return dout
        return dout * self._scale


class Reshape(Layer):
    def __init__(self, shape):
        super().__init__()
        self.shape = tuple(shape)

    def forward(self, x, mode="point", rng=None):
        self._in_shape = x.shape
        return x.reshape((x.shape[0],) + self.shape)

    def backward(self, dout):
        return dout.reshape(self._in_shape)


class Conv2D(Layer):
    """Stride-1 convolution with zero 'same' padding on NHWC arrays.

    The kernel is stored as ``(k, k, in_ch, out_ch)``.  With
    ``input_grad=False`` the backward pass skips the input gradient (first
    layer of a network).
    """

    def __init__(self, in_ch, out_ch, rng, kernel=3, input_grad=True):
        super().__init__()
        if kernel % 2 != 1:
            raise ValueError("kernel size must be odd")
        self.k = kernel
        self.input_grad = input_grad
        fan_in = in_ch * kernel * kernel
        w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(kernel, kernel, in_ch, out_ch))
        self.params = {"W": w, "b": np.zeros(out_ch)}
        self.zero_grad()

    def _cols(self, x):
        # (N, H, W, C) -> (N, H, W, k*k*C), patch order (row, col, channel)
        p = self.k // 2
        n, h, w, _ = x.shape
        xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))
        return np.concatenate(
            [xp[:, i : i + h, j : j + w, :] for i in range(self.k) for j in range(self.k)], axis=-1
        )

    def forward(self, x, mode="point", rng=None):
        self._cols_x = self._cols(x)
        W = self.params["W"]
        # 2-D matmuls: numpy would otherwise loop over the leading axes
        out = self._cols_x.reshape(-1, self._cols_x.shape[-1]) @ W.reshape(-1, W.shape[-1])
        return out.reshape(x.shape[:3] + (W.shape[-1],)) + self.params["b"]

    def backward(self, dout):
        W = self.params["W"]
        f = W.shape[-1]
        cols = self._cols_x
        self.grads["W"] += (cols.reshape(-1, cols.shape[-1]).T @ dout.reshape(-1, f)).reshape(W.shape)
        self.grads["b"] += dout.sum(axis=(0, 1, 2))
        if not self.input_grad:
            return None
        # input gradient: same-padded correlation of dout with the spatially flipped, transposed kernel
        flipped = W[::-1, ::-1].transpose(0, 1, 3, 2)  # k, k, F, C
        dcols = self._cols(dout)
        dx = dcols.reshape(-1, dcols.shape[-1]) @ flipped.reshape(-1, W.shape[2])
        return dx.reshape(dout.shape[:3] + (W.shape[2],))


class MaxPool2D(Layer):
    """2x2 max pooling with stride 2 on NHWC arrays; odd trailing rows/columns are dropped.

    The gradient goes to the first maximal entry of each window in
    row-major order.
    """

    def forward(self, x, mode="point", rng=None):
        h2, w2 = x.shape[1] // 2, x.shape[2] // 2
        self._x_shape = x.shape
        q = [x[:, di : 2 * h2 : 2, dj : 2 * w2 : 2, :] for di in (0, 1) for dj in (0, 1)]
        out = np.maximum(np.maximum(q[0], q[1]), np.maximum(q[2], q[3]))
        taken = np.zeros(out.shape, dtype=bool)
        self._masks = []
        for part in q:
            m = (part == out) & ~taken
            taken |= m
            self._masks.append(m)
        return out

    def backward(self, dout):
        dx = np.zeros(self._x_shape, dtype=dout.dtype)
        h2, w2 = dout.shape[1], dout.shape[2]
        for (di, dj), m in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self._masks):
            dx[:, di : 2 * h2 : 2, dj : 2 * w2 : 2, :] = np.where(m, dout, 0.0)
        return dx

    def decision_masks(self):
        return tuple(self._masks)


class Flatten(Layer):
    def forward(self, x, mode="point", rng=None):
        self._in_shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(self._in_shape)


class Sequential:
    def __init__(self, layers, dtype=np.float64):
        self.layers = list(layers)
        self.dtype = np.dtype(dtype)
        for layer in self.layers:
            layer.astype(self.dtype)

    def forward(self, x, mode="point", rng=None):
        for layer in self.layers:
            x = layer.forward(x, mode, rng)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
            if dout is None:
                break
        return dout

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()

    def parameters(self):
        """List of ``(layer, name)`` pairs in a fixed order."""
        return [(layer, k) for layer in self.layers for k in sorted(layer.params)]
