"""
smrep/nn/lstm.py
────────────────
Stacked LSTM with truncated backpropagation through time.

Per layer and step (gate rows stacked as [i, f, o, g]):

    i, f, o = sigmoid(.)      g = tanh(.)
    c_t = f * c_{t-1} + i * g
    h_t = o * tanh(c_t)

No peepholes.  Gradients never flow into the initial state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from smrep.utils.exceptions import ShapeError

LstmState = list[tuple[np.ndarray, np.ndarray]]  # one (h, c) per layer, each (B, H)


@dataclass
class LstmLayer:
    Wx: np.ndarray  # (4H, in)
    Wh: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)

    def __post_init__(self) -> None:
        H = self.hidden
        if self.Wx.shape[0] != 4 * H or self.Wh.shape != (4 * H, H) or self.b.shape != (4 * H,):
            raise ShapeError(
                f"inconsistent LSTM layer shapes Wx {self.Wx.shape}, Wh {self.Wh.shape}, b {self.b.shape}"
            )

    @property
    def hidden(self) -> int:
        return self.Wh.shape[1]

    @property
    def in_features(self) -> int:
        return self.Wx.shape[1]


@dataclass
class LstmStack:
    layers: list[LstmLayer]

    def __post_init__(self) -> None:
        for below, above in zip(self.layers, self.layers[1:]):
            if above.in_features != below.hidden:
                raise ShapeError(
                    f"LSTM layer expects {above.in_features} inputs but the layer below has {below.hidden} units"
                )

    def zero_state(self, batch: int, dtype=np.float64) -> LstmState:
        return [(np.zeros((batch, l.hidden), dtype), np.zeros((batch, l.hidden), dtype)) for l in self.layers]


@dataclass
class _LayerCache:
    xs: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    tanh_c: np.ndarray


@dataclass
class LstmCache:
    layers: list[_LayerCache]


def _layer_forward(layer: LstmLayer, xs: np.ndarray, h: np.ndarray, c: np.ndarray):
    T, B, _ = xs.shape
    H = layer.hidden
    xw = xs @ layer.Wx.T + layer.b
    shape = (T, B, H)
    cache = _LayerCache(
        xs=xs,
        h_prev=np.empty(shape, xs.dtype),
        c_prev=np.empty(shape, xs.dtype),
        i=np.empty(shape, xs.dtype),
        f=np.empty(shape, xs.dtype),
        o=np.empty(shape, xs.dtype),
        g=np.empty(shape, xs.dtype),
        tanh_c=np.empty(shape, xs.dtype),
    )
    hs = np.empty(shape, xs.dtype)
    for t in range(T):
        cache.h_prev[t], cache.c_prev[t] = h, c
        a = xw[t] + h @ layer.Wh.T
        i = expit(a[:, :H])
        f = expit(a[:, H:2 * H])
        o = expit(a[:, 2 * H:3 * H])
        g = np.tanh(a[:, 3 * H:])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        cache.i[t], cache.f[t], cache.o[t], cache.g[t], cache.tanh_c[t] = i, f, o, g, tc
        hs[t] = h
    return hs, (h, c), cache


def lstm_forward(stack: LstmStack, xs: np.ndarray, state: LstmState | None = None):
    """
    Run the stack over ``xs`` (T, B, in).
    Returns (top-layer hidden sequence (T, B, H), final state, cache for lstm_backward).
    """
    if xs.ndim != 3 or xs.shape[0] < 1:
        raise ShapeError(f"LSTM input must be (T >= 1, B, in), got {xs.shape}")
    if xs.shape[2] != stack.layers[0].in_features:
        raise ShapeError(f"LSTM expects {stack.layers[0].in_features} inputs, got {xs.shape[2]}")
    B = xs.shape[1]
    if state is None:
        state = stack.zero_state(B, xs.dtype)
    if len(state) != len(stack.layers) or any(
        h.shape != (B, l.hidden) or c.shape != (B, l.hidden) for (h, c), l in zip(state, stack.layers)
    ):
        raise ShapeError("initial LSTM state does not match the stack and batch size")

    caches: list[_LayerCache] = []
    final: LstmState = []
    seq = xs
    for layer, (h0, c0) in zip(stack.layers, state):
        seq, last, cache = _layer_forward(layer, seq, h0, c0)
        caches.append(cache)
        final.append(last)
    return seq, final, LstmCache(caches)


def lstm_backward(stack: LstmStack, cache: LstmCache, dhs: np.ndarray):
    """
    Backpropagate ``dhs`` = dL/d(top hidden sequence) through time and layers.
    Returns (per-layer gradients [{"Wx", "Wh", "b"}], dL/d inputs).
    """
    if len(cache.layers) != len(stack.layers):
        raise ShapeError("LSTM cache was produced by a different stack")
    top = cache.layers[-1]
    if dhs.shape != top.i.shape:
        raise ShapeError(f"upstream gradient {dhs.shape} does not match LSTM output {top.i.shape}")

    grads: list[dict[str, np.ndarray]] = [None] * len(stack.layers)  # type: ignore[list-item]
    upstream = dhs
    for k in range(len(stack.layers) - 1, -1, -1):
        layer, lc = stack.layers[k], cache.layers[k]
        T, B, H = lc.i.shape
        das = np.empty((T, B, 4 * H), upstream.dtype)
        dh_next = np.zeros((B, H), upstream.dtype)
        dc_next = np.zeros((B, H), upstream.dtype)
        for t in range(T - 1, -1, -1):
            i, f, o, g, tc = lc.i[t], lc.f[t], lc.o[t], lc.g[t], lc.tanh_c[t]
            dh = upstream[t] + dh_next
            dc = dh * o * (1.0 - tc * tc) + dc_next
            das[t, :, :H] = dc * g * i * (1.0 - i)
            das[t, :, H:2 * H] = dc * lc.c_prev[t] * f * (1.0 - f)
            das[t, :, 2 * H:3 * H] = dh * tc * o * (1.0 - o)
            das[t, :, 3 * H:] = dc * i * (1.0 - g * g)
            dc_next = dc * f
            dh_next = das[t] @ layer.Wh
        flat_da = das.reshape(T * B, 4 * H)
        grads[k] = {
            "Wx": flat_da.T @ lc.xs.reshape(T * B, -1),
            "Wh": flat_da.T @ lc.h_prev.reshape(T * B, H),
            "b": flat_da.sum(axis=0),
        }
        upstream = das @ layer.Wx
    return grads, upstream
