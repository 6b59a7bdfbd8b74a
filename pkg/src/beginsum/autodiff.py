"""Float64 tensors with reverse-mode automatic differentiation.

Design constraints:
  * everything is float64; shapes are scalars, vectors or matrices,
    which is all the models in this package need;
  * matrix products accumulate over the inner index in ascending order,
    never through BLAS, so results are reproducible bit-for-bit against
    a naive triple loop and across runs;
  * tensors are immutable once created. The only sanctioned mutation is
    the optimizer replacing a parameter's array between steps (single
    writer, never while a graph referencing it is still alive).
"""

import math
from contextlib import contextmanager

import numpy as np


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested op."""


class EmptySupportError(ValueError):
    """A masked softmax was asked to normalize over zero unmasked entries."""


_grad_enabled = True


@contextmanager
def no_grad():
    """Disable graph construction inside the block (inference paths)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "op", "parents", "backward_fn")

    def __init__(self, data, requires_grad=False, op="leaf", parents=(), backward_fn=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self.op = op
        self.parents = parents
        self.backward_fn = backward_fn

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, op={self.op!r}, requires_grad={self.requires_grad})"


def tensor(data):
    """Wrap data as a constant (non-trainable) tensor."""
    return Tensor(data)


def param(data):
    """Wrap data as a trainable tensor."""
    return Tensor(data, requires_grad=True)


def _node(data, op, parents, backward_fn):
    if _grad_enabled and any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, op=op, parents=tuple(parents), backward_fn=backward_fn)
    return Tensor(data, op=op)


# ---------------------------------------------------------------------------
# matmul: ascending inner-index accumulation (no BLAS)
# ---------------------------------------------------------------------------

# largest (k, m, n) outer-product stack we materialize at once
_STACK_LIMIT = 1 << 19


def _matmul_data(a, b):
    m, k = a.shape
    n = b.shape[1]
    if m == 1:
        # row vector: stack of scaled rows of b, reduced over k ascending
        return np.add.reduce(a[0][:, None] * b, axis=0)[None, :]
    if m * k * n <= _STACK_LIMIT:
        return np.add.reduce(a.T[:, :, None] * b[:, None, :], axis=0)
    out = np.zeros((m, n))
    tmp = np.empty((m, n))
    for t in range(k):
        np.multiply(a[:, t, None], b[t, None, :], out=tmp)
        np.add(out, tmp, out=out)
    return out


def matmul_sorted(a, b):
    """Matrix product whose every output entry sums its k products in
    value-sorted order. Unlike matmul's ascending-index order, this makes
    the result invariant under matched permutations of (columns of a,
    rows of b) bit-for-bit, which the attention block's equivariance
    contract needs."""
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul needs matrices, got {a.data.shape} x {b.data.shape}")
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul inner dims disagree: {a.data.shape} x {b.data.shape}")
    stack = a.data[:, :, None] * b.data[None, :, :]
    out = np.sum(np.sort(stack, axis=1), axis=1)

    def backward_fn(g):
        ga = _matmul_data(g, b.data.T) if a.requires_grad else None
        gb = _matmul_data(a.data.T, g) if b.requires_grad else None
        return ga, gb

    return _node(out, "matmul_sorted", (a, b), backward_fn)


def matmul(a, b):
    """Matrix product with deterministic ascending-k summation."""
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul needs matrices, got {a.data.shape} x {b.data.shape}")
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul inner dims disagree: {a.data.shape} x {b.data.shape}")
    out = _matmul_data(a.data, b.data)

    def backward_fn(g):
        ga = _matmul_data(g, b.data.T) if a.requires_grad else None
        gb = _matmul_data(a.data.T, g) if b.requires_grad else None
        return ga, gb

    return _node(out, "matmul", (a, b), backward_fn)


# ---------------------------------------------------------------------------
# elementwise ops (numpy broadcasting allowed; grads are un-broadcast)
# ---------------------------------------------------------------------------

def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, dim in enumerate(shape):
        if dim == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def _check_broadcast(op, a, b):
    if a.data.shape == b.data.shape:
        return
    try:
        np.broadcast_shapes(a.data.shape, b.data.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.data.shape} and {b.data.shape} do not broadcast") from None


def add(a, b):
    _check_broadcast("add", a, b)
    out = a.data + b.data

    def backward_fn(g):
        ga = _unbroadcast(g, a.data.shape) if a.requires_grad else None
        gb = _unbroadcast(g, b.data.shape) if b.requires_grad else None
        return ga, gb

    return _node(out, "add", (a, b), backward_fn)


def sub(a, b):
    _check_broadcast("sub", a, b)
    out = a.data - b.data

    def backward_fn(g):
        ga = _unbroadcast(g, a.data.shape) if a.requires_grad else None
        gb = _unbroadcast(-g, b.data.shape) if b.requires_grad else None
        return ga, gb

    return _node(out, "sub", (a, b), backward_fn)


def mul(a, b):
    """Hadamard (elementwise) product."""
    _check_broadcast("mul", a, b)
    out = a.data * b.data

    def backward_fn(g):
        ga = _unbroadcast(g * b.data, a.data.shape) if a.requires_grad else None
        gb = _unbroadcast(g * a.data, b.data.shape) if b.requires_grad else None
        return ga, gb

    return _node(out, "mul", (a, b), backward_fn)


hadamard = mul


def neg(a):
    def backward_fn(g):
        return (-g,)

    return _node(-a.data, "neg", (a,), backward_fn)


def scale(a, c):
    """Multiply by a Python scalar (no gradient for the scalar)."""
    c = float(c)

    def backward_fn(g):
        return (g * c,)

    return _node(a.data * c, "scale", (a,), backward_fn)


def sigmoid(a):
    # exp may overflow for very negative inputs; 1/(1+inf) is still the
    # correctly-signed 0, so the result is fine and the warning suppressed
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.exp(-a.data))

    def backward_fn(g):
        return (g * out * (1.0 - out),)

    return _node(out, "sigmoid", (a,), backward_fn)


def tanh(a):
    out = np.tanh(a.data)

    def backward_fn(g):
        return (g * (1.0 - out * out),)

    return _node(out, "tanh", (a,), backward_fn)


def concat(tensors, axis=-1):
    """Concatenate along an axis; all other dims must agree."""
    tensors = list(tensors)
    datas = [t.data for t in tensors]
    try:
        out = np.concatenate(datas, axis=axis)
    except ValueError:
        raise ShapeError(f"concat: incompatible shapes {[d.shape for d in datas]}") from None
    ax = axis if axis >= 0 else out.ndim + axis
    sizes = [d.shape[ax] for d in datas]

    def backward_fn(g):
        pieces = np.split(g, np.cumsum(sizes[:-1]), axis=ax)
        return tuple(p if t.requires_grad else None for p, t in zip(pieces, tensors))

    return _node(out, "concat", tuple(tensors), backward_fn)


def narrow(a, axis, start, length):
    """Contiguous slice along one axis."""
    sl = [slice(None)] * a.data.ndim
    sl[axis] = slice(start, start + length)
    sl = tuple(sl)
    out = a.data[sl].copy()

    def backward_fn(g):
        full = np.zeros_like(a.data)
        full[sl] = g
        return (full,)

    return _node(out, "narrow", (a,), backward_fn)


def transpose(a):
    out = a.data.T.copy()

    def backward_fn(g):
        return (g.T,)

    return _node(out, "transpose", (a,), backward_fn)


def gather_rows(a, ids):
    """Select rows by integer index (embedding lookup); grads scatter-add."""
    ids = np.asarray(ids, dtype=np.intp)
    out = a.data[ids].copy()

    def backward_fn(g):
        full = np.zeros_like(a.data)
        np.add.at(full, ids, g)
        return (full,)

    return _node(out, "gather_rows", (a,), backward_fn)


def sum_all(a):
    out = np.float64(a.data.sum())

    def backward_fn(g):
        return (np.full_like(a.data, float(g)),)

    return _node(out, "sum", (a,), backward_fn)


def mean_all(a):
    n = a.data.size
    out = np.float64(a.data.sum() / n)

    def backward_fn(g):
        return (np.full_like(a.data, float(g) / n),)

    return _node(out, "mean", (a,), backward_fn)


# ---------------------------------------------------------------------------
# softmax family
# ---------------------------------------------------------------------------

def softmax_masked(a, mask=None, axis=-1):
    """Softmax along `axis`; entries where mask is True are excluded and
    come out exactly 0. Stabilized by max subtraction over the support."""
    x = a.data
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != x.shape:
            raise ShapeError(f"softmax mask shape {mask.shape} != input shape {x.shape}")
        if not np.all(np.any(~mask, axis=axis)):
            raise EmptySupportError("softmax_masked: some slice has no unmasked entries")
        x = np.where(mask, -np.inf, x)
    m = np.max(x, axis=axis, keepdims=True)
    e = np.exp(x - m)
    # value-sorted denominator: permuting a slice's entries permutes the
    # outputs without changing their bits
    z = np.sum(np.sort(e, axis=axis), axis=axis, keepdims=True)
    out = e / z

    def backward_fn(g):
        inner = np.sum(g * out, axis=axis, keepdims=True)
        return (out * (g - inner),)

    return _node(out, "softmax_masked", (a,), backward_fn)


def log_softmax(a, axis=-1):
    x = a.data
    m = np.max(x, axis=axis, keepdims=True)
    shifted = x - m
    lse = np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))
    out = shifted - lse
    soft = np.exp(out)

    def backward_fn(g):
        return (g - soft * np.sum(g, axis=axis, keepdims=True),)

    return _node(out, "log_softmax", (a,), backward_fn)


# ---------------------------------------------------------------------------
# fused losses (numerically stable; targets carry no gradient)
# ---------------------------------------------------------------------------

def bce_with_logits(logits, targets):
    """Mean binary cross-entropy of sigmoid(logits) against 0/1 targets."""
    z = logits.data
    y = np.asarray(targets, dtype=np.float64)
    if y.shape != z.shape:
        raise ShapeError(f"bce targets shape {y.shape} != logits shape {z.shape}")
    n = z.size
    per = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    out = np.float64(per.sum() / n)

    def backward_fn(g):
        p = np.empty_like(z)
        pos = z >= 0
        p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        p[~pos] = ez / (1.0 + ez)
        return ((p - y) * (float(g) / n),)

    return _node(out, "bce_with_logits", (logits,), backward_fn)


def cross_entropy_logits(logits, target_ids):
    """Mean cross-entropy over rows of logits against integer class ids."""
    z = logits.data
    if z.ndim != 2:
        raise ShapeError(f"cross_entropy expects a matrix of logits, got {z.shape}")
    ids = np.asarray(target_ids, dtype=np.intp)
    n = z.shape[0]
    if ids.shape != (n,):
        raise ShapeError(f"cross_entropy target count {ids.shape} != rows {n}")
    m = np.max(z, axis=1, keepdims=True)
    shifted = z - m
    lse = np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
    logp = shifted - lse
    out = np.float64(-logp[np.arange(n), ids].sum() / n)

    def backward_fn(g):
        soft = np.exp(logp)
        soft[np.arange(n), ids] -= 1.0
        return (soft * (float(g) / n),)

    return _node(out, "cross_entropy_logits", (logits,), backward_fn)


# ---------------------------------------------------------------------------
# backward pass
# ---------------------------------------------------------------------------

def topo_order(root):
    """Topological order of the graph under `root` (each node once)."""
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def _finite(arr):
    # sum is nan if any element is nan, +-inf if any is inf; a finite sum
    # of pathologically huge finite grads can overflow too, which also
    # deserves the divergence diagnostic
    return math.isfinite(arr.sum())


def backward(loss):
    """Accumulate gradients of a scalar loss into every reachable tensor
    with requires_grad. Raises FloatingPointError naming the op where a
    non-finite gradient shows up."""
    if loss.data.size != 1:
        raise ValueError(f"backward expects a scalar loss, got shape {loss.data.shape}")
    order = topo_order(loss)
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        g = node.grad
        if g is None or node.backward_fn is None:
            continue
        for parent, pg in zip(node.parents, node.backward_fn(g)):
            if pg is None or not parent.requires_grad:
                continue
            if not _finite(pg):
                raise FloatingPointError(f"non-finite gradient produced by op {node.op!r}")
            parent.grad = pg if parent.grad is None else parent.grad + pg


# ---------------------------------------------------------------------------
# parameters, init, optimizer
# ---------------------------------------------------------------------------

def seeded_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def uniform_param(rng, shape, fan_in):
    """uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) trainable tensor."""
    bound = 1.0 / math.sqrt(fan_in)
    return param(rng.uniform(-bound, bound, size=shape))


def zeros_param(shape):
    return param(np.zeros(shape))


class Adam:
    """Adam-form adaptive update: lr 1e-3, betas (0.9, 0.999), eps 1e-8."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.params, self._m, self._v):
            if p.grad is None:
                continue
            g = p.grad
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            step = (self.lr / bc1) * m / (np.sqrt(v / bc2) + self.eps)
            p.data = p.data - step
