"""Central finite-difference gradient checking, shared by the unit and
acceptance suites.

Relative error is |ad - fd| / max(|ad|, |fd|, 1), i.e. relative for large
gradients with an absolute floor of the tolerance for tiny ones.
"""

import numpy as np

from beginsum import autodiff as ad


def finite_diff(f, arrays, eps=1e-5):
    grads = []
    for arr in arrays:
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gf = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            fp = f()
            flat[i] = orig - eps
            fm = f()
            flat[i] = orig
            gf[i] = (fp - fm) / (2 * eps)
        grads.append(g)
    return grads


def assert_grads_close(build_loss, params, rel_tol=1e-4, eps=1e-5):
    for p in params:
        p.grad = None
    loss = build_loss()
    ad.backward(loss)
    ad_grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]
    fd_grads = finite_diff(lambda: float(build_loss().data), [p.data for p in params], eps)
    for name_i, (a, f) in enumerate(zip(ad_grads, fd_grads)):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(f)), 1.0)
        rel = np.abs(a - f) / denom
        assert rel.max() < rel_tol, f"param {name_i}: max rel err {rel.max():.3e}"


def _rand(rng, *shape):
    return ad.param(rng.uniform(-1.5, 1.5, size=shape))


def _weighted_sum(make_out, rng):
    """Fixed random linear functional of the op output (drawn once, so the
    loss is deterministic across finite-difference probes)."""
    shape = make_out().data.shape
    c = ad.tensor(rng.uniform(-1.0, 1.0, size=shape))
    return lambda: ad.sum_all(ad.mul(make_out(), c))


def _case_matmul(rng):
    m, k, n = rng.integers(1, 6, size=3)
    a, b = _rand(rng, m, k), _rand(rng, k, n)
    return [a, b], _weighted_sum(lambda: ad.matmul(a, b), rng)


def _case_matmul_sorted(rng):
    m, k, n = rng.integers(1, 6, size=3)
    a, b = _rand(rng, m, k), _rand(rng, k, n)
    return [a, b], _weighted_sum(lambda: ad.matmul_sorted(a, b), rng)


def _case_add(rng):
    m, n = rng.integers(1, 6, size=2)
    a, b = _rand(rng, m, n), _rand(rng, 1, n)
    return [a, b], _weighted_sum(lambda: ad.add(a, b), rng)


def _case_sub(rng):
    m, n = rng.integers(1, 6, size=2)
    a, b = _rand(rng, m, n), _rand(rng, m, n)
    return [a, b], _weighted_sum(lambda: ad.sub(a, b), rng)


def _case_mul(rng):
    m, n = rng.integers(1, 6, size=2)
    a, b = _rand(rng, m, n), _rand(rng, 1, n)
    return [a, b], _weighted_sum(lambda: ad.mul(a, b), rng)


def _case_neg(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    return [a], _weighted_sum(lambda: ad.neg(a), rng)


def _case_scale(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    c = float(rng.uniform(-2, 2))
    return [a], _weighted_sum(lambda: ad.scale(a, c), rng)


def _case_sigmoid(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    return [a], _weighted_sum(lambda: ad.sigmoid(a), rng)


def _case_tanh(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    return [a], _weighted_sum(lambda: ad.tanh(a), rng)


def _case_concat(rng):
    m = int(rng.integers(1, 5))
    a, b, c = _rand(rng, m, 2), _rand(rng, m, 3), _rand(rng, m, 1)
    return [a, b, c], _weighted_sum(lambda: ad.concat([a, b, c], axis=1), rng)


def _case_narrow(rng):
    a = _rand(rng, 4, 6)
    return [a], _weighted_sum(lambda: ad.narrow(a, 1, 2, 3), rng)


def _case_transpose(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    return [a], _weighted_sum(lambda: ad.transpose(a), rng)


def _case_gather(rng):
    a = _rand(rng, 7, 3)
    ids = rng.integers(0, 7, size=5)
    return [a], _weighted_sum(lambda: ad.gather_rows(a, ids), rng)


def _case_sum(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    return [a], lambda: ad.sum_all(a)


def _case_mean(rng):
    a = _rand(rng, rng.integers(1, 6), rng.integers(1, 6))
    return [a], lambda: ad.mean_all(a)


def _case_softmax(rng):
    m, n = int(rng.integers(1, 5)), int(rng.integers(2, 6))
    a = _rand(rng, m, n)
    return [a], _weighted_sum(lambda: ad.softmax_masked(a, axis=1), rng)


def _case_softmax_masked(rng):
    m, n = int(rng.integers(1, 5)), int(rng.integers(2, 6))
    a = _rand(rng, m, n)
    mask = rng.random((m, n)) < 0.3
    mask[:, 0] = False  # keep support nonempty
    return [a], _weighted_sum(lambda: ad.softmax_masked(a, mask=mask, axis=1), rng)


def _case_log_softmax(rng):
    m, n = int(rng.integers(1, 5)), int(rng.integers(2, 6))
    a = _rand(rng, m, n)
    return [a], _weighted_sum(lambda: ad.log_softmax(a, axis=1), rng)


def _case_bce(rng):
    n = int(rng.integers(1, 7))
    a = _rand(rng, 1, n)
    y = rng.integers(0, 2, size=(1, n)).astype(float)
    return [a], lambda: ad.bce_with_logits(a, y)


def _case_cross_entropy(rng):
    m, v = int(rng.integers(1, 5)), int(rng.integers(2, 7))
    a = _rand(rng, m, v)
    ids = rng.integers(0, v, size=m)
    return [a], lambda: ad.cross_entropy_logits(a, ids)


OP_CASES = [
    ("matmul", _case_matmul),
    ("matmul_sorted", _case_matmul_sorted),
    ("add", _case_add),
    ("sub", _case_sub),
    ("mul", _case_mul),
    ("neg", _case_neg),
    ("scale", _case_scale),
    ("sigmoid", _case_sigmoid),
    ("tanh", _case_tanh),
    ("concat", _case_concat),
    ("narrow", _case_narrow),
    ("transpose", _case_transpose),
    ("gather_rows", _case_gather),
    ("sum_all", _case_sum),
    ("mean_all", _case_mean),
    ("softmax", _case_softmax),
    ("softmax_masked", _case_softmax_masked),
    ("log_softmax", _case_log_softmax),
    ("bce_with_logits", _case_bce),
    ("cross_entropy_logits", _case_cross_entropy),
]


def run_op_suite(instances=20, seed=20240501):
    """Run every op case `instances` times; raises on the first failure."""
    for idx, (name, case) in enumerate(OP_CASES):
        rng = np.random.default_rng(seed + idx)
        for _ in range(instances):
            params, build = case(rng)
            assert_grads_close(build, params)
