"""Tensor-product central-difference stencils with one Richardson step.

A mixed partial with per-coordinate orders ``m = (m_0, ..., m_{d-1})`` is the
tensor product of 1-D central stencils, so its truncation error expands in
even powers of a common step multiplier ``t``.  Two levels (``t = 1`` and
``t = 1/2``) are combined as ``(4 D(h/2) - D(h)) / 3``.

Everything here works on raw numpy arrays; the public wrappers live in
:mod:`linegeom.geometry`.
"""

from functools import lru_cache
from itertools import combinations_with_replacement, product

import numpy as np

from .errors import DegenerateStepError, OutOfDomainError

MAX_ORDER = 4

# (offsets, weights) of the O(h^2) central stencil for each derivative order.
_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}

# Base step as a fraction of the coordinate scale, by total derivative order.
# Roughly eps**(1/(n+4)): balances O(h^4) truncation after Richardson
# against eps/h^n cancellation.
STEP_FACTORS = {1: 1.0e-3, 2: 3.0e-3, 3: 6.0e-3, 4: 2.4e-2}

UNDERFLOW_RATIO = 2.0 ** -20


def orders_of(multi_index, dim):
    m = [0] * dim
    for i in multi_index:
        if not 0 <= i < dim:
            raise IndexError(f"coordinate index {i} out of range for dim {dim}")
        m[i] += 1
    return tuple(m)


@lru_cache(maxsize=None)
def multi_indices(dim, order):
    """Sorted multi-indices of a given total order, in lexicographic order."""
    return tuple(combinations_with_replacement(range(dim), order))


@lru_cache(maxsize=None)
def stencil(orders):
    """Offsets (K x d, integer multiples of h) and weights for one partial."""
    per_axis = [list(zip(*_STENCILS[m])) for m in orders]
    offsets, weights = [], []
    for combo in product(*per_axis):
        offsets.append([o for o, _ in combo])
        weights.append(float(np.prod([w for _, w in combo])))
    return np.array(offsets, dtype=float), np.array(weights)


@lru_cache(maxsize=None)
def template(dim, order):
    """Shared offset set and weight matrix for every partial of one order.

    Returns ``(indices, offsets, weights, powers)`` where ``weights`` is
    ``len(indices) x len(offsets)`` and ``powers[k]`` holds the per-axis
    derivative orders of ``indices[k]``.
    """
    indices = multi_indices(dim, order)
    table = {}
    rows = []
    for mi in indices:
        offs, ws = stencil(orders_of(mi, dim))
        row = {}
        for o, w in zip(map(tuple, offs), ws):
            key = table.setdefault(o, len(table))
            row[key] = row.get(key, 0.0) + w
        rows.append(row)
    offsets = np.zeros((len(table), dim))
    for o, k in table.items():
        offsets[k] = o
    weights = np.zeros((len(indices), len(table)))
    for r, row in enumerate(rows):
        for k, w in row.items():
            weights[r, k] = w
    powers = np.array([orders_of(mi, dim) for mi in indices], dtype=float)
    return indices, offsets, weights, powers


def check_steps(x, h, orders):
    for i, m in enumerate(orders):
        if m == 0:
            continue
        half = 0.5 * h[i]
        if not np.isfinite(h[i]) or half <= 0.0 or half < UNDERFLOW_RATIO * abs(x[i]):
            raise DegenerateStepError(
                f"step {h[i]:.3e} on coordinate {i} underflows at x={x[i]:.6g}"
            )


def _evaluate(func_many, pts, domain):
    if domain is not None:
        ok = np.asarray(domain(pts), dtype=bool)
        if not np.all(ok):
            bad = pts[np.argmin(ok)]
            raise OutOfDomainError(f"stencil point {bad.tolist()} outside the field domain")
    vals = np.asarray(func_many(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = pts[np.argmin(np.isfinite(vals))]
        raise OutOfDomainError(f"field is not finite at stencil point {bad.tolist()}")
    return vals


def partial(func_many, x, h, orders, domain=None):
    """One mixed partial with Richardson extrapolation.

    ``h`` is the per-coordinate base step.  Returns ``(value, error)``.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    n = sum(orders)
    if n == 0:
        v = _evaluate(func_many, x[None, :], domain)[0]
        return float(v), 0.0
    check_steps(x, h, orders)
    offs, ws = stencil(tuple(orders))
    powers = np.array(orders, dtype=float)
    pts = np.concatenate([x + offs * h, x + offs * (0.5 * h)])
    vals = _evaluate(func_many, pts, domain)
    k = len(ws)
    denom = np.prod(h ** powers)
    d_h = ws @ vals[:k] / denom
    d_h2 = ws @ vals[k:] / (denom * 0.5 ** n)
    return float((4.0 * d_h2 - d_h) / 3.0), float(abs(d_h2 - d_h) / 3.0)


def all_partials(func_many, x, scale, order, domain=None):
    """Every partial of one total order at ``x``; returns ``(values, errors)``.

    Values are ordered as :func:`multi_indices`.
    """
    x = np.asarray(x, dtype=float)
    dim = x.size
    indices, offsets, weights, powers = template(dim, order)
    h = STEP_FACTORS[order] * np.asarray(scale, dtype=float)
    check_steps(x, h, (1,) * dim)
    pts = np.concatenate([x + offsets * h, x + offsets * (0.5 * h)])
    vals = _evaluate(func_many, pts, domain)
    k = offsets.shape[0]
    denom = np.prod(h[None, :] ** powers, axis=1)
    d_h = weights @ vals[:k] / denom
    d_h2 = weights @ vals[k:] / (denom * 0.5 ** order)
    return (4.0 * d_h2 - d_h) / 3.0, np.abs(d_h2 - d_h) / 3.0


def symmetric_tensor(dim, order, values):
    """Expand values over sorted multi-indices into a full symmetric tensor."""
    from itertools import permutations

    out = np.empty((dim,) * order)
    for mi, v in zip(multi_indices(dim, order), values):
        for p in set(permutations(mi)):
            out[p] = v
    return out
