"""Sum-product belief-propagation decoding, vectorized over edges."""

from __future__ import annotations

import numpy as np

from .matrix import ParityCheckMatrix

__all__ = ["bp_decode", "BpResult"]

_LLR_CLIP = 50.0       # tanh(25) saturates double precision anyway
_MAG_FLOOR = 1e-300    # log floor so exact-zero messages stay zero


class _EdgeArrays:
    """Flat edge representation with check- and variable-major orderings."""

    def __init__(self, h: ParityCheckMatrix):
        edge_chk = np.concatenate(
            [np.full(len(r), c, dtype=np.int64) for c, r in enumerate(h.rows)]
        )
        edge_var = np.concatenate([np.asarray(r, dtype=np.int64) for r in h.rows])
        self.edge_chk = edge_chk
        self.edge_var = edge_var
        self.n_edges = edge_var.size
        self.chk_starts = np.flatnonzero(np.r_[1, np.diff(edge_chk)])
        self.perm_var = np.argsort(edge_var, kind="stable")
        self.var_starts = np.flatnonzero(np.r_[1, np.diff(edge_var[self.perm_var])])
        if self.var_starts.size != h.n_vars:
            raise ValueError("every variable must appear in at least one check")
        if self.chk_starts.size != h.n_checks:
            raise ValueError("every check must contain at least one variable")


def _edges(h: ParityCheckMatrix) -> _EdgeArrays:
    cached = getattr(h, "_edge_cache", None)
    if cached is None:
        cached = _EdgeArrays(h)
        object.__setattr__(h, "_edge_cache", cached)
    return cached


class BpResult(tuple):
    """(bits, converged, iterations) with attribute access."""

    __slots__ = ()

    def __new__(cls, bits, converged, iterations):
        return super().__new__(cls, (bits, converged, iterations))

    bits = property(lambda self: self[0])
    converged = property(lambda self: self[1])
    iterations = property(lambda self: self[2])


def bp_decode(h: ParityCheckMatrix, llr: np.ndarray, max_iter: int = 60) -> BpResult:
    """Sum-product decoding of one frame.

    Check messages use the tanh rule with sign/log-magnitude bookkeeping,
    so exact-zero inputs propagate as zero messages.  Convergence means a
    zero syndrome; a posterior LLR of exactly 0 counts as unresolved and
    blocks convergence (an all-zero input therefore runs to max_iter).
    Hard decisions are returned either way.
    """
    ed = _edges(h)
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (h.n_vars,):
        raise ValueError(f"llr must have shape ({h.n_vars},)")

    v2c = llr[ed.edge_var]
    post = llr.copy()
    bits = post < 0.0
    for iteration in range(1, max_iter + 1):
        th = np.tanh(0.5 * np.clip(v2c, -_LLR_CLIP, _LLR_CLIP))
        neg = th < 0.0
        mag = np.log(np.maximum(np.abs(th), _MAG_FLOOR))
        sum_mag = np.add.reduceat(mag, ed.chk_starts)
        sum_neg = np.add.reduceat(neg.astype(np.int64), ed.chk_starts)
        ext_mag = sum_mag[ed.edge_chk] - mag
        ext_sign = 1.0 - 2.0 * ((sum_neg[ed.edge_chk] - neg) & 1)
        prod = np.exp(np.minimum(ext_mag, 0.0)) * ext_sign
        c2v = 2.0 * np.arctanh(np.clip(prod, -1.0 + 1e-15, 1.0 - 1e-15))

        post = llr + np.add.reduceat(c2v[ed.perm_var], ed.var_starts)
        bits = post < 0.0
        par = np.add.reduceat(bits[ed.edge_var].astype(np.int64), ed.chk_starts) & 1
        if not par.any() and not (post == 0.0).any():
            return BpResult(bits.astype(np.int8), True, iteration)
        v2c = post[ed.edge_var] - c2v
    return BpResult(bits.astype(np.int8), False, max_iter)
