"""Multidimensional reverse reconciliation over division algebras.

For d in {1, 2, 4, 8} the Cayley-Dickson algebras (reals, complex,
quaternions, octonions) provide d orthogonal matrices A_i with the
property that {A_i x} is an orthonormal basis for every unit vector x.
Bob expands his target sign vector u in the basis {A_i y'} of his
normalized tuple y' and transmits the coefficient vector alpha; the map
R_alpha = sum_i alpha_i A_i is then an exact rotation taking y' to u,
and Alice's rotated tuple v = R_alpha x' is a noisy observation of u.

LLRs use the per-tuple Gaussian approximation u ~ (t |x||y|)^-1-scaled
BPSK on v: conditioned on both tuple norms (Bob's norm is independent of
the secret signs and may be disclosed), u_i = (t|x|/|y|) v_i + w_i with
Var(w_i) ~ sigma_z^2 / |y|^2.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .channel import QuadratureBlock

__all__ = ["rotation_matrices", "multidim_reconcile"]

_ALLOWED_DIMS = (1, 2, 4, 8)


def _cayley_dickson(dim: int) -> np.ndarray:
    """Structure tensor T with e_i e_j = sum_k T[i, j, k] e_k."""
    if dim == 1:
        return np.ones((1, 1, 1))
    half = dim // 2
    sub = _cayley_dickson(half)
    t = np.zeros((dim, dim, dim))
    conj = np.full(half, -1.0)
    conj[0] = 1.0
    for i in range(dim):
        for j in range(dim):
            if i < half and j < half:
                t[i, j, :half] = sub[i, j]
            elif i < half:
                # (a, 0)(0, d) = (0, d a)
                t[i, j, half:] = sub[j - half, i]
            elif j < half:
                # (0, b)(c, 0) = (0, b conj(c))
                t[i, j, half:] = sub[i - half, j] * conj[j]
            else:
                # (0, b)(0, d) = (-conj(d) b, 0)
                t[i, j, :half] = -conj[j - half] * sub[j - half, i - half]
    return t


@lru_cache(maxsize=None)
def rotation_matrices(dim: int) -> np.ndarray:
    """The d left-multiplication matrices A_i, shape (d, d, d).

    Each A_i is orthogonal and sum_i alpha_i A_i is orthogonal whenever
    |alpha| = 1; both facts follow from the composition property of the
    algebra and are exercised by the structural test suite.
    """
    if dim not in _ALLOWED_DIMS:
        raise ValueError(f"dim must be one of {_ALLOWED_DIMS}")
    t = _cayley_dickson(dim)
    # (e_i x)_j = sum_k A_i[j, k] x_k  with  A_i[j, k] = t[i, k, j]
    a = np.transpose(t, (0, 2, 1)).copy()
    a.setflags(write=False)
    return a


def multidim_reconcile(block: QuadratureBlock, dim: int = 8, seed=0,
                       channel_estimate: tuple[float, float] | None = None):
    """Reverse reconciliation of one block.

    Bob draws uniform sign tuples u in {+-1/sqrt(d)}^d, computes the
    rotation coefficients alpha mapping his normalized tuple to u, and
    Alice applies the same rotation to her normalized tuple to obtain
    per-symbol LLRs for the virtual binary-input channel (positive LLR
    means bit 0, natural-log convention).

    Returns ``(llr, bob_bits)`` as flat arrays of ``len(block)`` entries.
    ``channel_estimate`` is the measured per-block ``(t_hat, sigma_z_sq)``
    used to scale the LLRs; by default it is estimated from the block.
    """
    if dim not in _ALLOWED_DIMS:
        raise ValueError(f"dim must be one of {_ALLOWED_DIMS}")
    n = len(block)
    if n % dim != 0:
        raise ValueError(f"block length {n} is not divisible by dim {dim}")
    if channel_estimate is None:
        t_hat, sz2_hat = block.estimate_channel()
    else:
        t_hat, sz2_hat = channel_estimate

    a = rotation_matrices(dim)
    x = block.alice.reshape(-1, dim)
    y = block.bob.reshape(-1, dim)
    norm_x = np.linalg.norm(x, axis=1, keepdims=True)
    norm_y = np.linalg.norm(y, axis=1, keepdims=True)
    xn = x / norm_x
    yn = y / norm_y

    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=x.shape)
    u = (1.0 - 2.0 * bits) / np.sqrt(dim)

    # alpha_i = u . (A_i y'); then v = sum_i alpha_i A_i x'
    alpha = np.einsum("nj,ijk,nk->ni", u, a, yn)
    v = np.einsum("ni,ijk,nk->nj", alpha, a, xn)

    llr = 2.0 * t_hat * norm_x * norm_y * v / (sz2_hat * np.sqrt(dim))
    return llr.ravel(), bits.ravel().astype(np.int8)
