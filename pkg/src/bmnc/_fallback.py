"""Pure numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is not built or ``BMNC_PURE_PYTHON`` is set.

Link draws arrive as ``(..., 4)`` float arrays of standard normals holding
``(h.re, h.im, n.re, n.im)``; the kernels scale them to unit-power complex
Gaussians.  Detection is coherent with perfect CSI:
``decide 1  iff  Re(conj(h) * (h*s*sqrt(g) + n)) < 0`` with ``s = 1 - 2*bit``.
"""

from __future__ import annotations

import numpy as np

HALF = np.sqrt(0.5)


def _detect(bits, draws, sqrt_gamma):
    hr = draws[..., 0] * HALF
    hi = draws[..., 1] * HALF
    nr = draws[..., 2] * HALF
    ni = draws[..., 3] * HALF
    s = 1.0 - 2.0 * bits
    metric = (hr * hr + hi * hi) * s * sqrt_gamma + (hr * nr + hi * ni)
    return (metric < 0).astype(np.uint8)


def nc_block(x, up, down, sqrt_up, sqrt_down, f, inv, debug):
    """Count decoding errors for a block of coded rounds.

    ``x`` (R, N) source bits; ``up`` (R, N, 4); ``down`` (R, N, N-1, 4) with
    ``down[:, i, k]`` the link to user ``i`` in slot ``k``; ``f`` (N-1, N);
    ``inv`` (N, N-1, N-1) decoders.  Returns ``(errors, mismatches)`` where
    ``errors[i, k]`` counts rounds in which user ``i`` got its ``k``-th
    unknown bit wrong and ``mismatches`` counts rounds where the three-term
    error decomposition disagreed with the decoder (only when ``debug``).
    """
    r_rounds, n = x.shape
    xt = _detect(x, up, sqrt_up)
    r = (xt.astype(np.int64) @ f.T.astype(np.int64)) & 1
    rd = _detect(r[:, None, :], down, sqrt_down)  # (R, N, N-1)
    errors = np.zeros((n, n - 1), dtype=np.int64)
    mismatches = 0
    for i in range(n):
        others = np.delete(np.arange(n), i)
        rhs = rd[:, i, :] ^ (f[:, i][None, :] * x[:, i : i + 1])
        xhat = (rhs.astype(np.int64) @ inv[i].T.astype(np.int64)) & 1
        err = xhat.astype(np.uint8) ^ x[:, others]
        errors[i] += err.sum(axis=0, dtype=np.int64)
        if debug:
            uplink = x[:, others] ^ xt[:, others]
            own = (x[:, i] ^ xt[:, i])[:, None]
            bc = ((r ^ rd[:, i, :]).astype(np.int64) @ inv[i].T.astype(np.int64)) & 1
            predicted = uplink ^ own ^ bc.astype(np.uint8)
            mismatches += int((predicted != err).any(axis=1).sum())
    return errors, mismatches


def no_nc_block(x, up, down, sqrt_up, sqrt_down):
    """Count errors for a block of detect-and-forward rounds.

    ``down[:, j, i]`` is the link to user ``j`` in the slot carrying
    user ``i``'s bit; ``sqrt_down[j, i]`` its amplitude.  Returns ``errors[i, j]``,
    rounds in which user ``j`` got user ``i``'s bit wrong (diagonal is zero).
    """
    n = x.shape[1]
    xt = _detect(x, up, sqrt_up)
    rd = _detect(xt[:, None, :], down, sqrt_down)  # (R, N receivers, N slots)
    wrong = rd ^ x[:, None, :]
    errors = wrong.sum(axis=0, dtype=np.int64).T.copy()
    errors[np.arange(n), np.arange(n)] = 0
    return errors


def inverse_column_weights(rows, n_users):
    """Column weights of every user's decoder for a matrix given as packed rows.

    ``rows[k]`` holds row ``k`` with bit ``c`` for column ``c``.  Returns a
    list of ``N`` lists of ``N-1`` weights; raises ``ValueError`` if some
    user's sub-matrix is singular.
    """
    m = n_users - 1
    out = []
    for c in range(n_users):
        low = (1 << c) - 1
        sub = [(r & low) | ((r >> (c + 1)) << c) for r in rows]
        aug = [s | (1 << (m + k)) for k, s in enumerate(sub)]
        for col in range(m):
            bit = 1 << col
            piv = col
            while piv < m and not aug[piv] & bit:
                piv += 1
            if piv == m:
                raise ValueError(f"sub-matrix of user {c + 1} is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col]
            for k in range(m):
                if k != col and aug[k] & bit:
                    aug[k] ^= p
        inv_rows = [a >> m for a in aug]
        out.append([sum((row >> col) & 1 for row in inv_rows) for col in range(m)])
    return out
