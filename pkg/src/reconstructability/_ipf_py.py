"""Pure numpy iterative proportional fitting kernel."""

import numpy as np


def _residual(q, maps, targets, offsets):
    worst = 0.0
    for k in range(maps.shape[0]):
        lo, hi = offsets[k], offsets[k + 1]
        marg = np.bincount(maps[k], weights=q, minlength=hi - lo)
        worst = max(worst, float(np.max(np.abs(marg - targets[lo:hi]))))
    return worst


def ipf_fit(q, maps, targets, offsets, tol, max_sweeps):
    """Fit ``q`` in place to the stacked target marginals.

    ``maps[k, c]`` is the index of cell ``c`` within component ``k``'s
    marginal, whose targets are ``targets[offsets[k]:offsets[k + 1]]``.
    A cell whose current marginal is zero gets factor zero.  Returns
    ``(sweeps, residual)`` with residual the max-norm marginal deviation.
    """
    sweeps = 0
    residual = _residual(q, maps, targets, offsets)
    while residual >= tol and sweeps < max_sweeps:
        for k in range(maps.shape[0]):
            lo, hi = offsets[k], offsets[k + 1]
            marg = np.bincount(maps[k], weights=q, minlength=hi - lo)
            factor = np.divide(
                targets[lo:hi], marg, out=np.zeros(hi - lo), where=marg > 0
            )
            q *= factor[maps[k]]
        sweeps += 1
        residual = _residual(q, maps, targets, offsets)
    return sweeps, residual
