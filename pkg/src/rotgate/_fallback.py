"""NumPy implementation of the stepping kernel (used when the extension is absent)."""
import numpy as np

_CHUNK = 2048


def _step_matrices(energies, couplings, fields, h, dt):
    """exp(-i dt (h*E + f*D)) for a column of field values, shape (N, n, n)."""
    n = energies.size
    N = fields.size
    out = np.empty((N, n, n), dtype=complex)
    free = fields == 0.0
    if free.any():
        out[free] = np.diag(np.exp(-1j * h * energies * dt))
    idx = np.flatnonzero(~free)
    if idx.size:
        H = np.zeros((idx.size, n, n))
        H[:, np.arange(n), np.arange(n)] = h * energies
        off = -couplings[None, :] * fields[idx, None]
        H[:, np.arange(n - 1), np.arange(1, n)] = off
        H[:, np.arange(1, n), np.arange(n - 1)] = off
        w, V = np.linalg.eigh(H)
        out[idx] = np.einsum("kij,kj,klj->kil", V, np.exp(-1j * w * dt), V)
    return out


def propagate_steps(energies, couplings, fields, h_scale, dt, Y, stride, n_track):
    """Advance ``Y`` in place through ``fields.shape[0]`` steps.

    Each step applies, in order, one exponential per column of ``fields``:
    exp(-i dt (h_scale[e] * diag(energies) - fields[k, e] * offdiag(couplings))).
    Returns ``(snapshots, leak_max)``; a snapshot of Y is stored after every
    ``stride`` steps (none if stride == 0), and leakage out of the first two
    levels is tracked for the first ``n_track`` columns after every step.
    """
    energies = np.ascontiguousarray(energies, dtype=float)
    couplings = np.ascontiguousarray(couplings, dtype=float)
    fields = np.ascontiguousarray(fields, dtype=float)
    nsteps, nexp = fields.shape
    nsnap = nsteps // stride if stride > 0 else 0
    snaps = np.empty((nsnap,) + Y.shape, dtype=complex)
    leak_max = 0.0
    isnap = 0
    for start in range(0, nsteps, _CHUNK):
        stop = min(start + _CHUNK, nsteps)
        S = _step_matrices(energies, couplings, fields[start:stop, 0], h_scale[0], dt)
        for e in range(1, nexp):
            S = _step_matrices(energies, couplings, fields[start:stop, e], h_scale[e], dt) @ S
        for j in range(stop - start):
            Y[...] = S[j] @ Y
            if n_track:
                p = Y[:2, :n_track]
                leak = 1.0 - (p.real**2 + p.imag**2).sum(axis=0).min()
                if leak > leak_max:
                    leak_max = leak
            if stride > 0 and (start + j + 1) % stride == 0:
                snaps[isnap] = Y
                isnap += 1
    return snaps, float(leak_max)
