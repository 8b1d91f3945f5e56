"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def interference_pattern(coeffs, labels, x, fringe_scale, envelope_scale):
    """Far-field rate ``sinc^2(s_e x) |sum_l c_l exp(i l s_f x)|^2`` at every ``x``.

    ``sinc`` is the unnormalized ``sin(u)/u``.
    """
    x = np.asarray(x, dtype=float)
    phase = np.outer(x * fringe_scale, labels)
    amp = np.exp(1j * phase) @ np.asarray(coeffs, dtype=complex)
    env = np.sinc(envelope_scale * x / np.pi) ** 2
    return env * np.abs(amp) ** 2


def assemble_density(probs, vectors):
    """Batched ``sum_a sum_m p[b, a, m] |v_am><v_am| - I``.

    ``vectors[a, :, m]`` is vector ``m`` of basis ``a``.
    """
    probs = np.asarray(probs, dtype=float)
    d = probs.shape[-1]
    rho = np.einsum("bam,aim,ajm->bij", probs, vectors, vectors.conj(), optimize=True)
    rho -= np.eye(d)
    # exact hermiticity
    return 0.5 * (rho + rho.conj().transpose(0, 2, 1))
