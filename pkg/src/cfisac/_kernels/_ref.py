"""Pure-numpy reference implementations of the Monte Carlo hot kernels."""

import numpy as np


def mc_pair_gains(h, h_hat, sqrt_gamma, sqrt_eta, a):
    """Per-trial receive gains v[t, k, j] = sum_l h[t,k,l]^H f_j,l.

    h, h_hat: (T, K, L, N) complex; sqrt_gamma, sqrt_eta: (K, L); a: (L, N).
    The precoder column for stream j at AP l is
    sqrt_gamma[j,l]*h_hat[t,j,l] + sqrt_eta[j,l]*a[l].
    """
    f = sqrt_gamma[None, :, :, None] * h_hat + sqrt_eta[None, :, :, None] * a[None, None, :, :]
    return np.einsum("tkln,tjln->tkj", h.conj(), f)


def precoder_covariance(h_hat, sqrt_gamma, sqrt_eta, a):
    """Mean over trials of F_stack F_stack^H with F_stack the (L*N, K) stacked precoder."""
    t, K, L, N = h_hat.shape
    f = sqrt_gamma[None, :, :, None] * h_hat + sqrt_eta[None, :, :, None] * a[None, None, :, :]
    f_stack = np.transpose(f, (0, 2, 3, 1)).reshape(t, L * N, K)
    return np.einsum("tik,tjk->ij", f_stack, f_stack.conj()) / t
