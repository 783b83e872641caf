import numpy as np


def random_hermitian(rng, n, scale=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A + A.conj().T) / 2


def random_skew(rng, n, scale=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A - A.conj().T) / 2


def random_psd(rng, n, scale=1.0):
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (B @ B.conj().T) / n


def random_unitary(rng, n):
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(B)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
