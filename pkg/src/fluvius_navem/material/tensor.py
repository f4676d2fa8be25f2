import numpy as np

IDENTITY = np.eye(2)


def dyad(A, B):
    """ (A ⊗ B)_ijkl = A_ij B_kl """
    return np.einsum('...ij,...kl->...ijkl', A, B)


def under(A, B):
    """ (A ⊗̲ B)_ijkl = A_il B_jk """
    return np.einsum('...il,...jk->...ijkl', A, B)


def over(A, B):
    """ (A ⊗̄ B)_ijkl = A_ik B_jl """
    return np.einsum('...ik,...jl->...ijkl', A, B)


def contract(T, B):
    """ (T : B)_ij = T_ijkl B_kl """
    return np.einsum('...ijkl,...kl->...ij', T, B)


def symmetric_part(A):
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def frobenius(T):
    return np.sqrt(np.einsum('...ijkl,...ijkl->...', T, T))


def trace4(T):
    """ Σ_ij T_ijij """
    return np.einsum('...ijij->...', T)


def lame_tensor(mu, lam):
    I = np.broadcast_to(IDENTITY, (2, 2))
    return mu * (over(I, I) + under(I, I)) + lam * dyad(I, I)
