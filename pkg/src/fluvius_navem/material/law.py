from dataclasses import dataclass, field

import numpy as np
from fluvius.helper import camel_to_lower

from .. import logger
from ..exceptions import ConstitutiveEvaluationError, NonPositiveJacobian
from .tensor import IDENTITY, dyad, lame_tensor, over, symmetric_part, under


class Theta:
    """
    Volumetric function of the Neo-Hookean energy: smooth with Θ(J) = 0 ⇔ J = 1.
    Subclasses provide Θ, Θ′ and Θ″.
    """
    __registry__ = {}

    def __init_subclass__(cls, key=None):
        cls.__key__ = key or camel_to_lower(cls.__name__)
        Theta.__registry__[cls.__key__] = cls

    def value(self, J):
        raise NotImplementedError

    def d1(self, J):
        raise NotImplementedError

    def d2(self, J):
        raise NotImplementedError

    def volumetric(self, J):
        """ g(J) = J Θ Θ′ """
        return J * self.value(J) * self.d1(J)

    def volumetric_slope(self, J):
        """ g′(J) = Θ Θ′ + J Θ′² + J Θ Θ″ """
        t, t1, t2 = self.value(J), self.d1(J), self.d2(J)
        return t * t1 + J * t1 * t1 + J * t * t2


class LogTheta(Theta, key="log"):
    def value(self, J):
        return np.log(J)

    def d1(self, J):
        return 1.0 / J

    def d2(self, J):
        return -1.0 / (J * J)


class LinearTheta(Theta, key="linear"):
    def value(self, J):
        return J - 1.0

    def d1(self, J):
        return np.ones_like(J)

    def d2(self, J):
        return np.zeros_like(J)


class ConstitutiveLaw:
    """
    Stress law σ(∇u) and elastic modulus 𝔸 = ∂σ/∂∇u.

    Both operations accept gradients of shape (..., 2, 2), index [i, j] = ∂u_i/∂x_j, and are
    vectorized over the leading axes. ``jacobian`` overrides det(I + ∇u) in laws that use it.
    """
    __registry__ = {}

    def __init_subclass__(cls, key=None):
        cls.__key__ = key or camel_to_lower(cls.__name__)
        ConstitutiveLaw.__registry__[cls.__key__] = cls

    @classmethod
    def create(cls, key, **params):
        try:
            law_cls = cls.__registry__[key]
        except KeyError:
            raise ConstitutiveEvaluationError('C01002', f'Unknown constitutive law [{key}]')
        return law_cls(**params)

    @property
    def uses_jacobian(self):
        return False

    def stress(self, grad_u, jacobian=None):
        raise NotImplementedError

    def tangent(self, grad_u, jacobian=None):
        raise NotImplementedError


def _require_positive(law, **params):
    for name, value in params.items():
        if not value > 0:
            raise ConstitutiveEvaluationError('C01001', f'{law} requires {name} > 0, got {value}')


@dataclass(frozen=True)
class LinearLame(ConstitutiveLaw, key="linear-lame"):
    mu: float
    lam: float

    def __post_init__(self):
        _require_positive('LinearLame', mu=self.mu, lam=self.lam)

    def stress(self, grad_u, jacobian=None):
        grad_u = np.asarray(grad_u, dtype=float)
        trace = np.trace(grad_u, axis1=-2, axis2=-1)
        return 2 * self.mu * symmetric_part(grad_u) + self.lam * trace[..., None, None] * IDENTITY

    def tangent(self, grad_u, jacobian=None):
        grad_u = np.asarray(grad_u, dtype=float)
        return np.broadcast_to(lame_tensor(self.mu, self.lam), grad_u.shape + (2, 2)).copy()


@dataclass(frozen=True)
class StrainDependent(ConstitutiveLaw, key="strain-dependent"):
    """ σ = μ(ε) ε with μ(ε) = factor·(1 + ‖ε‖²) """
    factor: float = 3.0

    def __post_init__(self):
        _require_positive('StrainDependent', factor=self.factor)

    def _modulus(self, strain):
        return self.factor * (1.0 + np.einsum('...ij,...ij->...', strain, strain))

    def stress(self, grad_u, jacobian=None):
        strain = symmetric_part(np.asarray(grad_u, dtype=float))
        return self._modulus(strain)[..., None, None] * strain

    def tangent(self, grad_u, jacobian=None):
        strain = symmetric_part(np.asarray(grad_u, dtype=float))
        I = np.broadcast_to(IDENTITY, strain.shape)
        m = self._modulus(strain)[..., None, None, None, None]
        return 0.5 * m * (over(I, I) + under(I, I)) + 2 * self.factor * dyad(strain, strain)


@dataclass(frozen=True)
class NeoHookean(ConstitutiveLaw, key="neo-hookean"):
    """
    First Piola-Kirchhoff stress P = μ(F − F⁻ᵀ) + λ J Θ(J) Θ′(J) F⁻ᵀ with F = I + ∇u.

    When ``jacobian`` is given, it replaces det F in the volumetric term and the tangent is
    the derivative at fixed J; the caller owns the remaining J-derivative contribution.
    """
    mu: float
    lam: float
    theta: Theta = field(default_factory=LogTheta)

    def __post_init__(self):
        _require_positive('NeoHookean', mu=self.mu, lam=self.lam)

    @property
    def uses_jacobian(self):
        return True

    def _kinematics(self, grad_u, jacobian):
        F = IDENTITY + np.asarray(grad_u, dtype=float)
        detF = np.linalg.det(F)
        J = detF if jacobian is None else np.broadcast_to(np.asarray(jacobian, dtype=float), detF.shape)
        if np.any(J <= 0) or np.any(detF == 0):
            worst = float(np.min(np.minimum(J, detF)))
            logger.debug('Non-positive Jacobian in NeoHookean: %.6e', worst)
            raise NonPositiveJacobian('C01101', f'Non-positive Jacobian J = {worst:.6e}', jacobian=worst)

        Finv = np.linalg.inv(F)
        return F, np.swapaxes(Finv, -1, -2), Finv, J

    def stress(self, grad_u, jacobian=None):
        F, FinvT, _, J = self._kinematics(grad_u, jacobian)
        g = self.theta.volumetric(J)
        return self.mu * (F - FinvT) + self.lam * g[..., None, None] * FinvT

    def tangent(self, grad_u, jacobian=None):
        F, FinvT, Finv, J = self._kinematics(grad_u, jacobian)
        I = np.broadcast_to(IDENTITY, F.shape)
        g = self.theta.volumetric(J)[..., None, None, None, None]
        modulus = self.mu * (over(I, I) + under(FinvT, Finv)) - self.lam * g * under(FinvT, Finv)
        if jacobian is None:
            slope = (J * self.theta.volumetric_slope(J))[..., None, None, None, None]
            modulus = modulus + self.lam * slope * dyad(FinvT, FinvT)
        return modulus

    def volumetric_stiffness(self, J):
        """ λ g′(J), the derivative of the volumetric stress factor with respect to J. """
        return self.lam * self.theta.volumetric_slope(np.asarray(J, dtype=float))

    def inverse_transpose(self, grad_u):
        return np.swapaxes(np.linalg.inv(IDENTITY + np.asarray(grad_u, dtype=float)), -1, -2)
