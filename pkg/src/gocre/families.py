"""Link and variance machinery for the supported GLM response families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .validation import as_float_vector, check_same_length

# Fitted probabilities are kept this far away from 0 and 1 so the mean
# derivative stays strictly positive even under complete separation.
PROB_CLAMP = 1e-10

LOGIT_BERNOULLI = "logit-bernoulli"
IDENTITY_GAUSSIAN = "identity-gaussian"
_KINDS = (LOGIT_BERNOULLI, IDENTITY_GAUSSIAN)


@dataclass(frozen=True)
class LinkFamily:
    """A response family paired with its canonical link.

    Two combinations are supported: Bernoulli responses with the logit link
    and Gaussian responses with the identity link. The family provides the
    four pieces the component engine needs: the inverse link, its derivative,
    the working response, and the iterative weight.

    Parameters
    ----------
    kind : str
        Either ``"logit-bernoulli"`` or ``"identity-gaussian"``.
    dispersion : float
        Gaussian noise variance. Ignored by the Bernoulli family apart from
        validation; must be strictly positive.
    """

    kind: str
    dispersion: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(
                f"unknown family kind {self.kind!r}; expected one of {_KINDS}"
            )
        if not np.isfinite(self.dispersion) or self.dispersion <= 0:
            raise ValueError("dispersion must be a finite positive number")

    # -- link machinery ----------------------------------------------------

    def inverse_link(self, eta):
        """Map the linear predictor to the mean scale.

        Logit means are clamped to ``[PROB_CLAMP, 1 - PROB_CLAMP]``.
        """
        eta = as_float_vector(eta, "eta")
        if self.kind == LOGIT_BERNOULLI:
            return np.clip(expit(eta), PROB_CLAMP, 1.0 - PROB_CLAMP)
        return eta.copy()

    def mean_derivative(self, eta):
        """Derivative of the inverse link, evaluated with the clamped mean."""
        eta = as_float_vector(eta, "eta")
        if self.kind == LOGIT_BERNOULLI:
            mu = self.inverse_link(eta)
            return mu * (1.0 - mu)
        return np.ones_like(eta)

    def working_response(self, y, eta):
        """First-order working response: eta plus the standardized residual."""
        y = as_float_vector(y, "y")
        eta = as_float_vector(eta, "eta")
        check_same_length(y, eta, "y", "eta")
        self.validate_response(y)
        mu = self.inverse_link(eta)
        return eta + (y - mu) / self.mean_derivative(eta)

    def variance_weight(self, eta):
        """Iterative weight: squared mean derivative over the variance.

        For the logit family this collapses to ``mu * (1 - mu)``; for the
        identity family it is the constant ``1 / dispersion``.
        """
        eta = as_float_vector(eta, "eta")
        if self.kind == LOGIT_BERNOULLI:
            mu = self.inverse_link(eta)
            return mu * (1.0 - mu)
        return np.full_like(eta, 1.0 / self.dispersion)

    # -- response validation ----------------------------------------------

    def validate_response(self, y):
        y = as_float_vector(y, "y")
        if self.kind == LOGIT_BERNOULLI:
            if not np.isin(y, (0.0, 1.0)).all():
                raise ValueError("logit-bernoulli responses must be 0 or 1")
        return y

    def initial_eta(self, y):
        """Constant starting linear predictor: link applied to the clamped mean."""
        y = self.validate_response(y)
        m = float(np.mean(y))
        if self.kind == LOGIT_BERNOULLI:
            m = min(max(m, PROB_CLAMP), 1.0 - PROB_CLAMP)
            return np.full(y.shape, np.log(m / (1.0 - m)))
        return np.full(y.shape, m)


def logit_bernoulli():
    """Bernoulli responses under the logit link."""
    return LinkFamily(LOGIT_BERNOULLI)


def identity_gaussian(dispersion=1.0):
    """Gaussian responses under the identity link."""
    return LinkFamily(IDENTITY_GAUSSIAN, dispersion)


def family_from_name(name, dispersion=1.0):
    """Resolve a family from a user-facing name, accepting short aliases."""
    key = str(name).strip().lower()
    if key in ("logit", "bernoulli", LOGIT_BERNOULLI):
        return logit_bernoulli()
    if key in ("identity", "gaussian", IDENTITY_GAUSSIAN):
        return identity_gaussian(dispersion)
    raise ValueError(f"unknown family {name!r}")
