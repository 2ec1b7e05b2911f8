"""Special functions and small numeric helpers used by the estimators."""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061

# Bernoulli-number coefficients B_2k / (2k) of the asymptotic digamma series.
_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_SHIFT = 10.0


def digamma(x):
    """Logarithmic derivative of the gamma function.

    Accepts a scalar or an array of positive reals. Arguments below 10 are
    shifted upward with psi(x) = psi(x + 1) - 1/x, then the asymptotic
    expansion is summed; absolute error stays below 1e-13 for x >= 1.

    Raises
    ------
    ValueError
        If any argument is not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("digamma is only defined here for x > 0")
    shifted = arr.copy()
    correction = np.zeros_like(arr)
    small = shifted < _SHIFT
    while np.any(small):
        correction[small] -= 1.0 / shifted[small]
        shifted[small] += 1.0
        small = shifted < _SHIFT
    inv2 = 1.0 / (shifted * shifted)
    series = np.zeros_like(arr)
    for coef in reversed(_ASYMPTOTIC):
        series = (series + coef) * inv2
    out = np.log(shifted) - 0.5 / shifted - series + correction
    if np.ndim(x) == 0:
        return float(out)
    return out


def lp_ball_log_volume_constant(d, p=math.inf):
    """Log of the volume of the unit l_p ball in d dimensions.

    The unit ball here has "radius" 1 in the l_p sense, so for p = inf it is
    the cube [-1, 1]^d with log-volume d log 2.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p!r}")
    if math.isinf(p):
        return d * math.log(2.0)
    return d * math.log(2.0) + d * math.lgamma(1.0 + 1.0 / p) - math.lgamma(1.0 + d / p)


def mean(values):
    """Arithmetic mean with exactly rounded summation (order-insensitive)."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("mean of an empty sequence")
    return math.fsum(vals) / len(vals)
