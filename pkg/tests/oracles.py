"""Independently derived reference values used across the test suite.

Every number here comes from a closed form (separation of variables,
elementary integrals, Bessel zeros) rather than from speclab itself.
"""
import math

import numpy as np
from scipy.special import jn_zeros

SQRT2 = math.sqrt(2.0)
PI = math.pi

# first Dirichlet eigenvalue of the unit disk: j_{0,1}^2
J01_SQ = float(jn_zeros(0, 1)[0] ** 2)

# rectangle mu = (1, 2^{-1/4}): lambda = k1^2 + sqrt2 k2^2
RECT_FIRST4 = (1 + SQRT2, 4 + SQRT2, 1 + 4 * SQRT2, 4 + 4 * SQRT2)

# (2/pi) int_{pi/4}^{3pi/4} sin^2 = 1/2 + 1/pi
HALF_INTERVAL_MASS = 0.5 + 1 / PI

# (2/pi) int_0^pi x sin(x) sin(2x) dx
COUPLING_X_12 = -16 / (9 * PI)

# int_0^pi x (2/pi) sin^2(kx) dx, any k
POTENTIAL_X = PI / 2

# Gram of squared sines on (0, pi): (1/pi)(I/2 + ones), smallest eigenvalue 1/(2pi)
GRAM_1D_MIN = 1 / (2 * PI)

# (1,2)/(3,1) crossing on mu2(t) = 0.6 + 0.3t: 1 + 4/mu^2 = 9 + 1/mu^2  =>  mu = sqrt(3/8)
CROSSING_T_12_31 = (math.sqrt(3 / 8) - 0.6) / 0.3
# (2,2)/(3,1): 4 + 4/mu^2 = 9 + 1/mu^2  =>  mu = sqrt(3/5)
CROSSING_T_22_31 = (math.sqrt(3 / 5) - 0.6) / 0.3


def closed_form_rect(n):
    vals = sorted(k1**2 + SQRT2 * k2**2 for k1 in range(1, 12) for k2 in range(1, 12))
    return np.array(vals[:n])


def rectangle_curve(K, t):
    mu2 = 0.6 + 0.3 * np.asarray(t)
    return K[0] ** 2 + (K[1] / mu2) ** 2
