"""Built-in one-dimensional example.

The original example's data-generating polynomial and training set are not
published, so this package defines its own degree-5 polynomial on [0, 10]
(roots at 0.5, 3, 5.5, 8 and 10.5, scaled by 0.04) and an evenly spaced
training set. The per-unit kernel widths are the published ones.
"""
import numpy as np

from .core import TabularDataset

POLY_COEFFICIENTS = (-27.72, 75.825, -45.925, 10.85, -1.1, 0.04)
POLY_SPEC = "poly:" + ",".join(repr(c) for c in POLY_COEFFICIENTS)

REFERENCE_POINTS = tuple(float(v) for v in np.linspace(0.0, 10.0, 11))

TABLE1_KAPPAS = (0.0601, 0.1079, 0.0585, 0.2854, 0.1780, 0.0100, 0.1807, 0.2490, 0.0612, 0.0731, 0.1504)

# unit: (nwise_lime, nwise_ode, corr_lime, corr_ode), averaged over 100 runs
TABLE1_RESULTS = {
    0: (16429, 16252, 0.8586, 0.9983),
    1: (16464, 16244, 0.9154, 0.9535),
    2: (16720, 16553, 0.8918, 0.9488),
    3: (19137, 20546, 0.9478, 0.9478),
    4: (26692, 23679, 0.9492, 0.9492),
    5: (34171, 34149, 0.3547, 0.9587),
    6: (24572, 20634, 0.9485, 0.9485),
    7: (30418, 30991, 0.9495, 0.9495),
    8: (66340, 61729, 0.7795, 0.9506),
    9: (48558, 34245, 0.9312, 0.9502),
    10: (174770, 316728, 0.9722, 0.9722),
}


def training_data(n=101):
    return TabularDataset(np.linspace(0.0, 10.0, n)[:, None], ("x",))
