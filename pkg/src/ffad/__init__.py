"""Frechet Fourier-transform Auto-encoder Distance (FFAD) for time series.

Pipeline: fixed-length Fourier featurization of variable-length series, a
GRU auto-encoder trained across heterogeneous datasets, and a Frechet
distance between Gaussian fits of the encoded sample sets.
"""

__version__ = "0.1.0"
