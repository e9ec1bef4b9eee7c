"""Functional time series forecasting with an RKHS-represented ARH(1) model
and simultaneous predictive bands from residual-bootstrap pseudo-replicates
classified by minimum-entropy-set selection."""

__version__ = "0.1.0"
