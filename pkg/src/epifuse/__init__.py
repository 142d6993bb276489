"""epifuse: epidemic state forecasting from fused temporal/spatial CNNs,
stabilized by a stochastic ensemble Kalman filter, with SEIR baselines."""

__version__ = "0.1.0"
