"""Deterministic multi-layer operations simulator for zonal bulk power systems.

Layers a day-ahead unit commitment, a same-day fast-start commitment, a
10-minute economic dispatch and a 1-minute regulation service over a DC
zonal ("pipe and bubble") network model, and reports reserve, curtailment,
congestion and imbalance statistics.
"""

__version__ = "0.1.0"
