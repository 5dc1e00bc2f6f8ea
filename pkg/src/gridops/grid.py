"""Physical layer: zonal DC flow, 1-minute regulation, actual reserves.

The swing bubble is an external node attached through virtual branches; its
exchange is the system imbalance.  Regulation is a rate-limited gain with
saturation acting on that imbalance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scenario import Generator, ZonalNetwork


class GridError(Exception):
    pass


@dataclass
class GridState:
    injections: dict[str, float]
    branch_flows: np.ndarray                    # per scenario branch, from->to positive
    interface_flows: dict[str, tuple[float, float]]   # name -> (flow, limit)
    swing_exchange: float                       # MW absorbed by the swing node


@dataclass
class RegulationState:
    unit_ids: list[str]
    bubbles: list[str]
    saturation: np.ndarray                      # MW, per unit
    g: np.ndarray = field(default=None)
    rate: np.ndarray = field(default=None)      # MW/min
    participation: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.unit_ids)
        self.saturation = np.asarray(self.saturation, dtype=float)
        if self.g is None:
            self.g = np.zeros(n)
        if self.rate is None:
            # Automatic response rate: 10% of the saturation limit per minute.
            self.rate = 0.1 * self.saturation
        if self.participation is None:
            total = self.saturation.sum()
            if total > 0:
                self.participation = self.saturation / total
            else:
                self.participation = np.zeros(n)

    @property
    def total(self) -> float:
        return float(self.g.sum())

    @property
    def total_saturation(self) -> float:
        return float(self.saturation.sum())


@dataclass
class ReserveSnapshot:
    lfr_up: float = 0.0          # MW
    lfr_down: float = 0.0        # MW
    ramp_up: float = 0.0         # MW/min
    ramp_down: float = 0.0       # MW/min


def make_regulation(generators: list[Generator]) -> RegulationState:
    units = [g for g in generators if g.reg_capacity > 0]
    return RegulationState(
        unit_ids=[g.id for g in units],
        bubbles=[g.bubble for g in units],
        saturation=np.array([g.reg_capacity for g in units], dtype=float),
    )


def dc_flow(net: ZonalNetwork, injections: dict[str, float]) -> GridState:
    """Solve the susceptance-weighted DC network with the swing as reference.

    ``injections`` are net MW per bubble (generation minus withdrawal).  The
    swing node absorbs the total mismatch.
    """
    nodes = list(net.bubbles)
    if net.swing:
        nodes.append(net.swing)
    idx = {b: i for i, b in enumerate(nodes)}
    n = len(nodes)

    edges = [(idx[br.from_bubble], idx[br.to_bubble], br.weight)
             for br in net.branches]
    virt = [(idx[b], idx[net.swing], 1.0) for b in net.swing_attach]

    lap = np.zeros((n, n))
    for a, b, w in edges + virt:
        lap[a, a] += w
        lap[b, b] += w
        lap[a, b] -= w
        lap[b, a] -= w

    p = np.zeros(n)
    for b, mw in injections.items():
        p[idx[b]] += mw
    swing = idx[net.swing] if net.swing else n - 1
    p[swing] = -p.sum() + p[swing]  # swing balances the system

    keep = [i for i in range(n) if i != swing]
    theta = np.zeros(n)
    if keep:
        sub = lap[np.ix_(keep, keep)]
        try:
            theta[keep] = np.linalg.solve(sub, p[keep])
        except np.linalg.LinAlgError:
            raise GridError("network is disconnected") from None

    flows = np.array([w * (theta[a] - theta[b]) for a, b, w in edges])
    iface = {}
    for itf in net.interfaces:
        total = 0.0
        for frm, to, sign in itf.members:
            bi = net.branch_index(frm, to)
            if bi >= 0:
                total += sign * flows[bi]
            else:
                total -= sign * flows[~bi]
        iface[itf.name] = (total, itf.limit)

    exchange = float(sum(injections.values()))
    return GridState(injections=dict(injections), branch_flows=flows,
                     interface_flows=iface, swing_exchange=exchange)


def regulation_step(imbalance: float, reg: RegulationState) -> float:
    """Advance regulation one minute against the raw (pre-regulation)
    imbalance; returns the residual the swing bus still absorbs.

    Each unit tracks a target of -participation*imbalance, limited to its
    response rate per minute and clamped at saturation.  A zero imbalance
    therefore walks the units back to their baseline at the same rate.
    """
    if len(reg.unit_ids):
        psum = float(reg.participation.sum())
        if reg.saturation.sum() > 0 and abs(psum - 1.0) > 1e-9:
            raise GridError(f"participation factors sum to {psum}")
        target = -imbalance * reg.participation
        delta = np.clip(target - reg.g, -reg.rate, reg.rate)
        reg.g = np.clip(reg.g + delta, -reg.saturation, reg.saturation)
    return imbalance + reg.total


def actual_reserves(units: list[Generator], online: dict[str, float],
                    outputs: dict[str, float], prev_outputs: dict[str, float],
                    dt_min: float = 1.0,
                    outage: dict[str, float] | None = None) -> ReserveSnapshot:
    """Reserve quantities actually present in the current system state.

    Capacity reserves are online headroom/foot-room; ramping reserves are the
    unused ramp-rate capability net of the movement already scheduled over
    ``dt_min`` minutes.
    """
    snap = ReserveSnapshot()
    outage = outage or {}
    for g in units:
        w = online.get(g.id, 0.0)
        if w <= 0:
            continue
        cap = (1.0 - outage.get(g.id, 0.0)) * g.p_max
        p = outputs.get(g.id, 0.0)
        dp = (p - prev_outputs.get(g.id, p)) / dt_min
        snap.lfr_up += max(w * cap - p, 0.0)
        snap.lfr_down += max(p - w * g.p_min, 0.0)
        snap.ramp_up += max(w * g.r_max - dp, 0.0)
        snap.ramp_down += max(w * (-g.r_min) + dp, 0.0)
    return snap
