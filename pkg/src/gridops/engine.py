"""Closed-loop simulation: layered scheduling over actual 1-minute profiles.

Each day starts with an hourly commitment run; every hour a 15-minute
commitment window re-optimizes fast-start units against fresher forecasts;
every 10 minutes an economic dispatch issues setpoints; every minute units
ramp linearly toward their setpoints, the DC network is solved, and the
regulation loop responds to the raw imbalance at the swing bus.
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dispatch import Forecasts, InitialState, initial_from_scenario
from .grid import dc_flow, make_regulation, regulation_step
from .profiles import synthesize_error
from .rtuc import run_rtuc
from .scenario import Scenario, scenario_hash
from .sced import run_sced
from .scuc import run_scuc

_LAYER_EPS = {"scuc": 0, "rtuc": 1, "sced": 2}
_LAYER_KIND = {"scuc": "day-ahead", "rtuc": "short-term", "sced": "real-time"}


class EngineError(Exception):
    pass


@dataclass
class SimulationTrace:
    minutes: int
    branch_names: list[str]
    interface_names: list[str]
    reg_units: list[str]
    imbalance_raw: np.ndarray = None
    imbalance: np.ndarray = None
    regulation: np.ndarray = None          # minutes x reg units, MW
    load: np.ndarray = None                # physical MW withdrawn
    generation: np.ndarray = None
    ver_available: np.ndarray = None
    ver_delivered: np.ndarray = None
    shed: np.ndarray = None
    supergen: np.ndarray = None
    flows: np.ndarray = None               # minutes x branches
    interface_flow: np.ndarray = None      # minutes x interfaces
    interface_limit: np.ndarray = None
    unit_output: dict[str, np.ndarray] = field(default_factory=dict)
    reg_saturation: float = 0.0
    events: list[str] = field(default_factory=list)

    def __post_init__(self):
        m = self.minutes
        for name in ("imbalance_raw", "imbalance", "load", "generation",
                     "ver_available", "ver_delivered", "shed", "supergen"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(m))
        if self.regulation is None:
            self.regulation = np.zeros((m, len(self.reg_units)))
        if self.flows is None:
            self.flows = np.zeros((m, len(self.branch_names)))
        if self.interface_flow is None:
            self.interface_flow = np.zeros((m, len(self.interface_names)))
        if self.interface_limit is None:
            self.interface_limit = np.zeros((m, len(self.interface_names)))

    def curtailment(self) -> np.ndarray:
        return self.ver_available - self.ver_delivered

    def net_load(self) -> np.ndarray:
        return self.load - self.ver_delivered


def _entity_seed(master: int, entity: str, layer: str, window: int) -> int:
    tag = f"{entity}|{layer}|{window}".encode()
    return (int(master) * 1_000_003 + zlib.crc32(tag)) % (2 ** 31)


def _window_mean(values: np.ndarray, m0: int, block: int, n: int) -> np.ndarray:
    """Block means over [m0, m0 + n*block); the last sample is held past
    the end of the recorded profile."""
    out = np.zeros(n)
    last = len(values) - 1
    for b in range(n):
        lo = m0 + b * block
        hi = lo + block
        idx = np.clip(np.arange(lo, hi), 0, last)
        out[b] = float(values[idx].mean())
    return out


class _ForecastMaker:
    """Deterministic per-entity forecast streams for each layer."""

    def __init__(self, scn: Scenario, seed: int):
        self.scn = scn
        self.seed = seed
        self.peak = scn.peak_load

    def window(self, layer: str, m0: int, block: int, n: int,
               window_id: int) -> Forecasts:
        scn = self.scn
        which = _LAYER_EPS[layer]
        kind = _LAYER_KIND[layer]
        load = {}
        for ld in scn.loads:
            best = _window_mean(ld.profile.values, m0, block, n)
            err = synthesize_error(
                _entity_seed(self.seed, f"load:{ld.bubble}", layer, window_id),
                ld.eps(which), 1.0, self.peak, n, kind)
            load[ld.bubble] = np.clip(best - err, 0.0, np.inf)
        semi = {}
        for sm in scn.semis:
            best = _window_mean(sm.profile.values, m0, block, n)
            err = synthesize_error(
                _entity_seed(self.seed, f"semi:{sm.id}", layer, window_id),
                sm.eps(which), 1.0, sm.capacity or self.peak, n, kind)
            semi[sm.id] = np.clip(best - err, 0.0, sm.capacity or np.inf)
        return Forecasts(load=load, semi=semi)


def _outage_masks(scn: Scenario, m0: int, block: int, n: int):
    gen, semi = {}, {}
    gen_ids = {g.id for g in scn.generators}
    semi_ids = {s.id for s in scn.semis}
    for ev in scn.outages:
        mask = np.zeros(n)
        for b in range(n):
            lo = m0 + b * block
            # Out if the outage covers any part of the block.
            if lo < ev.start + ev.duration and lo + block > ev.start:
                mask[b] = 1.0
        if not mask.any():
            continue
        if ev.resource in gen_ids:
            gen[ev.resource] = np.maximum(gen.get(ev.resource, 0.0), mask)
        elif ev.resource in semi_ids:
            semi[ev.resource] = np.maximum(semi.get(ev.resource, 0.0), mask)
    return gen or None, semi or None


def _resource_out(scn: Scenario, rid: str, minute: int) -> bool:
    return any(ev.resource == rid and
               ev.start <= minute < ev.start + ev.duration
               for ev in scn.outages)


def simulate(scn: Scenario, minutes: int, seed: int | None = None,
             scenario_path: str | None = None) -> SimulationTrace:
    """Run the full control cascade for ``minutes`` simulated minutes."""
    t = scn.timing
    if seed is None:
        seed = scn.seed
    maker = _ForecastMaker(scn, seed)
    net = scn.network
    gamma = scn.gamma_loss

    gens = scn.generators
    reg = make_regulation(gens)
    trace = SimulationTrace(
        minutes=minutes,
        branch_names=[f"{b.from_bubble}-{b.to_bubble}" for b in net.branches],
        interface_names=[i.name for i in net.interfaces],
        reg_units=list(reg.unit_ids))
    trace.reg_saturation = reg.total_saturation
    for g in gens:
        trace.unit_output[g.id] = np.zeros(minutes)

    state = initial_from_scenario(scn)
    output = dict(state.output)          # actual MW per generator
    online = dict(state.online)
    starts_used: dict[str, int] = {g.id: 0 for g in gens}

    day_sched = None
    intra = None
    intra_start = 0
    sced_now = None
    sced_base: dict[str, float] = {}
    sced_minute = 0
    rtuc_steps = t.rtuc_horizon_min // t.rtuc_step_min
    emergency: set[int] = set()
    for ev in scn.outages:
        if ev.start < minutes:
            emergency.add(ev.start)
            nxt = ((ev.start // t.rtuc_step_min) + 1) * t.rtuc_step_min
            emergency.add(nxt)

    def current_state() -> InitialState:
        st = InitialState(online=dict(online), output=dict(output),
                          run_hours=dict(state.run_hours),
                          starts_used=dict(starts_used),
                          energy=dict(state.energy),
                          mode_gen=dict(state.mode_gen),
                          mode_pump=dict(state.mode_pump))
        return st

    for m in range(minutes):
        # --- day-ahead commitment ---------------------------------------
        if m % (t.scuc_horizon_h * 60) == 0:
            og, os_ = _outage_masks(scn, m, 60, t.scuc_horizon_h)
            fc = maker.window("scuc", m, 60, t.scuc_horizon_h,
                              m // (t.scuc_horizon_h * 60))
            day_sched = run_scuc(scn, fc, current_state(), og, os_)
            starts_used = {g.id: 0 for g in gens}
            trace.events.append(f"{m}: day-ahead commitment")

        # --- same-day fast-start commitment -----------------------------
        if m % t.rtuc_period_min == 0 or m in emergency:
            og, os_ = _outage_masks(scn, m, t.rtuc_step_min, rtuc_steps)
            fc = maker.window("rtuc", m, t.rtuc_step_min, rtuc_steps, m)
            intra = run_rtuc(scn, fc, current_state(), day_sched, m,
                             og, os_)
            intra_start = m
            if m in emergency:
                trace.events.append(f"{m}: contingency commitment window")

        # --- commitment state for this minute ---------------------------
        interval = min((m - intra_start) // t.rtuc_step_min, rtuc_steps - 1)
        for g in gens:
            w_now = float(intra.w[g.id][interval] > 0.5)
            if _resource_out(scn, g.id, m):
                w_now = 0.0
            if w_now > 0.5 and online.get(g.id, 0.0) < 0.5:
                starts_used[g.id] = starts_used.get(g.id, 0) + 1
                output[g.id] = max(output.get(g.id, 0.0), 0.0)
            if w_now < 0.5:
                output[g.id] = 0.0
            online[g.id] = w_now

        # --- economic dispatch ------------------------------------------
        if m % t.sced_step_min == 0:
            og, os_ = _outage_masks(scn, m, t.sced_step_min, 1)
            fc = maker.window("sced", m, t.sced_step_min, 1, m)
            commitment = {g.id: online[g.id] for g in gens}
            starts = {g.id: float(intra.u[g.id][interval]) for g in gens}
            stops = {g.id: float(intra.v[g.id][interval]) for g in gens}
            hour = (m // 60) % (t.scuc_horizon_h)
            ps = {st_.id: np.array([day_sched.storage_gen[st_.id][hour]])
                  for st_ in scn.storages}
            ss = {st_.id: np.array([day_sched.storage_pump[st_.id][hour]])
                  for st_ in scn.storages}
            sced_now = run_sced(scn, fc, current_state(), commitment,
                                starts, stops, (ps, ss), m, og, os_)
            sced_base = dict(output)
            sced_minute = m

        # --- minute physics ---------------------------------------------
        frac = (m - sced_minute + 1) / t.sced_step_min
        injections = {b: 0.0 for b in net.bubbles}
        gen_total = 0.0
        for g in gens:
            if online[g.id] > 0.5:
                target = float(sced_now.p[g.id][0])
                base = sced_base.get(g.id, 0.0)
                output[g.id] = base + (target - base) * min(frac, 1.0)
            trace.unit_output[g.id][m] = output[g.id]
            injections[g.bubble] += output[g.id]
            gen_total += output[g.id]
        for st_ in scn.storages:
            hour = (m // 60) % t.scuc_horizon_h
            pgen = float(day_sched.storage_gen[st_.id][hour])
            ppump = float(day_sched.storage_pump[st_.id][hour])
            injections[st_.bubble] += pgen - ppump
            gen_total += pgen - ppump
            state.energy[st_.id] += (st_.eta * ppump - pgen) / 60.0
        for dr in scn.drs:
            val = float(sced_now.dr[dr.id][0])
            injections[dr.bubble] += val
            gen_total += val
        avail_tot = 0.0
        deliv_tot = 0.0
        for sm in scn.semis:
            avail = float(sm.profile.values[min(m, len(sm.profile) - 1)])
            if _resource_out(scn, sm.id, m):
                avail = 0.0
            cfrac = float(sced_now.curtail[sm.id][0])
            delivered = (1.0 - sm.d * cfrac) * avail
            injections[sm.bubble] += delivered
            avail_tot += avail
            deliv_tot += delivered
        shed_tot = 0.0
        load_tot = 0.0
        for ld in scn.loads:
            actual = float(ld.profile.values[min(m, len(ld.profile) - 1)])
            sfrac = float(sced_now.shed.get(ld.bubble, np.zeros(1))[0])
            served = (1.0 - ld.d * sfrac) * actual
            shed_tot += actual - served
            # Losses scale the physical withdrawal.
            injections[ld.bubble] -= (1.0 + gamma) * served
            load_tot += served
        sg = float(sum(sced_now.super_pos[b][0] - sced_now.super_neg[b][0]
                       for b in net.bubbles))

        raw_state = dc_flow(net, injections)
        i_raw = raw_state.swing_exchange
        residual = regulation_step(i_raw, reg)
        with_reg = dict(injections)
        for uid, bub, gval in zip(reg.unit_ids, reg.bubbles, reg.g):
            with_reg[bub] = with_reg.get(bub, 0.0) + gval
        gs = dc_flow(net, with_reg)

        trace.imbalance_raw[m] = i_raw
        trace.imbalance[m] = residual
        trace.regulation[m, :] = reg.g
        trace.load[m] = load_tot
        trace.generation[m] = gen_total
        trace.ver_available[m] = avail_tot
        trace.ver_delivered[m] = deliv_tot
        trace.shed[m] = shed_tot
        trace.supergen[m] = sg
        trace.flows[m, :] = gs.branch_flows
        for i, name in enumerate(trace.interface_names):
            flow, limit = gs.interface_flows[name]
            trace.interface_flow[m, i] = flow
            trace.interface_limit[m, i] = limit
    return trace


def write_trace(outdir: str, trace: SimulationTrace, scn: Scenario,
                seed: int, scenario_path: str | None = None) -> None:
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "trace.csv"), "w", encoding="utf-8") as fh:
        fh.write("minute,imbalance_raw_mw,imbalance_mw,regulation_mw,"
                 "load_mw,generation_mw,ver_available_mw,ver_delivered_mw,"
                 "shed_mw,supergen_mw\n")
        for m in range(trace.minutes):
            fh.write(f"{m},{trace.imbalance_raw[m]:.6f},"
                     f"{trace.imbalance[m]:.6f},"
                     f"{trace.regulation[m].sum():.6f},"
                     f"{trace.load[m]:.6f},{trace.generation[m]:.6f},"
                     f"{trace.ver_available[m]:.6f},"
                     f"{trace.ver_delivered[m]:.6f},"
                     f"{trace.shed[m]:.6f},{trace.supergen[m]:.6f}\n")
    with open(os.path.join(outdir, "flows.csv"), "w", encoding="utf-8") as fh:
        head = ["minute"] + [f"flow:{b}" for b in trace.branch_names] + \
            [f"iface:{n}" for n in trace.interface_names] + \
            [f"limit:{n}" for n in trace.interface_names]
        fh.write(",".join(head) + "\n")
        for m in range(trace.minutes):
            row = [str(m)] + [f"{x:.6f}" for x in trace.flows[m]] + \
                [f"{x:.6f}" for x in trace.interface_flow[m]] + \
                [f"{x:.6f}" for x in trace.interface_limit[m]]
            fh.write(",".join(row) + "\n")
    with open(os.path.join(outdir, "regulation.csv"), "w",
              encoding="utf-8") as fh:
        fh.write(",".join(["minute"] + trace.reg_units) + "\n")
        for m in range(trace.minutes):
            row = [str(m)] + [f"{x:.6f}" for x in trace.regulation[m]]
            fh.write(",".join(row) + "\n")
    with open(os.path.join(outdir, "units.csv"), "w", encoding="utf-8") as fh:
        ids = sorted(trace.unit_output)
        fh.write(",".join(["minute"] + ids) + "\n")
        for m in range(trace.minutes):
            row = [str(m)] + [f"{trace.unit_output[g][m]:.6f}" for g in ids]
            fh.write(",".join(row) + "\n")
    manifest = {
        "scenario_hash": scenario_hash(scenario_path) if scenario_path
        else None,
        "seed": int(seed),
        "version": __version__,
        "minutes": trace.minutes,
    }
    with open(os.path.join(outdir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_trace(outdir: str) -> SimulationTrace:
    """Rebuild a trace from the CSV set written by write_trace."""
    def load(name):
        path = os.path.join(outdir, name)
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return header, data

    head, main = load("trace.csv")
    fhead, fdata = load("flows.csv")
    rhead, rdata = load("regulation.csv")
    uhead, udata = load("units.csv")
    branch = [h.split(":", 1)[1] for h in fhead if h.startswith("flow:")]
    iface = [h.split(":", 1)[1] for h in fhead if h.startswith("iface:")]
    m = main.shape[0]
    tr = SimulationTrace(minutes=m, branch_names=branch,
                         interface_names=iface, reg_units=rhead[1:])
    col = {name: i for i, name in enumerate(head)}
    tr.imbalance_raw = main[:, col["imbalance_raw_mw"]]
    tr.imbalance = main[:, col["imbalance_mw"]]
    tr.load = main[:, col["load_mw"]]
    tr.generation = main[:, col["generation_mw"]]
    tr.ver_available = main[:, col["ver_available_mw"]]
    tr.ver_delivered = main[:, col["ver_delivered_mw"]]
    tr.shed = main[:, col["shed_mw"]]
    tr.supergen = main[:, col["supergen_mw"]]
    nb, ni = len(branch), len(iface)
    tr.flows = fdata[:, 1:1 + nb]
    tr.interface_flow = fdata[:, 1 + nb:1 + nb + ni]
    tr.interface_limit = fdata[:, 1 + nb + ni:1 + nb + 2 * ni]
    tr.regulation = rdata[:, 1:] if rdata.shape[1] > 1 else np.zeros((m, 0))
    for i, gid in enumerate(uhead[1:]):
        tr.unit_output[gid] = udata[:, 1 + i]
    return tr
