"""Bundled synthetic 3-bubble fixture and its variants.

The base case is a small radial system (n1 - n2 - n3) with a must-run
baseload unit, two flexible gas units, one fast-start unit and a solar
resource at the remote bubble n3.  Variants tighten the remote interface to
force congestion-driven curtailment or raise the solar penetration to
produce the characteristic evening net-load ramp.
"""

from __future__ import annotations

import os

import numpy as np

from .profiles import Profile, write_profile

DAY = 1440

# Base-case sizing, MW.
LOAD_MEAN = 250.0
LOAD_SWING = 60.0
SOLAR_BASE = 80.0
SOLAR_CONGESTED = 100.0
SOLAR_HIGH = 160.0


def load_curve(n_minutes: int) -> np.ndarray:
    t = np.arange(n_minutes)
    return LOAD_MEAN + LOAD_SWING * np.sin(2 * np.pi * (t - 480.0) / DAY)


def solar_curve(n_minutes: int, amplitude: float) -> np.ndarray:
    t = np.arange(n_minutes) % DAY
    s = np.sin(np.pi * (t - 360.0) / 720.0)
    return amplitude * np.clip(s, 0.0, None)


def write_mini3(path: str, variant: str = "base", days: int = 4) -> str:
    """Write the fixture scenario and its profiles; returns the .scn path."""
    out_dir = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(out_dir, exist_ok=True)
    n = days * DAY

    if variant == "base":
        amp, limit = SOLAR_BASE, 200.0
    elif variant == "congestion":
        amp = SOLAR_CONGESTED
        limit = 0.5 * SOLAR_CONGESTED
    elif variant == "congestion-wide":
        amp = SOLAR_CONGESTED
        limit = 1.0 * SOLAR_CONGESTED   # doubled relative to "congestion"
    elif variant == "high-solar":
        amp, limit = SOLAR_HIGH, 200.0
    else:
        raise ValueError(f"unknown variant {variant!r}")

    total = load_curve(n)
    write_profile(os.path.join(out_dir, "load_n1.csv"), Profile(0.6 * total))
    write_profile(os.path.join(out_dir, "load_n2.csv"), Profile(0.4 * total))
    write_profile(os.path.join(out_dir, "solar_n3.csv"),
                  Profile(solar_curve(n, amp)))

    text = f"""# Synthetic 3-bubble fixture ({variant})
[network]
swing = ext
swing-attach = n1
gamma_loss = 0

[bubble n1]
[bubble n2]
[bubble n3]

[branch n1 n2]
weight = 1

[branch n2 n3]
weight = 1

[interface remote]
branch = n3 n2 1
limit = {limit:g}

[generator base1]
bubble = n1
kind = must-run
P^min = 60
P^max = 60
R^min = -10
R^max = 10
H_L = 5
C_F = 2
T_u = 1
T_d = 1
online = 1
initial-output = 60
online-hours = 48

[generator gas1]
bubble = n1
kind = must-run
P^min = 20
P^max = 150
R^min = -6
R^max = 6
H_F = 50
H_L = 8
H_Q = 0.002
C_F = 3
T_u = 1
T_d = 1
regulation-capacity = 50
online = 1
initial-output = 90
online-hours = 48

[generator gas2]
bubble = n2
kind = must-run
P^min = 20
P^max = 150
R^min = -6
R^max = 6
H_F = 60
H_L = 9
H_Q = 0.002
C_F = 3
T_u = 1
T_d = 1
online = 1
initial-output = 70
online-hours = 48

[generator fast1]
bubble = n2
kind = fast-start
P^min = 5
P^max = 80
R^min = -20
R^max = 20
H_F = 20
H_L = 14
H_U = 30
H_D = 10
C_F = 3
T_u = 1
T_d = 1
u^max = 6
online = 0
initial-output = 0
online-hours = -48

[semi sun1]
bubble = n3
kind = solar
d = 1
C = -5
profile = solar_n3.csv
eps_da = 0
eps_st = 0
eps_rt = 0

[load n1]
profile = load_n1.csv
eps_da = 0
eps_st = 0
eps_rt = 0

[load n2]
profile = load_n2.csv
eps_da = 0
eps_st = 0
eps_rt = 0

[reserves]
alpha_sys_TMSR = 0
alpha_sys_TMR = 1
alpha_sys_TMOR = 0
P_REG^REQ = 50

[timing]
scuc-horizon = 24
rtuc-step = 15
rtuc-horizon = 240
rtuc-period = 60
sced-step = 10
regulation-step = 1

[seeds]
master = 7
"""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
