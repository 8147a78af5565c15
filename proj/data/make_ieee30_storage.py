#!/usr/bin/env python3
"""Writes ieee30_storage.json: a 30-bus day-ahead case with 3 wind farms and
5 storages over 48 half-hour slots.

Topology, reactances and load shares follow the IEEE 30-bus test system.
Bus loads are scaled to a 189 MW peak and the three wind farms to a 60 MW
combined peak. The daily curves are synthetic: a load trough and a wind
peak coincide between 02:00 and 05:00 so that generator G1 alone is marginal
in exactly those six slots. Setting the linear cost of G1 therefore pins the
price there, which is how the table scenario steers the storage-bus LMP.

Placements:
  wind farms   buses 2, 4, 6   (20 MW peak each)
  storages     buses 4, 7, 12, 19, 24
  G1 capacity  60 MW (reduced from 80 so that it saturates outside the window)
"""

import json
import pathlib

BRANCHES = [  # from, to, reactance, rating
    (1, 2, 0.06, 130), (1, 3, 0.19, 130), (2, 4, 0.17, 65), (3, 4, 0.04, 130),
    (2, 5, 0.20, 130), (2, 6, 0.18, 65), (4, 6, 0.04, 90), (5, 7, 0.12, 70),
    (6, 7, 0.08, 130), (6, 8, 0.04, 32), (6, 9, 0.21, 65), (6, 10, 0.56, 32),
    (9, 11, 0.21, 65), (9, 10, 0.11, 65), (4, 12, 0.26, 65), (12, 13, 0.14, 65),
    (12, 14, 0.26, 32), (12, 15, 0.13, 32), (12, 16, 0.20, 32), (14, 15, 0.20, 16),
    (16, 17, 0.19, 16), (15, 18, 0.22, 16), (18, 19, 0.13, 16), (19, 20, 0.07, 32),
    (10, 20, 0.21, 32), (10, 17, 0.08, 32), (10, 21, 0.07, 32), (10, 22, 0.15, 32),
    (21, 22, 0.02, 32), (15, 23, 0.20, 16), (22, 24, 0.18, 16), (23, 24, 0.27, 16),
    (24, 25, 0.33, 16), (25, 26, 0.38, 16), (25, 27, 0.21, 16), (28, 27, 0.40, 65),
    (27, 29, 0.42, 16), (27, 30, 0.60, 16), (29, 30, 0.45, 16), (8, 28, 0.20, 32),
    (6, 28, 0.06, 32),
]

LOADS = {  # MW at peak
    2: 21.7, 3: 2.4, 4: 7.6, 7: 22.8, 8: 30.0, 10: 5.8, 12: 11.2, 14: 6.2,
    15: 8.2, 16: 3.5, 17: 9.0, 18: 3.2, 19: 9.5, 20: 2.2, 21: 17.5, 23: 3.2,
    24: 8.7, 26: 3.5, 29: 2.4, 30: 10.6,
}

GENERATORS = [  # id, bus, p_max, quadratic, linear
    ("G1", 1, 60.0, 0.0, 2.0),
    ("G2", 2, 80.0, 0.0175, 1.75),
    ("G3", 22, 50.0, 0.0625, 1.0),
    ("G4", 27, 55.0, 0.00834, 3.25),
    ("G5", 23, 30.0, 0.025, 3.0),
    ("G6", 13, 40.0, 0.025, 3.0),
]

WIND_BUSES = (2, 4, 6)
STORAGE_BUSES = (4, 7, 12, 19, 24)

# Hourly load factors, peak 1.0 at 18:00; trough at 02:00-05:00.
LOAD_HOURLY = [0.64, 0.62, 0.52, 0.50, 0.50, 0.56, 0.68, 0.78, 0.86, 0.91, 0.94, 0.96,
               0.95, 0.94, 0.93, 0.94, 0.96, 0.99, 1.00, 0.98, 0.93, 0.85, 0.76, 0.68]
# Hourly wind factors, gusting to 1.0 during the load trough.
WIND_HOURLY = [0.40, 0.38, 0.98, 1.00, 0.96, 0.36, 0.30, 0.26, 0.24, 0.22, 0.20, 0.20,
               0.22, 0.24, 0.26, 0.28, 0.30, 0.32, 0.34, 0.36, 0.38, 0.40, 0.40, 0.40]

PEAK_LOAD = 189.0
PEAK_WIND = 60.0


def half_hourly(hourly):
    return [hourly[t // 2] for t in range(48)]


def main():
    scale = PEAK_LOAD / sum(LOADS.values())
    load = half_hourly(LOAD_HOURLY)
    wind = half_hourly(WIND_HOURLY)
    case = {
        "name": "ieee30-storage",
        "buses": list(range(1, 31)),
        "reference_bus": 1,
        "horizon_T": 48,
        "delta_t": 0.5,
        "lines": [
            {"id": f"L{f}-{t}", "from_bus": f, "to_bus": t, "reactance": x,
             "flow_min": -float(r), "flow_max": float(r)}
            for f, t, x, r in BRANCHES
        ],
        "generators": [
            {"id": g, "bus": b, "p_min": 0.0, "p_max": pmax, "ramp_down_rate": -200.0,
             "ramp_up_rate": 200.0, "cost_quadratic": a, "cost_linear": c}
            for g, b, pmax, a, c in GENERATORS
        ],
        "storages": [
            {"id": f"S{k + 1}", "bus": b, "charge_max": 2.0, "discharge_max": 2.0,
             "energy_min": 0.0, "energy_max": 2.0, "energy_initial": 1.0, "eta_c": 0.9,
             "eta_d": 0.9, "self_discharge": 0.0, "charge_fee_rate": 1.5,
             "discharge_cost_linear": 2.5}
            for k, b in enumerate(STORAGE_BUSES)
        ],
        "demand": {str(b): [round(p * scale * f, 4) for f in load] for b, p in LOADS.items()},
        "wind": {str(b): [round(PEAK_WIND / len(WIND_BUSES) * f, 4) for f in wind] for b in WIND_BUSES},
    }
    out = pathlib.Path(__file__).with_name("ieee30_storage.json")
    out.write_text(json.dumps(case, indent=1) + "\n")


if __name__ == "__main__":
    main()
