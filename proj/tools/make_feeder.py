#!/usr/bin/env python3
"""Generate the bundled synthetic low-voltage feeder (data/feeder30.json).

30 buses, one Yn/Yn transformer modelled as a series impedance, four cable
types, 10 free customers (5 kW export / 6 kW import) and fixed single-phase
loads. Output is deterministic.
"""

import json
import math
import random
import sys

rng = random.Random(20240611)

# Sequence impedances in ohms per km (transformer: ohms, length 1).
LINE_CODES = [
    {"name": "tx", "z_plus": [0.0160, 0.0224], "z_zero": [0.0160, 0.0224]},
    {"name": "mains_240", "z_plus": [0.125, 0.070], "z_zero": [0.500, 0.210]},
    {"name": "mains_120", "z_plus": [0.253, 0.071], "z_zero": [0.950, 0.280]},
    {"name": "mains_70", "z_plus": [0.443, 0.072], "z_zero": [1.650, 0.330]},
    {"name": "service_25", "z_plus": [1.200, 0.090], "z_zero": [3.900, 0.420]},
]

# (from, to, code, length km)
LINES = [("grid", "b0", "tx", 1.0)]
backbone = ["b0"] + [f"b{i}" for i in range(1, 11)]
for i in range(1, 11):
    code = "mains_240" if i <= 4 else "mains_120"
    LINES.append((backbone[i - 1], backbone[i], code, round(rng.uniform(0.030, 0.050), 4)))
branch_b = ["b3"] + [f"b{i}" for i in range(11, 19)]
for i in range(1, len(branch_b)):
    LINES.append((branch_b[i - 1], branch_b[i], "mains_70", round(rng.uniform(0.025, 0.045), 4)))
branch_c = ["b6"] + [f"b{i}" for i in range(19, 25)]
for i in range(1, len(branch_c)):
    code = "mains_120" if i <= 3 else "mains_70"
    LINES.append((branch_c[i - 1], branch_c[i], code, round(rng.uniform(0.025, 0.045), 4)))
for bus, parent in zip([f"b{i}" for i in range(25, 29)], ["b10", "b18", "b24", "b8"]):
    LINES.append((parent, bus, "service_25", round(rng.uniform(0.015, 0.030), 4)))

buses = ["grid"] + [f"b{i}" for i in range(0, 29)]
assert len(buses) == 30 and len(LINES) == 29

FREE = ["1", "10", "11", "12", "13", "14", "15", "16", "17", "18"]
free_buses = ["b25", "b10", "b26", "b18", "b15", "b27", "b24", "b21", "b28", "b8"]
phases = "abc"

customers = []
for k, (cid, bus) in enumerate(zip(FREE, free_buses)):
    customers.append({"id": cid, "bus": bus, "phase": phases[k % 3], "q": 0.0, "p_min": -5.0, "p_max": 6.0})

fixed_id = 100
for bus in buses[2:]:
    for _ in range(rng.choice([1, 1, 2])):
        customers.append({
            "id": str(fixed_id),
            "bus": bus,
            "phase": rng.choice(phases),
            "q": 0.0,
            "p_fixed": round(rng.uniform(0.2, 1.8), 2),
        })
        fixed_id += 1

third = 2.0 * math.pi / 3.0
doc = {
    "base": {"voltage": 230.0, "power": 1.0},
    "limits": {"v_min": 0.95, "v_max": 1.05},
    "buses": [{"id": b} for b in buses],
    "reference": {
        "bus": "grid",
        "voltage": [[1.0, 0.0], [math.cos(-third), math.sin(-third)], [math.cos(third), math.sin(third)]],
    },
    "line_codes": LINE_CODES,
    "lines": [
        {"id": f"{a}-{b}", "from": a, "to": b, "code": code, "length": length}
        for a, b, code, length in LINES
    ],
    "customers": customers,
}

out = sys.argv[1] if len(sys.argv) > 1 else "data/feeder30.json"
with open(out, "w") as fh:
    json.dump(doc, fh, indent=2)
    fh.write("\n")
