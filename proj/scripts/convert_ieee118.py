#!/usr/bin/env python3
"""One-time conversion of the MATPOWER/PYPOWER case118 data into data/ieee118.json.

usage: convert_ieee118.py <path to pypower case118.py> <output json>

Network topology, reactances, loads and quadratic costs come from case118.
Everything the case file lacks is synthesized here (see README, "IEEE 118-bus fixture").
"""
import json
import runpy
import sys

import networkx as nx
import numpy as np

# normalized 24 h profile, peak = 1.0
PROFILE = [0.67, 0.63, 0.60, 0.59, 0.59, 0.60, 0.74, 0.86, 0.95, 0.96, 0.96, 0.95,
           0.95, 0.95, 0.93, 0.94, 0.99, 1.00, 1.00, 0.96, 0.91, 0.83, 0.73, 0.63]


def r(x, nd=4):
    return float(round(float(x), nd))


def main(src, out):
    ppc = runpy.run_path(src)["case118"]()
    base = float(ppc["baseMVA"])
    bus, gen, br, cost = ppc["bus"], ppc["gen"], ppc["branch"], ppc["gencost"]
    nb = bus.shape[0]
    ids = [int(b) for b in bus[:, 0]]
    pos = {b: i for i, b in enumerate(ids)}

    # DC power flow of the case's own dispatch, to size the unlimited (rateA = 9900) branches
    B = np.zeros((nb, nb))
    for f, t, x in zip(br[:, 0], br[:, 1], br[:, 3]):
        i, j = pos[int(f)], pos[int(t)]
        B[i, i] += 1 / x
        B[j, j] += 1 / x
        B[i, j] -= 1 / x
        B[j, i] -= 1 / x
    p = -bus[:, 2].copy()
    for g in gen:
        p[pos[int(g[0])]] += g[1]
    ref = next(i for i, b in enumerate(bus) if int(b[1]) == 3)
    keep = [i for i in range(nb) if i != ref]
    th = np.zeros(nb)
    th[keep] = np.linalg.solve(B[np.ix_(keep, keep)], p[keep] / base)
    flows = [(th[pos[int(f)]] - th[pos[int(t)]]) / x * base for f, t, x in zip(br[:, 0], br[:, 1], br[:, 3])]

    # synthetic planar layout, 800 km square
    G = nx.Graph()
    G.add_nodes_from(ids)
    G.add_edges_from((int(f), int(t)) for f, t in zip(br[:, 0], br[:, 1]))
    xy = nx.spring_layout(G, seed=118, iterations=200)
    lo = np.min(list(xy.values()), axis=0)
    hi = np.max(list(xy.values()), axis=0)

    # reference bus first so the builder's angle reference is the case's slack
    order = [ref] + keep
    buses = []
    for i in order:
        b = ids[i]
        c = (xy[b] - lo) / (hi - lo) * 800.0
        buses.append({"id": f"B{b}", "voll": 5000, "xy": [r(c[0], 1), r(c[1], 1)]})

    units = []
    for k, (g, c) in enumerate(zip(gen, cost)):
        pmax = float(g[8])
        c2, c1, c0 = float(c[4]), float(c[5]), float(c[6])
        pmin = r(0.2 * pmax, 2)
        bps = [pmax / 3, 2 * pmax / 3, pmax]
        curve, a = [], 0.0
        for bp in bps:
            curve.append([r(bp, 3), r(c2 * (a + bp) + c1, 4)])
            a = bp
        big = pmax >= 300
        mid = pmax >= 100
        on = float(g[1]) > 0
        p0 = min(max(float(g[1]), pmin), pmax) if on else 0.0
        units.append({
            "id": f"G{k + 1}", "bus": f"B{int(g[0])}", "p_min": pmin, "p_max": r(pmax, 2),
            "ramp_up": r(0.5 * pmax, 2), "ramp_down": r(0.5 * pmax, 2),
            "min_up": 6 if big else 3 if mid else 1, "min_down": 6 if big else 3 if mid else 1,
            "no_load_cost": r(c0, 2), "cost_curve": curve,
            "startup_cost": r(20 * pmax, 2), "shutdown_cost": 0, "delta_adjust": r(0.3 * pmax, 2),
            "initial_on_hours": 8 if on else 0, "initial_off_hours": 0 if on else 8, "initial_power": r(p0, 2),
        })

    lines = []
    for k, row in enumerate(br):
        rate = float(row[5])
        if rate <= 0 or rate >= 9900:
            rate = max(100.0, 10 * np.ceil(1.5 * abs(flows[k]) / 10))
        lines.append({"id": f"L{k + 1}", "from": f"B{int(row[0])}", "to": f"B{int(row[1])}",
                      "reactance": r(row[3], 5), "flow_limit": r(rate, 1)})

    loads = {}
    for b in bus:
        if b[2] > 0:
            loads[f"B{int(b[0])}"] = [r(b[2] * f, 3) for f in PROFILE]
    total = bus[:, 2][bus[:, 2] > 0].sum()
    reserve = [r(0.05 * total * f, 3) for f in PROFILE]

    net = {"name": "ieee118", "base_mva": base, "horizon": 24, "buses": buses, "units": units,
           "lines": lines, "loads": loads, "reserve": reserve}
    with open(out, "w") as fh:
        json.dump(net, fh, indent=1)
        fh.write("\n")
    print(f"{len(buses)} buses, {len(units)} units, {len(lines)} lines, peak load {total:.1f} MW")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
