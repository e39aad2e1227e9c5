#!/usr/bin/env python3
"""Regenerates data/line191_case{1..4}.json.

The timetable is a reconstruction: the line topology, capacities, weights, d_max and the
turnover time are as described for the line, while departure times and running times are
read approximately off train diagrams and then made consistent (cyclic,
meets only at the terminal stations).
"""

import json
import pathlib
import sys

EPOCH = 8 * 60

BLOCKS = [
    ("1", "station", 4),
    ("2", "line", 1),
    ("3", "station", 2),
    ("4", "line", 1),
    ("5", "line", 1),
    ("6", "line", 1),
    ("7", "station", 2),
    ("8", "line", 1),
    ("9", "line", 1),
    ("10", "station", 3),
]
UP = [b[0] for b in BLOCKS]

# (p_timetable, p_min) per block, listed in the dir0 order 1..10
RUNNING = {
    "ic": [(1, 1), (5, 5), (1, 1), (2, 2), (2, 2), (2, 2), (1, 1), (3, 3), (3, 3), (1, 1)],
    "ks": [(1, 1), (6, 5), (2, 1), (3, 3), (3, 3), (3, 3), (2, 1), (4, 4), (4, 3), (1, 1)],
}

# id, direction, kind, weight, departure from the first station (minutes after EPOCH)
TRAINS = [
    ("IC1", "dir0", "ic", 0.9, 0),
    ("Ks2", "dir1", "ks", 1.0, 20),
    ("Ks1", "dir0", "ks", 0.9, 48),
    ("IC2", "dir1", "ic", 1.5, 76),
    ("Ks3", "dir0", "ks", 0.9, 96),
    ("Ks4", "dir1", "ks", 1.0, 124),
]

CASES = {
    1: ("moderate delay of IC1 leaving block 1", {"IC1": 9}),
    2: ("moderate delay of all trains leaving block 1", {"IC1": 9, "Ks1": 6, "Ks3": 14}),
    3: ("significant delay of some trains leaving block 1", {"Ks1": 14, "Ks3": 16}),
    4: ("large delay of IC1 leaving block 1", {"IC1": 38}),
}


def timetable(train, direction, kind, depart):
    route = UP if direction == "dir0" else UP[::-1]
    times = RUNNING[kind] if direction == "dir0" else RUNNING[kind][::-1]
    rows = []
    t = EPOCH + depart
    for i, (block, (p, pmin)) in enumerate(zip(route, times)):
        if i > 0:
            t += p
        rows.append({"train": train, "block": block, "t_out": t, "p_timetable": p, "p_min": pmin})
    return route, rows


def instance(case):
    label, delays = CASES[case]
    trains, rows = [], []
    for tid, direction, kind, weight, depart in TRAINS:
        route, tt = timetable(tid, direction, kind, depart)
        trains.append({"id": tid, "direction": direction, "route": route, "weight": weight, "d_max": 10})
        rows.extend(tt)
    return {
        "schema_version": 1,
        "name": f"line-191-case{case}",
        "note": f"reconstructed - approximate; {label}",
        "blocks": [{"id": b, "kind": k, "capacity": c} for b, k, c in BLOCKS],
        "trains": trains,
        "timetable": rows,
        "scenario": {
            "entry_delays": {t[0]: delays.get(t[0], 0) for t in TRAINS},
            "turnover_pairs": [{"from": "IC1", "to": "IC2", "min_turnover": 20}],
        },
        "penalties": {"p_sum": 1.75, "p_pair": 1.75},
    }


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    for case in CASES:
        path = out / f"line191_case{case}.json"
        path.write_text(json.dumps(instance(case), indent=2) + "\n")
        print(path)


if __name__ == "__main__":
    main()
