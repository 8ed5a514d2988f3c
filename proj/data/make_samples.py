"""Regenerates the sample scene, fixture and trajectory records in this directory.

Records walk shortest place paths at constant speed and dwell at each object's
nearest place, sampled at 5 Hz.
"""

import json
import math
from pathlib import Path

import networkx as nx

HERE = Path(__file__).parent
SPEED = 1.4
RATE = 5.0


def build_scene():
    nodes, edges = [], []
    rooms = {"r_kitchen": ("kitchen", 0.0), "r_living": ("living room", 6.0)}
    for rid, (label, _) in rooms.items():
        nodes.append({"id": rid, "layer": "room", "class": "room", "label": label})
    edges.append(["r_kitchen", "r_living"])

    places = {}
    for i, x in enumerate([1, 3, 5, 7, 9, 11]):
        for j, y in enumerate([1, 3]):
            pid = f"p{i}{j}"
            places[pid] = (float(x), float(y))
            nodes.append({"id": pid, "layer": "place", "pos": [x, y]})
            edges.append([pid, "r_kitchen" if x < 6 else "r_living"])
    for i in range(6):
        edges.append([f"p{i}0", f"p{i}1"])
        if i < 5:
            edges.append([f"p{i}0", f"p{i + 1}0"])
            edges.append([f"p{i}1", f"p{i + 1}1"])

    objects = [
        ("o_sink", "sink", "sink_1", (0.4, 3.6), "r_kitchen"),
        ("o_stove", "stove", "stove_1", (3.0, 3.7), "r_kitchen"),
        ("o_fridge", "fridge", "fridge_1", (5.4, 3.6), "r_kitchen"),
        ("o_cup1", "cup", "cup_1", (1.3, 1.2), "r_kitchen"),
        ("o_cup2", "cup", "cup_2", (4.7, 1.3), "r_kitchen"),
        ("o_table", "table", "table_1", (3.0, 0.4), "r_kitchen"),
        ("o_sofa", "sofa", "sofa_1", (9.0, 3.6), "r_living"),
        ("o_tv", "tv", "tv_1", (11.6, 2.0), "r_living"),
        ("o_book1", "book", "book_1", (7.4, 0.4), "r_living"),
        ("o_book2", "book", "book_2", (10.6, 0.5), "r_living"),
        ("o_plant", "plant", "plant_1", (11.5, 3.6), "r_living"),
        ("o_chair", "chair", "chair_1", (7.2, 3.5), "r_living"),
    ]
    for oid, cls, label, pos, room in objects:
        nodes.append({"id": oid, "layer": "object", "class": cls, "label": label, "pos": list(pos)})
        edges.append([oid, room])
    return {"name": "sample home", "nodes": nodes, "edges": edges}, places, objects


def anchor(places, pos):
    return min(places, key=lambda p: (math.dist(places[p], pos), p))


def make_record(name, places, objects, start, plan, tail):
    g = nx.Graph()
    for a in places:
        for b in places:
            if a < b and math.dist(places[a], places[b]) == 2.0:
                g.add_edge(a, b, weight=2.0)
    obj = {o[0]: o for o in objects}

    knots = [(0.0, places[start])]
    here = start
    interactions = []
    for oid, action, dwell in plan:
        goal = anchor(places, obj[oid][3])
        for p in nx.shortest_path(g, here, goal, weight="weight")[1:]:
            t, q = knots[-1]
            knots.append((t + math.dist(q, places[p]) / SPEED, places[p]))
        here = goal
        t0 = knots[-1][0]
        knots.append((t0 + dwell, places[goal]))
        interactions.append({"object": oid, "action": action, "t_start": round(t0, 6),
                             "t_end": round(t0 + dwell, 6)})
    t_end = knots[-1][0] + tail
    knots.append((t_end, knots[-1][1]))

    positions = []
    n = int(math.floor(t_end * RATE)) + 1
    seg = 0
    for k in range(n):
        t = k / RATE
        while seg + 1 < len(knots) - 1 and knots[seg + 1][0] <= t:
            seg += 1
        (ta, a), (tb, b) = knots[seg], knots[seg + 1]
        s = 0.0 if tb == ta else min(1.0, max(0.0, (t - ta) / (tb - ta)))
        positions.append([round(a[0] + s * (b[0] - a[0]), 6), round(a[1] + s * (b[1] - a[1]), 6)])
    return {"name": name, "scene": "home_scene.json", "rate_hz": RATE, "positions": positions,
            "interactions": interactions}


def main():
    scene, places, objects = build_scene()
    (HERE / "home_scene.json").write_text(json.dumps(scene, indent=1) + "\n")

    records = [
        make_record("morning", places, objects, "p00",
                    [("o_cup1", "pick up", 6.0), ("o_sink", "wash", 20.0),
                     ("o_fridge", "open", 8.0), ("o_sofa", "sit on", 40.0)], 10.0),
        make_record("evening", places, objects, "p51",
                    [("o_tv", "turn on", 5.0), ("o_sofa", "sit on", 30.0),
                     ("o_cup2", "pick up", 5.0), ("o_sink", "wash", 15.0),
                     ("o_book1", "read", 30.0)], 40.0),
        make_record("tidy", places, objects, "p30",
                    [("o_book2", "pick up", 4.0), ("o_book1", "put down", 4.0),
                     ("o_plant", "water", 25.0), ("o_stove", "turn on", 20.0)], 60.0),
    ]
    (HERE / "records.json").write_text(json.dumps({"records": records}) + "\n")

    def cands(*items):
        return [{"object": o, "action": a, "probability": p, "duration_s": d, "reasoning": r}
                for o, a, p, d, r in items]

    fixture = {
        "*": cands(
            ("cup", "pick up", 0.35, 10.0, "Cups are handled often."),
            ("sink", "wash hands", 0.25, 20.0, "The sink is nearby."),
            ("sofa", "sit on", 0.2, 60.0, "Resting after chores."),
            ("fridge", "open", 0.1, 15.0, "Getting food."),
            ("book", "read", 0.1, 120.0, "Books are in the living room."),
        ),
        "v1;past=;future=": cands(
            ("cup", "pick up", 0.4, 8.0, "A cup is within reach."),
            ("tv", "turn on", 0.3, 5.0, "Evening routine."),
            ("stove", "turn on", 0.3, 30.0, "Cooking."),
        ),
    }
    (HERE / "fixture.json").write_text(json.dumps(fixture, indent=1) + "\n")


if __name__ == "__main__":
    main()
