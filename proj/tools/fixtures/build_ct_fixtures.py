#!/usr/bin/env python3
"""Build the Connecticut 2022 House/Senate fixtures from the tables in data/ct/.

Units are (town, 2022 district, 2012 district) pieces. Adjacency is synthetic:
pieces of one town form a path, pieces of one district (either plan) form a
path, and any leftover components are chained together. Only the attribute
data (population, VAP shares, partisan lean, town membership, incumbents) is
taken from the source tables.

Usage: build_ct_fixtures.py [data_dir]   (default: <repo>/data/ct)
"""

import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

VAP_RATIO = 0.78
TURNOUT_RATIO = 0.5
CHANGE_LEAN = 0.08  # incumbent-party lean of a labelled change-set
BOUNDARY_NUDGE = 0.0005

CHAMBERS = {
    "house": dict(
        n=151, new_col="house_2022", old_col="house_2012", vacant={42},
        # 2012 labels leaving a town with no new label to pair with: attach to this 2022 district
        orphan_old={("Wallingford", 86): 90},
        # new labels entering a town with no old label to pair with: take from this 2012 district
        orphan_new={("Trumbull", 112): 123},
        extra_pieces=[("Cheshire", 103, 90), ("Orange", 119, 117), ("Trumbull", 123, 134),
                      ("Fairfield", 132, 133), ("Fairfield", 134, 132), ("Montville", 38, 42),
                      ("Montville", 139, 38)],
    ),
    "senate": dict(
        n=36, new_col="senate_2022", old_col="senate_2012", vacant=set(),
        orphan_old={},
        orphan_new={("Stamford", 26): 36},
        extra_pieces=[("New Canaan", 36, 26), ("Hamden", 17, 11), ("Harwinton", 8, 31),
                      ("Middletown", 13, 9)],
    ),
}


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def labels(cell):
    return sorted(int(x) for x in cell.split(";") if x)


def town_pieces(town, new, old, cfg):
    common = sorted(set(new) & set(old))
    entering = sorted(set(new) - set(old))
    leaving = sorted(set(old) - set(new))
    pieces = [(d, d) for d in common]
    for a, r in zip(entering, leaving):
        pieces.append((a, r))
    for a in entering[len(leaving):]:
        src = cfg["orphan_new"].get((town, a), common[0] if common else leaving[-1])
        pieces.append((a, src))
    for r in leaving[len(entering):]:
        dst = cfg["orphan_old"].get((town, r), common[0] if common else entering[0])
        pieces.append((dst, r))
    for t, a, r in cfg["extra_pieces"]:
        if t == town and (a, r) not in pieces:
            assert a in new and r in old, (town, a, r)
            pieces.append((a, r))
    return sorted(pieces)


def allocate(total, weights):
    """Integer split of total proportional to weights (largest remainder)."""
    wsum = sum(weights)
    raw = [total * w / wsum for w in weights]
    out = [int(x) for x in raw]
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - out[i]), i))
    for i in order[: total - sum(out)]:
        out[i] += 1
    return out


def lean_target(row):
    pct = int(row["pl_pct"]) / 100.0
    party = row["pl_party"]
    share = pct if party == "D" else (1.0 - pct if party == "R" else 0.5)
    # A rounded 55% printed as competitive sits just inside the competitive band.
    if row["pl_color"] == "violet":
        share = min(max(share, 0.45 + BOUNDARY_NUDGE), 0.55 - BOUNDARY_NUDGE)
    return share


def classify(share):
    return "blue" if share > 0.55 else ("red" if share < 0.45 else "violet")


def build(chamber, data_dir, out_dir):
    cfg = CHAMBERS[chamber]
    towns = read_csv(data_dir / "towns.csv")
    districts = {int(r["district"]): r for r in read_csv(data_dir / f"{chamber}_districts.csv")}
    margins = {int(r["district"]): r for r in read_csv(data_dir / f"{chamber}_margins.csv")}
    changes = read_csv(data_dir / f"{chamber}_changes.csv")

    units = []
    for t in sorted(towns, key=lambda r: r["town"]):
        new, old = labels(t[cfg["new_col"]]), labels(t[cfg["old_col"]])
        pieces = town_pieces(t["town"], new, old, cfg)
        for a, r in pieces:
            units.append(dict(id=f"{t['town']}:{a}:{r}", town=t["town"], new=a, old=r,
                              weight=int(t["pop"]) / len(pieces)))

    by_new = defaultdict(list)
    by_old = defaultdict(list)
    by_town = defaultdict(list)
    for u in units:
        by_new[u["new"]].append(u)
        by_old[u["old"]].append(u)
        by_town[u["town"]].append(u)
    assert sorted(by_new) == list(range(1, cfg["n"] + 1))
    assert sorted(by_old) == list(range(1, cfg["n"] + 1)), sorted(set(range(1, cfg["n"] + 1)) - set(by_old))

    for d, members in by_new.items():
        row = districts[d]
        pops = allocate(int(row["pop"]), [u["weight"] for u in members])
        for u, p in zip(members, pops):
            u["pop"] = p
            vap = round(VAP_RATIO * p)
            u["vap_total"] = vap
            for key, col in (("vap_white", "vap_w"), ("vap_hispanic", "vap_h"),
                             ("vap_black", "vap_b"), ("vap_asian", "vap_a")):
                u[key] = min(vap, round(float(row[col]) / 100.0 * vap))

    # Labelled change-sets fix the lean of the moved pieces.
    tagged = defaultdict(list)
    for c in changes:
        d = int(c["district"])
        party = margins[d]["incumbent_party"]
        inc_share = 0.5 + {"benefit": CHANGE_LEAN, "neutral": 0.0, "disadvantage": -CHANGE_LEAN}[c["effect"]]
        if c["direction"] == "remove":
            inc_share = 1.0 - inc_share
        dem_share = inc_share if party == "D" else 1.0 - inc_share
        hits = [u for u in by_town[c["town"]]
                if (c["direction"] == "add" and u["new"] == d and u["old"] != d)
                or (c["direction"] == "remove" and u["old"] == d and u["new"] != d)]
        assert hits, c
        for u in hits:
            tagged[u["id"]].append(dem_share)

    for d, members in by_new.items():
        target = lean_target(districts[d])
        fixed = [u for u in members if u["id"] in tagged]
        free = [u for u in members if u["id"] not in tagged]
        for u in fixed:
            u["share"] = sum(tagged[u["id"]]) / len(tagged[u["id"]])
        total = sum(u["pop"] for u in members) * TURNOUT_RATIO
        fixed_dem = sum(u["share"] * u["pop"] * TURNOUT_RATIO for u in fixed)
        free_total = sum(u["pop"] for u in free) * TURNOUT_RATIO
        assert free_total > 0, d
        free_share = min(max((target * total - fixed_dem) / free_total, 0.02), 0.98)
        for u in free:
            u["share"] = free_share
        for u in members:
            v = u["pop"] * TURNOUT_RATIO
            u["dem_votes"] = round(u["share"] * v, 3)
            u["rep_votes"] = round((1.0 - u["share"]) * v, 3)
        dem = sum(u["dem_votes"] for u in members)
        rep = sum(u["rep_votes"] for u in members)
        assert classify(dem / (dem + rep)) == districts[d]["pl_color"], (d, dem / (dem + rep))

    edges = set()

    def chain(group, key):
        ordered = sorted(group, key=key)
        for a, b in zip(ordered, ordered[1:]):
            edges.add(tuple(sorted((a["id"], b["id"]))))

    for members in by_town.values():
        chain(members, lambda u: (u["new"], u["old"]))
    for members in by_new.values():
        chain(members, lambda u: (u["town"], u["old"]))
    for members in by_old.values():
        chain(members, lambda u: (u["town"], u["new"]))

    parent = {u["id"]: u["id"] for u in units}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    roots = sorted({find(u["id"]) for u in units})
    for a, b in zip(roots, roots[1:]):
        edges.add(tuple(sorted((a, b))))

    incumbents = defaultdict(list)
    seated = set()
    for r in read_csv(data_dir / f"{chamber}_incumbents.csv"):
        d = int(r["district"])
        if r["role"] == "seat":
            seated.add(d)
        incumbents[d].append(r)
    for d in range(1, cfg["n"] + 1):
        if d not in seated and d not in cfg["vacant"]:
            incumbents[d].append(dict(district=str(d), name=f"{chamber.title()} {d:03d} incumbent",
                                      party="O", town="", role="seat"))
    home_of = defaultdict(list)
    for d, people in incumbents.items():
        for r in people:
            cands = [u for u in by_new[d] if not r["town"] or u["town"] == r["town"]]
            assert cands, r
            home = max(cands, key=lambda u: (u["old"] == d, u["pop"], u["id"]))
            home_of[home["id"]].append(dict(name=r["name"], party=r["party"], home_unit=home["id"]))

    graph = dict(
        units=[dict(id=u["id"], pop=u["pop"], vap_total=u["vap_total"], vap_white=u["vap_white"],
                    vap_hispanic=u["vap_hispanic"], vap_black=u["vap_black"], vap_asian=u["vap_asian"],
                    town=u["town"], dem_votes=u["dem_votes"], rep_votes=u["rep_votes"],
                    incumbents=home_of.get(u["id"], [])) for u in units],
        edges=[list(e) for e in sorted(edges)],
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / f"{chamber}_graph.json", "w") as f:
        json.dump(graph, f, indent=1)
        f.write("\n")
    for year, key in (("2022", "new"), ("2012", "old")):
        with open(out_dir / f"{chamber}_{year}.csv", "w", newline="") as f:
            f.write("unit_id,district\n")
            for u in units:
                f.write(f"{u['id']},{u[key]}\n")
    print(f"{chamber}: {len(units)} units, {len(edges)} edges, {len(roots)} components bridged")


def main():
    data_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "data" / "ct"
    for chamber in CHAMBERS:
        build(chamber, data_dir, data_dir)


if __name__ == "__main__":
    main()
