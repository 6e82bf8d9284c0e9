# Copyright 2026 The crisistl Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the processed replay streams and their simulated partitions.

usage: python3 make_replay_streams.py OUT_DIR
"""

import json
import math
import random
import sys
from datetime import datetime, timedelta, timezone

import cluster_sim

BASE = datetime(2021, 8, 14, 6, 0, 0, tzinfo=timezone.utc)

# Event vocabularies: entities (surface, kind), places (name, lat, lon,
# granularity), hashtags.
EVENTS = {
    "olive": {
        "entities": [("Olive Avenue", "location"), ("warehouse", "noun_argument"),
                     ("Cal Fire", "organization"), ("Engine 12", "noun_argument"),
                     ("olive ave", "noun_argument")],
        "places": [("Olive Avenue", 36.7570, -119.8010, "street")],
        "hashtags": ["olivefire", "fresno"],
    },
    "tower": {
        "entities": [("Tower District", "location"), ("apartment", "noun_argument"),
                     ("Fresno FD", "organization"), ("Van Ness", "location"),
                     ("two alarm", "noun_argument")],
        "places": [("Tower District", 36.8080, -119.8020, "neighborhood"),
                   ("Van Ness", 36.8095, -119.8040, "street")],
        "hashtags": ["towerfire", "fresno"],
    },
    "creek": {
        "entities": [("Creek Fire", "noun_argument"), ("Big Creek", "location"),
                     ("Shaver Lake", "location"), ("Cal Fire", "organization"),
                     ("evacuation", "noun_argument"), ("Huntington", "location")],
        "places": [("Big Creek", 37.2069, -119.2482, "poi"),
                   ("Shaver Lake", 37.1030, -119.3190, "poi"),
                   ("Huntington", 37.2290, -119.2190, "poi")],
        "hashtags": ["creekfire"],
    },
    "dome": {
        "entities": [("Dome Fire", "noun_argument"), ("Mojave", "location"),
                     ("Cima Road", "location"), ("NPS", "organization")],
        "places": [("Cima Road", 35.3300, -115.5000, "street")],
        "hashtags": ["domefire"],
    },
    "i5": {
        "entities": [("I-5", "location"), ("crash", "noun_argument"),
                     ("CHP", "organization"), ("Kern County", "location"),
                     ("big rig", "noun_argument")],
        "places": [("I-5", 35.1180, -119.0120, "street")],
        "hashtags": ["i5crash"],
    },
    "hwy99": {
        "entities": [("Highway 99", "location"), ("collision", "noun_argument"),
                     ("CHP", "organization"), ("Madera", "location")],
        "places": [("Highway 99", 36.9600, -120.0600, "street")],
        "hashtags": ["hwy99"],
    },
    "storm_a": {
        "entities": [("Tropical Storm Hilary", "noun_argument"), ("Palm Springs", "location"),
                     ("flooding", "noun_argument"), ("NWS", "organization"),
                     ("Indian Canyons", "location")],
        "places": [("Palm Springs", 33.8303, -116.5453, "neighborhood"),
                   ("Indian Canyons", 33.7500, -116.5400, "poi")],
        "hashtags": ["hilary"],
    },
    "storm_b": {
        "entities": [("Cathedral City", "location"), ("flooding", "noun_argument"),
                     ("NWS", "organization"), ("mudslide", "noun_argument")],
        "places": [("Cathedral City", 33.7797, -116.4653, "neighborhood")],
        "hashtags": ["hilary"],
    },
    "storm_far": {
        "entities": [("Palm Springs", "location"), ("flooding", "noun_argument"),
                     ("NWS", "organization")],
        "places": [("Palm Springs Airport", 33.9200, -116.3500, "poi")],
        "hashtags": ["hilary"],
    },
}

NOISE = [("traffic", "noun_argument"), ("weather", "noun_argument"),
         ("Fresno State", "organization"), ("downtown", "noun_argument"),
         ("Mayor Dyer", "person"), ("smoke", "noun_argument"), ("power outage", "noun_argument"),
         ("PG&E", "organization"), ("Blackstone", "location"), ("Shaw Avenue", "location")]
NOISE_TAGS = ["fresno", "california", "news"]


def make_tweet(rng, tid, when, event, n_ent, with_place, with_tag, jitter_km=0.0):
    ev = EVENTS[event] if event else None
    pool = list(ev["entities"]) if ev else list(NOISE)
    chosen = rng.sample(pool, min(n_ent, len(pool)))
    places = []
    if ev and with_place:
        name, lat, lon, gran = rng.choice(ev["places"])
        dlat = rng.uniform(-1, 1) * jitter_km / 111.0
        dlon = rng.uniform(-1, 1) * jitter_km / (111.0 * math.cos(math.radians(lat)))
        places.append((name, round(lat + dlat, 5), round(lon + dlon, 5), gran))
        if all(c[0] != name for c in chosen):
            chosen.append((name, "location"))
    tags = []
    if with_tag:
        tags = [rng.choice(ev["hashtags"] if ev else NOISE_TAGS)]
    text_parts = [s for s, _ in chosen]
    text = "report: " + " / ".join(text_parts) + "".join(" #" + h for h in tags)
    entities = []
    for s, k in chosen:
        b = text.index(s)
        entities.append({"surface": s, "kind": k, "span": [b, b + len(s)]})
    for h in tags:
        b = text.index("#" + h) + 1
        entities.append({"surface": h, "kind": "hashtag", "span": [b, b + len(h)]})
    resolved = []
    for name, lat, lon, gran in places:
        b = text.index(name)
        resolved.append({"surface": name, "span": [b, b + len(name)], "name": name, "lat": lat,
                         "lon": lon, "granularity": gran, "area": "fixture", "score": 1.0})
    return {"id": tid, "time": when.strftime("%Y-%m-%dT%H:%M:%SZ"), "text": text,
            "hashtags": tags, "entities": entities, "resolved": resolved}


def build(rng, name, script):
    """script: list of (minutes offset, event or None, n_ent, place, tag, jitter)."""
    out = []
    for i, (minutes, event, n_ent, place, tag, jitter) in enumerate(script):
        when = BASE + timedelta(minutes=minutes)
        out.append(make_tweet(rng, "%s-%02d" % (name, i + 1), when, event, n_ent, place, tag,
                              jitter))
    return out


def s1(rng):
    # Two concurrent fire events in one city plus noise.
    script = []
    t = 0
    for ev in ["olive", "olive", "tower", None, "olive", "tower", "tower", "olive", None,
               "tower", "olive", "tower"]:
        t += rng.randint(4, 25)
        script.append((t, ev, rng.randint(2, 4), rng.random() < 0.7, rng.random() < 0.6, 0.2))
    return build(rng, "s1", script), cluster_sim.config_for("fire")


def s2(rng):
    # Wildfire with a 16 h silence: the first burst finalizes, a small
    # side cluster expires, and the second burst starts a new cluster.
    script = []
    t = 0
    for ev in ["creek"] * 6 + ["dome", "dome"] + ["creek"] * 2:
        t += rng.randint(10, 40)
        script.append((t, ev, rng.randint(2, 5), rng.random() < 0.8, rng.random() < 0.5, 3.0))
    t += 16 * 60
    for ev in ["creek"] * 6 + [None, "dome", "creek", None]:
        t += rng.randint(10, 40)
        script.append((t, ev, rng.randint(2, 5), rng.random() < 0.8, rng.random() < 0.5, 3.0))
    return build(rng, "s2", script), cluster_sim.config_for("wildfire")


def s3(rng):
    # Traffic: 3 h join window, including a gap of exactly 3 h.
    script = []
    t = 0
    for ev in ["i5"] * 5 + ["hwy99"] * 3:
        t += rng.randint(5, 30)
        script.append((t, ev, rng.randint(2, 4), rng.random() < 0.8, rng.random() < 0.5, 0.3))
    last_i5 = max(m for m, e, *_ in script if e == "i5")
    t = last_i5 + 180
    script.append((t, "i5", 4, True, True, 0.0))
    for ev in ["i5", "hwy99", None, "i5", "hwy99", "i5"]:
        t += rng.randint(5, 30)
        script.append((t, ev, rng.randint(2, 4), rng.random() < 0.8, rng.random() < 0.5, 0.3))
    t += 210
    for ev in ["i5", "i5", "hwy99", "i5", "hwy99", None, "i5", "i5", "hwy99", "i5"]:
        t += rng.randint(5, 30)
        script.append((t, ev, rng.randint(2, 4), rng.random() < 0.8, rng.random() < 0.5, 0.3))
    return build(rng, "s3", script), cluster_sim.config_for("traffic")


def s4(rng):
    # Storm: shared entities at distances around both distance gates.
    script = []
    t = 0
    evs = ["storm_a", "storm_b", "storm_far"] * 8 + [None] * 6
    rng.shuffle(evs)
    for ev in evs:
        t += rng.randint(3, 20)
        script.append((t, ev, rng.randint(1, 4), rng.random() < 0.85, rng.random() < 0.7, 0.5))
    return build(rng, "s4", script), cluster_sim.config_for("storm")


def s5(rng):
    # Mixed long stream, including equal timestamps and entity-free tweets.
    script = []
    t = 0
    evs = ["olive"] * 8 + ["tower"] * 8 + ["creek"] * 8 + ["i5"] * 6 + [None] * 10
    rng.shuffle(evs)
    for i, ev in enumerate(evs):
        if i % 7 != 3:
            t += rng.randint(1, 60)
        n = 0 if i % 11 == 5 else rng.randint(1, 5)
        script.append((t, ev, n, rng.random() < 0.6, rng.random() < 0.5, 1.0))
    return build(rng, "s5", script), cluster_sim.config_for("other")


def main():
    out = sys.argv[1]
    rng = random.Random(20210814)
    for name, fn in [("s1", s1), ("s2", s2), ("s3", s3), ("s4", s4), ("s5", s5)]:
        tweets, cfg = fn(rng)
        with open("%s/%s.jsonl" % (out, name), "w") as f:
            for t in tweets:
                f.write(json.dumps(t, sort_keys=True) + "\n")
        log, fin, rem = cluster_sim.simulate([dict(t) for t in tweets], cfg)
        expected = {
            "domain": cfg["domain"],
            "assignment_log": log,
            "finalized": [{"id": c.id, "members": [m["id"] for m in c.members],
                           "head": c.head["id"]} for c in fin],
            "removed": [{"id": c.id, "members": [m["id"] for m in c.members]} for c in rem],
        }
        with open("%s/%s.expected.json" % (out, name), "w") as f:
            json.dump(expected, f, indent=1, sort_keys=True)
            f.write("\n")
        joins = sum(1 for r in log if r["action"] == "join")
        print(name, len(tweets), "tweets", joins, "joins", len(fin), "final",
              [len(c.members) for c in fin], len(rem), "removed", [len(c.members) for c in rem])


if __name__ == "__main__":
    main()
