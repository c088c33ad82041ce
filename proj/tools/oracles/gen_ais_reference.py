#!/usr/bin/env python3
"""Builds tests/data/ais_reference.jsonl.

Sentences are produced by pyais' encoder (plus a handful of well-known
published sentences) and every field is decoded by pyais, which serves as
the independent reference decoder for the C++ ais module tests.
"""
import json
import random
import sys

import pyais
from pyais import encode_dict

SIXBIT_TEXT = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 "

PUBLISHED = [
    ["!AIVDM,1,1,,B,177KQJ5000G?tO`K>RA1wUbN0TKH,0*5C"],
    ["!AIVDM,1,1,,A,15RTgt0PAso;90TKcjM8h6g208CQ,0*4A"],
    ["!AIVDM,1,1,,A,13HOI:0P0000VOHLCnHQKwvL05Ip,0*23"],
    ["!AIVDM,1,1,,B,133sVfPP00PD>hRMDH@jNOvN20S8,0*7F"],
    ["!AIVDM,2,1,1,A,55?MbV02;H;s<HtKR20EHE:0@T4@Dn2222222216L961O5Gf0NSQEp6ClRp8,0*1C",
     "!AIVDM,2,2,1,A,88888888880,2*25"],
]


def rand_text(rng, n):
    return "".join(rng.choice(SIXBIT_TEXT) for _ in range(rng.randint(1, n))).strip() or "X"


def position(rng, msg_type, sentinel=False):
    d = {
        "msg_type": msg_type,
        "repeat": 0,
        "mmsi": rng.randint(200000000, 775999999),
        "status": rng.randint(0, 8),
        "turn": 0,
        "speed": 102.3 if sentinel else round(rng.uniform(0, 30), 1),
        "accuracy": rng.randint(0, 1),
        "lon": 181 if sentinel else round(rng.uniform(-179.9, 179.9), 4),
        "lat": 91 if sentinel else round(rng.uniform(-89.9, 89.9), 4),
        "course": 360 if sentinel else round(rng.uniform(0, 359.9), 1),
        "heading": 511 if sentinel or rng.random() < 0.1 else rng.randint(0, 359),
        "second": rng.randint(0, 59),
    }
    return d


def static(rng):
    return {
        "msg_type": 5,
        "repeat": 0,
        "mmsi": rng.randint(200000000, 775999999),
        "ais_version": 0,
        "imo": rng.randint(1000000, 9999999),
        "callsign": rand_text(rng, 7),
        "shipname": rand_text(rng, 20),
        "ship_type": rng.randint(20, 99),
        "to_bow": rng.randint(0, 511),
        "to_stern": rng.randint(0, 511),
        "to_port": rng.randint(0, 63),
        "to_starboard": rng.randint(0, 63),
        "epfd": 1,
        "month": rng.randint(1, 12),
        "day": rng.randint(1, 28),
        "hour": rng.randint(0, 23),
        "minute": rng.randint(0, 59),
        "draught": round(rng.uniform(0, 25), 1),
        "destination": rand_text(rng, 20),
        "dte": 0,
    }


def fields(msg):
    d = msg.asdict()
    out = {"msg_type": int(d["msg_type"]), "mmsi": int(d["mmsi"])}
    if out["msg_type"] in (1, 2, 3):
        for k in ("lat", "lon", "speed", "course", "heading"):
            out[k] = None if d[k] is None else float(d[k])
    elif out["msg_type"] == 5:
        out["name"] = d["shipname"]
        out["callsign"] = d["callsign"]
        for k in ("ship_type", "to_bow", "to_stern", "to_port", "to_starboard"):
            out[k] = int(d[k])
    return out


def main():
    rng = random.Random(20240611)
    groups = list(PUBLISHED)
    for i in range(42):
        sentences = encode_dict(position(rng, 1 + i % 3, sentinel=(i == 7)),
                                radio_channel="AB"[i % 2], talker_id="AI")
        groups.append(sentences)
    for i in range(12):
        sentences = encode_dict(static(rng), radio_channel="A", talker_id="AI",
                                seq_id=i % 10)
        groups.append(sentences)
    zero_dims = static(rng)
    zero_dims.update(to_bow=0, to_stern=0, to_port=0, to_starboard=0)
    groups.append(encode_dict(zero_dims, radio_channel="B", talker_id="AI", seq_id=3))

    with open(sys.argv[1], "w") as f:
        for sentences in groups:
            nmea = [pyais.NMEAMessage(s.encode()) for s in sentences]
            if not all(n.is_valid for n in nmea):
                f.write(json.dumps({"sentences": sentences, "expected": {"checksum_valid": False}}) + "\n")
                continue
            msg = pyais.decode(*[s.encode() for s in sentences])
            f.write(json.dumps({"sentences": sentences, "expected": fields(msg)}) + "\n")


if __name__ == "__main__":
    main()
