"""Convert a raw sighting log into the crowdsense data directory layout.

Input is a CSV with columns ``timestamp,scanner,seen`` where scanner and seen
are dataset-native labels (MAC addresses, badge names). Every label that
appears as a scanner becomes an internal device; everything else is external.
Timestamps are shifted so the first sighting is at 0 and the offset is kept as
``epoch_s`` in manifest.json, together with ``tau_s``.

Optional ``--friends`` and ``--interests`` files use the same native labels
(``label,label`` and ``label,tag``); rows naming unknown labels are skipped.

    python3 convert_sightings.py raw.csv --tau 120 --out data/sigcomm09
"""

import argparse
import csv
import json
from pathlib import Path

from crowdsense.ingest import DeviceInterner


def read_rows(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[1:]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("sightings")
    ap.add_argument("--tau", type=int, required=True, help="inquiry interval in seconds")
    ap.add_argument("--friends")
    ap.add_argument("--interests")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rows = [(int(float(t)), s, d) for t, s, d in read_rows(args.sightings) if s != d]
    rows.sort(key=lambda r: r[0])
    epoch = rows[0][0] if rows else 0
    intern = DeviceInterner()
    # scanners first so internal devices get the low ids
    for _, s, _ in rows:
        intern(s)
    internal = set(range(len(intern)))
    events = [(t - epoch, intern(s), intern(d)) for t, s, d in rows]
    ids = intern.table()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def write(name, header, body):
        with open(out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(body)

    write("contacts.csv", ("time_s", "scanner_id", "seen_id"), events)
    write("devices.csv", ("device_id", "class"),
          [(i, "internal" if i in internal else "external") for i in sorted(ids.values())])
    friends = []
    if args.friends:
        friends = [(ids[a], ids[b]) for a, b in read_rows(args.friends) if a in ids and b in ids]
    write("friends.csv", ("device_id", "friend_id"), friends)
    interests = []
    if args.interests:
        interests = [(ids[a], tag) for a, tag in read_rows(args.interests) if a in ids]
    write("interests.csv", ("device_id", "interest"), interests)

    manifest = {"tau_s": args.tau, "epoch_s": epoch, "internal": len(internal), "devices": len(ids)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"{len(events)} events, {len(internal)} internal, {len(ids) - len(internal)} external")


if __name__ == "__main__":
    main()
