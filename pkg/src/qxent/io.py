"""Dataset files.

Both formats carry a header (dimension, measurement manifest hash, seed)
followed by one ``(j, k)`` row per record. Projector matrices are not
stored; readers take the measurement groups and check the manifest hash.
"""

import csv
import io
import json

from .empirical import MeasurementDataset

FORMAT = "qxent-dataset"
VERSION = 1


def _header(ds):
    return {
        "format": FORMAT,
        "version": VERSION,
        "dim": ds.dim,
        "manifest": ds.manifest,
        "seed": ds.seed,
        "n_groups": len(ds.measurements),
        "n_records": len(ds),
    }


def _check_header(header, measurements):
    if header.get("format") != FORMAT or header.get("version") != VERSION:
        raise ValueError("not a qxent dataset file")
    probe = MeasurementDataset(measurements, [], [])
    if header["manifest"] != probe.manifest:
        raise ValueError("dataset was recorded with a different measurement manifest")
    if int(header["dim"]) != probe.dim:
        raise ValueError("dataset dimension does not match the measurements")


def dumps_csv(ds):
    buf = io.StringIO()
    h = _header(ds)
    for key in ("format", "version", "dim", "manifest", "seed", "n_groups", "n_records"):
        value = "none" if h[key] is None else h[key]
        buf.write(f"# {key}={value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "k"])
    w.writerows(ds.records())
    return buf.getvalue()


def loads_csv(text, measurements):
    header, rows = {}, []
    lines = text.splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        else:
            body.append(line)
    header["version"] = int(header.get("version", -1))
    header["seed"] = None if header.get("seed") in (None, "none") else int(header["seed"])
    _check_header(header, measurements)
    reader = csv.reader(body)
    if next(reader) != ["j", "k"]:
        raise ValueError("missing 'j,k' column header")
    rows = [(int(j), int(k)) for j, k in reader]
    if len(rows) != int(header["n_records"]):
        raise ValueError("record count does not match the header")
    groups = [r[0] for r in rows]
    outcomes = [r[1] for r in rows]
    return MeasurementDataset(measurements, groups, outcomes, header["seed"])


def dumps_jsonl(ds):
    lines = [json.dumps(_header(ds), sort_keys=True)]
    lines.extend(json.dumps({"j": j, "k": k}, sort_keys=True) for j, k in ds.records())
    return "\n".join(lines) + "\n"


def loads_jsonl(text, measurements):
    lines = text.splitlines()
    header = json.loads(lines[0])
    _check_header(header, measurements)
    rows = [json.loads(line) for line in lines[1:] if line.strip()]
    if len(rows) != header["n_records"]:
        raise ValueError("record count does not match the header")
    return MeasurementDataset(measurements, [r["j"] for r in rows], [r["k"] for r in rows],
                              header["seed"])


def write_dataset(ds, path):
    """Write ``ds`` as CSV (``.csv``) or JSON lines (anything else)."""
    path = str(path)
    text = dumps_csv(ds) if path.endswith(".csv") else dumps_jsonl(ds)
    with open(path, "w", newline="") as f:
        f.write(text)


def read_dataset(path, measurements):
    path = str(path)
    with open(path, newline="") as f:
        text = f.read()
    if path.endswith(".csv"):
        return loads_csv(text, measurements)
    return loads_jsonl(text, measurements)
