"""Readers for the exported artifacts. Indices are 1-based as in the files.

trace:   replication,t,agent,arm,reward,oracle_mean,chosen_mean,cum_group_regret
events:  replication,t,agent,kind,arm,obs_index   (restart rows: arm, obs_index empty)
regret:  t,mean,std
summary: JSON with schema_version and per-policy results
"""

import csv
import io as _io
import json
import os

TRACE_COLUMNS = ("replication", "t", "agent", "arm", "reward", "oracle_mean", "chosen_mean", "cum_group_regret")
EVENT_COLUMNS = ("replication", "t", "agent", "kind", "arm", "obs_index")
REGRET_COLUMNS = ("t", "mean", "std")

_INT = {"replication", "t", "agent", "arm", "obs_index"}


def _open(source):
    # A path or the CSV text itself.
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        return open(source, newline="")
    if isinstance(source, str) and "\n" in source:
        return _io.StringIO(source)
    raise FileNotFoundError(source)


def _read(source, columns):
    with _open(source) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError("empty file")
        if tuple(header) != columns:
            raise ValueError(f"unexpected header {header!r}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(columns):
                raise ValueError(f"line {lineno}: expected {len(columns)} fields, got {len(raw)}")
            row = {}
            for name, value in zip(columns, raw):
                if name == "kind":
                    row[name] = value
                elif value == "":
                    row[name] = None
                elif name in _INT:
                    row[name] = int(value)
                else:
                    row[name] = float(value)
            rows.append(row)
        return rows


def read_trace(source):
    return _read(source, TRACE_COLUMNS)


def read_events(source):
    rows = _read(source, EVENT_COLUMNS)
    for r in rows:
        if r["kind"] not in ("detection", "restart"):
            raise ValueError(f"unknown event kind {r['kind']!r}")
    return rows


def read_regret(source):
    return _read(source, REGRET_COLUMNS)


def read_summary(source):
    if isinstance(source, dict):
        data = source
    else:
        with open(source) as fh:
            data = json.load(fh)
    if "schema_version" not in data or "policies" not in data:
        raise ValueError("not a run summary")
    return data


def final_regrets(trace_rows):
    """Last cum_group_regret per replication."""
    out = {}
    for r in trace_rows:
        key = r["replication"]
        if key not in out or r["t"] >= out[key][0]:
            out[key] = (r["t"], r["cum_group_regret"])
    return {k: v for k, (_, v) in out.items()}
