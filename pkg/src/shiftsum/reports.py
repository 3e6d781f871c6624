"""Report file writers.

Scientific payloads (the JSON report and the CSV table) are
deterministic functions of the run parameters: dict keys are sorted,
floats are written in shortest round-trip form, and nothing
execution-specific (thread count, timing, host) appears in them.
Execution details go to a separate ``<base>.meta.json`` sidecar that
is expected to differ between runs.
"""

import json
import time
from fractions import Fraction


def fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))        # shortest round-trip, numpy scalars too
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if v is None:
        return ""
    return str(v)


def write_csv_report(path, comments, fieldnames, rows, trailers=()):
    """Comment lines, one header row, data rows, optional trailer comments."""
    lines = [f"# {k}={fmt_value(v)}" for k, v in comments]
    lines.append(",".join(fieldnames))
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    lines.extend(f"# {k}={fmt_value(v)}" for k, v in trailers)
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def write_json_report(path, config, results):
    payload = {"schema": 1, "config": config, "results": results}
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False))
        fh.write("\n")


def write_meta(path, **details):
    details = dict(details)
    details["written_at"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    with open(path, "w") as fh:
        fh.write(json.dumps(details, indent=2, sort_keys=True))
        fh.write("\n")


def complex_pair(z):
    return [z.real, z.imag]
