#!/usr/bin/env python3
"""Validate scenarios and CLI output against the JSON schemas.

Usage: check_outputs.py <resetfpt binary> <source dir>
"""
import csv
import io
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    binary, root = sys.argv[1], pathlib.Path(sys.argv[2])
    schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(doc)) for name, doc in schemas.items())

    def validator(name):
        cls = jsonschema.validators.validator_for(schemas[name])
        cls.check_schema(schemas[name])
        return cls(schemas[name], registry=registry)

    scenario_v, result_v, error_v = (validator(n) for n in
                                     ("scenario.schema.json", "result.schema.json", "error.schema.json"))
    failures = []

    def check(label, ok, detail=""):
        print(("PASS " if ok else "FAIL ") + label + (": " + detail if detail and not ok else ""))
        if not ok:
            failures.append(label)

    def run(*args):
        res = subprocess.run([binary, *args], capture_output=True, timeout=1800)
        res.stdout, res.stderr = res.stdout.decode(), res.stderr.decode()
        return res

    for path in sorted((root / "scenarios").glob("*.json")):
        doc = json.loads(path.read_text())
        errs = [e.message for e in scenario_v.iter_errors(doc)]
        check(f"{path.name} scenario schema", not errs, "; ".join(errs[:3]))
        extra = ["--paths", "2000"] if doc["type"] == "simulate" else []
        for fmt in ("json", "csv"):
            res = run(doc["type"], "--scenario", str(path), "--format", fmt, *extra)
            if res.returncode != 0:
                check(f"{path.name} {fmt} exit", False, res.stderr.strip())
                continue
            if fmt == "json":
                errs = [e.message for e in result_v.iter_errors(json.loads(res.stdout))]
                check(f"{path.name} result schema", not errs, "; ".join(errs[:3]))
            else:
                rows = list(csv.reader(io.StringIO(res.stdout, newline="")))
                ok = len(rows) >= 2 and all(len(r) == len(rows[0]) for r in rows)
                check(f"{path.name} csv shape", ok and res.stdout.endswith("\r\n"))

    res = run("verify", "ex2.5", "--format", "json")
    errs = [e.message for e in result_v.iter_errors(json.loads(res.stdout))]
    check("verify result schema", res.returncode == 0 and not errs, "; ".join(errs[:3]))

    with tempfile.TemporaryDirectory() as tmp:
        bad = pathlib.Path(tmp) / "bad.json"
        bad.write_text(json.dumps({"schema_version": 1, "name": "x", "type": "forward",
                                   "target": "q", "reset": {"rate": 1, "position": 0.5}, "bogus": 1}))
        unreachable = pathlib.Path(tmp) / "range.json"
        unreachable.write_text(json.dumps({
            "schema_version": 1, "name": "r", "type": "inverse", "case": "random_initial",
            "reset": {"rate": 1.0, "position": 1.0}, "problem": {"kind": "imfpt", "m": 1e-6},
            "search": {"family": {"family": "exponential", "theta": 1.0}, "free": ["theta"],
                       "lo": [0.01], "hi": [100.0]}}))
        for label, args in (("config", ["forward", "--scenario", str(bad)]),
                            ("range", ["inverse", "--scenario", str(unreachable)])):
            res = run(*args)
            try:
                doc = json.loads(res.stderr)
                errs = [e.message for e in error_v.iter_errors(doc)]
            except json.JSONDecodeError as e:
                errs = [str(e)]
            check(f"{label} error schema", res.returncode == 2 and not errs, "; ".join(errs[:3]))

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
