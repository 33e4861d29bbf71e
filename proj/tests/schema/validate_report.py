#!/usr/bin/env python3
# Copyright (C) 2026 The recap authors
# SPDX-License-Identifier: Apache-2.0
"""Captions generated recordings and validates every steps.json against docs/report.schema.json."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def run(*args):
    subprocess.run([str(a) for a in args], check=True, stdout=subprocess.DEVNULL)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--recap", required=True)
    ap.add_argument("--schema", required=True)
    ap.add_argument("--script", required=True)
    ap.add_argument("--random", type=int, default=3)
    args = ap.parse_args()

    schema = json.loads(pathlib.Path(args.schema).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        recordings = [tmp / "scripted"]
        run(args.recap, "gen", "--script", args.script, "--out", recordings[0])
        if args.random > 0:
            run(args.recap, "gen", "--random", args.random, "--seed", 11, "--out", tmp / "random")
            recordings += sorted(p for p in (tmp / "random").iterdir() if p.is_dir())

        failures = 0
        templates = set()
        for rec in recordings:
            out = tmp / "out" / rec.name
            run(args.recap, "caption", "--input", rec, "--out", out)
            steps = json.loads((out / "steps.json").read_text())
            errors = list(validator.iter_errors(steps))
            for e in errors:
                print(f"{rec.name}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
            failures += len(errors)
            templates.update(s["template_id"] for s in steps)
            print(f"{rec.name}: {len(steps)} steps, {len(errors)} schema errors")

        print(f"templates seen: {sorted(templates)}")
        return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
