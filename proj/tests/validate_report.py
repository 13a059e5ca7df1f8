"""Run `hcmc verify` on a passing and a failing configuration and validate
both report.json files against the shipped schema."""

import json
import pathlib
import subprocess
import sys

import jsonschema


def run(binary, workdir, name, config, expected_exit):
    cfg = workdir / f"{name}.yaml"
    cfg.write_text(config)
    out = workdir / name
    proc = subprocess.run([binary, "verify", "--config", str(cfg), "--out", str(out),
                           "--format", "json"], capture_output=True, text=True)
    if proc.returncode != expected_exit:
        sys.exit(f"{name}: exit {proc.returncode}, expected {expected_exit}\n{proc.stderr}")
    return json.loads((out / "report.json").read_text())


def main():
    binary, schema_path, workdir = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    workdir.mkdir(parents=True, exist_ok=True)
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    base = "domain: {kind: disc, radius: 1}\nproblem: {H: 0}\nmesh: {h: 0.1}\n"
    passing = run(binary, workdir, "pass", base, 0)
    failing = run(binary, workdir, "fail", base + "checks: {slack: {height: 0}}\n", 3)
    horosphere = run(binary, workdir, "flat", base.replace("H: 0", "H: 1"), 0)

    for name, report in [("pass", passing), ("fail", failing), ("flat", horosphere)]:
        validator.validate(report)
        ids = [r["theorem_id"] for r in report]
        if ids != sorted(ids):
            sys.exit(f"{name}: report not sorted by theorem_id")
    if not any(r["status"] == "fail" for r in failing):
        sys.exit("fail: expected a failing check")
    if any(r["status"] != "not-applicable" for r in horosphere):
        sys.exit("flat: expected every check to be not-applicable")
    print("report schema: 3 reports valid")


if __name__ == "__main__":
    main()
