"""End-to-end checks of the mhdc command line: exit codes, schema validity of
the report, and byte-identical CSV across repeated runs."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

CONFIG = """[grid]
n = 32

[init]
kind = "orszag_tang"

[solver]
viscosity = 0.01
resistivity = 0.01
dt = 0.005
t_end = 0.1
snapshot_stride = 2

[analysis]
covers_per_scale = 2
seed = 5

[cutoffs]
samples = 20000

[verify]
a1_pairs = 500
"""

failures = []


def run(exe, *args):
    return subprocess.run([exe, *args], capture_output=True, text=True)


def expect(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + (f" ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def main(exe, schema_path):
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cfg = tmp / "run.toml"
        cfg.write_text(CONFIG)

        r = run(exe, "selftest")
        expect("selftest exits 0", r.returncode == 0, r.stdout[-500:])

        r = run(exe)
        expect("no subcommand exits 1", r.returncode == 1, str(r.returncode))
        r = run(exe, "analyze", "--config", str(cfg))
        expect("missing option exits 1", r.returncode == 1, str(r.returncode))

        empty = tmp / "empty"
        empty.mkdir()
        r = run(exe, "analyze", "--config", str(cfg), "--snapshots", str(empty), "--out", str(tmp / "x.json"))
        expect("analyze on an empty directory exits 2", r.returncode == 2, r.stderr)

        bad = tmp / "bad.toml"
        bad.write_text("[grid]\nn = 3\n")
        r = run(exe, "simulate", "--config", str(bad), "--out", str(tmp / "s"))
        expect("invalid config exits 2", r.returncode == 2, r.stderr)

        unstable = tmp / "unstable.toml"
        unstable.write_text(CONFIG.replace("dt = 0.005", "dt = 0.5").replace("t_end = 0.1", "t_end = 1.0"))
        r = run(exe, "simulate", "--config", str(unstable), "--out", str(tmp / "u"))
        expect("CFL violation exits 3", r.returncode == 3, r.stderr)

        r = run(exe, "simulate", "--config", str(cfg), "--out", str(tmp / "snaps"))
        expect("simulate exits 0", r.returncode == 0, r.stderr)

        csvs = []
        for k in range(2):
            out = tmp / f"a{k}" / "report.json"
            r = run(exe, "analyze", "--config", str(cfg), "--snapshots", str(tmp / "snaps"), "--out", str(out))
            expect(f"analyze run {k} exits 0", r.returncode == 0, r.stderr)
            if r.returncode != 0:
                continue
            report = json.loads(out.read_text())
            try:
                jsonschema.validate(report, schema, cls=jsonschema.Draft202012Validator)
                expect(f"report {k} validates against the schema", True)
            except jsonschema.ValidationError as e:
                expect(f"report {k} validates against the schema", False, e.message)
            expect(f"report {k} has three scales", len(report["cascade"]["scales"]) == 3)
            csvs.append((out.parent / "flux_vs_scale.csv").read_bytes())
        expect("flux CSV is byte-identical across runs", len(csvs) == 2 and csvs[0] == csvs[1])
        if csvs:
            lines = csvs[0].decode().splitlines()
            expect("flux CSV has a header and one row per cover", len(lines) == 1 + 3 * 2, str(len(lines)))

        covers = tmp / "covers.json"
        r = run(exe, "cover", "gen", "--config", str(cfg), "--out", str(covers))
        expect("cover gen exits 0", r.returncode == 0, r.stderr)
        gen = json.loads(covers.read_text())
        expect("cover gen reports valid covers", all(c["report"]["ok"] for c in gen["covers"]))
        r = run(exe, "cover", "verify", "--config", str(cfg), "--cover", str(covers))
        expect("cover verify accepts generated covers", r.returncode == 0 and json.loads(r.stdout)["ok"], r.stderr)

        broken = gen["covers"][1]
        broken["centers"] = broken["centers"][:1]
        (tmp / "broken.json").write_text(json.dumps(broken))
        r = run(exe, "cover", "verify", "--config", str(cfg), "--cover", str(tmp / "broken.json"))
        expect("cover verify rejects a thinned cover with exit 2", r.returncode == 2, r.stdout[-300:])

        (tmp / "garbage.json").write_text("{not json")
        r = run(exe, "cover", "verify", "--config", str(cfg), "--cover", str(tmp / "garbage.json"))
        expect("cover verify on malformed JSON exits 2", r.returncode == 2, r.stderr)

        r = run(exe, "verify-cutoffs", "--config", str(cfg))
        expect("verify-cutoffs exits 0", r.returncode == 0, r.stderr + r.stdout[-300:])
        if r.returncode == 0:
            kinds = {c["kind"] for c in json.loads(r.stdout)["cutoffs"]}
            expect("verify-cutoffs covers every kind", kinds == {"integral", "interior", "boundary"}, str(kinds))

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
