"""End-to-end checks of the r4isect command line tool."""
import csv
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = sys.argv[1]
failures = []


def run(*args, expect=0):
    p = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{args}: exit {p.returncode}, expected {expect}: {p.stderr.strip()}")
    return p.stdout


def check(cond, what):
    if not cond:
        failures.append(what)


def without_wall(text):
    rows = list(csv.reader(io.StringIO(text)))
    col = rows[0].index("wallMillis")
    return [r[:col] + r[col + 1:] for r in rows]


with tempfile.TemporaryDirectory() as tmp:
    d = Path(tmp)

    # gen
    run("gen", "--kind", "TETRAHEDRA", "--n", 10, "--seed", 5, "--out", d / "a.json")
    run("gen", "--kind", "TETRAHEDRA", "--n", 10, "--seed", 5, "--out", d / "b.json")
    check((d / "a.json").read_bytes() == (d / "b.json").read_bytes(), "gen is not deterministic")
    check(len(json.loads((d / "a.json").read_text())["objects"]) == 10, "gen object count")
    run("gen", "--n", 0, expect=2)
    run("gen", "--kind", "PENTAGONS", "--n", 3, expect=2)

    # query
    run("gen", "--kind", "SEGMENTS", "--n", 40, "--seed", 6, "--range", 30, "--out", d / "s.json")
    run("gen", "--kind", "TETRAHEDRA", "--n", 30, "--seed", 7, "--range", 30, "--out", d / "t.json")
    for sigma in ("1", "1.5", "2", "3", "6"):
        out = json.loads(run("query", "--scene", d / "t.json", "--queries", d / "s.json", "--sigma", sigma))
        check(not out["mismatch"], f"query mismatch at sigma {sigma}")
        check(out["oracle"]["count"] == len(out["oracle"]["pairs"]), "report count")
    count = json.loads(run("query", "--scene", d / "t.json", "--queries", d / "s.json", "--mode", "count"))
    report = json.loads(run("query", "--scene", d / "t.json", "--queries", d / "s.json", "--mode", "report"))
    check(count["structure"]["count"] == len(report["structure"]["pairs"]), "count equals report length")
    run("query", "--scene", d / "t.json", "--queries", d / "s.json", "--sigma", "0.5", expect=2)
    run("query", "--scene", d / "s.json", "--queries", d / "s.json", expect=3)
    (d / "bad.json").write_text('{"version": 1, "kind": "SEGMENTS", "objects": [[["1","2","x","4"]]]}')
    run("query", "--scene", d / "t.json", "--queries", d / "bad.json", expect=3)
    a = run("query", "--scene", d / "t.json", "--queries", d / "s.json", "--format", "csv")
    b = run("query", "--scene", d / "t.json", "--queries", d / "s.json", "--format", "csv")
    check(a == b, "query is not deterministic")

    # flats
    run("gen", "--kind", "FLATS_AND_LINES", "--n", 20, "--seed", 8, "--range", 20, "--out", d / "f.json")
    out = json.loads(run("flats", "--scene", d / "f.json", "--sigma", "1.5"))
    check(not out["mismatch"], "flats mismatch")

    # ccd fixtures
    for name, hit in (("identical", True), ("apart", False), ("flythrough", True)):
        run("gen", "--fixture", name, "--out", d / f"{name}.json")
        out = json.loads(run("ccd", "--scene", d / f"{name}.json", "--engine", "both"))
        check(out["detected"] == hit, f"ccd fixture {name}")
        check(all(p["verified"] for p in out["pairs"]), f"ccd witness time for {name}")
        check(not out["mismatch"], f"ccd mismatch for {name}")
    run("gen", "--kind", "MOVING_TETRAHEDRA", "--n", 12, "--seed", 2, "--range", 6, "--out", d / "m.json")
    out = json.loads(run("ccd", "--scene", d / "m.json", "--engine", "both", "--threshold", 3))
    check(not out["mismatch"], "ccd random mismatch")

    # arrange
    far = {"version": 1, "kind": "TETRAHEDRA", "objects": [
        [[str(100 * k), "0", "0", "0"], [str(100 * k + 5), "1", "2", "3"],
         [str(100 * k + 2), "5", "1", "5"], [str(100 * k + 3), "1", "5", "2"]] for k in range(3)]}
    (d / "far.json").write_text(json.dumps(far))
    out = json.loads(run("arrange", "--scene", d / "far.json"))
    check((out["k2"], out["k3"], out["k4"]) == (0, 0, 0), "disjoint arrangement")
    run("gen", "--kind", "TETRAHEDRA", "--n", 20, "--seed", 1, "--range", 40, "--out", d / "ar.json")
    out = json.loads(run("arrange", "--scene", d / "ar.json", "--check", "--witness", d / "w.json"))
    check(not out["mismatch"], "arrangement differs from enumeration")
    check(out["k4_ge_k3"], "k4 >= k3")
    w = json.loads((d / "w.json").read_text())
    check(len(w["pairs"]) == out["k2"] and len(w["vertices"]) == out["k4"], "witness file sizes")

    # bench
    text = run("bench", "--n", 25, "--seed", 3, "--range", 30, "--sigma-grid", "1,1.5,2,3,6", "--repetitions", 3)
    rows = list(csv.DictReader(io.StringIO(text)))
    check(len(rows) == 15, "bench row count")
    cut = [int(r["leafCutoff"]) for r in rows[:5]]
    check(all(x > y for x, y in zip(cut, cut[1:])), "leafCutoff strictly decreasing")
    check(all(r["mismatch"] == "false" for r in rows), "bench mismatch")
    body = without_wall(text)
    check(body[1:6] == body[6:11] == body[11:16], "bench repetitions differ")
    again = run("bench", "--n", 25, "--seed", 3, "--range", 30, "--sigma-grid", "1,1.5,2,3,6", "--repetitions", 3)
    check(without_wall(again) == body, "bench is not deterministic")

    # predict
    rows = list(csv.DictReader(io.StringIO(run("predict", "--sigma-grid", "1:6:0.5"))))
    by = {r["sigma"]: r for r in rows}
    check(by["2"]["exponent"] == "0.5", "predict sigma 2")
    check(by["1"]["exponent"] == "0.833333" and by["6"]["exponent"] == "0", "predict endpoints")
    rows = list(csv.DictReader(io.StringIO(run("predict", "--mu-grid", "0,1,1.5"))))
    check(rows[1]["exponent"] == "1.625", "predict mu 1")
    run("predict", "--sigma-grid", "0:2:1", expect=2)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli checks passed")
