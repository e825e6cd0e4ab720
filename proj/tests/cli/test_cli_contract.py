"""Scripted tpa invocations: exit codes, schema validity, byte-stable output."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema

TPA, ROOT = sys.argv[1], Path(sys.argv[2])
FIX = ROOT / "tests" / "fixtures"
SCHEMA = json.loads((ROOT / "schema" / "report.schema.json").read_text())
validator = jsonschema.Draft7Validator(SCHEMA)

failures = []


def run(args):
    proc = subprocess.run([TPA, *map(str, args)], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def case(name, args, expected_exit, check=None, expect_json=True):
    code, out, err = run(args)
    if code != expected_exit:
        failures.append(f"{name}: exit {code}, expected {expected_exit}; stderr: {err.strip()}")
        return
    if not expect_json:
        return
    try:
        report = json.loads(out)
    except json.JSONDecodeError as e:
        failures.append(f"{name}: stdout is not JSON ({e})")
        return
    errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
    if errors:
        failures.append(f"{name}: schema violation at {list(errors[0].path)}: {errors[0].message}")
    if json.dumps(report, indent=2, ensure_ascii=False) != out.rstrip("\n"):
        failures.append(f"{name}: report does not re-serialise to the same bytes")
    again = run(args)
    if again[1] != out:
        failures.append(f"{name}: output differs between identical runs")
    if check is not None:
        try:
            check(report)
        except AssertionError as e:
            failures.append(f"{name}: {e}")


def f1_table(r):
    res = r["result"]
    assert [row["order"] for row in res["table"]] == ["4", "3", "3", "2", "2", "1", "1", "0", "0"], res["table"]
    assert (res["m"], res["l"]) == ("0", "4"), (res["m"], res["l"])


def outside_start(r):
    res = r["result"]
    assert res["order"] == "-1" and res["applied"] == [], res


def element_order(expected):
    def check(r):
        assert r["result"]["element"]["order"] == expected, r["result"]["element"]
    return check


def found_t(r):
    rows = r["result"]["arrow"]["transform"]
    assert rows[0] == "i=1 -> j=100" and rows[-1] == "i=10 -> j=10", rows


def clause(expected):
    def check(r):
        assert r["result"]["certificate"]["failed_clause"] == expected, r["result"]["certificate"]
    return check


def one_component(r):
    comps = r["result"]["components"]
    assert len(comps) == 1 and len(r["result"]["edges"]) == 3, comps


def halting_f1(r):
    comps = {tuple(c["members"]): c for c in r["result"]["components"]}
    assert comps[("F1",)]["guaranteed_halting"], comps
    assert comps[("spin", "crash")]["contains_infinite_loop"], comps
    assert comps[("spin", "crash")]["contains_undefined"], comps


case("parse", ["parse", FIX / "counting.tpf"], 0)
case("denote", ["denote", FIX / "f1.tpf", "--program", "F1"], 0)
case("denote table", ["denote", FIX / "pairs.tpf", "--program", "gcd", "--table"], 0)
case("order F1", ["order", FIX / "f1.tpf", "--fn", "f", "--cond", "C"], 0, f1_table)
case("order element", ["order", FIX / "f1.tpf", "--program", "F1", "--element", "x=1"], 0, element_order("4"))
case("orbit inside", ["orbit", FIX / "f1.tpf", "--fn", "f", "--cond", "C", "--start", "x=1"], 0)
case("orbit outside", ["orbit", FIX / "f1.tpf", "--fn", "f", "--cond", "C", "--start", "x=12"], 0, outside_start)
case("orbit cycle", ["orbit", FIX / "probes.tpf", "--program", "spin", "--start", "b=2"], 0)
case("profile strengthening", ["profile", FIX / "condfunc.tpf", "--fn", "f1", "--cond", "true", "--cond2", "CA"], 0)
case("profile weakening", ["profile", FIX / "condfunc.tpf", "--fn", "f1", "--cond", "CA", "--cond2", "true"], 0)
case("profile unrelated", ["profile", FIX / "condfunc.tpf", "--fn", "f1", "--cond", "CA", "--cond2", "C"], 2)
case("arrow search", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "P2", "--search"], 0, found_t)
case("arrow map", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "P2", "--map", FIX / "p1_p2.map"], 0)
case("arrow map P3", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "P3", "--map", FIX / "p1_p3.map"], 0)
case("arrow map reordered", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "P2", "--map",
                             FIX / "p1_p2_reordered.map"], 1, clause("b"))
case("arrow partial map", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "P2", "--map",
                           FIX / "p1_p2_shifted.map"], 1)
case("arrow none", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "Short", "--search"], 1)
case("arrow type1", ["arrow", FIX / "staged.tpf", "--kind", "1", "--from", "countdown", "--to", "staged",
                     "--search"], 0)
case("arrow type1 map", ["arrow", FIX / "staged.tpf", "--kind", "1", "--from", "countdown", "--to", "staged",
                         "--map", FIX / "countdown_staged.map"], 0)
case("arrow both modes", ["arrow", FIX / "counting.tpf", "--from", "P1", "--to", "P2", "--search", "--map",
                          FIX / "p1_p2.map"], 2)
case("graph triangle", ["graph", FIX / "counting.tpf", "--programs", "P1", "P2", "P3"], 0, one_component)
case("graph probes", ["graph", FIX / "probes.tpf", FIX / "f1.tpf", "--programs", "spin", "crash", "F1"], 0,
     halting_f1)
case("graph budget", ["graph", FIX / "counting.tpf", "--budget", "2"], 3)
case("graph duplicate names", ["graph", FIX / "counting.tpf", FIX / "counting.tpf"], 2)
case("missing file", ["parse", FIX / "missing.tpf"], 2)
case("unknown program", ["denote", FIX / "f1.tpf", "--program", "nope"], 2)
case("no subcommand", [], 2, expect_json=False)
case("unknown flag", ["order", FIX / "f1.tpf", "--bogus"], 2, expect_json=False)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("all CLI contract cases passed")
