"""End-to-end checks of the evolv command line: exit codes, reports, schemas, files."""

import json
import os
import struct
import subprocess
import sys
import tempfile
import unittest
import xml.etree.ElementTree as ET

import jsonschema

EVOLV = os.path.abspath(sys.argv.pop(1))
SCHEMA_DIR = sys.argv.pop(1)


def schema(name):
    with open(os.path.join(SCHEMA_DIR, name + ".v1.schema.json")) as f:
        return json.load(f)


def run(*args, cwd=None):
    p = subprocess.run([EVOLV, *args], capture_output=True, text=True, cwd=cwd)
    return p.returncode, p.stdout, p.stderr


def read_gfield(path):
    with open(path, "rb") as f:
        blob = f.read()
    assert blob[:8] == b"GFIELD01"
    (n,) = struct.unpack("<Q", blob[8:16])
    header = json.loads(blob[16 : 16 + n])
    data = blob[16 + n :]
    values = struct.unpack("<%dd" % (len(data) // 8), data)
    return header, values


def fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return "%016x" % h


class Analyze(unittest.TestCase):
    def test_heat(self):
        code, out, _ = run("analyze", "d0 - d1^2")
        self.assertEqual(code, 0)
        rep = json.loads(out)
        jsonschema.validate(rep, schema("analysis-report"))
        self.assertEqual(rep["classification"], "bounded")
        self.assertEqual(rep["omega0"], 0.0)
        self.assertTrue(rep["battery"]["all_pass"])
        self.assertNotIn("timings", rep)

    def test_hormander(self):
        code, out, _ = run("analyze", "d0 - i*(d1+1)^2")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(out)["classification"], "unbounded")

    def test_json_terms_zero_slice(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "terms.json")
            with open(path, "w") as f:
                json.dump({"n": 1, "terms": [{"exp": [0, 1], "re": 1}]}, f)
            code, out, _ = run("analyze", "--json", path)
        self.assertEqual(code, 2)
        rep = json.loads(out)
        self.assertEqual(rep["classification"], "unbounded")
        first = rep["verdicts"]["exact_1d"]["evidence"][0]
        self.assertEqual(first["kind"], "zero_slice")
        self.assertEqual(first["xi"], [0.0])

    def test_parse_error(self):
        code, _, err = run("analyze", "d0 - * d1")
        self.assertEqual(code, 1)
        self.assertIn("position 5", err)
        self.assertIn("     ^", err)

    def test_bad_usage(self):
        self.assertEqual(run("analyze")[0], 1)
        self.assertEqual(run("nonsense")[0], 1)

    def test_corpus_reports_validate(self):
        expected = {
            "d0 - d1^2": 0, "d0 + d1^2": 2, "d0^2 - d1^2": 0, "d0 - i*d1^2": 0, "d0 - 3": 0,
            "d0 - i*d1^2 - 1": 0, "d0 + d1": 0, "d1*d0 + 1": 0, "d1": 2, "d0 - i*(d1+1)^2": 2, "1": 0,
        }
        s = schema("analysis-report")
        for op, code in expected.items():
            with self.subTest(op=op):
                got, out, _ = run("analyze", op)
                self.assertEqual(got, code)
                rep = json.loads(out)
                jsonschema.validate(rep, s)
                if rep["battery"].get("checks"):
                    self.assertTrue(rep["battery"]["all_pass"])

    def test_deterministic_bytes(self):
        a = run("analyze", "d0 - i*d1^2 - 1", "--seed", "7")[1]
        b = run("analyze", "d0 - i*d1^2 - 1", "--seed", "7")[1]
        c = run("analyze", "d0 - i*d1^2 - 1", "--seed", "7", "--threads", "1")[1]
        self.assertEqual(a, b)
        self.assertEqual(a, c)

    def test_timings_opt_in(self):
        rep = json.loads(run("analyze", "d0 - 3", "--timings")[1])
        jsonschema.validate(rep, schema("analysis-report"))
        self.assertIn("verdicts_s", rep["timings"])

    def test_csv_and_chart(self):
        with tempfile.TemporaryDirectory() as d:
            csv = os.path.join(d, "curve.csv")
            code, out, _ = run("analyze", "d0 - d1^2", "--csv", csv, "--charts", d)
            self.assertEqual(code, 0)
            with open(csv) as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0].split(",")[0], "r")
            rep = json.loads(out)
            self.assertEqual(len(lines) - 1, len(rep["sigma_curve"]["samples"]))
            svg = ET.parse(os.path.join(d, "sigma_curve.svg")).getroot()
            poly = svg.findall("{http://www.w3.org/2000/svg}polyline")
            defined = [p for p in rep["sigma_curve"]["samples"] if isinstance(p["sigma"], float)]
            self.assertEqual(len(poly[0].get("points").split()), len(defined))


class Fundsol(unittest.TestCase):
    def test_heat_defaults(self):
        with tempfile.TemporaryDirectory() as d:
            code, out, _ = run("fundsol", "d0 - d1^2", "--charts", "charts", cwd=d)
            self.assertEqual(code, 0)
            rep = json.loads(out)
            jsonschema.validate(rep, schema("fundsol-report"))
            deltas = [c for c in rep["battery"]["checks"] if c["name"].startswith("delta_residual")]
            self.assertEqual(len(deltas), 10)
            for c in deltas:
                self.assertLessEqual(c["measured"], 1e-3)
            header, values = read_gfield(os.path.join(d, "N.gfield"))
            self.assertEqual(header["role"], "N")
            self.assertEqual(header["count"], 512 * 512)
            self.assertEqual(len(values), 2 * 512 * 512)
            with open(os.path.join(d, "N.gfield"), "rb") as f:
                blob = f.read()
            (n,) = struct.unpack("<Q", blob[8:16])
            self.assertEqual(header["checksum"], "fnv1a64:" + fnv1a64(blob[16 + n :]))
            for name in ("decay.svg", "kernel_slice.svg"):
                ET.parse(os.path.join(d, "charts", name))

    def test_sigma_zero(self):
        with tempfile.TemporaryDirectory() as d:
            code, _, err = run("fundsol", "d0 - d1^2", "--sigma", "0", cwd=d)
            self.assertEqual(code, 4)
            self.assertFalse(os.path.exists(os.path.join(d, "N.gfield")))

    def test_sigma_on_the_spectrum(self):
        # forced shift on an unbounded operator: the line meets a zero of P
        with tempfile.TemporaryDirectory() as d:
            code, _, err = run("fundsol", "d0 + d1^2", "--sigma", "0", "--grid-points", "64", cwd=d)
            self.assertEqual(code, 4)
            self.assertIn("sigma too close to spectrum", err)

    def test_pair_only(self):
        with tempfile.TemporaryDirectory() as d:
            code, out, _ = run("fundsol", "d0^2 - d1^2", "--pair-only", cwd=d)
            self.assertEqual(code, 0)
            rep = json.loads(out)
            jsonschema.validate(rep, schema("fundsol-report"))
            self.assertIsNone(rep["field"])
            self.assertEqual(os.listdir(d), [])

    def test_unbounded_needs_sigma(self):
        with tempfile.TemporaryDirectory() as d:
            self.assertEqual(run("fundsol", "d0 + d1^2", cwd=d)[0], 2)


class Solve(unittest.TestCase):
    def test_bump(self):
        with tempfile.TemporaryDirectory() as d:
            self.assertEqual(run("rhs", "--out", "F.gfield", cwd=d)[0], 0)
            code, out, _ = run("solve", "d0 - d1^2", "--rhs", "F.gfield", cwd=d)
            self.assertEqual(code, 0)
            rep = json.loads(out)
            jsonschema.validate(rep, schema("solve-report"))
            self.assertLessEqual(rep["checks"][0]["measured"], 1e-3)
            header, _ = read_gfield(os.path.join(d, "U.gfield"))
            self.assertEqual(header["role"], "solution")

    def test_zero(self):
        with tempfile.TemporaryDirectory() as d:
            run("rhs", "--zero", "--grid-points", "64", "--out", "F.gfield", cwd=d)
            code, _, _ = run("solve", "d0 - d1^2", "--rhs", "F.gfield", cwd=d)
            self.assertEqual(code, 0)
            _, values = read_gfield(os.path.join(d, "U.gfield"))
            self.assertTrue(all(v == 0.0 for v in values))

    def test_past_support(self):
        with tempfile.TemporaryDirectory() as d:
            run("rhs", "--center=-2,0", "--width", "0.3,0.3", "--grid-points", "64", "--out", "F.gfield", cwd=d)
            self.assertEqual(run("solve", "d0 - d1^2", "--rhs", "F.gfield", cwd=d)[0], 5)

    def test_dimension_mismatch(self):
        with tempfile.TemporaryDirectory() as d:
            run("rhs", "--n", "0", "--grid-points", "64", "--out", "F.gfield", cwd=d)
            self.assertEqual(run("solve", "d0 - d1^2", "--rhs", "F.gfield", cwd=d)[0], 1)


if __name__ == "__main__":
    unittest.main(verbosity=2)
