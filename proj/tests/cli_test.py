"""End-to-end checks of the coalflow command line.

usage: python3 cli_test.py <coalflow-binary> <schema-dir>
"""

import json
import os
import pathlib
import subprocess
import sys
import tempfile
import unittest
from fractions import Fraction

import jsonschema
from referencing import Registry, Resource

CLI = None
SCHEMAS = None


def load_registry(directory):
    resources = []
    for path in sorted(pathlib.Path(directory).glob("*.schema.json")):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


def run(*args, env=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=env)


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.registry = load_registry(SCHEMAS)
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = pathlib.Path(cls.tmp.name)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def validate(self, document, name):
        schema = self.registry.get_or_retrieve(f"{name}.schema.json").value.contents
        jsonschema.Draft202012Validator(schema, registry=self.registry).validate(document)

    def json_of(self, *args, schema):
        result = run(*args)
        self.assertEqual(result.returncode, 0, result.stderr)
        document = json.loads(result.stdout)
        self.validate(document, schema)
        return document

    def test_coeff(self):
        doc = self.json_of("coeff", 2, "0:0,1:-1", schema="coeff")
        self.assertEqual(doc["d"], "-1/2^1")
        self.assertAlmostEqual(doc["weight"], 0.125)
        self.assertTrue(doc["admissible"])
        self.assertIsNone(doc["manifest"]["timestamp"])
        doc = self.json_of("coeff", 3, "0:0,2:0", schema="coeff")
        self.assertEqual(doc["d"], "0/2^0")

    def test_coeff_rejects_bad_sites(self):
        for sites in ["0:1", "3:1", "1:0", "junk", "0:0,"]:
            result = run("coeff", 3, sites)
            self.assertEqual(result.returncode, 2, sites)
            self.assertIn("error", result.stderr)

    def test_usage_errors(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("nonsense").returncode, 2)
        self.assertEqual(run("size", "abc").returncode, 2)
        self.assertEqual(run("size", 5, "--format", "xml").returncode, 2)
        self.assertEqual(run("size", 0).returncode, 2)
        self.assertEqual(run("--help").returncode, 0)

    def test_verify(self):
        doc = self.json_of("verify", 4, schema="verify")
        self.assertTrue(doc["passed"])
        self.assertIsNone(doc["first_failure"])
        names = {c["name"] for c in doc["checks"]}
        self.assertIn("oracle_matches_formula", names)
        self.assertIn("walk_zero_law", names)

    def test_verify_refusals(self):
        result = run("verify", 7)
        self.assertEqual(result.returncode, 2)
        self.assertIn("MiB", result.stderr)
        self.assertEqual(run("verify", 9, "--no-oracle").returncode, 2)
        doc = self.json_of("verify", 8, "--no-oracle", schema="verify")
        self.assertTrue(doc["passed"])

    def test_rdist(self):
        doc = self.json_of("rdist", 3, schema="rdist")
        table = {tuple(r["R"]): Fraction(r["probability"]) for r in doc["rows"]}
        self.assertEqual(table[(0,)], Fraction(1, 3))
        self.assertEqual(table[(0, 2)], Fraction(1, 24))
        self.assertEqual(sum(table.values()), 1)
        doc = self.json_of("rdist", 10, "--cumulative", 4, schema="rdist_cumulative")
        self.assertEqual(doc["cumulative"], "1/2")
        self.assertEqual(doc["summed"], "1/2")
        self.assertEqual(run("rdist", 3, "--cumulative", 3).returncode, 2)
        self.assertEqual(run("rdist", 21).returncode, 2)

    def test_size(self):
        doc = self.json_of("size", 3, schema="size")
        self.assertEqual(doc["expected_size"], "35/24")
        self.assertEqual([r["probability"] for r in doc["distribution"]], ["5/8", "7/24", "1/12"])
        doc = self.json_of("size", 10000, schema="size")
        self.assertIsNone(doc["distribution"])
        self.assertLess(abs(doc["expected_size_over_sqrt_n"] - 0.7522527780636751), 0.05)

    def test_noise(self):
        doc = self.json_of("noise", 3, "0.1", schema="noise")
        self.assertEqual(doc["exact"], "547/750")
        doc = self.json_of("noise", 2, "0.25", "--mc", 50000, "--seed", 3, schema="noise")
        self.assertEqual(doc["exact"], "7/16")
        mc = doc["mc"]
        self.assertLess(abs(mc["estimate"] - 7 / 16), 3 * mc["stderr"])
        self.assertEqual(run("noise", 3, "0.6").returncode, 2)
        self.assertEqual(run("noise", 3, "x").returncode, 2)

    def test_sample(self):
        out = self.dir / "samples.ndjson"
        trace = self.dir / "walk.csv"
        result = run("sample", 5, 500, "--out", out, "--trace", trace, "--seed", 11)
        self.assertEqual(result.returncode, 0, result.stderr)
        lines = out.read_text().splitlines()
        self.assertEqual(len(lines), 500)
        for i, line in enumerate(lines):
            record = json.loads(line)
            self.validate(record, "sample")
            self.assertEqual(record["index"], i)
            self.assertEqual(record["R"], [s[0] for s in record["S"]])
        manifest = json.loads(pathlib.Path(f"{out}.manifest.json").read_text())
        self.validate(manifest, "manifest")
        self.assertEqual(manifest["seed"], 11)
        summary = pathlib.Path(f"{out}.summary.csv").read_text().splitlines()
        self.assertTrue(summary[0].startswith("# "))
        self.assertIn("R,observed,frequency,exact", summary)
        rows = [l for l in trace.read_text().splitlines() if not l.startswith("#")]
        self.assertEqual(rows[0], "x,V")
        self.assertEqual(rows[-1].split(",")[1], "0")

    def test_seed_from_environment(self):
        env = dict(os.environ, COALFLOW_SEED="1234")
        result = subprocess.run([CLI, "sample", "4", "3"], capture_output=True, text=True, env=env)
        explicit = run("sample", 4, 3, "--seed", 1234)
        self.assertEqual(result.stdout, explicit.stdout)
        env["COALFLOW_SEED"] = "not-a-number"
        bad = subprocess.run([CLI, "sample", "4", "3"], capture_output=True, text=True, env=env)
        self.assertEqual(bad.returncode, 2)

    def test_flow(self):
        prefix = self.dir / "band"
        doc = self.json_of("flow", "--boundary", "reflect", "--eps", "0,0.025,0.025,0.025", "--prefix", prefix,
                           schema="flow")
        self.assertEqual(len(doc["starts"]), 12)
        self.assertEqual(doc["grid"], {"length": 1000, "width": 30, "boundary": "reflect"})
        self.assertEqual(len(doc["panels"]), 4)
        for panel in doc["panels"]:
            lines = pathlib.Path(panel["file"]).read_text().splitlines()
            body = [l for l in lines if not l.startswith("#")]
            self.assertEqual(body[0], "start_id,x,position")
            for row in body[1:200]:
                position = int(row.split(",")[2])
                self.assertTrue(0 <= position <= 30)
        self.assertEqual(run("flow", "--boundary", "reflect", "--starts", "0:40", "--prefix", prefix).returncode, 2)
        doc = self.json_of("flow", "--length", 50, "--starts", "0:0,2:0", "--prefix", prefix, schema="flow")
        self.assertEqual(doc["grid"]["boundary"], "unbounded")
        self.assertEqual(run("flow", "--eps", "2", "--prefix", prefix).returncode, 2)

    def test_transform(self):
        doc = self.json_of("transform", 2, schema="transform")
        self.assertEqual(len(doc["d"]), 8)
        self.assertEqual(doc["d"][1], "1/2^0")
        out = self.dir / "t.bin"
        result = run("transform", 4, "--format", "bin", "--out", out)
        self.assertEqual(result.returncode, 0, result.stderr)
        data = out.read_bytes()
        self.assertEqual(data[:4], b"CWFT")
        self.assertEqual(len(data), 4 + 4 + 4 + 4 + 10 * 8 + 4 + 8 + 1024 * 8)
        self.validate(json.loads(pathlib.Path(f"{out}.manifest.json").read_text()), "manifest")
        self.assertEqual(run("transform", 5).returncode, 2)
        self.assertEqual(run("transform", 7).returncode, 2)

    def test_csv_outputs_carry_manifest(self):
        for args in (["coeff", 2, "0:0"], ["rdist", 3], ["size", 4], ["noise", 4, "1/4"], ["verify", 2],
                     ["sample", 3, 5]):
            result = run(*args, "--format", "csv")
            self.assertEqual(result.returncode, 0, result.stderr)
            manifest_lines = [l for l in result.stdout.splitlines() if l.startswith("# manifest=")]
            self.assertEqual(len(manifest_lines), 1)
            self.validate(json.loads(manifest_lines[0][len("# manifest="):]), "manifest")

    def test_timestamp_is_opt_in(self):
        doc = self.json_of("coeff", 1, "0:0", "--timestamp", "2026-01-01T00:00:00Z", schema="coeff")
        self.assertEqual(doc["manifest"]["timestamp"], "2026-01-01T00:00:00Z")


if __name__ == "__main__":
    CLI, SCHEMAS = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1], verbosity=2)
