"""End-to-end checks of the bpkpz command line: exit codes, output files and
bit-identical reruns."""
import csv
import io
import json
import os
import subprocess
import sys
import tempfile
import unittest

BIN = None


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=e, timeout=600)


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class Cli(unittest.TestCase):
    def test_help(self):
        self.assertEqual(run("--help").returncode, 0)
        self.assertEqual(run("dist", "--help").returncode, 0)

    def test_dist_grid(self):
        r = run("dist", "--r-grid", "-2:2:1")
        self.assertEqual(r.returncode, 0, r.stderr)
        table = rows(r.stdout)
        self.assertEqual(len(table), 6)
        values = [float(row[table[0].index("F")]) for row in table[1:]]
        self.assertEqual(values, sorted(values))
        self.assertAlmostEqual(values[0], 0.413224142519, places=9)

    def test_bad_input_exits_2(self):
        self.assertEqual(run("dist", "--b=2", "--beta=1").returncode, 2)
        self.assertEqual(run("dist", "--no-such-flag").returncode, 2)
        self.assertEqual(run("sim", "--N", "2", "--alpha", "2", "--M", "5").returncode, 2)
        self.assertEqual(run("dist", env={"BPKPZ_THREADS": "x"}).returncode, 2)
        self.assertEqual(run("dist", "--method", "other").returncode, 2)

    def test_tolerance_failure_exits_1(self):
        r = run("verify-sigma", "--sigmas", "0.5", "--r", "1", "--gap-tol", "1e-12")
        self.assertEqual(r.returncode, 1, r.stderr)

    def test_nonconvergence_exits_3(self):
        r = run("dist", "--r-grid", "-3", "--halfline-order", "4", "--tol", "1e-14")
        self.assertEqual(r.returncode, 3, r.stderr)

    def test_sim_reproducible_across_threads_and_configs(self):
        with tempfile.TemporaryDirectory() as tmp:
            args = ["sim", "--N", "3", "--tau", "2", "--alpha", "2.5", "--samples", "40", "--seed", "11"]
            outs = []
            for threads in ("1", "3"):
                d = os.path.join(tmp, "t" + threads)
                r = run(*args, "--out", d, env={"BPKPZ_THREADS": threads})
                self.assertEqual(r.returncode, 0, r.stderr)
                with open(os.path.join(d, "rows.csv")) as f:
                    outs.append(f.read())
            self.assertEqual(outs[0], outs[1])

            report = os.path.join(tmp, "t1", "report.json")
            with open(report) as f:
                rep = json.load(f)
            self.assertEqual(rep["experiment"], "sim")
            self.assertEqual(rep["status"], "pass")
            self.assertEqual(rep["seed"], 11)

            d = os.path.join(tmp, "again")
            r = run("sim", "--config", report, "--out", d)
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(os.path.join(d, "rows.csv")) as f:
                self.assertEqual(f.read(), outs[0])

            # explicit flags override the file
            r = run("sim", "--config", report, "--seed", "12")
            self.assertEqual(r.returncode, 0, r.stderr)
            self.assertNotEqual(r.stdout, outs[0])


if __name__ == "__main__":
    BIN = sys.argv.pop(1)
    unittest.main()
