import io
import os
import csv
import shutil
import tempfile
import contextlib

import numpy as np
from parameterized import parameterized

from unittest_utils import PacGreedyTestCase
from pacgreedy import cli
from pacgreedy.bench.config import ConfigImporter, ExperimentConfig, SCHEMA, load_config, apply_overrides
from pacgreedy.bench.runner import CSV_HEADER, run_experiment, compare_rows, write_rows, emit_csv, format_value
from pacgreedy.bench.verify import SuiteResult, run_suite, _trials
from pacgreedy.messages import ConfigError

def metric_rows(rows, metric):
    return [r for r in rows if r[5] == metric]


class TestConfig(PacGreedyTestCase):

    def test_load(self):
        config = load_config(self.data_path("config_coverage.yaml"), self.make_env())
        self.assertEqual(config.scenario, "coverage")
        self.assertEqual(config.maximizers, ["greedy", "lazy", "pac"])
        self.assertEqual(config.ks, [1, 2])
        self.assertEqual(config.seed, 3)
        # Defaults
        self.assertEqual(config.T, 100)
        self.assertEqual(config.delta_u, 0.05)
        self.assertIsNone(config.out)
        self.assertEqual(config.pac_params().max_tighten_rounds, 64)

    def test_single_maximizer(self):
        config = load_config(self.data_path("config_single.yaml"), self.make_env())
        self.assertEqual(config.maximizers, ["greedy"])
        self.assertEqual(config.ks, [1])

    def test_relative_paths(self):
        config = load_config(self.data_path("config_model_file.yaml"), self.make_env())
        self.assertEqual(config.path("sensor_model"), self.data_path("sensors_ok.yaml"))
        self.assertIsNone(config.path("trajectory_file"))

    def test_errors(self):
        importer = ConfigImporter(self.make_env())
        with self.assertLogs() as cm:
            with self.assertRaises(ConfigError):
                importer.import_file(self.data_path("config_bad.yaml"))
        self.assertLogMatches(cm, r"config_bad.yaml:3: .*Give either 'maximizer' or 'maximizers', not both")
        self.assertLogMatches(cm, r"config_bad.yaml:4: .*'k' must not exceed n=6, got 9")
        self.assertLogMatches(cm, r"config_bad.yaml:6: .*Invalid value for 'epsilon1': must be >= 0")
        self.assertLogMatches(cm, r"config_bad.yaml:7: .*Unknown config key 'colour'")
        self.assertLogMatches(cm, r"Config aborted due to previous errors")
        self.assertEqual(importer.error_count, 4)

    def test_missing_keys(self):
        importer = ConfigImporter(self.make_env())
        with self.assertLogs() as cm:
            with self.assertRaises(ConfigError):
                importer.import_file(self.data_path("config_missing.yaml"))
        self.assertLogMatches(cm, r"Missing required key 'scenario'")
        self.assertLogMatches(cm, r"Missing required key 'maximizer'")

    def test_field_checks(self):
        self.assertIsNone(SCHEMA['k'].check([1, 2]))
        self.assertIsNotNone(SCHEMA['k'].check([]))
        self.assertIsNotNone(SCHEMA['k'].check(True))
        self.assertIsNone(SCHEMA['t'].check(1))
        self.assertIsNotNone(SCHEMA['t'].check(0))
        self.assertIsNotNone(SCHEMA['delta_u'].check(1.0))
        self.assertIsNotNone(SCHEMA['scenario'].check("orbit"))
        self.assertIsNotNone(SCHEMA['sigma0'].check(float('nan')))

    def test_sweep_variants(self):
        config = load_config(self.data_path("config_sweep.yaml"), self.make_env())
        labels = [v.label for v in config.variants()]
        self.assertEqual(labels, ["greedy", "lazier[R=2]", "lazier[R=4]", "pac[epsilon1=0]", "pac[epsilon1=0.5]"])
        self.assertEqual(config.values_of('R'), [2, 4])
        self.assertEqual(config.values_of('m_fine'), [2**16])
        # The attribute of a swept key holds its first value
        self.assertEqual(config.R, 2)

        variants = {v.label: v for v in config.variants()}
        self.assertEqual(variants["lazier[R=4]"].config.R, 4)
        self.assertEqual(variants["pac[epsilon1=0.5]"].config.pac_params().epsilon1, 0.5)
        self.assertEqual(variants["pac[epsilon1=0.5]"].maximizer, "pac")
        self.assertEqual(variants["greedy"].config.epsilon1, 0.0)

    def test_sweep_errors(self):
        importer = ConfigImporter(self.make_env())
        with self.assertLogs() as cm:
            with self.assertRaises(ConfigError):
                importer.import_file(self.data_path("config_sweep_bad.yaml"))
        self.assertLogMatches(cm, r"config_sweep_bad.yaml:4: .*'R' lists several values but only applies to lazier")
        self.assertLogMatches(cm, r"config_sweep_bad.yaml:5: .*Invalid value for 'm_fine': list has duplicate values")
        self.assertEqual(importer.error_count, 2)

    def test_sweep_keys(self):
        for key in ('R', 'epsilon1', 'm_fine', 'estimate_m'):
            with self.subTest(key=key):
                self.assertTrue(SCHEMA[key].many)
        self.assertIsNone(SCHEMA['R'].check([2, 4]))
        self.assertIsNotNone(SCHEMA['R'].check([2, 2]))
        self.assertIsNotNone(SCHEMA['m_coarse'].check([64, 128]))

    def test_overrides(self):
        env = self.make_env()
        config = ExperimentConfig({'scenario': 'coverage', 'maximizer': 'greedy'})
        apply_overrides(config, env, environ={'PACGREEDY_SEED': '5', 'PACGREEDY_OUT': 'x.csv'})
        self.assertEqual((config.seed, config.out), (5, 'x.csv'))

        # Command line wins
        apply_overrides(config, env, environ={'PACGREEDY_SEED': '5'}, seed=7, out='y.csv')
        self.assertEqual((config.seed, config.out), (7, 'y.csv'))

        apply_overrides(config, env, environ={})
        self.assertEqual(config.seed, 7)

    def test_bad_overrides(self):
        env = self.make_env()
        config = ExperimentConfig({'scenario': 'coverage', 'maximizer': 'greedy'})
        with self.assertLogs() as cm:
            with self.assertRaises(ConfigError):
                apply_overrides(config, env, environ={'PACGREEDY_SEED': 'abc'})
        self.assertLogMatches(cm, r"PACGREEDY_SEED must be an integer")
        with self.assertLogs():
            with self.assertRaises(ConfigError):
                apply_overrides(config, env, environ={}, seed=-1)

#===============================================================================
class TestRunner(PacGreedyTestCase):

    def run_config(self, name, **kwargs):
        config = load_config(self.data_path(name), self.make_env())
        return config, run_experiment(config, self.make_env(), **kwargs)

    def test_format_value(self):
        self.assertEqual(format_value(True), "1")
        self.assertEqual(format_value(np.int64(3)), "3")
        self.assertEqual(format_value(0.1), "0.1")
        self.assertEqual(format_value(1.0), "1")
        self.assertEqual(format_value(np.float64(1) / 3), "0.3333333333")
        self.assertEqual(format_value("0 2"), "0 2")

    def test_coverage_rows(self):
        config, rows = self.run_config("config_coverage.yaml")
        # 3 maximizers x 2 k x 2 trials x 3 metrics
        self.assertEqual(len(rows), 36)
        self.assertEqual(rows[0][:5], ("coverage", "greedy", 1, 3, "0"))
        self.assertEqual([r[5] for r in rows[:3]], ["objective", "work", "chosen"])
        for r in metric_rows(rows, "chosen"):
            self.assertEqual(len(r[6].split()), r[2])

    def test_deterministic(self):
        _, a = self.run_config("config_coverage.yaml")
        _, b = self.run_config("config_coverage.yaml")
        sa, sb = io.StringIO(), io.StringIO()
        write_rows(a, sa)
        write_rows(b, sb)
        self.assertEqual(sa.getvalue(), sb.getvalue())
        self.assertEqual(sa.getvalue().splitlines()[0], ",".join(CSV_HEADER))

    def test_parallel_matches_serial(self):
        _, serial = self.run_config("config_pair.yaml")
        _, parallel = self.run_config("config_pair.yaml", jobs=2)
        self.assertEqual(serial, parallel)

    def test_seed_changes_instances(self):
        config = load_config(self.data_path("config_pair.yaml"), self.make_env())
        a = run_experiment(config, self.make_env())
        config.seed = 11
        b = run_experiment(config, self.make_env())
        self.assertNotEqual([r[6] for r in a], [r[6] for r in b])

    def test_compare_rows(self):
        config, rows = self.run_config("config_pair.yaml")
        paired = compare_rows(config, rows)
        lazy = [r for r in paired if r[1] == "lazy" and r[4] != "mean"]
        # 3 trials x (work_ratio, objective_delta, same_chosen)
        self.assertEqual(len(lazy), 9)
        for r in metric_rows(lazy, "same_chosen"):
            self.assertEqual(r[6], "1")
        for r in metric_rows(lazy, "objective_delta"):
            self.assertEqual(r[6], "0")
        for r in metric_rows(lazy, "work_ratio"):
            self.assertLessEqual(float(r[6]), 1.0)
        self.assertFalse([r for r in paired if r[1] == "greedy" and r[4] != "mean"])

        means = {(r[1], r[5]): r[6] for r in paired if r[4] == "mean"}
        self.assertEqual(means[("lazy", "same_chosen")], "1")
        self.assertIn(("greedy", "work"), means)
        self.assertIn(("greedy", "objective"), means)
        greedy_work = [float(r[6]) for r in metric_rows(rows, "work") if r[1] == "greedy"]
        self.assertAlmostEqual(float(means[("greedy", "work")]), sum(greedy_work) / len(greedy_work), places=6)

    def test_sweep_rows(self):
        config, rows = self.run_config("config_sweep.yaml")
        # 5 variants x 2 trials x 3 metrics
        self.assertEqual(len(rows), 30)
        labels = []
        for r in rows:
            if r[1] not in labels:
                labels.append(r[1])
        self.assertEqual(labels, [v.label for v in config.variants()])

        paired = compare_rows(config, rows)
        ratios = metric_rows([r for r in paired if r[4] != "mean"], "work_ratio")
        # 4 non-baseline variants x 2 trials
        self.assertEqual(len(ratios), 8)
        self.assertEqual({r[1] for r in ratios}, set(labels[1:]))

    def test_sensor_toy(self):
        config, rows = self.run_config("config_sensor_toy.yaml")
        self.assertEqual(len(rows), 2 * 2 * 3)
        for r in metric_rows(rows, "objective"):
            self.assertGreaterEqual(float(r[6]), 0)

    def test_sensor_model_file(self):
        _, rows = self.run_config("config_model_file.yaml")
        self.assertEqual(len(rows), 3)
        self.assertEqual(metric_rows(rows, "chosen")[0][6], "0 1")

    def test_sensor_model_too_small(self):
        config = load_config(self.data_path("config_model_too_small.yaml"), self.make_env())
        with self.assertLogs() as cm:
            with self.assertRaises(ConfigError):
                run_experiment(config, self.make_env())
        self.assertLogMatches(cm, r"'k' must not exceed the 2 available sensors, got 3")

    def test_tracking(self):
        config, rows = self.run_config("config_tracking.yaml")
        # 2 maximizers x 2 trajectories x 6 metrics
        self.assertEqual(len(rows), 24)
        self.assertEqual(
            [r[5] for r in rows[:6]],
            ["accuracy", "correct", "work", "pruned", "reinitializations", "unconverged"]
        )
        for r in metric_rows(rows, "pruned"):
            if r[1] != "pac":
                self.assertEqual(r[6], "0")
        for r in metric_rows(rows, "accuracy"):
            self.assertTrue(0 <= float(r[6]) <= 1)

        paired = compare_rows(config, rows)
        self.assertTrue(metric_rows(paired, "accuracy_delta"))
        self.assertFalse(metric_rows(paired, "same_chosen"))

    def test_recorded_trajectories(self):
        _, rows = self.run_config("config_recorded.yaml")
        self.assertEqual(len(rows), 2 * 7)
        self.assertEqual(len(metric_rows(rows, "wall-ms")), 2)
        # Recorded trajectories 'a' and 'b' have 3 and 2 timesteps
        correct = [int(r[6]) for r in metric_rows(rows, "correct")]
        self.assertTrue(0 <= correct[0] <= 3)
        self.assertTrue(0 <= correct[1] <= 2)

    def test_emit_csv(self):
        _, rows = self.run_config("config_single.yaml")
        tmpdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, tmpdir)
        path = os.path.join(tmpdir, "out.csv")
        emit_csv(rows, path)
        with open(path, newline='', encoding='utf-8') as f:
            read = list(csv.reader(f))
        self.assertEqual(tuple(read[0]), CSV_HEADER)
        self.assertEqual(len(read), 4)

#===============================================================================
class TestVerify(PacGreedyTestCase):

    def test_trials(self):
        self.assertEqual(_trials(200, 1.0), 200)
        self.assertEqual(_trials(200, 0.01), 10)
        self.assertEqual(_trials(10000, 0.01, minimum=200), 200)

    def test_suite_result(self):
        result = SuiteResult("demo")
        result.check(True, "first")
        result.note("detail")
        self.assertTrue(result.passed)
        result.check(False, "second")
        self.assertFalse(result.passed)
        self.assertEqual(result.report()[0], "demo: FAIL")
        self.assertEqual(len(result.report()), 4)

    def test_exact_suites(self):
        for name in ("nemhauser", "coarsening", "concentration"):
            with self.subTest(suite=name):
                result = run_suite(name, scale=0.01, seed=0, env=self.make_env())
                self.assertTrue(result.passed, "\n".join(result.report()))

    @parameterized.expand([
        ("pac_bound", "pac-bound", 0.1),
        ("entropy_bias", "entropy-bias", 0.02),
        ("coverage_of_bounds", "coverage-of-bounds", 0.1),
        ("tracking_work", "tracking-work", 0.01),
    ])
    def test_sampled_suites(self, name, suite, scale):
        result = run_suite(suite, scale=scale, seed=0, env=self.make_env())
        self.assertTrue(result.passed, "\n".join(result.report()))

    def test_concentration_is_informative(self):
        result = run_suite("concentration", scale=0.02, seed=0, env=self.make_env())
        self.assertTrue(result.passed, "\n".join(result.report()))
        informative = int(result.lines[-1].split()[1])
        self.assertGreater(informative, 0)

    def test_tracking_work_reports_pruning(self):
        result = run_suite("tracking-work", scale=0.01, seed=0, env=self.make_env())
        pruned = [line for line in result.lines if "pac pruned" in line]
        self.assertEqual(len(pruned), 2)
        for line in pruned:
            self.assertTrue(line.startswith("PASS"), line)
        self.assertTrue(any(line.startswith("PASS") and "pac work" in line for line in result.lines))

#===============================================================================
class TestCli(PacGreedyTestCase):

    def setUp(self):
        super().setUp()
        self.tmpdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.tmpdir)
        self.out = os.path.join(self.tmpdir, "out.csv")

    def main(self, *argv):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
            code = cli.main(list(argv))
        return code, stdout.getvalue()

    def test_run(self):
        code, _ = self.main("run", self.data_path("config_single.yaml"), "--out", self.out, "--seed", "4")
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.out, newline='', encoding='utf-8') as f:
            read = list(csv.reader(f))
        self.assertEqual(tuple(read[0]), CSV_HEADER)
        self.assertEqual(read[1][3], "4")

    def test_run_stdout(self):
        code, stdout = self.main("run", self.data_path("config_single.yaml"))
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(stdout.splitlines()[0], ",".join(CSV_HEADER))

    def test_compare(self):
        code, _ = self.main("compare", self.data_path("config_pair.yaml"), "--out", self.out)
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.out, newline='', encoding='utf-8') as f:
            metrics = {row[5] for row in csv.reader(f)}
        self.assertIn("work_ratio", metrics)
        self.assertIn("same_chosen", metrics)

    def test_compare_needs_two(self):
        code, _ = self.main("compare", self.data_path("config_single.yaml"), "--out", self.out)
        self.assertEqual(code, cli.EXIT_USAGE)

    def test_compare_swept_variants(self):
        code, _ = self.main("compare", self.data_path("config_lazier_sweep.yaml"), "--out", self.out)
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.out, newline='', encoding='utf-8') as f:
            rows = list(csv.reader(f))
        self.assertIn("lazier[R=4]", {row[1] for row in rows if row[5] == "work_ratio"})

    def test_config_errors(self):
        for name in ("config_bad.yaml", "config_missing.yaml", "no_such_config.yaml", "config_model_too_small.yaml"):
            with self.subTest(config=name):
                code, _ = self.main("run", self.data_path(name), "--out", self.out)
                self.assertEqual(code, cli.EXIT_USAGE)

    def test_usage_errors(self):
        code, _ = self.main("run", self.data_path("config_single.yaml"), "--jobs", "0")
        self.assertEqual(code, cli.EXIT_USAGE)
        code, _ = self.main("verify", "coarsening", "--scale", "0")
        self.assertEqual(code, cli.EXIT_USAGE)
        with self.assertRaises(SystemExit) as cm:
            self.main("verify", "no-such-suite")
        self.assertEqual(cm.exception.code, 2)

    def test_werror(self):
        # Lazier with R=n runs short on its second pick
        path = self.data_path("config_lazier.yaml")
        code, _ = self.main("run", path, "--out", self.out)
        self.assertEqual(code, cli.EXIT_OK)
        code, _ = self.main("--Werror", "run", path, "--out", self.out)
        self.assertEqual(code, cli.EXIT_FAILURE)

    def test_unwritable_output(self):
        out = os.path.join(self.tmpdir, "missing_dir", "out.csv")
        code, _ = self.main("run", self.data_path("config_single.yaml"), "--out", out)
        self.assertEqual(code, cli.EXIT_FAILURE)

    def test_verify(self):
        code, stdout = self.main("verify", "coarsening", "nemhauser", "--scale", "0.01")
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn("coarsening: PASS", stdout)
        self.assertIn("nemhauser: PASS", stdout)
