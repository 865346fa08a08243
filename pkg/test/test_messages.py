import re

from unittest_utils import PacGreedyTestCase
from pacgreedy import warnings
from pacgreedy.environment import BenchEnvironment
from pacgreedy.messages import MessagePrinter, MessageHandler, Severity, PacGreedyError, ConfigError
from pacgreedy.source_ref import FileSourceRef, LineSourceRef

ANSI = re.compile(r"\x1b\[[0-9;]*m")

class CollectingPrinter(MessagePrinter):
    def __init__(self):
        self.lines = []

    def emit_message(self, lines):
        self.lines.extend(ANSI.sub("", line) for line in lines)


class TestMessages(PacGreedyTestCase):

    def test_format(self):
        printer = CollectingPrinter()
        msg = MessageHandler(printer)
        msg.warning("plain")
        msg.error("in file", FileSourceRef("a.yaml"))
        msg.error("on line\nsecond line", LineSourceRef("a.yaml", 3))
        self.assertEqual(printer.lines, [
            "warning: plain",
            "a.yaml: error: in file",
            "a.yaml:3: error: on line",
            "    second line",
        ])

    def test_verbosity_and_counts(self):
        printer = CollectingPrinter()
        msg = MessageHandler(printer, Severity.WARNING)
        msg.debug("hidden")
        msg.info("hidden")
        msg.warning("shown")
        self.assertEqual(printer.lines, ["warning: shown"])
        self.assertEqual(msg.counts[Severity.INFO], 1)
        self.assertFalse(msg.had_error)

        msg.report(Severity.NONE, "dropped")
        self.assertEqual(len(printer.lines), 1)

        msg.error("bad")
        self.assertTrue(msg.had_error)
        self.assertEqual(msg.summary(), "1 warning(s), 1 error(s)")

    def test_fatal(self):
        msg = MessageHandler(CollectingPrinter())
        with self.assertRaises(ConfigError):
            msg.fatal("stop", exc_type=ConfigError)
        with self.assertRaises(PacGreedyError):
            msg.fatal("stop")
        self.assertTrue(msg.had_error)

    def test_merge(self):
        msg = MessageHandler(CollectingPrinter())
        worker = MessageHandler(CollectingPrinter())
        worker.error("in worker")
        msg.merge(worker.counts)
        self.assertTrue(msg.had_error)


class TestEnvironment(PacGreedyTestCase):

    def test_flag_severity(self):
        env = BenchEnvironment(
            warning_flags=warnings.FILTER_REINIT | warnings.BOUND_REPAIR,
            error_flags=warnings.BOUND_REPAIR
        )
        self.assertEqual(env.chk_filter_reinit, Severity.WARNING)
        self.assertEqual(env.chk_bound_repair, Severity.ERROR)
        self.assertEqual(env.chk_pac_unconverged, Severity.NONE)
        self.assertEqual(env.chk_lazier_short_sample, Severity.NONE)

    def test_all(self):
        env = BenchEnvironment(warning_flags=warnings.ALL)
        for chk in (env.chk_pac_unconverged, env.chk_filter_reinit, env.chk_bound_repair, env.chk_lazier_short_sample):
            self.assertEqual(chk, Severity.WARNING)

    def test_stray_kwargs(self):
        with self.assertRaises(TypeError):
            BenchEnvironment(warnings_flags=1)
