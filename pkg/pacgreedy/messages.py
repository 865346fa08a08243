import sys
import enum
from typing import Dict, List, Optional, Type, TYPE_CHECKING

import colorama
from colorama import Fore, Style

from .source_ref import SourceRefBase

if TYPE_CHECKING:
    from typing import NoReturn

# ANSI colour codes on Windows consoles
colorama.init()

#===============================================================================
class PacGreedyError(Exception):
    """
    Base class for all pacgreedy exceptions
    """

class ParameterError(PacGreedyError, ValueError):
    """
    A numeric parameter or element id is outside its documented range
    """

class ElementRangeError(ParameterError):
    """
    Element id is not part of the ground set
    """

class DuplicateElementError(ParameterError):
    """
    Element is already a member of the subset
    """

class ObservationShapeError(ParameterError):
    """
    Joint observation does not match the selected sensors or their alphabets
    """

class ContractViolationError(PacGreedyError):
    """
    A bound provider or sampler broke its contract (U < L, out-of-range sample)
    """

class EnumerationCapError(PacGreedyError):
    """
    Exhaustive enumeration was refused because it exceeds the configured cap
    """

class ImpossibleObservationError(PacGreedyError):
    """
    Observation has zero likelihood under the current belief
    """

class ConfigError(PacGreedyError):
    """
    Experiment configuration, sensor model or trajectory file is invalid
    """

#===============================================================================
class Severity(enum.IntEnum):
    NONE = 0
    DEBUG = 1
    INFO = 2
    WARNING = 3
    ERROR = 4
    FATAL = 5

#: Label colour of each printed severity
_COLORS = {
    Severity.DEBUG: Fore.GREEN,
    Severity.INFO: Fore.GREEN,
    Severity.WARNING: Fore.YELLOW,
    Severity.ERROR: Fore.RED,
    Severity.FATAL: Fore.RED,
}

#===============================================================================
class MessagePrinter:
    """
    Formats diagnostics and writes them to stderr.

    Subclass and override :meth:`emit_message` to send diagnostics elsewhere
    (a log, a GUI), or :meth:`format_message` to change their layout.
    """
    def print_message(self, severity: Severity, text: str, src_ref: Optional[SourceRefBase]) -> None:
        self.emit_message(self.format_message(severity, text, src_ref))

    def format_message(self, severity: Severity, text: str, src_ref: Optional[SourceRefBase]) -> List[str]:
        """
        Lay out a diagnostic as ``[location: ]severity: text``

        Parameters
        ----------
        severity: :class:`Severity`
        text: str
            Message body. May span several lines.
        src_ref: :class:`~pacgreedy.source_ref.SourceRefBase`
            File (and line) the message is about, if any

        Returns
        -------
        list
            Lines to emit
        """
        label = _COLORS[severity] + Style.BRIGHT + severity.name.lower() + ": " + Style.RESET_ALL
        prefix = "" if src_ref is None else Style.BRIGHT + src_ref.location + ": " + Style.RESET_ALL
        first, *rest = text.split("\n")
        return [prefix + label + first] + ["    " + line for line in rest]

    def emit_message(self, lines: List[str]) -> None:
        for line in lines:
            print(line, file=sys.stderr)

#===============================================================================
class MessageHandler:
    """
    Routes diagnostics of library code to a :class:`MessagePrinter`.

    Messages below ``min_verbosity`` are counted but not printed. A fatal
    message is printed and then raised as an exception.
    """
    def __init__(self, printer: MessagePrinter, min_verbosity: Severity=Severity.WARNING):
        self.printer = printer
        self.min_verbosity = min_verbosity

        #: Number of messages of each severity, printed or not
        self.counts = {s: 0 for s in Severity if s != Severity.NONE} # type: Dict[Severity, int]

    @property
    def had_error(self) -> bool:
        """
        True once an error (or fatal) message was issued
        """
        return (self.counts[Severity.ERROR] + self.counts[Severity.FATAL]) > 0

    def merge(self, counts: Dict[Severity, int]) -> None:
        """
        Add the message counts of another handler, e.g. one of a worker process
        """
        for severity, n in counts.items():
            self.counts[severity] += n

    def message(self, severity: Severity, text: str, src_ref: Optional[SourceRefBase]=None,
                exc_type: Type[PacGreedyError]=PacGreedyError) -> None:
        if severity == Severity.NONE:
            return
        self.counts[severity] += 1
        if severity >= self.min_verbosity:
            self.printer.print_message(severity, text, src_ref)
        if severity == Severity.FATAL:
            raise exc_type(text)

    def debug(self, text: str) -> None:
        self.message(Severity.DEBUG, text)

    def info(self, text: str) -> None:
        self.message(Severity.INFO, text)

    def warning(self, text: str, src_ref: Optional[SourceRefBase]=None) -> None:
        self.message(Severity.WARNING, text, src_ref)

    def error(self, text: str, src_ref: Optional[SourceRefBase]=None) -> None:
        """
        Report a problem that does not stop the current operation.
        Sets :attr:`had_error`.
        """
        self.message(Severity.ERROR, text, src_ref)

    def fatal(self, text: str, src_ref: Optional[SourceRefBase]=None,
              exc_type: Type[PacGreedyError]=PacGreedyError) -> 'NoReturn': # type: ignore
        """
        Report a problem and abort by raising ``exc_type``

        Raises
        ------
        PacGreedyError
            Always; ``exc_type`` selects the subclass
        """
        self.message(Severity.FATAL, text, src_ref, exc_type)

    def report(self, severity: Severity, text: str) -> None:
        """
        Issue the message of an optional check at the severity its
        warning/error flag resolved to. ``Severity.NONE`` drops it.
        """
        self.message(severity, text)

    def summary(self) -> str:
        return "%d warning(s), %d error(s)" % (
            self.counts[Severity.WARNING], self.counts[Severity.ERROR] + self.counts[Severity.FATAL]
        )
