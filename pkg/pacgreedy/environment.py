from typing import Any, Dict

from . import messages
from . import warnings


class BenchEnvironment:
    """
    Container object for the message handler and the severities of optional
    checks. Shared by maximizers, bound providers and the tracking runner.

    Parameters
    ----------
    message_printer: :class:`~pacgreedy.messages.MessagePrinter`
        Override the default message printer
    min_verbosity: :class:`~pacgreedy.messages.Severity`
        Messages below this severity are not printed.
        Defaults to ``Severity.WARNING``
    warning_flags: int
        Flags to enable warnings. See :mod:`pacgreedy.warnings`.
    error_flags: int
        Same as ``warning_flags`` but promote them to errors instead.
    """
    def __init__(self, **kwargs: Any):
        message_printer = kwargs.pop('message_printer', messages.MessagePrinter())
        min_verbosity = kwargs.pop('min_verbosity', messages.Severity.WARNING)
        w_flags = kwargs.pop('warning_flags', 0)
        e_flags = kwargs.pop('error_flags', 0)

        # Check for stray kwargs
        if kwargs:
            raise TypeError("got an unexpected keyword argument '%s'" % list(kwargs.keys())[0])

        self.chk_pac_unconverged = self.chk_flag_severity(warnings.PAC_UNCONVERGED, w_flags, e_flags)
        self.chk_filter_reinit = self.chk_flag_severity(warnings.FILTER_REINIT, w_flags, e_flags)
        self.chk_bound_repair = self.chk_flag_severity(warnings.BOUND_REPAIR, w_flags, e_flags)
        self.chk_lazier_short_sample = self.chk_flag_severity(warnings.LAZIER_SHORT_SAMPLE, w_flags, e_flags)

        #: Reference to the :class:`~pacgreedy.messages.MessageHandler`
        self.msg = messages.MessageHandler(message_printer, min_verbosity)

    @staticmethod
    def chk_flag_severity(flag: int, w_flags: int, e_flags: int) -> messages.Severity:
        if bool(e_flags & flag):
            return messages.Severity.ERROR
        elif bool(w_flags & flag):
            return messages.Severity.WARNING
        else:
            return messages.Severity.NONE


_default_env = None # type: BenchEnvironment

def default_env() -> BenchEnvironment:
    """
    Shared environment used when a caller does not provide one.
    All optional checks are disabled and only warnings or worse are printed.
    """
    global _default_env # pylint: disable=global-statement
    if _default_env is None:
        _default_env = BenchEnvironment()
    return _default_env
