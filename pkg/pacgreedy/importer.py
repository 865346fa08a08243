from typing import Any, Optional, Tuple, Union, TYPE_CHECKING

import yaml

from .environment import BenchEnvironment, default_env
from .messages import ConfigError
from .source_ref import SourceRefBase, FileSourceRef, LineSourceRef

if TYPE_CHECKING:
    from typing import NoReturn

PathItem = Union[str, int]

class FileImporter:
    def __init__(self, env: Optional[BenchEnvironment]=None):
        """
        Base class for readers that ingest experiment configs, sensor models
        and trajectory files.

        Problems are reported through the message handler as they are found.
        Once the whole file has been checked, :meth:`finish` aborts if any of
        them was an error.

        Parameters
        ----------
        env: :class:`~pacgreedy.environment.BenchEnvironment`
            Environment whose message handler receives the diagnostics
        """
        #: Reference to the environment
        self.env = env or default_env()

        #: Reference to the message handler
        self.msg = self.env.msg

        #: Source reference used when a problem cannot be tied to a line.
        #: Points to the file currently being imported
        self.default_src_ref = None # type: Optional[SourceRefBase]

        #: Number of errors reported for the current file
        self.error_count = 0

        self._root = None # type: Optional[yaml.Node]

    def import_file(self, path: str) -> Any:
        """
        Importer entry point.

        Extend this function to read the file and perform the import.
        Be sure to call ``super().import_file(path)``

        Parameters
        ----------
        path: str
            Path to file
        """
        self.default_src_ref = FileSourceRef(path)
        self.error_count = 0
        self._root = None

    #---------------------------------------------------------------------------
    def src_ref(self, line: Optional[int]=None) -> Optional[SourceRefBase]:
        if line is None or self.default_src_ref is None:
            return self.default_src_ref
        assert isinstance(self.default_src_ref, FileSourceRef)
        return LineSourceRef(self.default_src_ref.path, line)

    def error(self, text: str, line: Optional[int]=None) -> None:
        """
        Report a problem with the file being imported and keep going
        """
        self.error_count += 1
        self.msg.error(text, self.src_ref(line))

    def fatal(self, text: str, line: Optional[int]=None) -> 'NoReturn': # type: ignore
        self.msg.fatal(text, self.src_ref(line), ConfigError)

    def finish(self, what: str) -> None:
        """
        Abort with a :class:`~pacgreedy.messages.ConfigError` if any errors
        were reported for the current file
        """
        if self.error_count:
            self.fatal("%s aborted due to previous errors" % what)

    #---------------------------------------------------------------------------
    def read_text(self, path: str) -> str:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return f.read()
        except OSError as e:
            self.fatal("Could not read file: %s" % e.strerror)

    def load_yaml(self, path: str) -> Any:
        """
        Parse a YAML file, keeping its node tree so that problems can be
        reported with line numbers through :meth:`line_of`
        """
        text = self.read_text(path)
        try:
            self._root = yaml.compose(text, Loader=yaml.SafeLoader)
            data = yaml.safe_load(text)
        except yaml.MarkedYAMLError as e:
            line = e.problem_mark.line + 1 if e.problem_mark is not None else None
            self.fatal("YAML syntax error: %s" % e.problem, line)
        except yaml.YAMLError as e:
            self.fatal("YAML syntax error: %s" % e)
        return data

    def line_of(self, *path: PathItem) -> Optional[int]:
        """
        1-based line of the node reached by following mapping keys and
        sequence indexes from the document root. For a mapping key, the line
        of the key is returned. ``None`` if the node does not exist.
        """
        node = self._root
        line = None
        for item in path:
            found = self._child(node, item)
            if found is None:
                return line
            line, node = found
        if line is None and node is not None:
            line = node.start_mark.line + 1
        return line

    @staticmethod
    def _child(node: Optional[yaml.Node], item: PathItem) -> Optional[Tuple[int, yaml.Node]]:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == item:
                    return key_node.start_mark.line + 1, value_node
        elif isinstance(node, yaml.SequenceNode) and isinstance(item, int):
            if 0 <= item < len(node.value):
                child = node.value[item]
                return child.start_mark.line + 1, child
        return None
