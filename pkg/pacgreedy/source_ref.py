class SourceRefBase:
    """
    Base class for references to the input a diagnostic is about
    """
    @property
    def location(self) -> str:
        """
        Location prefix used when printing messages
        """
        raise NotImplementedError

    def __str__(self) -> str:
        return self.location


class FileSourceRef(SourceRefBase):
    """
    Reference to a whole config, sensor model or trajectory file
    """
    def __init__(self, path: str):
        self._path = path

    @property
    def path(self) -> str:
        """
        Path of the file
        """
        return self._path

    @property
    def location(self) -> str:
        return self._path


class LineSourceRef(FileSourceRef):
    """
    Reference to a single line of a file
    """
    def __init__(self, path: str, line: int):
        super().__init__(path)
        self._line = line

    @property
    def line(self) -> int:
        """
        1-based line number
        """
        return self._line

    @property
    def location(self) -> str:
        return "%s:%d" % (self.path, self._line)
