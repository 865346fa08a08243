from typing import Any, List, Optional

import numpy as np

from ..importer import FileImporter
from ..messages import ParameterError
from .model import SensorModel, ROW_TOLERANCE


class SensorModelImporter(FileImporter):
    """
    Reads a sensor model from a YAML file of the form::

        num_states: 3
        sensors:
          - name: door
            alphabet: 2
            table:            # one row per state
              - [0.9, 0.1]
              - [0.9, 0.1]
              - [0.2, 0.8]
          - alphabet: 2
            table: [0.5, 0.5, 0.5, 0.5, 0.1, 0.9]   # or flat, row-major

    Every row must sum to 1.
    """
    def import_file(self, path: str) -> SensorModel:
        super().import_file(path)
        data = self.load_yaml(path)

        if not isinstance(data, dict):
            self.fatal("Sensor model must be a mapping with 'num_states' and 'sensors'")

        for key in data:
            if key not in ('num_states', 'sensors'):
                self.error("Unknown key '%s'" % key, self.line_of(key))

        num_states = data.get('num_states')
        if isinstance(num_states, bool) or not isinstance(num_states, int) or num_states < 1:
            self.fatal("'num_states' must be a positive integer", self.line_of('num_states'))

        sensors = data.get('sensors', [])
        if not isinstance(sensors, list):
            self.fatal("'sensors' must be a list", self.line_of('sensors'))

        tables = [] # type: List[np.ndarray]
        names = [] # type: List[str]
        for i, entry in enumerate(sensors):
            table = self._read_sensor(i, entry, num_states)
            if table is not None:
                tables.append(table)
                names.append(str(entry.get('name', "sensor%d" % i)))

        self.finish("Sensor model import")

        try:
            return SensorModel(num_states, tables, names)
        except ParameterError as e:
            self.fatal(str(e))

    def _read_sensor(self, i: int, entry: Any, num_states: int) -> Optional[np.ndarray]:
        line = self.line_of('sensors', i)
        if not isinstance(entry, dict):
            self.error("Sensor %d must be a mapping with 'alphabet' and 'table'" % i, line)
            return None

        for key in entry:
            if key not in ('name', 'alphabet', 'table'):
                self.error("Sensor %d: unknown key '%s'" % (i, key), self.line_of('sensors', i, key))

        alphabet = entry.get('alphabet')
        if isinstance(alphabet, bool) or not isinstance(alphabet, int) or alphabet < 1:
            self.error("Sensor %d: 'alphabet' must be a positive integer" % i,
                       self.line_of('sensors', i, 'alphabet'))
            return None

        table_line = self.line_of('sensors', i, 'table')
        try:
            table = np.asarray(entry.get('table'), dtype=float)
        except (TypeError, ValueError):
            self.error("Sensor %d: 'table' must contain only numbers" % i, table_line)
            return None

        if table.ndim == 1 and table.size == num_states * alphabet:
            table = table.reshape(num_states, alphabet)
        if table.shape != (num_states, alphabet):
            self.error(
                "Sensor %d: table must have %d rows of %d values (or %d values row-major), got shape %r"
                % (i, num_states, alphabet, num_states * alphabet, table.shape),
                table_line
            )
            return None

        ok = True
        if (table < 0).any():
            self.error("Sensor %d: table has negative probabilities" % i, table_line)
            ok = False
        sums = table.sum(axis=1)
        for s in np.flatnonzero(np.abs(sums - 1.0) > ROW_TOLERANCE):
            self.error(
                "Sensor %d: row for state %d sums to %.12g, expected 1" % (i, s, sums[s]),
                self.line_of('sensors', i, 'table', int(s))
            )
            ok = False
        return table if ok else None
