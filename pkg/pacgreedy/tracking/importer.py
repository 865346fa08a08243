import csv
from typing import Dict, List, Optional, Tuple

from ..environment import BenchEnvironment
from ..importer import FileImporter
from .world import GridWorld, Trajectory


class TrajectoryImporter(FileImporter):
    """
    Reads recorded trajectories from CSV records of
    ``trajectory-id,timestep,x,y``.

    Positions are mapped onto grid cells by flooring and clipping to the grid.
    A header line is allowed. Within a trajectory, timesteps must be
    ``0 .. T-1`` (in any order) without gaps or repeats.
    """
    def __init__(self, grid: GridWorld, env: Optional[BenchEnvironment]=None):
        super().__init__(env)
        self.grid = grid

    def import_file(self, path: str) -> List[Trajectory]:
        super().import_file(path)
        text = self.read_text(path)

        # trajectory id -> {timestep: (cell, line)}
        records = {} # type: Dict[str, Dict[int, Tuple[int, int]]]
        order = [] # type: List[str]
        for line_no, row in enumerate(csv.reader(text.splitlines()), start=1):
            if not row or all(not field.strip() for field in row):
                continue
            if row[0].lstrip().startswith('#'):
                continue
            if len(row) != 4:
                self.error("Expected 4 fields (trajectory-id,timestep,x,y), got %d" % len(row), line_no)
                continue

            tid = row[0].strip()
            try:
                t = int(row[1])
                x = float(row[2])
                y = float(row[3])
            except ValueError:
                if line_no == 1 and not records:
                    # header
                    continue
                self.error("Timestep must be an integer and x, y must be numbers", line_no)
                continue

            if t < 0:
                self.error("Negative timestep %d" % t, line_no)
                continue

            if tid not in records:
                order.append(tid)
            steps = records.setdefault(tid, {})
            if t in steps:
                self.error(
                    "Trajectory '%s' repeats timestep %d (first seen on line %d)" % (tid, t, steps[t][1]),
                    line_no
                )
                continue
            steps[t] = (self.grid.clip_cell(x, y), line_no)

        for tid in order:
            steps = records[tid]
            missing = sorted(set(range(len(steps))) - set(steps))
            if missing:
                self.error("Trajectory '%s' is missing timestep %d" % (tid, missing[0]))

        if not order and not self.error_count:
            self.error("File contains no trajectory records")

        self.finish("Trajectory import")

        return [
            Trajectory([records[tid][t][0] for t in range(len(records[tid]))], name=tid)
            for tid in order
        ]
