from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .tracking.experiment import RunRecord, TrajectoryRecord, TimestepRecord

#===============================================================================
class ExperimentListener:
    """
    Base class for user-defined tracking run listeners
    """
    def enter_Run(self, run: 'RunRecord') -> None:
        pass

    def exit_Run(self, run: 'RunRecord') -> None:
        pass

    def enter_Trajectory(self, trajectory: 'TrajectoryRecord') -> None:
        pass

    def exit_Trajectory(self, trajectory: 'TrajectoryRecord') -> None:
        pass

    def on_Timestep(self, step: 'TimestepRecord') -> None:
        pass

#===============================================================================
class ExperimentWalker:
    """
    Replays a finished tracking run to one or more listeners.

    Records are visited as follows:

    1. :func:`~ExperimentListener.enter_Run`
    2. For each trajectory, in order:

       a. :func:`~ExperimentListener.enter_Trajectory`
       b. :func:`~ExperimentListener.on_Timestep` for each timestep
       c. :func:`~ExperimentListener.exit_Trajectory`

    3. :func:`~ExperimentListener.exit_Run`

    Listener callbacks are executed in the order the listeners are given.
    """
    def walk(self, run: 'RunRecord', *listeners: ExperimentListener) -> None:
        for listener in listeners:
            listener.enter_Run(run)

        for trajectory in run.trajectories:
            for listener in listeners:
                listener.enter_Trajectory(trajectory)
            for step in trajectory.steps:
                for listener in listeners:
                    listener.on_Timestep(step)
            for listener in listeners:
                listener.exit_Trajectory(trajectory)

        for listener in listeners:
            listener.exit_Run(run)
