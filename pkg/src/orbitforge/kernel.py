"""Fixed-rate execution engine.

A :class:`SimContainer` owns processes, a process owns tasks, and a task owns
an ordered list of modules.  Time is kept as integer nanoseconds so that task
firing times never drift.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Iterable, Optional

logger = logging.getLogger(__name__)

NANO2SEC = 1e-9
SEC2NANO = 1_000_000_000


def sec2nano(seconds: float) -> int:
    """Convert seconds to integer nanoseconds, rounding half away from zero."""
    ns = Decimal(repr(float(seconds))) * SEC2NANO
    return int(ns.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def min2nano(minutes: float) -> int:
    return sec2nano(float(minutes) * 60.0)


def nano2sec(nanos: int) -> float:
    # true division keeps 100_000_000 -> 0.1 exactly rounded
    return nanos / SEC2NANO


class SimulationError(RuntimeError):
    """Raised for misuse of the container or failures inside modules."""


class ModuleFailure(SimulationError):
    def __init__(self, tag: str, time: int, cause: BaseException):
        super().__init__(f"module '{tag}' failed at t={nano2sec(time):.9f} s: {cause}")
        self.tag = tag
        self.time = time
        self.__cause__ = cause


class SysModel:
    """Base class for simulation modules.

    Subclasses override :meth:`reset` and :meth:`update`.  Construction plays
    the role of a self-init phase: output messages must exist once
    ``__init__`` returns.
    """

    # recorders sort after every other module of a task
    observer = False

    def __init__(self, tag: Optional[str] = None):
        self.ModelTag = tag or type(self).__name__

    def reset(self, current_nanos: int) -> None:
        pass

    def update(self, current_nanos: int) -> None:
        pass


class CModuleTemplate(SysModel):
    """Minimal module with a counter, mirroring the stock module template."""

    def __init__(self, tag: str = "cModuleTemplate"):
        super().__init__(tag)
        self.dummy = 0.0

    def reset(self, current_nanos):
        self.dummy = 0.0

    def update(self, current_nanos):
        self.dummy += 1.0


@dataclass
class _Entry:
    module: SysModel
    priority: Optional[int]
    seq: int

    def sort_key(self):
        if self.module.observer:
            return (2, 0, self.seq)
        if self.priority is None:
            return (1, 0, self.seq)
        return (0, -self.priority, self.seq)


@dataclass
class Task:
    name: str
    rate: int
    enabled: bool = True
    entries: list[_Entry] = field(default_factory=list)
    next_time: int = 0

    @property
    def modules(self) -> list[SysModel]:
        return [e.module for e in sorted(self.entries, key=_Entry.sort_key)]

    def ordered(self) -> list[_Entry]:
        return sorted(self.entries, key=_Entry.sort_key)


@dataclass
class Process:
    name: str
    priority: Optional[int]
    seq: int
    tasks: list[Task] = field(default_factory=list)

    def add_task(self, task: Task) -> None:
        if any(t.name == task.name for t in self.tasks):
            raise SimulationError(f"task '{task.name}' already in process '{self.name}'")
        self.tasks.append(task)


@dataclass
class Event:
    """Condition/action pair checked at the start of every step."""

    name: str
    condition: Callable[[], bool]
    action: Callable[[], None]


class SimContainer:
    """Simulation container: processes -> tasks -> modules."""

    def __init__(self):
        self.processes: list[Process] = []
        self.tasks: dict[str, Task] = {}
        self.events: list[Event] = []
        self.on_initialize: list[Callable[[], None]] = []
        self.clock = 0
        self.stop_time = 0
        self.initialized = False
        self._declared: list[SysModel] = []
        self._last_step: Optional[int] = None
        self._seq = 0

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _check_mutable(self):
        if self.initialized:
            raise SimulationError("container is initialized; hierarchy is frozen")

    # construction

    def create_process(self, name: str, priority: Optional[int] = None) -> Process:
        self._check_mutable()
        if any(p.name == name for p in self.processes):
            raise SimulationError(f"duplicate process name '{name}'")
        proc = Process(name, priority, self._next_seq())
        self.processes.append(proc)
        return proc

    def create_task(self, process: Process | str, name: str, rate: int,
                    enabled: bool = True) -> Task:
        self._check_mutable()
        if isinstance(process, str):
            process = self.process(process)
        if int(rate) != rate or rate <= 0:
            raise SimulationError(f"task rate must be a positive integer of ns, got {rate!r}")
        if name in self.tasks:
            raise SimulationError(f"duplicate task name '{name}'")
        task = Task(name, int(rate), enabled)
        process.add_task(task)
        self.tasks[name] = task
        return task

    def add_model_to_task(self, task_name: str, module: SysModel,
                          priority: Optional[int] = None) -> None:
        self._check_mutable()
        try:
            task = self.tasks[task_name]
        except KeyError:
            raise SimulationError(f"unknown task '{task_name}'") from None
        task.entries.append(_Entry(module, priority, self._next_seq()))

    def declare(self, *modules: SysModel) -> None:
        """Register modules for orphan linting without scheduling them."""
        self._declared.extend(modules)

    def create_event(self, name: str, condition, action) -> Event:
        ev = Event(name, condition, action)
        self.events.append(ev)
        return ev

    def process(self, name: str) -> Process:
        for p in self.processes:
            if p.name == name:
                return p
        raise SimulationError(f"unknown process '{name}'")

    def ordered_processes(self) -> list[Process]:
        def key(p: Process):
            return (0, -p.priority, p.seq) if p.priority is not None else (1, 0, p.seq)
        return sorted(self.processes, key=key)

    def all_modules(self) -> Iterable[SysModel]:
        for proc in self.ordered_processes():
            for task in proc.tasks:
                yield from task.modules

    def orphan_modules(self) -> list[SysModel]:
        tasked = {id(m) for m in self.all_modules()}
        return [m for m in self._declared if id(m) not in tasked]

    # task switching

    def enable_task(self, name: str) -> None:
        task = self.tasks[name]
        if task.enabled:
            return
        task.enabled = True
        # first multiple of the rate not yet handled
        floor = 0 if self._last_step is None else self._last_step + 1
        task.next_time = -(-floor // task.rate) * task.rate

    def disable_task(self, name: str) -> None:
        self.tasks[name].enabled = False

    # execution

    def initialize_simulation(self) -> None:
        if not self.processes:
            raise SimulationError("cannot initialize an empty container")
        self.clock = 0
        self._last_step = None
        for task in self.tasks.values():
            task.next_time = 0
        for hook in self.on_initialize:
            hook()
        for module in self.all_modules():
            try:
                module.reset(0)
            except SimulationError:
                raise
            except Exception as exc:
                raise ModuleFailure(module.ModelTag, 0, exc) from exc
        self.initialized = True

    def configure_stop_time(self, stop: int) -> None:
        if stop < self.clock:
            raise SimulationError(
                f"stop time {stop} ns precedes current clock {self.clock} ns")
        self.stop_time = int(stop)

    def _next_firing(self) -> Optional[int]:
        times = [t.next_time for t in self.tasks.values() if t.enabled]
        return min(times) if times else None

    def single_step_processes(self, limit: Optional[int] = None) -> bool:
        """Fire every task due at the next pending time.

        Returns False when nothing was due (no enabled tasks, or the next
        firing lies beyond ``limit``).
        """
        if not self.initialized:
            raise SimulationError("single_step_processes called before initialize_simulation")
        t = self._next_firing()
        if t is None or (limit is not None and t > limit):
            return False
        previous = self.clock
        # events see the clock at the step they precede
        self.clock = t
        for ev in self.events:
            if ev.condition():
                ev.action()
        t = self._next_firing()
        if t is None or (limit is not None and t > limit):
            self.clock = previous
            return False
        self.clock = t
        for proc in self.ordered_processes():
            for task in proc.tasks:
                if not task.enabled or task.next_time != t:
                    continue
                for module in task.modules:
                    try:
                        module.update(t)
                    except SimulationError:
                        raise
                    except Exception as exc:
                        raise ModuleFailure(module.ModelTag, t, exc) from exc
                task.next_time += task.rate
        self._last_step = t
        return True

    def execute_simulation(self) -> None:
        if not self.initialized:
            raise SimulationError("execute_simulation called before initialize_simulation")
        while self.single_step_processes(limit=self.stop_time):
            pass
        self.clock = max(self.clock, self.stop_time)

    def show_execution_order(self) -> str:
        return format_execution_order(self)


def format_execution_order(sim: SimContainer) -> str:
    """Render the hierarchy: two-space indents, rates in seconds, priorities in brackets."""
    lines = ["Execution order:"]
    for proc in sim.ordered_processes():
        head = proc.name if proc.priority is None else f"{proc.name} [{proc.priority}]"
        lines.append(f"  {head}")
        for task in proc.tasks:
            state = "" if task.enabled else " disabled"
            lines.append(f"    {task.name} ({nano2sec(task.rate):.3f} s){state}")
            for entry in task.ordered():
                tag = entry.module.ModelTag
                lines.append(f"      {tag}" if entry.priority is None
                             else f"      {tag} [{entry.priority}]")
    for orphan in sim.orphan_modules():
        lines.append(f"WARNING: module '{orphan.ModelTag}' is not assigned to any task")
    return "\n".join(lines) + "\n"
