"""The learning loop: fix the table, hypothesise, process counterexamples."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any

from .automata import Automaton, language_of
from .errors import InvariantBreach, IterationBudgetExceeded
from .functor import DEFAULT_CAP, Leaf, Signature, subtree_closure, to_literal
from .table import ObservationTable
from .teacher import CachingTeacher, QueryStats, Teacher

log = logging.getLogger(__name__)

CLOSEDNESS_FIX = "ClosednessFix"
CONSISTENCY_FIX = "ConsistencyFix"
HYPOTHESIS = "Hypothesis"
COUNTEREXAMPLE = "Counterexample"
DONE = "Done"


@dataclass
class LearnConfig:
    audit: bool = False
    max_iterations: int | None = None
    cap: int = DEFAULT_CAP
    dump_tables: bool = False

    def __post_init__(self):
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class Step:
    kind: str
    size_s: int
    size_e: int
    distinct_rows: int
    stats: QueryStats
    defects: int | None = None
    states: int | None = None
    tree: str | None = None
    closure: int | None = None
    holes: list[int] | None = None
    rows: dict | None = field(default=None, repr=False)
    table: str | None = field(default=None, repr=False)

    def to_json(self, index: int) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "step": index,
            "kind": self.kind,
            "sizeS": self.size_s,
            "sizeE": self.size_e,
            "distinctRows": self.distinct_rows,
            "membershipRaw": self.stats.membership_raw,
            "membershipUnique": self.stats.membership_unique,
            "equivalenceCount": self.stats.equivalence_count,
        }
        for key, value in (
            ("defects", self.defects),
            ("states", self.states),
            ("tree", self.tree),
            ("closureSize", self.closure),
            ("newContextHoles", self.holes),
        ):
            if value is not None:
                obj[key] = value
        return obj


@dataclass
class LearnTrace:
    steps: list[Step] = field(default_factory=list)

    @property
    def kinds(self) -> list[str]:
        return [s.kind for s in self.steps]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s.to_json(i)) + "\n" for i, s in enumerate(self.steps))

    def check_monotone(self) -> None:
        """Raise if distinct rows shrink or a separated label pair merges."""
        prev = None
        for i, step in enumerate(self.steps):
            if prev is not None and step.distinct_rows < prev.distinct_rows:
                raise InvariantBreach(f"distinct rows decreased at step {i}")
            prev = step
        snaps = [s.rows for s in self.steps if s.rows is not None]
        for i, earlier in enumerate(snaps):
            labels = list(earlier)
            for later in snaps[i + 1:]:
                for a in range(len(labels)):
                    for b in range(a + 1, len(labels)):
                        s, t = labels[a], labels[b]
                        if earlier[s] != earlier[t] and later[s] == later[t]:
                            raise InvariantBreach(
                                f"{to_literal(s)} and {to_literal(t)} merged after being separated"
                            )

    def check_progress(self) -> None:
        """Every counterexample must be followed by a table fix."""
        for i, step in enumerate(self.steps):
            if step.kind != COUNTEREXAMPLE:
                continue
            nxt = self.steps[i + 1].kind if i + 1 < len(self.steps) else None
            if nxt not in (CLOSEDNESS_FIX, CONSISTENCY_FIX):
                raise InvariantBreach(f"counterexample at step {i} led to no fix")


class Learner:
    def __init__(
        self,
        teacher: Teacher,
        config: LearnConfig | None = None,
        table: ObservationTable | None = None,
    ):
        if table is None and not isinstance(teacher, CachingTeacher):
            teacher = CachingTeacher(teacher)
        self.teacher = teacher
        self.config = config or LearnConfig()
        self.signature: Signature = teacher.signature
        self.trace = LearnTrace()
        self.tables: list[str] = []
        # S starts with the leaves and E with the bare hole
        self.table = table or ObservationTable(
            teacher,
            labels=[Leaf(x) for x in self.signature.leaves],
            cap=self.config.cap,
        )
        budget = self.config.max_iterations
        if budget is None:
            hint = getattr(teacher, "size_hint", None)
            budget = 10 * hint * hint + 100 if hint else 10**4
        self.budget = budget
        self.iterations = 0

    @property
    def stats(self) -> QueryStats:
        return getattr(self.teacher, "stats", None) or QueryStats()

    def _tick(self) -> None:
        self.iterations += 1
        if self.iterations > self.budget:
            raise IterationBudgetExceeded(f"no convergence within {self.budget} iterations")

    def _record(self, kind: str, **extra) -> Step:
        tbl = self.table
        step = Step(
            kind=kind,
            size_s=len(tbl.S),
            size_e=len(tbl.E),
            distinct_rows=tbl.distinct_rows(),
            stats=self.stats.snapshot(),
            **extra,
        )
        if self.config.audit:
            step.rows = tbl.snapshot()
        if self.config.dump_tables:
            step.table = tbl.dump()
        self.trace.steps.append(step)
        log.debug("%s |S|=%d |E|=%d rows=%d", kind, step.size_s, step.size_e, step.distinct_rows)
        return step

    def fix(self) -> ObservationTable:
        """Make the table closed and consistent, closedness first."""
        tbl = self.table
        while True:
            defects = tbl.check_closed()
            if defects:
                self._tick()
                before = tbl.distinct_rows()
                tbl.fix_closed(defects)
                self._record(CLOSEDNESS_FIX, defects=len(defects))
                if self.config.audit and tbl.distinct_rows() <= before:
                    raise InvariantBreach("closedness fix made no progress")
                continue
            defects = tbl.check_consistent()
            if defects:
                self._tick()
                before = tbl.distinct_rows()
                added = tbl.fix_consistent(defects)
                self._record(
                    CONSISTENCY_FIX, defects=len(defects), holes=[c.holes for c in added]
                )
                if self.config.audit and tbl.distinct_rows() <= before:
                    raise InvariantBreach("consistency fix made no progress")
                continue
            return tbl

    def run(self) -> Automaton:
        tbl = self.table
        audit = self.config.audit
        self.fix()
        while True:
            self._tick()
            if self.config.dump_tables:
                self.tables.append(tbl.dump())
            hyp = tbl.build_hypothesis(audit=audit, check=False)
            self._record(HYPOTHESIS, states=len(hyp.states))
            cex = self.teacher.equivalence(hyp)
            if cex is None:
                self._record(DONE, states=len(hyp.states))
                return hyp
            if audit and self.teacher.membership(cex) == language_of(hyp, cex):
                raise InvariantBreach(f"teacher returned a non-counterexample {to_literal(cex)}")
            tbl.add_counterexample(cex)
            self._record(COUNTEREXAMPLE, tree=to_literal(cex), closure=len(subtree_closure(cex)))
            if audit and not (tbl.check_closed() or tbl.check_consistent()):
                raise InvariantBreach(
                    f"counterexample {to_literal(cex)} left the table closed and consistent"
                )
            self.fix()


def fix(table: ObservationTable, config: LearnConfig | None = None) -> ObservationTable:
    """Make an existing table closed and consistent."""
    return Learner(table.teacher, config, table=table).fix()


def learn(teacher: Teacher, config: LearnConfig | None = None) -> tuple[Automaton, LearnTrace]:
    learner = Learner(teacher, config)
    return learner.run(), learner.trace

