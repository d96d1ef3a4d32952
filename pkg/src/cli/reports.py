"""
Versioned machine-readable records for `--format records`.

Every report is a stream of JSON objects, one per line; the first line is
the RunManifest of the invocation.
"""
import json
import time
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .. import __version__
from ..combi.marked_graph import Violation
from ..combi.smallness import Circuit
from ..turnover.lattice import Chain
from ..turnover.search import TurnoverWitness

SCHEMA_VERSION = "1"


class Record(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: Literal["1"] = SCHEMA_VERSION

    def line(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True)


class RunManifest(Record):
    record: Literal["manifest"] = "manifest"
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    run_id: Optional[str] = None
    version: str = __version__
    wall_time_s: float = 0.0
    metrics: Optional[Dict[str, Any]] = None


class WitnessRecord(Record):
    record: Literal["witness"] = "witness"
    spec: str
    type: List[int]
    pi_f: List[float]
    pi_1: List[float]
    pi_2: List[float]
    invariant_plane: List[float]
    edges: List[str]
    words: Dict[str, List[int]]
    supergroups: List[List[int]] = Field(default_factory=list)

    @classmethod
    def from_witness(cls, spec: str, w: TurnoverWitness) -> 'WitnessRecord':
        return cls(
            spec=spec,
            type=list(w.type.entries()),
            pi_f=_rounded(w.pi_f.normal),
            pi_1=_rounded(w.pi_1.normal),
            pi_2=_rounded(w.pi_2.normal),
            invariant_plane=_rounded(w.invariant_plane.canonical().normal),
            edges=[e.edge.name for e in (w.e1, w.e2) if e is not None],
            words={key: list(word) for key, word in sorted(w.words.items())},
            supergroups=[list(t.entries()) for t in w.supergroups],
        )


class CircuitRecord(Record):
    record: Literal["circuit"] = "circuit"
    faces: List[int]
    edges: List[int]
    labels: List[int]
    kind: str
    vertex_parallel: bool

    @classmethod
    def from_circuit(cls, c: Circuit) -> 'CircuitRecord':
        return cls(
            faces=list(c.faces),
            edges=list(c.edges),
            labels=list(c.labels),
            kind=c.kind.value,
            vertex_parallel=c.vertex_parallel,
        )


class ViolationRecord(Record):
    record: Literal["violation"] = "violation"
    rule: str
    subject: str
    message: str

    @classmethod
    def from_violation(cls, v: Violation) -> 'ViolationRecord':
        return cls(rule=v.rule.value, subject=v.subject, message=v.message)


class ChainRecord(Record):
    record: Literal["chain"] = "chain"
    sub: List[int]
    super: List[int]
    index: Optional[int] = None
    normal: Optional[bool] = None
    rows: List[int] = Field(default_factory=list)
    steps: List[List[List[int]]] = Field(default_factory=list)

    @classmethod
    def from_chain(cls, sub, sup, chain: Optional[Chain]) -> 'ChainRecord':
        if chain is None:
            return cls(sub=list(sub.entries()), super=list(sup.entries()))
        return cls(
            sub=list(sub.entries()),
            super=list(sup.entries()),
            index=chain.index,
            normal=chain.normal,
            rows=[step.row for step in chain.steps],
            steps=[[list(step.sub.entries()), list(step.super.entries())] for step in chain.steps],
        )


class ClassificationRecord(Record):
    record: Literal["classification"] = "classification"
    spec: str
    depth: int
    expectation: str
    items: List[int]
    expected: List[List[int]]
    found: List[List[int]]
    verdict: str
    reason: Optional[str] = None
    missing: List[List[int]] = Field(default_factory=list)
    credited: List[ChainRecord] = Field(default_factory=list)


class CaseRecord(Record):
    record: Literal["case"] = "case"
    suite: str
    name: str
    passed: bool
    verdict: str
    detail: str = ""
    expected: List[str] = Field(default_factory=list)
    found: List[str] = Field(default_factory=list)


class ValueRecord(Record):
    """Catch-all for scalar results (realization summaries, smallness, census entries)"""
    record: Literal["value"] = "value"
    name: str
    value: Any


def _rounded(v) -> List[float]:
    """Nine significant digits, so large coordinates carry no extra noise"""
    return [float(f"{float(x):.9g}") + 0.0 for x in v]


class RecordStream:
    """Collects records and emits them manifest first"""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest
        self.records: List[Record] = []
        self._started = time.time()

    def add(self, record: Record) -> None:
        self.records.append(record)

    def finish(self, metrics: Optional[Dict[str, Any]] = None) -> List[str]:
        manifest = self.manifest.model_copy(update={
            'wall_time_s': round(time.time() - self._started, 3),
            'metrics': metrics,
        })
        return [manifest.line()] + [r.line() for r in self.records]
