"""
Result records: filter verdicts, census rows and reports.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from qreality.qintegral import Density, Mode
from qreality.qmeasure import QMeasure

FEASIBLE = 'feasible'
INFEASIBLE = 'infeasible'


@dataclass(frozen=True)
class FilterVerdict:
    """
    Outcome of one filter decision.

    A feasible verdict carries its density witness, the induced measure when
    the measure was existential, and the sign decisions along its branch.
    """
    mode: Mode
    coevent: str
    n: int
    feasible: bool
    existential: bool
    branches_explored: int
    density: Optional[Density] = None
    measure: Optional[QMeasure] = None
    trace: Tuple[Tuple[str, str, str], ...] = ()

    @property
    def outcome(self) -> str:
        return FEASIBLE if self.feasible else INFEASIBLE

    def summary(self) -> str:
        return f'{self.outcome.upper()} branches={self.branches_explored}'


@dataclass
class CensusRow:
    index: int
    coevent: str
    classes: Dict[str, bool]
    verdicts: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def outcome(self, mode: str) -> Optional[str]:
        verdict = self.verdicts.get(mode)
        return verdict['outcome'] if verdict else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'coevent': self.coevent,
            'classes': dict(self.classes),
            'verdicts': {mode: dict(v) for mode, v in self.verdicts.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CensusRow':
        return cls(data['index'], data['coevent'], dict(data['classes']),
                   {mode: dict(v) for mode, v in data.get('verdicts', {}).items()})


@dataclass
class CensusReport:
    schema_version: int
    n: int
    modes: List[str]
    rows: List[CensusRow]
    aggregates: Dict[str, Any]
    environment: Dict[str, Any]
    observations: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': self.schema_version,
            'n': self.n,
            'modes': list(self.modes),
            'environment': dict(self.environment),
            'aggregates': self.aggregates,
            'observations': self.observations,
            'rows': [row.to_dict() for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CensusReport':
        return cls(
            schema_version=data['schema_version'],
            n=data['n'],
            modes=list(data['modes']),
            rows=[CensusRow.from_dict(r) for r in data['rows']],
            aggregates=data['aggregates'],
            environment=data.get('environment', {}),
            observations=data.get('observations', {}),
        )


@dataclass
class UniquenessEntry:
    measure: Dict[str, str]
    coevents: Dict[str, List[str]]

    def to_dict(self) -> Dict[str, Any]:
        return {'measure': dict(self.measure),
                'coevents': {mode: list(c) for mode, c in self.coevents.items()}}


@dataclass
class UniquenessReport:
    n: int
    modes: List[str]
    entries: List[UniquenessEntry]
    # index into entries -> modes where more than one quadratic coevent fit
    flagged: Dict[int, List[str]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'modes': list(self.modes),
            'entries': [e.to_dict() for e in self.entries],
            'flagged': {str(k): v for k, v in self.flagged.items()},
        }
