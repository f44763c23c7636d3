import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np


def to_jsonable(obj):
    """Convert reports, numpy values and non-finite floats into plain JSON data."""
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if math.isnan(obj):
            return 'nan'
        if math.isinf(obj):
            return 'inf' if obj > 0 else '-inf'
        return obj
    return obj


@dataclass
class CheckReport:
    """Verdict of one finitely checkable inequality, with the first violating witness."""
    name: str
    passed: bool
    margin: float
    witness: tuple = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed != (self.witness is None):
            raise ValueError(f"{self.name}: a report passes exactly when it carries no witness")
        if self.witness is not None:
            self.witness = tuple(self.witness)

    def to_dict(self):
        return {
            'name': self.name,
            'passed': self.passed,
            'margin': self.margin,
            'witness': None if self.witness is None else [p.to_dict() for p in self.witness],
            'details': self.details,
        }


@dataclass
class RunReport:
    command: str
    inputs: dict
    results: list
    timing_ms: float
    version: str

    def to_dict(self):
        return {
            'command': self.command,
            'inputs': to_jsonable(self.inputs),
            'results': to_jsonable(self.results),
            'timing_ms': round(float(self.timing_ms), 3),
            'version': self.version,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + '\n'

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(doc['command'], doc['inputs'], doc['results'], doc['timing_ms'], doc['version'])

    def failed_results(self):
        return [r for r in to_jsonable(self.results) if isinstance(r, dict) and r.get('passed') is False]


GRID_HEADER = ['x', 'xstar', 'F', 'status', 'witness_y', 'witness_ystar']


def _fmt(value):
    if value is None:
        return ''
    value = float(value)
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(value)


def write_grid_csv(rows, out):
    """Write (x, xstar, FitzValue) rows in the grid CSV format to a text stream."""
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(GRID_HEADER)
    for x, x_star, fv in rows:
        finite = fv.is_finite()
        witness = fv.witness if finite else None
        writer.writerow([
            _fmt(x), _fmt(x_star),
            _fmt(fv.value) if finite else 'inf',
            fv.status.value,
            '' if witness is None else _fmt(witness.x[0]),
            '' if witness is None else _fmt(witness.x_star[0]),
        ])
