"""
JSON formats for measures, densities and verdicts.

Rationals are strings ``"p"`` or ``"p/q"``; events are strings ``"{1,3}"``;
two-variable density keys are ``"(i,j)"``.
"""
import json
import re
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple, Union

from qreality.errors import DensityError, InputError, MalformedFile
from qreality.expr import parse_coevent
from qreality.logic import format_event, parse_event
from qreality.models import FilterVerdict
from qreality.qintegral import Density, Density1, Density2, Mode
from qreality.qmeasure import QMeasure, extend_from_pairs, validate

_PAIR = re.compile(r'^\s*[({]?\s*(\d+)\s*,\s*(\d+)\s*[)}]?\s*$')


def parse_rational(value: Union[str, int]) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"rationals are written as strings 'p' or 'p/q', got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"bad rational {value!r}")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def _element(key: str) -> int:
    body = key.strip().strip('{}').strip()
    try:
        return int(body)
    except ValueError:
        raise InputError(f"bad element key {key!r}")


def _pair(key: str) -> Tuple[int, int]:
    match = _PAIR.match(key)
    if not match:
        raise InputError(f"bad pair key {key!r}")
    return int(match.group(1)), int(match.group(2))


def _object(data: Any, what: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise MalformedFile(f"{what} must be a JSON object")
    return data


def _size(data: Dict[str, Any]) -> Optional[int]:
    n = data.get('n')
    if n is None:
        return None
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MalformedFile(f"'n' must be a positive integer, got {n!r}")
    return n


def load_json(path: str) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise MalformedFile(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise MalformedFile(f"{path} is not valid JSON: {e}")


def measure_from_json(data: Dict[str, Any]) -> QMeasure:
    """
    Read a measure object.

    Either ``{"n": 3, "values": {"{1}": "1", ...}}`` with every nonempty
    event, or ``{"n": 3, "singletons": {...}, "pairs": {...}}`` which is
    extended by grade-2 additivity.
    """
    data = _object(data, "a measure")
    n = _size(data)
    if 'values' in data:
        raw = _object(data['values'], "'values'")
        values = {parse_event(str(k), n): parse_rational(v) for k, v in raw.items()}
        return validate(values, n)
    if 'singletons' in data:
        if n is None:
            raise MalformedFile("a measure given by singletons and pairs needs 'n'")
        raw_singles = _object(data['singletons'], "'singletons'")
        raw_pairs = _object(data.get('pairs', {}), "'pairs'")
        singles = {_element(k): parse_rational(v) for k, v in raw_singles.items()}
        pairs = {_pair(k): parse_rational(v) for k, v in raw_pairs.items()}
        return extend_from_pairs(n, singles, pairs)
    raise MalformedFile("a measure needs 'values' or 'singletons'")


def measure_to_json(mu: QMeasure) -> Dict[str, Any]:
    return {'n': mu.n,
            'values': {format_event(e): format_rational(v) for e, v in mu.items()}}


def density_from_json(data: Dict[str, Any], n: Optional[int] = None) -> Density:
    """Read ``{"f": {"1": "5"}}`` or ``{"f2": {"(1,2)": "1"}}``."""
    data = _object(data, "a density")
    if 'f' in data:
        raw = _object(data['f'], "'f'")
        values = {_element(k): parse_rational(v) for k, v in raw.items()}
        density = Density1.of(values)
        if n is not None and density.n != n:
            raise DensityError(f"density has {density.n} values, expected {n}")
        return density
    if 'f2' in data:
        raw = _object(data['f2'], "'f2'")
        values = {_pair(k): parse_rational(v) for k, v in raw.items()}
        if n is None:
            n = max((max(k) for k in values), default=0)
        return Density2.of(n, values)
    raise MalformedFile("a density needs 'f' or 'f2'")


def density_to_json(density: Density) -> Dict[str, Any]:
    if isinstance(density, Density1):
        return {'f': {str(i): format_rational(density(i)) for i in range(1, density.n + 1)}}
    return {'f2': {f'({i},{j})': format_rational(v) for (i, j), v in density.values}}


def verdict_to_json(verdict: FilterVerdict) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        'mode': verdict.mode.value,
        'coevent': verdict.coevent,
        'n': verdict.n,
        'existential': verdict.existential,
        'outcome': verdict.outcome,
        'branches_explored': verdict.branches_explored,
    }
    if verdict.feasible:
        out['density'] = density_to_json(verdict.density)
        if verdict.measure is not None:
            out['measure'] = measure_to_json(verdict.measure)
        out['trace'] = [list(step) for step in verdict.trace]
    return out


def verdict_from_json(data: Dict[str, Any]) -> FilterVerdict:
    data = _object(data, "a verdict")
    n = _size(data)
    if n is None:
        raise MalformedFile("a verdict needs 'n'")
    try:
        mode = Mode(data['mode'])
        coevent = str(parse_coevent(data['coevent'], n))
        feasible = data['outcome'] == 'feasible'
        branches = int(data.get('branches_explored', 0))
        trace = tuple(tuple(step) for step in data.get('trace', []))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedFile(f"bad verdict: {e}")
    density = density_from_json(data['density'], n) if 'density' in data else None
    measure = measure_from_json(data['measure']) if 'measure' in data else None
    return FilterVerdict(
        mode=mode,
        coevent=coevent,
        n=n,
        feasible=feasible,
        existential=bool(data.get('existential', measure is not None)),
        branches_explored=branches,
        density=density,
        measure=measure,
        trace=trace,
    )


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + '\n'
