"""
Experiments over whole coevent classes: the census and the uniqueness sweep.
"""
import csv
import io
import json
import logging
import platform
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from config import Config
from qreality.errors import (DimensionMismatch, EnumerationTooLarge, NegativeExtension,
                             ReportFormatError)
from qreality.expr import format_coevent
from qreality.filters import DEFAULT_MAX_BRANCHES, check
from qreality.io import density_to_json, measure_to_json
from qreality.logic import (CLASS_NAMES, MAX_ENUMERATION_N, CoeventTable, Coevent, as_table,
                            classify, enumerate_coevents, format_event)
from qreality.models import CensusReport, CensusRow, UniquenessEntry, UniquenessReport
from qreality.qintegral import Mode
from qreality.qmeasure import QMeasure, extend_from_pairs

logger = logging.getLogger(__name__)

SCHEMA_VERSION = Config.SCHEMA_VERSION
MAX_FILTER_N = Config.MAX_FILTER_N
FORMATS = ('json', 'csv', 'markdown')
CSV_COLUMNS = ['coevent', 'classical', 'unital', 'additive', 'multiplicative', 'quadratic',
               'gen1', 'gen2', 'actualized']


def _verdict_summary(verdict) -> Dict[str, Any]:
    out = {'outcome': verdict.outcome, 'branches_explored': verdict.branches_explored}
    if verdict.feasible:
        out['density'] = density_to_json(verdict.density)
        out['measure'] = measure_to_json(verdict.measure)
    return out


def _census_row(args: Tuple[int, int, Tuple[str, ...], Optional[int]]) -> CensusRow:
    n, index, modes, max_branches = args
    phi = CoeventTable.from_index(n, index)
    row = CensusRow(index, format_coevent(phi), classify(phi).as_dict())
    for mode in modes:
        verdict = check(Mode(mode), phi, None, max_branches=max_branches)
        row.verdicts[mode] = _verdict_summary(verdict)
    logger.debug("census row %d (%s) done", index, row.coevent)
    return row


def _map(func, items: Sequence, jobs: int) -> List:
    if jobs <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (jobs * 4))))


def _aggregate(rows: List[CensusRow], modes: Sequence[str]) -> Dict[str, Any]:
    counts = {'total': len(rows)}
    for name in CLASS_NAMES:
        counts[name] = sum(1 for r in rows if r.classes[name])
    feasible = {m: sum(1 for r in rows if r.outcome(m) == 'feasible') for m in modes}
    inclusion = {a: {b: sum(1 for r in rows
                            if r.outcome(a) == 'feasible' and r.outcome(b) == 'feasible')
                     for b in modes} for a in modes}
    quadratic_feasible = {m: sum(1 for r in rows
                                 if r.classes['quadratic'] and r.outcome(m) == 'feasible')
                          for m in modes}
    return {'counts': counts, 'feasible': feasible, 'quadratic_feasible': quadratic_feasible,
            'inclusion': inclusion}


def _observations(n: int, rows: List[CensusRow], modes: Sequence[str]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    if 'gen1' in modes and 'actualize' in modes:
        # 1-generated with a nonzero measure should also be actualized
        out['gen1_not_actualized'] = [
            r.coevent for r in rows
            if r.outcome('gen1') == 'feasible' and r.outcome('actualize') != 'feasible'
            and any(v != '0' for v in r.verdicts['gen1']['measure']['values'].values())]
    if 'gen2' in modes and 'actualize' in modes:
        out['gen2_not_actualized'] = [
            r.coevent for r in rows
            if r.outcome('gen2') == 'feasible' and r.outcome('actualize') != 'feasible']
    if 'gen1' in modes and 'gen2' in modes:
        # a 1-generated coevent nonzero wherever its measure is nonzero should be 2-generated
        flagged = []
        for r in rows:
            if r.outcome('gen1') != 'feasible' or r.outcome('gen2') == 'feasible':
                continue
            phi = CoeventTable.from_index(n, r.index)
            values = r.verdicts['gen1']['measure']['values']
            if all(phi(e) for e in range(1, 1 << phi.n)
                   if values[format_event(e)] != '0'):
                flagged.append(r.coevent)
        out['gen1_support_not_gen2'] = flagged
    return out


def run_census(n: int, modes: Iterable[str] = ('gen1',), jobs: int = 1,
               max_branches: Optional[int] = DEFAULT_MAX_BRANCHES) -> CensusReport:
    """
    Classify every coevent on Omega_n and decide each requested filter existentially.

    Rows come back in coevent-index order whatever ``jobs`` is.

    Raises:
        EnumerationTooLarge: n beyond what the requested modes can cover
    """
    modes = tuple(Mode(m).value for m in modes)
    if n > MAX_FILTER_N and any(m != 'gen1' for m in modes):
        raise EnumerationTooLarge(
            f"gen2/actualize censuses are limited to n <= {MAX_FILTER_N}, got n={n}")
    if n > MAX_ENUMERATION_N:
        raise EnumerationTooLarge(
            f"full enumeration is limited to n <= {MAX_ENUMERATION_N}, got n={n}")
    count = 1 << ((1 << n) - 1)
    logger.info("census n=%d modes=%s over %d coevents with %d job(s)", n, ','.join(modes),
                count, jobs)
    rows = _map(_census_row, [(n, index, modes, max_branches) for index in range(count)], jobs)
    report = CensusReport(
        schema_version=SCHEMA_VERSION,
        n=n,
        modes=list(modes),
        rows=rows,
        aggregates=_aggregate(rows, modes),
        environment={'python': platform.python_version(), 'schema_version': SCHEMA_VERSION},
        observations=_observations(n, rows, modes),
    )
    logger.info("census n=%d: %s", n, report.aggregates['counts'])
    return report


def census_summary(report: CensusReport) -> str:
    """One line: total and quadratic counts first, then the other classes and filters."""
    counts = report.aggregates['counts']
    parts = [f"total={counts['total']}", f"quadratic={counts['quadratic']}"]
    parts += [f'{name}={counts[name]}' for name in CLASS_NAMES if name != 'quadratic']
    parts += [f'{mode}={k}' for mode, k in report.aggregates['feasible'].items()]
    return ' '.join(parts)


def _csv(report: CensusReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([row.coevent]
                        + [int(row.classes[name]) for name in CLASS_NAMES]
                        + [row.outcome(mode) or '' for mode in ('gen1', 'gen2', 'actualize')])
    return buffer.getvalue()


def _markdown(report: CensusReport) -> str:
    counts = report.aggregates['counts']
    lines = [f'# Census n={report.n}', '', f"Modes: {', '.join(report.modes) or 'none'}", '',
             '| class | count |', '|---|---|']
    lines += [f'| {name} | {value} |' for name, value in counts.items()]
    if report.modes:
        lines += ['', '| filter | feasible | quadratic feasible |', '|---|---|---|']
        lines += [f"| {m} | {report.aggregates['feasible'][m]} | "
                  f"{report.aggregates['quadratic_feasible'][m]} |" for m in report.modes]
    lines += ['', '| ' + ' | '.join(CSV_COLUMNS) + ' |',
              '|' + '---|' * len(CSV_COLUMNS)]
    for row in report.rows:
        cells = ([f'`{row.coevent}`'] + [str(int(row.classes[name])) for name in CLASS_NAMES]
                 + [row.outcome(mode) or '' for mode in ('gen1', 'gen2', 'actualize')])
        lines.append('| ' + ' | '.join(cells) + ' |')
    return '\n'.join(lines) + '\n'


def emit_report(report: CensusReport, fmt: str) -> bytes:
    """Serialize a report; identical reports give identical bytes."""
    if fmt == 'json':
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + '\n'
    elif fmt == 'csv':
        text = _csv(report)
    elif fmt == 'markdown':
        text = _markdown(report)
    else:
        raise ReportFormatError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
    return text.encode('utf-8')


def measure_grid(n: int, values: Iterable) -> List[QMeasure]:
    """
    Every q-measure whose singleton and doubleton values come from ``values``.

    Assignments whose grade-2 extension goes negative are skipped.
    """
    values = sorted(set(Fraction(v) for v in values))
    elements = list(range(1, n + 1))
    pairs = [(i, j) for i in elements for j in elements if i < j]
    seen = set()
    out = []
    for singles in product(values, repeat=n):
        for doubles in product(values, repeat=len(pairs)):
            try:
                mu = extend_from_pairs(n, dict(zip(elements, singles)), dict(zip(pairs, doubles)))
            except NegativeExtension:
                continue
            if mu.values not in seen:
                seen.add(mu.values)
                out.append(mu)
    return out


def _singletons_match(phi: Coevent, mu: QMeasure) -> bool:
    # with a positive density, mu({i}) is a positive multiple of phi({i}) under gen1 and gen2
    return all(bool(phi(1 << i)) == (mu(1 << i) > 0) for i in range(mu.n))


def _uniqueness_task(args) -> Dict[str, List[str]]:
    mu, modes, max_branches = args
    candidates = list(enumerate_coevents(mu.n, 'quadratic'))
    found = {}
    for mode in modes:
        pool = candidates if mode == 'actualize' else [
            phi for phi in candidates if _singletons_match(phi, mu)]
        found[mode] = [format_coevent(phi) for phi in pool
                       if check(Mode(mode), phi, mu, max_branches=max_branches).feasible]
    return found


def uniqueness_experiment(n: int, measures: Sequence[QMeasure],
                          modes: Iterable[str] = ('gen1', 'gen2'), jobs: int = 1,
                          max_branches: Optional[int] = DEFAULT_MAX_BRANCHES) -> UniquenessReport:
    """
    For each measure, the quadratic coevents that 1-generate / 2-generate / actualize it.

    Measures with more than one such coevent are flagged for gen1 and gen2,
    where at most one is expected; actualization is reported without flags.
    """
    modes = [Mode(m).value for m in modes]
    results = _map(_uniqueness_task, [(mu, modes, max_branches) for mu in measures], jobs)
    entries = []
    flagged: Dict[int, List[str]] = {}
    for k, (mu, found) in enumerate(zip(measures, results)):
        entries.append(UniquenessEntry(measure_to_json(mu)['values'], found))
        over = [m for m in modes if m != 'actualize' and len(found[m]) > 1]
        if over:
            flagged[k] = over
            logger.warning("measure %s has %s quadratic coevents in %s",
                           measure_to_json(mu)['values'], [len(found[m]) for m in over], over)
    return UniquenessReport(n, modes, entries, flagged)


def closed_form_actualizes_n2(phi: Coevent, mu: QMeasure) -> bool:
    """
    Whether phi actualizes mu on Omega_2, from the closed-form conditions.

    Every one of the eight coevents on Omega_2 has one.
    """
    table = as_table(phi)
    if table.n != 2 or mu.n != 2:
        raise DimensionMismatch("closed forms are known only for n = 2")
    m1, m2, m12 = mu(1), mu(2), mu(3)
    bits = table.bits
    if bits == (0, 0, 0, 0):
        return mu.is_zero()
    if bits == (0, 1, 0, 1):          # w1
        return m1 > 0 and m2 == 0 and m12 == m1
    if bits == (0, 0, 1, 1):          # w2
        return m2 > 0 and m1 == 0 and m12 == m2
    if bits == (0, 1, 1, 0):          # w1 + w2
        return m12 == abs(m1 - m2)
    if bits == (0, 0, 0, 1):          # w1*w2
        return m1 == 0 and m2 == 0 and m12 > 0
    if bits == (0, 1, 1, 1):          # 1
        return m1 > 0 and m2 > 0 and m12 == max(m1, m2)
    if bits == (0, 1, 0, 0):          # w1 + w1*w2
        return m2 == 0 and m12 <= m1
    # w2 + w1*w2
    return m1 == 0 and m12 <= m2
