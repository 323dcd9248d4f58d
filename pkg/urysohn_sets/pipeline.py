import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from .approximation import classify
from .config import CATALOG_FILE, DEFAULT_WORKERS
from .errors import InvalidInput, UrysohnError
from .io_utils import format_rat
from .setexpr import parse_setexpr

CATALOG_COLUMNS = ('name', 'setexpr', 'fourvalues', 'verdict')


@dataclass
class FixtureResult:
    name: str
    setexpr: str
    expected_fourvalues: str
    expected_verdict: str
    fourvalues: str
    verdict: str
    error: str = ''

    @property
    def passed(self) -> bool:
        return (not self.error and self.fourvalues == self.expected_fourvalues
                and self.verdict == self.expected_verdict)


def load_catalog(path: Path = CATALOG_FILE) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError) as e:
        logging.error(f"Failed to load {path}: {e}")
        raise InvalidInput(f"cannot load fixture catalog {path}") from e
    missing = [c for c in CATALOG_COLUMNS if c not in df.columns]
    if missing:
        raise InvalidInput(f"catalog {path} lacks columns {missing}")
    return df


def classify_setexpr(setexpr: str) -> dict:
    """Classification summary of one set expression as a JSON-ready dict."""
    R = parse_setexpr(setexpr)
    c = classify(R)
    w = c.fourvalues.witness
    return {
        'setexpr': setexpr,
        'normalized': str(R),
        'verdict': c.verdict,
        'fourvalues': c.fourvalues.label,
        'method': c.fourvalues.method,
        'closed': c.closed,
        'countable': c.countable,
        'zero_limit': c.zero_limit,
        'conditional': c.conditional,
        'witness': None if w is None else [format_rat(v) for v in (w.x, *w.q)],
        'gap': None if w is None else [format_rat(w.u), format_rat(w.l)],
        'notes': c.notes,
    }


def _run_row(name: str, setexpr: str, fourvalues: str, verdict: str) -> FixtureResult:
    try:
        got = classify_setexpr(setexpr)
    except UrysohnError as e:
        return FixtureResult(name, setexpr, fourvalues, verdict, '', '', str(e))
    return FixtureResult(name, setexpr, fourvalues, verdict, got['fourvalues'], got['verdict'])


def run_fixtures(catalog: Optional[pd.DataFrame] = None, names: Optional[Sequence[str]] = None,
                 workers: int = DEFAULT_WORKERS) -> list:
    if catalog is None:
        catalog = load_catalog()
    if names is not None:
        catalog = catalog[catalog['name'].isin(list(names))]
    rows = [tuple(r[c] for c in CATALOG_COLUMNS) for _, r in catalog.iterrows()]
    logging.info(f"Running {len(rows)} fixtures…")
    results = [None] * len(rows)
    if workers > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_run_row, *row): idx for idx, row in enumerate(rows)}
            for fut in as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        results = [_run_row(*row) for row in rows]
    failed = [r.name for r in results if not r.passed]
    if failed:
        logging.warning(f"{len(failed)} fixtures failed: {', '.join(failed)}")
    logging.info(f"Fixtures completed: {len(rows) - len(failed)}/{len(rows)} passed")
    return results


def _classify_or_error(setexpr: str) -> dict:
    try:
        return {'status': 'success', 'result': classify_setexpr(setexpr)}
    except UrysohnError as e:
        return {'status': 'error', 'setexpr': setexpr, 'error': str(e)}


def classify_many(setexprs: Sequence[str], workers: int = DEFAULT_WORKERS) -> list:
    results = [None] * len(setexprs)
    if workers > 1 and len(setexprs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_classify_or_error, s): idx for idx, s in enumerate(setexprs)}
            for fut in as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        results = [_classify_or_error(s) for s in setexprs]
    return results


def fixture_records(results: Sequence[FixtureResult]) -> list:
    return [{**asdict(r), 'passed': r.passed} for r in results]
