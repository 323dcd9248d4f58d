import json
import logging
import re
from fractions import Fraction
from pathlib import Path

from .errors import InvalidInput
from .metric_core import INF, FiniteMetricSpace, to_rat, validate_space

_PAIR_LINE = re.compile(r'^d\s+(\d+)\s+(\d+)\s*=\s*(\S+)$')
_EMBED_LINE = re.compile(r'^#\s*embedding\s+(\w+)\s*:\s*(\d+)\s*->\s*(\d+)\s*$')


def format_rat(value) -> str:
    """Always p/q in lowest terms; 'inf' for the infinite endpoint."""
    if value == INF:
        return 'inf'
    v = to_rat(value)
    return f"{v.numerator}/{v.denominator}"


def parse_rat(text: str):
    text = text.strip()
    if text == 'inf':
        return INF
    return to_rat(text)


# Space files

def format_space(M: FiniteMetricSpace, embeddings: dict = None) -> str:
    lines = [f"n={M.n}"]
    for i in range(M.n):
        for j in range(i + 1, M.n):
            lines.append(f"d {i} {j} = {format_rat(M.d(i, j))}")
    for name, mapping in (embeddings or {}).items():
        for src, dst in sorted(mapping.items()):
            lines.append(f"# embedding {name}: {src}->{dst}")
    return '\n'.join(lines) + '\n'


def parse_space(text: str, with_embeddings: bool = False):
    n = None
    entries = {}
    embeddings = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            m = _EMBED_LINE.match(line)
            if m:
                embeddings.setdefault(m.group(1), {})[int(m.group(2))] = int(m.group(3))
            continue
        if n is None:
            if not line.startswith('n='):
                raise InvalidInput(f"line {lineno}: expected n=<count>, got {line!r}")
            n = int(line[2:])
            continue
        m = _PAIR_LINE.match(line)
        if not m:
            raise InvalidInput(f"line {lineno}: cannot parse {line!r}")
        i, j, value = int(m.group(1)), int(m.group(2)), to_rat(m.group(3))
        if not (0 <= i < j < n):
            raise InvalidInput(f"line {lineno}: pair ({i},{j}) out of order or range")
        if (i, j) in entries:
            raise InvalidInput(f"line {lineno}: pair ({i},{j}) given twice")
        entries[(i, j)] = value
    if n is None:
        raise InvalidInput("empty space file")
    missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in entries]
    if missing:
        raise InvalidInput(f"missing distance for pair {missing[0]}")
    table = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in entries.items():
        table[i][j] = table[j][i] = v
    M = validate_space(table)
    return (M, embeddings) if with_embeddings else M


def read_space(path: Path, with_embeddings: bool = False):
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        logging.error(f"Failed to load {path}: {e}")
        raise InvalidInput(f"cannot read space file {path}") from e
    return parse_space(text, with_embeddings)


def write_space(M: FiniteMetricSpace, path: Path, embeddings: dict = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_space(M, embeddings), encoding='utf-8')
    logging.info(f"Saved {M.n}-point space to {path}")


# Reports

def format_build_log(log) -> str:
    return ''.join(f"stage={e.stage} type={e.type} action={e.action} point={e.point}\n" for e in log)


def fourvalues_lines(verdict) -> list:
    lines = [f"fourvalues={verdict.label}", f"method={verdict.method}"]
    w = verdict.witness
    if w is not None:
        lines.append("witness=" + ';'.join(format_rat(v) for v in (w.x, *w.q)))
        lines.append(f"gap=[{format_rat(w.u)},{format_rat(w.l)}]")
    for key in ('samples', 'seed', 'denominator', 'cap', 'grid_size', 'cells'):
        if key in verdict.details:
            value = verdict.details[key]
            lines.append(f"{key}={format_rat(value) if isinstance(value, Fraction) else value}")
    return lines


def classification_lines(c) -> list:
    def flag(b):
        return 'true' if b else 'false'

    lines = [f"verdict={c.verdict}"]
    if c.conditional:
        lines.append("conditional=true")
    lines.append(f"fourvalues={c.fourvalues.label} because={c.notes.get('fourvalues', '')}")
    lines.append(f"closed={flag(c.closed)} because={c.notes.get('closed', '')}")
    lines.append(f"countable={flag(c.countable)} because={c.notes.get('countable', '')}")
    lines.append(f"zero_limit={flag(c.zero_limit)} because={c.notes.get('zero_limit', '')}")
    w = c.fourvalues.witness
    if w is not None:
        lines.append("witness=" + ';'.join(format_rat(v) for v in (w.x, *w.q)))
        lines.append(f"gap=[{format_rat(w.u)},{format_rat(w.l)}]")
    return lines


# JSON

def _jsonable(value):
    if isinstance(value, Fraction):
        return format_rat(value)
    raise TypeError(f"not JSON serializable: {value!r}")


def load_json(path: Path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logging.error(f"Failed to load {path}: {e}")
        raise InvalidInput(f"cannot load {path}") from e


def save_json(data, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2, default=_jsonable)
    logging.info(f"Saved {len(data)} records to {path}")
