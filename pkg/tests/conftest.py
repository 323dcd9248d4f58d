import os
from fractions import Fraction

import pytest

os.environ.setdefault('CELERY_TASK_ALWAYS_EAGER', 'true')

from urysohn_sets.metric_core import validate_space
from urysohn_sets.setexpr import parse_setexpr


@pytest.fixture
def unit_gap():
    return parse_setexpr('[0,1] u {2}')


@pytest.fixture
def unit_interval():
    return parse_setexpr('[0,1]')


@pytest.fixture
def edge():
    return validate_space([[0, 1], [1, 0]])


@pytest.fixture
def simplex():
    def make(n, side=1):
        return validate_space([[0 if i == j else side for j in range(n)] for i in range(n)])
    return make


@pytest.fixture
def write_space_file(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write


@pytest.fixture
def grid_space():
    """Shortest-path metric of random weights k/den with lo <= k <= den."""
    def make(rng, n, den, lo=1):
        table = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                table[i][j] = table[j][i] = Fraction(int(rng.integers(lo, den + 1)), den)
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    table[i][j] = min(table[i][j], table[i][k] + table[k][j])
        return validate_space(table)
    return make
