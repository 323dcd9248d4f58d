import pandas as pd
import pytest

from urysohn_sets.errors import InvalidInput
from urysohn_sets.pipeline import (
    CATALOG_COLUMNS, classify_many, classify_setexpr, fixture_records, load_catalog, run_fixtures,
)


def test_catalog_has_the_expected_columns():
    catalog = load_catalog()
    assert tuple(catalog.columns) == CATALOG_COLUMNS
    assert 'unit_gap' in set(catalog['name'])


def test_load_catalog_errors(tmp_path):
    with pytest.raises(InvalidInput):
        load_catalog(tmp_path / 'absent.csv')
    partial = tmp_path / 'partial.csv'
    partial.write_text("name,setexpr\nx,\"[0,1]\"\n", encoding='utf-8')
    with pytest.raises(InvalidInput):
        load_catalog(partial)


@pytest.mark.parametrize('workers', [1, 2])
def test_run_fixtures_subset(workers):
    names = ['urysohn_sphere', 'rationals_unit', 'unit_gap', 'finite_half_gap']
    results = run_fixtures(names=names, workers=workers)
    assert [r.name for r in results] == names
    assert all(r.passed for r in results)


def test_run_fixtures_reports_mismatches():
    catalog = pd.DataFrame([
        {'name': 'wrong', 'setexpr': '[0,1]', 'fourvalues': 'fails', 'verdict': 'Inadmissible'},
        {'name': 'broken', 'setexpr': '[0,1', 'fourvalues': 'holds', 'verdict': 'UrysohnAdmissible'},
    ])
    wrong, broken = run_fixtures(catalog)
    assert not wrong.passed and wrong.verdict == 'UrysohnAdmissible'
    assert not broken.passed and broken.error
    records = fixture_records([wrong, broken])
    assert records[0]['passed'] is False
    assert records[1]['expected_fourvalues'] == 'holds'


def test_classify_setexpr_unit_gap():
    summary = classify_setexpr('[0,1] u {2}')
    assert summary['verdict'] == 'Inadmissible'
    assert summary['fourvalues'] == 'fails'
    assert summary['witness'] == ['1/1', '2/1', '1/1', '1/2', '1/2']
    assert summary['gap'] == ['3/2', '3/2']
    assert summary['normalized'] == '[0,1] u {2}'


def test_classify_many_keeps_order_and_errors():
    out = classify_many(['q[0,1]', '{1,2}', '[0,inf)'])
    assert [r['status'] for r in out] == ['success', 'error', 'success']
    assert out[0]['result']['verdict'] == 'CountableUniversalOnly'
    assert out[1]['setexpr'] == '{1,2}'
    assert out[2]['result']['verdict'] == 'UrysohnAdmissible'
