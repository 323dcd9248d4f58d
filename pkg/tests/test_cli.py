import json

import pytest

from urysohn_sets.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, run

EDGE = "n=2\nd 0 1 = 1\n"
TRIANGLE = "n=3\nd 0 1 = 1\nd 0 2 = 1\nd 1 2 = 1\n"


def test_check4v_on_the_gap(capsys):
    assert run(['check4v', '[0,1] u {2}']) == EXIT_NEGATIVE
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith('# ')
    assert 'fourvalues=fails' in out
    assert 'gap=[3/2,3/2]' in out
    assert 'seed=1' in out


def test_machine_classify(capsys):
    assert run(['--machine', 'classify', '--set', '[0,1]']) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == 'verdict=UrysohnAdmissible'
    assert not any(line.startswith('#') for line in out)


@pytest.mark.parametrize('argv', [
    ['check4v', '[0,1'],
    ['check4v'],
    ['amalgamate', 'a.txt', 'b.txt'],
    ['frobnicate'],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    captured = capsys.readouterr()
    assert 'error=' in captured.out + captured.err


def test_amalgamate_files(write_space_file, capsys):
    a = write_space_file('a.txt', EDGE)
    b = write_space_file('b.txt', EDGE)
    assert run(['amalgamate', a, b, '--shared', '0:0', '--set', '[0,1]']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'n=3' in out
    assert '# embedding A: 1->2' in out
    assert run(['amalgamate', a, b, '--shared', '0-0', '--set', '[0,1]']) == EXIT_USAGE


def test_hatmap(write_space_file, capsys):
    path = write_space_file('t.txt', TRIANGLE)
    assert run(['hatmap', '--space', path, '--set', '[0,1]', '--eps', '1/10']) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert 'delta=1/3' in out
    assert 'hat 1/1 = 30/31' in out
    assert run(['hatmap', '--space', path, '--set', '{0,1,2}', '--eps', '1/10']) == EXIT_NEGATIVE


def test_agetest_verdicts(write_space_file, capsys):
    bad = write_space_file('bad.txt', "n=3\nd 0 1 = 2\nd 0 2 = 1\nd 1 2 = 1\n")
    good = write_space_file('good.txt', "n=3\nd 0 1 = 2\nd 0 2 = 2\nd 1 2 = 1\n")
    assert run(['agetest', '--space', bad, '--set', 'q[0,1) u {2}', '--eps', '1/4']) == EXIT_NEGATIVE
    assert 'agetest=impossible' in capsys.readouterr().out
    assert run(['agetest', '--space', good, '--set', 'q[0,1) u {2}', '--eps', '1/4']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'agetest=witness' in out
    assert 'd 1 2 = 4/5' in out


def test_build_and_audit(capsys):
    assert run(['build', '--set', '{0,1}', '--stages', '3']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'stage=1 ' in out and 'seed=1' in out
    assert run(['audit', '--set', '{0,1}', '--stages', '6']) == EXIT_OK
    assert 'audit=pass' in capsys.readouterr().out


def test_build_refuses_failing_sets(capsys):
    assert run(['build', '--set', '{0,1/2,1,2}', '--stages', '3']) == EXIT_NEGATIVE
    assert 'error=PreconditionError' in capsys.readouterr().out


def test_hjoin(write_space_file, capsys):
    a = write_space_file('a.txt', EDGE)
    assert run(['hjoin', a, a, '--set', '[0,1]', '--h', '1/4', '--r', '1']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'gamma=1/24' in out
    assert 'd 0 2 = 1/24' in out


def test_fixtures_subset(capsys):
    assert run(['fixtures', 'unit_gap', 'urysohn_sphere']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'passed=2 total=2' in out
    assert 'fixture=unit_gap status=pass' in out


def test_hatmap_with_a_dense_prefix(write_space_file, capsys):
    path = write_space_file('t.txt', TRIANGLE)
    # 30/31 is the 309th value of the enumeration of [0,1]
    assert run(['hatmap', '--space', path, '--set', '[0,1]', '--eps', '1/10', '--dense', '64']) == EXIT_UNKNOWN
    assert 'error=SearchBudget' in capsys.readouterr().out
    assert run(['hatmap', '--space', path, '--set', '[0,1]', '--eps', '1/10', '--dense', '308']) == EXIT_UNKNOWN
    capsys.readouterr()
    assert run(['hatmap', '--space', path, '--set', '[0,1]', '--eps', '1/10', '--dense', '309']) == EXIT_OK
    assert 'hat 1/1 = 30/31' in capsys.readouterr().out


def test_fixtures_json(tmp_path, capsys):
    target = tmp_path / 'out' / 'fixtures.json'
    assert run(['fixtures', 'unit_gap', '--json', str(target)]) == EXIT_OK
    records = json.loads(target.read_text(encoding='utf-8'))
    assert [r['name'] for r in records] == ['unit_gap']
    assert records[0]['passed'] is True
