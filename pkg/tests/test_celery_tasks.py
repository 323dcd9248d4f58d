import json

from celery_app import celery_app
from celery_app.tasks import check_distance_set, classify_distance_set


def test_eager_mode_from_environment():
    assert celery_app.conf.task_always_eager


def test_classify_task_called_directly():
    out = classify_distance_set('[0,1] u {2}')
    assert out['status'] == 'success'
    assert out['result']['verdict'] == 'Inadmissible'


def test_classify_task_reports_errors():
    out = classify_distance_set.apply(args=('{1,2}',)).get()
    assert out['status'] == 'error'
    assert out['setexpr'] == '{1,2}'


def test_check_task_lines():
    out = check_distance_set.apply(args=('{0,1/2,1,2}',)).get()
    assert out['status'] == 'success'
    assert out['result']['lines'][0] == 'fourvalues=fails'


def test_check_task_rejects_unknown_methods():
    out = check_distance_set('[0,1]', method='oracle')
    assert out['status'] == 'error'


def test_batch_runner_loads_setexprs(tmp_path):
    from run_batch_classify import load_setexprs

    df = load_setexprs()
    assert '[0,1] u {2}' in list(df['setexpr'])
    assert load_setexprs(tmp_path / 'absent.csv') is None


def test_batch_runner_local_and_queued_agree(tmp_path):
    from run_batch_classify import main

    csv_path = tmp_path / 'setexprs.csv'
    csv_path.write_text("setexpr\n[0,1]\n{0,1/2,1,2}\n{1,2}\n", encoding='utf-8')
    local_out = tmp_path / 'local.json'
    local = main(['--local', '--input', str(csv_path), '--output', str(local_out)])
    assert [r['verdict'] for r in local] == ['UrysohnAdmissible', 'Inadmissible']
    assert json.loads(local_out.read_text(encoding='utf-8'))[0]['setexpr'] == '[0,1]'
    queued = main(['--input', str(csv_path), '--output', str(tmp_path / 'queued.json')])
    assert queued == local
