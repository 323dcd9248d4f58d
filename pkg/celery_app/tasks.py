import logging

from . import celery_app
from urysohn_sets.errors import UrysohnError
from urysohn_sets.four_values import check_four_values
from urysohn_sets.io_utils import fourvalues_lines
from urysohn_sets.pipeline import classify_setexpr
from urysohn_sets.setexpr import parse_setexpr


@celery_app.task
def classify_distance_set(setexpr):
    """
    Celery task classifying a single set expression
    """
    try:
        return {'status': 'success', 'result': classify_setexpr(setexpr)}
    except UrysohnError as e:
        logging.error(f"Error classifying {setexpr!r}: {e}")
        return {'status': 'error', 'setexpr': setexpr, 'error': str(e)}


@celery_app.task
def check_distance_set(setexpr, method='auto'):
    """
    Celery task deciding only the 4-values condition
    """
    try:
        verdict = check_four_values(parse_setexpr(setexpr), method=method)
        return {'status': 'success', 'result': {'setexpr': setexpr, 'lines': fourvalues_lines(verdict)}}
    except (UrysohnError, ValueError) as e:
        logging.error(f"Error checking {setexpr!r}: {e}")
        return {'status': 'error', 'setexpr': setexpr, 'error': str(e)}
