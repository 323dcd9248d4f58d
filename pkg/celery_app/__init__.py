import os

from celery import Celery
from dotenv import load_dotenv

load_dotenv()


def _env_flag(name):
    return os.getenv(name, '').strip().lower() in ('1', 'true', 'yes')


# Initialize Celery
celery_app = Celery('urysohn_sets',
                    broker=os.getenv('CELERY_BROKER_URL', 'amqp://localhost'),
                    backend=os.getenv('CELERY_RESULT_BACKEND', 'rpc://'))

# Long CPU-bound tasks: one in flight per worker process
celery_app.conf.update(
    task_serializer='json',
    accept_content=['json'],
    result_serializer='json',
    timezone='UTC',
    enable_utc=True,
    task_default_queue='distance_sets',
    worker_prefetch_multiplier=1,
    task_acks_late=True,
    task_always_eager=_env_flag('CELERY_TASK_ALWAYS_EAGER'),
)

# Import tasks after celery_app is created
from . import tasks
