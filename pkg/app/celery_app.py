from celery import Celery
from app.utils.config import settings

celery_app = Celery(
    "balanced_loads",
    broker=settings.CELERY_BROKER_URL,
    backend=settings.CELERY_RESULT_BACKEND,
    include=["app.tasks"],
)

celery_app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    task_always_eager=settings.CELERY_ALWAYS_EAGER,
    task_store_eager_result=settings.CELERY_ALWAYS_EAGER,
)
