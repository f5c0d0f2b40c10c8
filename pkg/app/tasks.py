import logging
from typing import Any, Dict

from app.celery_app import celery_app
from app.core.experiments import ExperimentConfig
from app.services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)


@celery_app.task(name="experiments.compare", bind=True)
def run_compare_task(self, config: Dict[str, Any]) -> Dict[str, Any]:
    """Queued convergence comparison; the result is the JSON payload of the run."""
    experiment = ExperimentConfig(**config)
    logger.info(f"Task {self.request.id}: comparing {experiment.model}")
    return ExperimentService().run(experiment, tag=f"compare_{self.request.id}")
