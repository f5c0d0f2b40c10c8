import json
import logging
import os
from typing import Any, Dict, Optional

from app.core.experiments import CompareResult, ExperimentConfig, run_compare
from app.utils.config import settings
from app.utils.version import describe_version

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def compare_payload(result: CompareResult) -> Dict[str, Any]:
    return {
        "config": result.config.model_dump(),
        "version": describe_version(),
        "rho_mu": result.rho_mu,
        "monotone": result.monotone,
        "summary": result.summary.to_dict(orient="records"),
        "rows": result.rows.to_dict(orient="records"),
        "curve": result.curve.to_frame().to_dict(orient="records"),
    }


class ExperimentService:
    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = output_dir or settings.OUTPUT_DIR
        if self.output_dir:
            os.makedirs(self.output_dir, exist_ok=True)

    def run(self, config: ExperimentConfig, tag: Optional[str] = None) -> Dict[str, Any]:
        try:
            logger.info(f"Starting convergence comparison for {config.model} over n={config.n_grid}")
            result = run_compare(config)
            payload = compare_payload(result)
            if self.output_dir:
                self._save(result, payload, tag or "compare")
            return payload
        except Exception as e:
            logger.error(f"Error running comparison for {config.model}: {str(e)}")
            raise e

    def _save(self, result: CompareResult, payload: Dict[str, Any], tag: str) -> None:
        base = os.path.join(self.output_dir, tag)
        result.rows.to_csv(f"{base}_rows.csv", index=False, float_format=CSV_FLOAT_FORMAT)
        result.summary.to_csv(f"{base}_summary.csv", index=False, float_format=CSV_FLOAT_FORMAT)
        result.curve.to_frame().to_csv(f"{base}_curve.csv", index=False, float_format=CSV_FLOAT_FORMAT)
        with open(f"{base}.json", "w") as fh:
            json.dump(payload, fh, indent=2)
        logger.info(f"Comparison outputs saved under {base}*")
