import json
import os
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from orbitope_kit.config import AppConfig, config
from orbitope_kit.utils.logging_config import analytics_logger


class RunAnalytics:
    def __init__(self, settings: Optional[AppConfig] = None) -> None:
        """
        Initialize the run ledger.

        Args:
            settings (Optional[AppConfig]): Configuration to read the ledger
                path and the analytics switch from; defaults to the global config.
        """
        self.config = settings or config
        self.enabled = self.config.logging.analytics_enabled
        self.analytics_file = self.config.data.analytics_log_path

        if self.enabled:
            directory = os.path.dirname(self.analytics_file)
            if directory:
                os.makedirs(directory, exist_ok=True)

        analytics_logger.debug(
            f"Run analytics initialized (ledger: {'enabled' if self.enabled else 'disabled'})"
        )

    def log_run_event(
        self,
        command: str,
        parameters: Dict[str, Any],
        exit_code: int,
        duration: float,
    ) -> None:
        """
        Append one CLI run to the ledger.

        Args:
            command (str): Subcommand name.
            parameters (Dict[str, Any]): Validated run parameters.
            exit_code (int): Process exit code of the run.
            duration (float): Wall time of the command in seconds.
        """
        if not self.enabled:
            return
        try:
            log_entry = {
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "type": "run",
                "command": command,
                "parameters": parameters,
                "exit_code": exit_code,
                "duration": duration,
            }
            analytics_logger.info(f"ANALYTICS: {command} exited {exit_code} in {duration:.3f}s")
            with open(self.analytics_file, "a") as f:
                f.write(f"RUN,{json.dumps(log_entry, default=str)}\n")
        except Exception as e:
            analytics_logger.error(f"Analytics logging error ({e.__class__.__name__}): {str(e)}")

    def summary(self) -> Dict[str, Any]:
        """
        Count ledger entries per command and failed runs.

        Returns:
            Dict[str, Any]: Totals, or an error entry when no ledger exists.
        """
        if not os.path.exists(self.analytics_file):
            analytics_logger.warning("Run ledger not found for summary generation.")
            return {"error": "No analytics data found"}

        runs = 0
        failures = 0
        commands: Dict[str, int] = {}
        with open(self.analytics_file, "r") as f:
            for line in f:
                try:
                    event_type, payload = line.split(",", 1)
                    if event_type != "RUN":
                        continue
                    entry = json.loads(payload)
                except ValueError as e:
                    analytics_logger.warning(f"Malformed ledger line skipped: {e}")
                    continue
                runs += 1
                commands[entry["command"]] = commands.get(entry["command"], 0) + 1
                if entry.get("exit_code"):
                    failures += 1
        return {"total_runs": runs, "failed_runs": failures, "commands": commands}
