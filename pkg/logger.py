"""Logging utilities for protocol runs and scenario tasks."""
import json
import os
from datetime import datetime
from typing import Dict, List, Any, Optional

import config


class RunLogger:
    """Logger for scenario tasks, protocol rounds and results."""

    def __init__(self, run_name: str, log_to_file: bool = True, verbose: bool = True):
        """
        Initialize the run logger.

        Args:
            run_name: Name of the run (scenario name or protocol name)
            log_to_file: Whether to save the transcript to a JSON file
            verbose: Whether to echo events to the console
        """
        self.run_name = run_name
        self.log_to_file = log_to_file
        self.verbose = verbose
        self.run_history: List[Dict[str, Any]] = []
        self.start_time = datetime.now()
        self.log_file = None

        if log_to_file:
            self.log_dir = config.LOG_DIR
            os.makedirs(self.log_dir, exist_ok=True)
            timestamp = self.start_time.strftime("%Y%m%d_%H%M%S")
            safe_name = "".join(c if c.isalnum() or c in "-_" else "_" for c in run_name)
            self.log_file = os.path.join(self.log_dir, f"{safe_name}_{timestamp}.json")

    def _echo(self, text: str):
        if self.verbose:
            print(text)

    def log_task_start(self, task_name: str, kind: str, params: Optional[Dict[str, Any]] = None):
        """
        Log the start of a task.

        Args:
            task_name: Task identifier from the scenario
            kind: Task kind (e.g. 'induce-gate', 'golden-trace')
            params: Task parameters
        """
        self.run_history.append({
            "timestamp": datetime.now().isoformat(),
            "event": "task_start",
            "task": task_name,
            "kind": kind,
            "params": params or {}
        })
        self._echo(f"\n🧪 Task {task_name} ({kind})")
        self._echo("=" * 50)

    def log_round(self, round_number: int, outcome: List[Any], byproduct: str = "",
                  correction: Optional[str] = None, ebits: float = 0.0, success: bool = True,
                  metadata: Optional[Dict[str, Any]] = None):
        """
        Log one protocol round.

        Args:
            round_number: Round index, starting at 1
            outcome: Measurement outcome bits of the round
            byproduct: Byproduct operator label
            correction: Correction operator label, if one was applied
            ebits: Entanglement consumed by the round
            success: Whether the round finished the gate
            metadata: Extra round data (angles, targets)
        """
        entry = {
            "timestamp": datetime.now().isoformat(),
            "event": "round",
            "round": round_number,
            "outcome": list(outcome),
            "byproduct": byproduct,
            "correction": correction,
            "ebits": ebits,
            "success": success,
            "metadata": metadata or {}
        }
        self.run_history.append(entry)

        status = "✓" if success else "↻"
        bits = "".join("·" if b is None else str(b) for b in outcome)
        self._echo(f"{status} Round {round_number}: k={bits or '-'} ebits={ebits:.4f}")
        if correction:
            self._echo(f"   correction: {correction}")

    def log_task_end(self, task_name: str, status: str, fidelity: Optional[float] = None,
                     rounds: int = 0, ebits: float = 0.0, wall_time: float = 0.0,
                     message: str = ""):
        """
        Log the end of a task.

        Args:
            task_name: Task identifier
            status: 'passed' or 'failed'
            fidelity: Final fidelity against the target, if computed
            rounds: Number of protocol rounds
            ebits: Total entanglement consumed
            wall_time: Elapsed seconds
            message: Error message for failed tasks
        """
        self.run_history.append({
            "timestamp": datetime.now().isoformat(),
            "event": "task_end",
            "task": task_name,
            "status": status,
            "fidelity": fidelity,
            "rounds": rounds,
            "ebits": ebits,
            "wall_time": wall_time,
            "message": message
        })

        icon = "🏁" if status == "passed" else "❌"
        self._echo(f"{icon} {task_name}: {status.upper()}")
        if fidelity is not None:
            self._echo(f"🎯 Fidelity: {fidelity:.12f}")
        self._echo(f"📊 Rounds: {rounds}  ebits: {ebits:.4f}  ⏱️  {wall_time:.3f}s")
        if message:
            self._echo(f"⚠️  {message}")

    def log_error(self, error_type: str, message: str, context: Optional[Dict[str, Any]] = None):
        """
        Log an error that occurred during a task.

        Args:
            error_type: Type of error
            message: Error message
            context: Additional context information
        """
        self.run_history.append({
            "timestamp": datetime.now().isoformat(),
            "event": "error",
            "error_type": error_type,
            "message": message,
            "context": context or {}
        })
        self._echo(f"\n❌ Error ({error_type}): {message}")

    def finish(self):
        """Close the run, writing the transcript when file logging is on."""
        if self.log_to_file:
            self._save_to_file()

    def _save_to_file(self):
        """Save the run history to a JSON file."""
        try:
            with open(self.log_file, 'w', encoding='utf-8') as f:
                json.dump(self.run_history, f, indent=2, ensure_ascii=False, default=str)
            self._echo(f"📝 Run log saved to: {self.log_file}")
        except OSError as e:
            print(f"Failed to save log file: {e}")

    def get_run_summary(self) -> Dict[str, Any]:
        """
        Get a summary of the run.

        Returns:
            Dictionary containing run summary statistics
        """
        rounds = [entry for entry in self.run_history if entry["event"] == "round"]
        ends = [entry for entry in self.run_history if entry["event"] == "task_end"]
        return {
            "run_name": self.run_name,
            "tasks": len(ends),
            "failed_tasks": sum(1 for entry in ends if entry["status"] != "passed"),
            "total_rounds": len(rounds),
            "successful_rounds": sum(1 for entry in rounds if entry["success"]),
            "total_ebits": sum(entry["ebits"] for entry in rounds),
            "errors": sum(1 for entry in self.run_history if entry["event"] == "error"),
            "duration": (datetime.now() - self.start_time).total_seconds()
        }
