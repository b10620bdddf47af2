"""
Rich logging for the metricdeform CLI.

A logging handler that either prints plain lines or renders a live layout
with the activity log, the running task and its status.
"""

import logging
import shutil
from contextlib import nullcontext
from typing import List, Optional

from rich.console import Console
from rich.layout import Layout
from rich.live import Live
from rich.panel import Panel
from rich.text import Text

MAX_LOG_LINES = 200


class LogHandler(logging.Handler):
    """
    Logging handler writing through a rich console on stderr.

    Args:
        task: What the command is doing, shown in the task panel
        current_step: Initial status message
        rich_text: Render the live layout. If False, print plain lines.
    """

    def __init__(self, task: str, current_step: str = "Starting...", rich_text: bool = False):
        super().__init__()
        self.task = task
        self.current_step = current_step
        self.is_completed = False
        self.is_success = False
        self.rich_text = rich_text
        self.console = Console(stderr=True)
        self.logs: List[str] = []
        self.layout: Optional[Layout] = self._create_layout() if rich_text else None

    def emit(self, record):
        lines = self.format(record).splitlines()
        if self.rich_text:
            self.logs.extend(lines)
            del self.logs[:-MAX_LOG_LINES]
            self.rerender()
        else:
            for line in lines:
                self.console.print(line, markup=False, highlight=False)

    def render(self):
        """Context manager that keeps the layout live; a no-op in plain mode."""
        if self.rich_text:
            return Live(self.layout, refresh_per_second=4, console=self.console)
        return nullcontext()

    def rerender(self):
        if self.rich_text:
            self._update_layout()

    def update_step(self, step: str):
        self.current_step = step
        if self.rich_text:
            self.rerender()
        else:
            symbol = "⚡"
            if self.is_completed:
                symbol = "✓" if self.is_success else "✗"
            self.console.print(f"{symbol} {step}", markup=False, highlight=False)

    def finish(self, success: bool, message: str):
        self.is_completed = True
        self.is_success = success
        self.update_step(message)

    def _create_layout(self) -> Layout:
        layout = Layout()
        layout.split(
            Layout(name="logs"),
            Layout(name="task", size=3),
            Layout(name="status", size=3),
        )
        return layout

    def _update_layout(self):
        try:
            terminal_height = shutil.get_terminal_size().lines
        except OSError:
            terminal_height = 24
        available = max(8, terminal_height - 10)
        visible = self.logs[-available:] or ["Starting..."]

        self.layout["logs"].update(
            Panel(
                "\n".join(visible),
                title=f"Activity Log ({len(self.logs)} entries)",
                border_style="blue",
                title_align="left",
                padding=(0, 1),
                height=available + 2,
            )
        )
        self.layout["task"].update(
            Panel(
                Text(self.task, style="bold"),
                title="Task",
                border_style="magenta",
                title_align="left",
                padding=(0, 1),
                height=3,
            )
        )

        status = Text()
        if self.is_completed and self.is_success:
            status.append("✓ ", style="bold green")
            title, style = "Completed", "green"
        elif self.is_completed:
            status.append("✗ ", style="bold red")
            title, style = "Failed", "red"
        else:
            status.append("⚡ ", style="bold yellow")
            title, style = "Status", "yellow"
        status.append(self.current_step)
        self.layout["status"].update(
            Panel(
                status,
                title=title,
                border_style=style,
                title_align="left",
                padding=(0, 1),
                height=3,
            )
        )
