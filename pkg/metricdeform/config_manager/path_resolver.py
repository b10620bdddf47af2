"""
Path resolution for config files, baselines and reports.

Relative paths are looked up in the working directory first and then in
the package directory, where bundled baselines live.
"""

from pathlib import Path
from typing import Union


class PathResolver:
    """
    Resolves every path the CLI and config loader touch.

    Resolution order:
    1. Absolute paths → use as-is
    2. Relative paths → working dir first, then package dir
    3. For outputs → always the working dir
    """

    @staticmethod
    def get_project_root() -> Path:
        """Package root: metricdeform/config_manager/path_resolver.py -> metricdeform/."""
        return Path(__file__).resolve().parents[1]

    @staticmethod
    def resolve(
        path: Union[str, Path],
        create_if_missing: bool = False,
        must_exist: bool = False,
    ) -> Path:
        """
        Resolve ``path`` to an absolute Path.

        Args:
            path: Path to resolve. ``~`` is expanded.
            create_if_missing: Output mode; relative paths land in the working dir.
                Nothing is created on disk.
            must_exist: Raise if the path is found in neither location.

        Raises:
            FileNotFoundError: If must_exist=True and the path is missing. The
                message lists both checked locations.

        Examples:
            config_path = PathResolver.resolve("metricdeform.yaml")
            baseline = PathResolver.resolve("baselines/cantor.json", must_exist=True)
            report = PathResolver.resolve("reports/c5.json", create_if_missing=True)
        """
        path = Path(path).expanduser()

        if path.is_absolute():
            if must_exist and not path.exists():
                raise FileNotFoundError(f"Path not found: {path}")
            return path

        cwd_path = Path.cwd() / path
        package_path = PathResolver.get_project_root() / path

        if create_if_missing:
            return cwd_path

        if cwd_path.exists():
            return cwd_path
        if package_path.exists():
            return package_path

        if must_exist:
            raise FileNotFoundError(
                f"Path not found in:\n"
                f"  - Working dir: {cwd_path}\n"
                f"  - Package dir: {package_path}"
            )
        return cwd_path
