"""
metricdeform CLI - generate, deform and verify finite metric measure spaces.
"""

import importlib.metadata
import json
import logging
import sys
from datetime import datetime, timezone
from functools import wraps
from typing import Optional

import click
import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from metricdeform.analysis import doubling_constant, reverse_doubling_fit, uniform_perfectness
from metricdeform.besov import BesovParams, energy_report
from metricdeform.cli.logs import LogHandler
from metricdeform.config_manager import MetricDeformConfig, PathResolver
from metricdeform.deform import PowerDensity, product_deform_demo, transform
from metricdeform.errors import (
    DomainMismatch,
    FitFailed,
    InvalidInput,
    MetricDeformError,
    ParamOutOfRange,
    PreconditionError,
    SpaceValidationError,
)
from metricdeform.generators import FIELD_KINDS, generate, make_spec, test_fields
from metricdeform.space import dumps_space, jsonable, read_space, write_space
from metricdeform.verify import (
    CANONICAL_CASES,
    DIRECTIONS,
    STATEMENTS,
    VerificationRun,
    bless,
    bless_canonical,
    build_ledger,
    duality_report,
    inputs_digest,
    load_baseline,
    run_statements,
    run_sweep,
    write_csv,
)

console = Console(stderr=True)
logger = logging.getLogger("metricdeform")

EXIT_VALIDATION = 2
EXIT_REGRESSION = 3

VALIDATION_ERRORS = (
    SpaceValidationError,
    PreconditionError,
    ParamOutOfRange,
    DomainMismatch,
    InvalidInput,
    FileNotFoundError,
)


def configure_logging(task: str, debug: bool, rich_text: bool = False) -> LogHandler:
    logger = logging.getLogger("metricdeform")
    logger.handlers = []

    handler = LogHandler(task, rich_text=rich_text)
    handler.setFormatter(
        logging.Formatter("%(levelname)s %(name)s %(message)s", "%H:%M:%S")
        if debug
        else logging.Formatter("%(message)s", "%H:%M:%S")
    )
    logger.addHandler(handler)

    logger.setLevel(logging.DEBUG if debug else logging.INFO)
    logger.propagate = False

    return handler


def load_config(config_path: Optional[str], debug: Optional[bool] = None) -> MetricDeformConfig:
    try:
        config = MetricDeformConfig.from_yaml(config_path) if config_path else MetricDeformConfig()
    except TypeError as e:
        raise ParamOutOfRange(f"invalid config {config_path}: {e}") from e
    if debug is not None:
        config.logging.debug = debug
    return config


def guarded(f):
    """Map library errors to exit codes: bad input and preconditions exit 2.

    Schema failures on internal models are bugs, not bad input, and exit 1.
    """

    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except VALIDATION_ERRORS as e:
            logger.debug("validation failure", exc_info=True)
            console.print(f"[red]❌ {type(e).__name__}: {e}[/]")
            sys.exit(EXIT_VALIDATION)
        except (MetricDeformError, ValidationError) as e:
            logger.debug("computation failure", exc_info=True)
            console.print(f"[red]💥 {type(e).__name__}: {e}[/]")
            sys.exit(1)

    return wrapper


def emit(text: str, output: Optional[str]) -> None:
    """Write ``text`` to ``output`` or stdout."""
    if output:
        path = PathResolver.resolve(output, create_if_missing=True)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
        logger.info(f"📄 wrote {path}")
    else:
        click.echo(text)


def _dump(model) -> str:
    return json.dumps(jsonable(model.model_dump()), indent=2, sort_keys=True)


def _print_version(ctx, param, value):
    """Click callback to print version and exit early when --version is passed."""
    if not value or ctx.resilient_parsing:
        return
    try:
        version = importlib.metadata.version("metricdeform")
    except importlib.metadata.PackageNotFoundError:
        version = "unknown"
    click.echo(f"v{version}")
    ctx.exit()


def common_options(f):
    f = click.option("--debug/--no-debug", default=None, help="Enable verbose debug logging")(f)
    f = click.option("--config", "-c", "config_path", default=None, help="Path to config file")(f)
    return f


@click.group()
@click.option(
    "--version",
    is_flag=True,
    callback=_print_version,
    expose_value=False,
    is_eager=True,
    help="Show metricdeform version and exit",
)
def cli():
    """metricdeform - sphericalize, flatten and invert finite metric measure spaces."""
    pass


@cli.command(name="generate")
@click.option(
    "--family",
    "-f",
    type=click.Choice(["grid", "cantor", "halfline", "patch2d", "cluster", "punctured"]),
    required=True,
)
@click.option("--n", "n", type=int, default=None, help="Points (grid, halfline, punctured)")
@click.option("--depth", type=int, default=None, help="Refinement depth (cantor, punctured)")
@click.option("--ratio", type=float, default=None, help="Contraction ratio (cantor)")
@click.option("--spacing", type=float, default=None, help="Grid spacing (grid)")
@click.option("--exponent", type=float, default=None, help="Ball growth exponent (halfline)")
@click.option("--side", type=int, default=None, help="Lattice side (patch2d)")
@click.option("--gap", type=float, default=None, help="Distance to the far pair (cluster)")
@click.option(
    "--bounded", is_flag=True, default=False, help="Flag a punctured grid as bounded"
)
@click.option("--mass-policy", type=click.Choice(["uniform", "profile"]), default="profile")
@click.option("--seed", type=int, default=0)
@click.option("--output", "-o", default=None, help="Output space file (stdout if omitted)")
@click.option("--debug/--no-debug", default=False, help="Enable verbose debug logging")
@guarded
def generate_cmd(
    family, n, depth, ratio, spacing, exponent, side, gap, bounded, mass_policy, seed, output, debug
):
    """Generate a space from one of the built-in families."""
    configure_logging("generate", debug)
    params = dict(
        n=n, depth=depth, ratio=ratio, spacing=spacing, exponent=exponent, side=side, gap=gap
    )
    if bounded:
        params["unbounded"] = False
    space = generate(make_spec(family, mass_policy, seed, **params))
    logger.info(f"🧱 generated {family} with {space.n} points")
    if output:
        write_space(space, PathResolver.resolve(output, create_if_missing=True))
        logger.info(f"📄 wrote {output}")
    else:
        click.echo(dumps_space(space))


@cli.command(name="transform")
@click.argument("kind", type=click.Choice(["sphericalize", "flatten", "invert"]))
@click.option("--input", "-i", "input_path", required=True, help="Input space file")
@click.option("--output", "-o", default=None, help="Output space file (stdout if omitted)")
@click.option("--sigma", type=float, default=None, help="Measure exponent (default from config)")
@click.option("--m0", type=float, default=None, help="Expected m0 (checked against the transform)")
@click.option("--ledger/--no-ledger", "with_ledger", default=True, help="Embed the ledger")
@click.option(
    "--strict/--no-strict", default=None, help="Reject spaces not perfect at large scales"
)
@common_options
@guarded
def transform_cmd(kind, input_path, output, sigma, m0, with_ledger, strict, config_path, debug):
    """Deform a space file and write the deformed space."""
    config = load_config(config_path, debug)
    configure_logging(f"transform {kind}", config.logging.debug)
    space = read_space(PathResolver.resolve(input_path, must_exist=True))
    sigma = config.transform.sigma if sigma is None else sigma
    strict = config.transform.strict_large_scale_perfectness if strict is None else strict
    deformed = transform(
        space, kind, sigma, m0, strict=strict, max_kappa=config.perfectness.max_kappa
    )
    ledger = build_ledger(deformed, config) if with_ledger else None
    block = deformed.transform_block(ledger)
    if output:
        write_space(deformed.space, PathResolver.resolve(output, create_if_missing=True), block)
        logger.info(f"📄 wrote {output}")
    else:
        click.echo(dumps_space(deformed.space, block))


@cli.command()
@click.option("--input", "-i", "input_path", required=True, help="Input space file")
@click.option("--p", "p", type=float, default=None, help="Integrability exponent")
@click.option("--theta", type=float, default=None, help="Smoothness exponent")
@click.option(
    "--field",
    "field_kind",
    type=click.Choice(FIELD_KINDS),
    default="coordinate",
    help="Built-in test field",
)
@click.option("--values", default=None, help="JSON list of field values (overrides --field)")
@click.option("--output", "-o", default=None)
@common_options
@guarded
def energy(input_path, p, theta, field_kind, values, output, config_path, debug):
    """Besov energy, seminorm and norm of a field on a space."""
    config = load_config(config_path, debug)
    configure_logging("energy", config.logging.debug)
    space = read_space(PathResolver.resolve(input_path, must_exist=True))
    params = BesovParams.parse(
        config.besov.p if p is None else p,
        config.besov.theta if theta is None else theta,
    )
    if values:
        raw = PathResolver.resolve(values, must_exist=True).read_text()
        u = np.asarray(json.loads(raw), dtype=np.float64)
        if u.shape != (space.n,):
            raise DomainMismatch(f"field has shape {u.shape}, space has {space.n} points")
    else:
        (u,) = test_fields(space, [field_kind], config.verify.cap, config.verify.seed)
    emit(_dump(energy_report(space, u, params)), output)


@cli.command()
@click.option("--input", "-i", "input_path", required=True, help="Input space file")
@click.option("--m0", type=float, default=0.0, help="Radius floor for perfectness and fits")
@common_options
@guarded
def analyze(input_path, m0, config_path, debug):
    """Print doubling, uniform perfectness and dimension estimates."""
    config = load_config(config_path, debug)
    configure_logging("analyze", config.logging.debug)
    space = read_space(PathResolver.resolve(input_path, must_exist=True))

    table = Table(title=f"{input_path} ({space.n} points)")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    table.add_column("Witness", style="yellow")

    doubling = doubling_constant(space)
    table.add_row(
        "C_nu",
        f"{doubling.C_nu:.6g}",
        f"x={space.point_ids[doubling.witness_center]}, r={doubling.witness_radius:.4g}",
    )
    perf = uniform_perfectness(space, m0)
    table.add_row("kappa", f"{perf.kappa:.6g}", f"r={perf.witness_radius}")
    try:
        fit = reverse_doubling_fit(space, m0, perf, config.perfectness.max_kappa)
        table.add_row("alpha", f"{fit.alpha:.6g}", f"Lambda={fit.Lambda:.4g}")
        slope = "n/a" if fit.alpha_loglog is None else f"{fit.alpha_loglog:.6g}"
        table.add_row("alpha (log-log)", slope, "")
    except FitFailed as e:
        table.add_row("alpha", "-", str(e))
    console.print(table)


@cli.command()
@click.argument("statement", type=click.Choice(["all", *STATEMENTS]))
@click.option("--input", "-i", "input_path", required=True, help="Input space file")
@click.option(
    "--kind",
    type=click.Choice(["sphericalize", "flatten", "invert"]),
    default=None,
    help="Transform under test (default: sphericalize unbounded inputs, flatten bounded ones)",
)
@click.option("--sigma", type=float, default=None)
@click.option("--p", "p", type=float, default=None)
@click.option("--theta", type=float, default=None)
@click.option("--allow-sigma-mismatch", is_flag=True, default=None, help="Negative-control runs")
@click.option("--baseline", default=None, help="Baseline file to compare against")
@click.option("--bless", "bless_path", default=None, help="Write observed windows as a baseline")
@click.option("--threads", type=int, default=None, help="Worker threads (env METRICDEFORM_THREADS)")
@click.option("--no-timestamp", is_flag=True, default=False, help="Omit the run timestamp")
@click.option("--output", "-o", default=None, help="Report file (stdout if omitted)")
@common_options
@guarded
def verify(
    statement,
    input_path,
    kind,
    sigma,
    p,
    theta,
    allow_sigma_mismatch,
    baseline,
    bless_path,
    threads,
    no_timestamp,
    output,
    config_path,
    debug,
):
    """Run a statement group (or all) and report its ratio windows.

    Exit status 3 when a pass/fail check fails or a window leaves the baseline.
    """
    config = load_config(config_path, debug)
    handler = configure_logging(
        f"verify {statement}", config.logging.debug, config.logging.rich_text
    )
    if sigma is not None:
        config.transform.sigma = sigma
    if p is not None:
        config.besov.p = p
    if theta is not None:
        config.besov.theta = theta
    if allow_sigma_mismatch:
        config.besov.allow_sigma_mismatch = True

    space = read_space(PathResolver.resolve(input_path, must_exist=True))
    with handler.render():
        handler.update_step(f"running {statement} on {space.n} points")
        run = run_statements(
            space, [statement], config, kind, threads=config.effective_threads(threads)
        )
        if not no_timestamp:
            run.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        emit(run.to_json(), output)

        if bless_path:
            path = PathResolver.resolve(bless_path, create_if_missing=True)
            bless(run.reports, path, config.verify.window)
            handler.finish(True, f"blessed {path}")
            return

        if baseline:
            blessed = load_baseline(PathResolver.resolve(baseline, must_exist=True))
            regressions = blessed.compare(run.reports)
        else:
            regressions = [r.statement for r in run.failed]
        if regressions:
            handler.finish(False, f"{len(regressions)} regression(s)")
            console.print(f"[red]❌ {len(regressions)} regression(s)[/]")
            sys.exit(EXIT_REGRESSION)
        handler.finish(True, f"{len(run.reports)} reports within bounds")


@cli.command(name="bless-baselines")
@click.option(
    "--dir",
    "directory",
    default=None,
    help="Target directory (default: the bundled metricdeform/baselines)",
)
@click.option(
    "--case",
    "cases",
    multiple=True,
    type=click.Choice(sorted(CANONICAL_CASES)),
    help="Case to bless (repeatable, default: all)",
)
@click.option("--threads", type=int, default=1, help="Worker threads")
@click.option("--debug/--no-debug", default=False, help="Enable verbose debug logging")
@guarded
def bless_baselines(directory, cases, threads, debug):
    """Re-bless the canonical cantor and grid baselines with the default config."""
    configure_logging("bless-baselines", debug)
    target = PathResolver.resolve(directory, create_if_missing=True) if directory else None
    written = bless_canonical(target, list(cases) or None, threads=threads)
    for name, path in written.items():
        click.echo(f"{name}: {path}")


@cli.command()
@click.option("--input", "-i", "input_path", required=True, help="Input space file")
@click.option(
    "--direction",
    type=click.Choice(["auto", *DIRECTIONS]),
    default="auto",
    help="auto: sphere-then-flatten for unbounded inputs, flatten-then-sphere otherwise",
)
@click.option("--sigma", type=float, default=None)
@click.option("--output", "-o", default=None)
@common_options
@guarded
def duality(input_path, direction, sigma, output, config_path, debug):
    """Round-trip a space and report d~/d, nu~/nu and rho * rhohat windows."""
    config = load_config(config_path, debug)
    configure_logging("duality", config.logging.debug)
    space = read_space(PathResolver.resolve(input_path, must_exist=True))
    sigma = config.transform.sigma if sigma is None else sigma
    if direction == "auto":
        direction = DIRECTIONS[0] if space.unbounded else DIRECTIONS[1]
    digest = inputs_digest(space, sigma=sigma, direction=direction)
    report = duality_report(
        space,
        sigma,
        direction,
        strict=config.transform.strict_large_scale_perfectness,
        max_kappa=config.perfectness.max_kappa,
        digest=digest,
    )
    run = VerificationRun(
        inputs_digest=digest, params={"sigma": sigma, "direction": direction}, reports=[report]
    )
    emit(run.to_json(), output)


@cli.command()
@click.option("--input", "-i", "input_path", required=True, help="Input space file")
@click.option("--exponent", type=float, default=2.0, help="rho(t) = (1 + t)^-exponent")
@click.option("--output", "-o", default=None)
@common_options
@guarded
def product(input_path, exponent, output, config_path, debug):
    """Chain metric from the product weights rho(x) rho(y) d(x, y)."""
    config = load_config(config_path, debug)
    configure_logging("product", config.logging.debug)
    space = read_space(PathResolver.resolve(input_path, must_exist=True))
    emit(_dump(product_deform_demo(space, PowerDensity(exponent=exponent))), output)


@cli.command()
@click.option("--family", "-f", required=True, help="grid, cantor, halfline, patch2d or punctured")
@click.option("--levels", "-l", required=True, help="Comma-separated refinement levels")
@click.option(
    "--statement",
    "-s",
    "statements",
    multiple=True,
    default=("all",),
    help="Statement group (repeatable)",
)
@click.option("--kind", type=click.Choice(["sphericalize", "flatten", "invert"]), default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--p", "p", type=float, default=None)
@click.option("--theta", type=float, default=None)
@click.option("--allow-sigma-mismatch", is_flag=True, default=None)
@click.option("--mass-policy", type=click.Choice(["uniform", "profile"]), default="profile")
@click.option(
    "--calibration",
    type=click.Choice(["self", "coarsest"]),
    default=None,
    help="Fit ledger constants per level or once on the coarsest level",
)
@click.option("--threads", type=int, default=None, help="Workers (env METRICDEFORM_THREADS)")
@click.option("--csv", "csv_path", default=None, help="Write family,depth,statement,min,max rows")
@click.option("--output", "-o", default=None, help="Sweep JSON (stdout if omitted)")
@common_options
@guarded
def sweep(
    family,
    levels,
    statements,
    kind,
    sigma,
    p,
    theta,
    allow_sigma_mismatch,
    mass_policy,
    calibration,
    threads,
    csv_path,
    output,
    config_path,
    debug,
):
    """Run statement groups across refinement levels of a family."""
    config = load_config(config_path, debug)
    configure_logging(f"sweep {family}", config.logging.debug)
    try:
        level_list = [int(level) for level in levels.split(",") if level.strip()]
    except ValueError as e:
        raise ParamOutOfRange(f"levels must be integers: {levels}") from e
    if p is not None:
        config.besov.p = p
    if theta is not None:
        config.besov.theta = theta
    if calibration is not None:
        config.ledger.calibration = calibration
    if allow_sigma_mismatch:
        config.besov.allow_sigma_mismatch = True
    result = run_sweep(
        family,
        level_list,
        statements,
        sigma,
        config=config,
        kind=kind,
        mass_policy=mass_policy,
        threads=threads,
    )
    if csv_path:
        write_csv(result, PathResolver.resolve(csv_path, create_if_missing=True))

    table = Table(title=f"{family} sweep over {result.levels}")
    table.add_column("Statement", style="cyan")
    table.add_column("Spread", style="green")
    for name, spread in result.stability.items():
        table.add_row(name, f"{spread:.2%}")
    console.print(table)
    emit(_dump(result.model_copy(update={"reports": {}})), output)


if __name__ == "__main__":
    cli()
