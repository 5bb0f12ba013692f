"""
Main CLI application module.

Every subcommand computes one report and exits with 0 when all of its gates
pass, 1 when a verification fails, and 2 on usage or feasibility errors.
"""

import logging
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Dict, Optional, Tuple

import click
from rich.console import Console
from rich.markup import escape

from ..algebra.freemoments import moments_from_cumulants
from ..algebra.series import Scalar
from ..algebra.transforms import MomentSeries, RTransform, STransform, free_add, free_mult, r_from_moments
from ..characterize import (
    TheoremParams,
    solve_thm1,
    solve_thm2,
    theta_forms,
    verify_identities_thm1,
    verify_identities_thm2,
    verify_lemma33,
    verify_prop31,
    verify_prop32,
    x_plus_thm1,
    x_plus_thm2,
)
from ..config import MONTE_CARLO_CONFIG, apply_config, configure_logging, load_config, resolve_seed
from ..errors import FreeProbabilityError, VerificationMismatch
from ..laws import FreeLaw, law_moments, parse_law_spec, parse_number
from ..randmat import mc_regression_check, spectrum_check
from .command import VERIFY_TARGETS, CommandType, OutputFormat, RunConfig
from .output import write_report

console = Console(stderr=True)
logger = logging.getLogger(__name__)

Payload = Tuple[Dict[str, Any], bool]


class NumberType(click.ParamType):
    """Integers and fractions stay exact, decimals become floats."""

    name = "number"

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float, Fraction)):
            return value
        try:
            return parse_number(value)
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a number", param, ctx)


NUMBER = NumberType()


def _exact_text(values: Dict[str, Scalar]) -> Optional[Dict[str, str]]:
    if all(isinstance(v, (int, Fraction)) for v in values.values()):
        return {k: str(v) for k, v in values.items()}
    return None


def output_options(func: Callable) -> Callable:
    """--format and --output, shared by every subcommand."""
    func = click.option(
        "--output", "-o", type=click.Path(dir_okay=False, writable=True), default=None,
        help="Write the report to this file instead of stdout",
    )(func)
    func = click.option(
        "--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
        default=OutputFormat.JSON.value, show_default=True, help="Report encoding",
    )(func)
    return func


def _make_run(**kwargs) -> RunConfig:
    try:
        return RunConfig(**kwargs)
    except ValueError as e:
        raise click.UsageError(str(e))


def _seed(flag: Optional[int] = None, default: Optional[int] = None) -> int:
    try:
        return resolve_seed(flag) if default is None else resolve_seed(flag, default)
    except ValueError as e:
        raise click.UsageError(str(e))


def _execute(run: RunConfig, produce: Callable[[], Payload]) -> None:
    """Compute a report, write it, and exit with the code of its outcome."""
    logger.info(f"Running {run}")
    start = time.perf_counter()
    try:
        data, passed = produce()
    except VerificationMismatch as e:
        logger.error(f"Error running {run.name}: {e}")
        console.print(f"[red]verification failed:[/red] {escape(str(e))}")
        sys.exit(1)
    except FreeProbabilityError as e:
        logger.error(f"Error running {run.name}: {e}")
        console.print(f"[red]infeasible:[/red] {escape(str(e))}")
        sys.exit(2)
    except Exception as e:
        logger.exception(f"Unexpected error running {run.name}")
        console.print(f"[red]Fatal error:[/red] {escape(str(e))}")
        sys.exit(1)

    data["wall_time_ms"] = (time.perf_counter() - start) * 1000.0
    write_report(run, data)
    if not passed:
        console.print(f"[yellow]{run.name}: some checks failed[/yellow]")
    sys.exit(0 if passed else 1)


@click.group()
@click.option(
    "--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING", show_default=True, help="Logging level (logs go to stderr)",
)
@click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
    help="JSON file overriding configuration defaults",
)
@click.version_option(package_name="freeregress")
def main(log_level: str, config_path: Optional[str]):
    """Free Poisson and free binomial laws, and checks of their regression characterizations."""
    configure_logging(log_level)
    if config_path is not None:
        try:
            apply_config(load_config(config_path))
        except ValueError as e:
            raise click.UsageError(str(e))


@main.command()
@click.argument("law_spec")
@click.option("--points", type=click.IntRange(min=2), default=200, show_default=True,
              help="Grid points inside the continuous support")
@click.option("--at", "at_points", type=float, multiple=True,
              help="Evaluate at these points instead of on a grid")
@output_options
def density(law_spec: str, points: int, at_points: Tuple[float, ...], output_format: str, output: Optional[str]):
    """Density of the continuous part of LAW_SPEC, such as poisson:2,1 or binomial:1,2."""
    run = _make_run(
        command=CommandType.DENSITY,
        parameters={"law": law_spec, "points": points},
        output_format=output_format,
        output_path=output,
    )

    def produce() -> Payload:
        law = parse_law_spec(law_spec)
        if at_points:
            xs = sorted(at_points)
            ys = [law.density_eval(x) for x in xs]
        else:
            grid, values = law.density_table(points)
            xs, ys = grid.tolist(), values.tolist()
        data = {
            "command": run.name,
            "params": {"law": str(law), **law.params()},
            "x": [float(x) for x in xs],
            "density": [float(y) for y in ys],
            "atoms": [[float(location), float(mass)] for location, mass in law.atoms],
        }
        return data, True

    _execute(run, produce)


@main.command()
@click.argument("law_spec")
@click.option("--n-max", type=click.IntRange(min=1), default=8, show_default=True, help="Highest moment")
@click.option("--method", type=click.Choice(["series", "quadrature"]), default="series", show_default=True)
@output_options
def moments(law_spec: str, n_max: int, method: str, output_format: str, output: Optional[str]):
    """Moments m_1..m_N of LAW_SPEC."""
    run = _make_run(
        command=CommandType.MOMENTS,
        parameters={"law": law_spec, "method": method},
        order=n_max,
        output_format=output_format,
        output_path=output,
    )

    def produce() -> Payload:
        law = parse_law_spec(law_spec)
        values = law_moments(law, n_max, method)
        result = {"moments": [float(v) for v in values]}
        if all(isinstance(v, (int, Fraction)) for v in values):
            result["moments_exact"] = [str(v) for v in values]
        data = {
            "command": run.name,
            "params": {"law": str(law), **law.params(), "n_max": n_max, "method": method},
            "result": result,
        }
        return data, True

    _execute(run, produce)


def _s_transforms(law_a: FreeLaw, law_b: FreeLaw, order: int) -> Tuple[STransform, STransform]:
    s_a, s_b = law_a.s_transform(order).series, law_b.s_transform(order).series
    if s_a.kind != s_b.kind:
        s_a, s_b = s_a.as_float(), s_b.as_float()
    return STransform(s_a), STransform(s_b)


@main.command()
@click.argument("first_spec")
@click.argument("second_spec")
@click.option("--op", type=click.Choice(["add", "mult"]), default="add", show_default=True,
              help="Free additive or multiplicative convolution")
@click.option("--order", type=click.IntRange(min=1), default=8, show_default=True, help="Highest moment")
@output_options
def convolve(first_spec: str, second_spec: str, op: str, order: int, output_format: str, output: Optional[str]):
    """Free convolution of two laws, as cumulants and moments."""
    run = _make_run(
        command=CommandType.CONVOLVE,
        parameters={"first": first_spec, "second": second_spec, "op": op},
        order=order,
        output_format=output_format,
        output_path=output,
    )

    def produce() -> Payload:
        law_a, law_b = parse_law_spec(first_spec), parse_law_spec(second_spec)
        if op == "add":
            r_a = r_from_moments(MomentSeries.from_moments(law_a.series_moments(order)))
            r_b = r_from_moments(MomentSeries.from_moments(law_b.series_moments(order)))
            if r_a.series.kind != r_b.series.kind:
                r_a, r_b = RTransform(r_a.series.as_float()), RTransform(r_b.series.as_float())
            cumulants = free_add(r_a, r_b).cumulants()
            values = moments_from_cumulants(cumulants)
            result = {"cumulants": [float(v) for v in cumulants.values]}
        else:
            s_a, s_b = _s_transforms(law_a, law_b, order - 1)
            values = free_mult(s_a, s_b, order).moments()
            result = {}
        result["moments"] = [float(v) for v in values]
        if all(isinstance(v, (int, Fraction)) for v in values):
            result["moments_exact"] = [str(v) for v in values]
        data = {
            "command": run.name,
            "params": {"first": str(law_a), "second": str(law_b), "op": op, "order": order},
            "result": result,
        }
        return data, True

    _execute(run, produce)


@main.command()
@click.option("--theorem", type=click.Choice(["1", "2"]), required=True,
              help="1: regressions of Y and Y^-1; 2: of Y^-1 and Y^-2")
@click.option("--c", "c", type=NUMBER, required=True, help="First regression constant")
@click.option("--d", "d", type=NUMBER, required=True, help="Second regression constant")
@click.option("--F", "F", type=NUMBER, required=True, help="phi((I - U)^-1)")
@output_options
def solve(theorem: str, c: Scalar, d: Scalar, F: Scalar, output_format: str, output: Optional[str]):
    """Recover (lambda, alpha, sigma, theta) from regression constants."""
    run = _make_run(
        command=CommandType.SOLVE,
        parameters={"theorem": theorem, "c": c, "d": d, "F": F},
        output_format=output_format,
        output_path=output,
    )

    def produce() -> Payload:
        if theorem == "1":
            solved = solve_thm1(c, d, F)
            x_plus = x_plus_thm1(c, d, F)
        else:
            solved = solve_thm2(c, d, F)
            x_plus = x_plus_thm2(c, d, F)
        values = {"lambda": solved.lam, "alpha": solved.alpha, "sigma": solved.sigma, "theta": solved.theta}
        result = {name: float(v) for name, v in values.items()}
        result["x_plus"] = x_plus
        exact = _exact_text(values)
        if exact:
            result["exact"] = exact
        if theorem == "1":
            first, second = theta_forms(c, d)
            result["theta_forms_agree"] = first == second
        data = {
            "command": run.name,
            "params": {"theorem": int(theorem), "c": float(c), "d": float(d), "F": float(F)},
            "result": result,
        }
        return data, True

    _execute(run, produce)


@main.command()
@click.argument("target", type=click.Choice(VERIFY_TARGETS))
@click.option("--sigma", type=NUMBER, default=1, show_default=True, help="Free binomial sigma")
@click.option("--theta", type=NUMBER, default=2, show_default=True, help="Free binomial theta")
@click.option("--alpha", type=NUMBER, default=1, show_default=True, help="Jump size")
@click.option("--lam", type=NUMBER, default=None, help="Free Poisson rate for lemma33 (default sigma + theta)")
@click.option("--order", type=int, default=None,
              help="Truncation order (thm1, thm2), cumulant count (lemma33) or degree (prop31, prop32)")
@click.option("--nodes", type=click.IntRange(min=16), default=None, help="Quadrature nodes per law")
@click.option("--controls/--no-controls", default=True, show_default=True,
              help="Run the negative controls of thm1 and thm2")
@output_options
def verify(
    target: str,
    sigma: Scalar,
    theta: Scalar,
    alpha: Scalar,
    lam: Optional[Scalar],
    order: Optional[int],
    nodes: Optional[int],
    controls: bool,
    output_format: str,
    output: Optional[str],
):
    """Check the identities of one proposition, lemma or characterization."""
    run = _make_run(
        command=CommandType.VERIFY,
        target=target,
        parameters={"sigma": sigma, "theta": theta, "alpha": alpha},
        order=order,
        seed=_seed(),
        output_format=output_format,
        output_path=output,
    )

    def produce() -> Payload:
        if target == "prop31":
            report = verify_prop31(sigma, theta, alpha, degree=order, node_count=nodes)
        elif target == "prop32":
            report = verify_prop32(sigma, theta, alpha, degree=order, node_count=nodes)
        elif target == "lemma33":
            rate = sigma + theta if lam is None else lam
            report = verify_lemma33(rate, alpha, N=order, node_count=nodes)
        else:
            params = TheoremParams.from_laws(sigma, theta, alpha)
            suite = verify_identities_thm1 if target == "thm1" else verify_identities_thm2
            report = suite(params, order=order, node_count=nodes, include_controls=controls)
        report.seed = run.seed
        return report.to_dict(), report.all_passed

    _execute(run, produce)


@main.command()
@click.option("--theorem", type=click.Choice(["T1", "T2"], case_sensitive=False), default="T1", show_default=True)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--theta", type=float, default=2.0, show_default=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--dim", type=int, default=None, help="Matrix dimension")
@click.option("--trials", type=int, default=None, help="Independent trials")
@click.option("--seed", type=int, default=None, help="Base seed (overrides FREEREGRESS_SEED)")
@click.option("--max-moment", type=click.IntRange(0, 6), default=None, help="Highest power of X")
@click.option("--spectrum", type=click.Choice(["iid", "quantile", "wishart"]), default="iid", show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Threads for the trials")
@click.option("--esd/--no-esd", default=False, show_default=True,
              help="Also compare the spectrum of X with its limit law")
@output_options
def simulate(
    theorem: str,
    sigma: float,
    theta: float,
    alpha: float,
    dim: Optional[int],
    trials: Optional[int],
    seed: Optional[int],
    max_moment: Optional[int],
    spectrum: str,
    workers: Optional[int],
    esd: bool,
    output_format: str,
    output: Optional[str],
):
    """Monte Carlo estimates of the regression trace identities on random matrices."""
    run = _make_run(
        command=CommandType.SIMULATE,
        parameters={"theorem": theorem.upper(), "sigma": sigma, "theta": theta, "alpha": alpha},
        dimension=MONTE_CARLO_CONFIG["dim"] if dim is None else dim,
        trials=MONTE_CARLO_CONFIG["trials"] if trials is None else trials,
        seed=_seed(seed, MONTE_CARLO_CONFIG["seed"]),
        output_format=output_format,
        output_path=output,
    )

    def produce() -> Payload:
        params = TheoremParams.from_laws(sigma, theta, alpha)
        report = mc_regression_check(
            params,
            n=run.dimension,
            trials=run.trials,
            theorem=theorem,
            n_max_moment=max_moment,
            seed=run.seed,
            spectrum=spectrum,
            workers=workers,
        )
        data = report.to_dict()
        passed = report.all_passed
        if esd:
            threshold = MONTE_CARLO_CONFIG["esd_threshold"]
            distance = spectrum_check(sigma, theta, alpha, run.dimension, run.seed, spectrum)
            data["esd"] = {"distance": distance, "threshold": threshold, "pass": distance <= threshold}
            passed = passed and distance <= threshold
        return data, passed

    _execute(run, produce)


if __name__ == "__main__":
    main()
