"""Command line interface.

Exit codes follow one contract across subcommands: 0 on success, 1 for
usage and policy errors (bad parameter values, asymmetric kind where a
matrix is needed), 2 for I/O problems (unreadable or malformed files,
grids too large to materialise, refusing to overwrite), and 3 for
numerical degeneracy (singular fits, constant columns).

All computation happens in-process through the library; no command
touches the network. ``serve`` only starts the HTTP service and hands
control to the ASGI server.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import distances, experiments, storage
from .copula import empirical_copula_histogram, pseudo_observations
from .errors import (
    CopulaMetricsError,
    DegenerateInput,
    GridTooLarge,
    IncompatibleHistograms,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    SingularMatrix,
)

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

_IO_ERRORS = (GridTooLarge, IncompatibleHistograms)
_NUMERICAL_ERRORS = (
    SingularMatrix,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    DegenerateInput,
)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _map_error(exc: Exception):
    if isinstance(exc, _IO_ERRORS):
        _fail(EXIT_IO, str(exc))
    if isinstance(exc, _NUMERICAL_ERRORS):
        _fail(EXIT_NUMERICAL, str(exc))
    if isinstance(exc, CopulaMetricsError):
        _fail(EXIT_USAGE, str(exc))
    raise exc


def _read_series(path):
    try:
        return storage.read_series_csv(path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")
    except CopulaMetricsError as exc:
        _fail(EXIT_IO, str(exc))


@click.group()
def main():
    """Copula distances and dependence-based clustering."""


@main.command("table1")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
    help="Output format.",
)
def cmd_table1(fmt):
    """Print the closed-form distance comparison on the reference pairs.

    Values are rounded to two decimals in CSV; JSON carries full
    precision plus the table note.
    """
    table = experiments.closed_form_table()
    if fmt == "csv":
        click.echo("kind,d_AB,d_BC,reversed")
        for row in table.rows:
            flag = "true" if row.reversed_order else "false"
            click.echo(f"{row.kind},{row.d_ab:.2f},{row.d_bc:.2f},{flag}")
    else:
        payload = {
            "rows": [
                {
                    "kind": row.kind,
                    "d_AB": row.d_ab,
                    "d_BC": row.d_bc,
                    "reversed": row.reversed_order,
                }
                for row in table.rows
            ],
            "note": table.note,
        }
        click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command("sweep")
@click.option("--kind", default="fisher-rao", show_default=True)
@click.option("--grid", default=50, show_default=True, help="Grid points per axis.")
@click.option("--hi", default=0.995, show_default=True, help="Largest rho on the grid.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--pgm",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also export the grid as an 8-bit PGM heatmap.",
)
def cmd_sweep(kind, grid, hi, out, pgm):
    """Write a rho-by-rho distance grid as CSV (and optionally PGM)."""
    try:
        result = experiments.sweep(kind, grid_size=grid, hi=hi)
        storage.write_sweep_csv(out, result)
        if pgm is not None:
            storage.write_pgm(pgm, result.values)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write output: {exc.strerror or exc}")
    except Exception as exc:
        _map_error(exc)
    click.echo(f"wrote {grid}x{grid} {kind} grid to {out}")


@main.command("gen")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option(
    "--rhos",
    default=",".join(f"{r:g}" for r in experiments.DEFAULT_BENCHMARK_RHOS),
    show_default=True,
    help="Comma-separated dependence levels.",
)
@click.option("--per-cluster", default=5, show_default=True)
@click.option("--length", default=2500, show_default=True, help="Observations per object.")
@click.option("--seed", default=0, show_default=True)
@click.option("--force", is_flag=True, help="Write into a non-empty directory.")
def cmd_gen(out, rhos, per_cluster, length, seed, force):
    """Generate the synthetic benchmark: one CSV per object plus a manifest."""
    try:
        parsed = tuple(float(part) for part in rhos.split(",") if part.strip())
    except ValueError:
        _fail(EXIT_USAGE, f"cannot parse --rhos {rhos!r}")
    out_dir = Path(out)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        _fail(EXIT_IO, f"{out_dir} is not empty; pass --force to overwrite")
    try:
        dataset = experiments.generate_benchmark(
            rhos=parsed, per_cluster=per_cluster, n_samples=length, seed=seed
        )
        manifest_path = storage.write_dataset(out_dir, dataset)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write dataset: {exc.strerror or exc}")
    except Exception as exc:
        _map_error(exc)
    click.echo(f"wrote {len(dataset.objects)} objects and {manifest_path.name} to {out_dir}")


@main.command("cluster")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(dir_okay=False))
@click.option("--kind", default="fisher-rao", show_default=True)
@click.option("--fit", "fit_method", default="normal-scores", show_default=True)
@click.option("--k", default=3, show_default=True)
@click.option("--bins", default=16, show_default=True, help="Histogram bins (emd only).")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cmd_cluster(manifest_path, kind, fit_method, k, bins, out):
    """Cluster the objects listed in a dataset manifest.

    Writes the result JSON to --out and the distance matrix to a
    sibling CSV referenced from the JSON.
    """
    try:
        distances.require_symmetric_kind(kind)
    except CopulaMetricsError as exc:
        _fail(EXIT_USAGE, str(exc))
    try:
        manifest = storage.read_manifest(manifest_path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {manifest_path}: {exc.strerror or exc}")
    except CopulaMetricsError as exc:
        _fail(EXIT_IO, str(exc))
    pairs = storage.resolve_manifest_paths(manifest_path, manifest)
    data = [(label, _read_series(path)) for label, path in pairs]
    try:
        result = experiments.run_pipeline(
            data, kind=kind, fit_method=fit_method, k=k, bins=bins
        )
    except Exception as exc:
        _map_error(exc)
    out_path = Path(out)
    matrix_name = out_path.stem + ".distances.csv"
    try:
        storage.write_distance_matrix_csv(
            out_path.parent / matrix_name, result.distance_matrix
        )
        storage.write_cluster_json(
            out_path, result.labels, result.dendrogram, result.partition, matrix_name
        )
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write output: {exc.strerror or exc}")
    click.echo(
        f"clustered {len(result.labels)} objects into {result.partition.k} groups; "
        f"wrote {out_path}"
    )


@main.command("emd")
@click.argument("file_a", type=click.Path(dir_okay=False))
@click.argument("file_b", type=click.Path(dir_okay=False))
@click.option("--bins", default=16, show_default=True)
@click.option("--ground", default="euclidean", show_default=True)
def cmd_emd(file_a, file_b, bins, ground):
    """Earth mover's distance between the copulas of two series files."""
    series_a = _read_series(file_a)
    series_b = _read_series(file_b)
    try:
        hist_a = empirical_copula_histogram(pseudo_observations(series_a), bins)
        hist_b = empirical_copula_histogram(pseudo_observations(series_b), bins)
        value, plan = distances.emd(hist_a, hist_b, ground=ground)
    except Exception as exc:
        _map_error(exc)
    click.echo(f"distance {value!r}")
    click.echo(f"plan_moves {len(plan.moves)}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cmd_serve(host, port):
    """Run the HTTP service (wraps the same library calls)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
