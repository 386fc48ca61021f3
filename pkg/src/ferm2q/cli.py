"""Command-line entry point: ``ferm2q run`` and ``ferm2q sweep``.

Exit codes: 0 on success, 2 on invalid input, 3 when a pipeline stage fails.
"""

from __future__ import annotations

import pathlib
import sys

import click

from . import pipeline
from .errors import Ferm2QError, StageError, ValidationError
from .taper import parse_sector

EXIT_VALIDATION = 2
EXIT_STAGE = 3


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, StageError):
        return EXIT_VALIDATION if isinstance(exc.cause, (ValidationError, OSError)) else EXIT_STAGE
    if isinstance(exc, (ValidationError, OSError)):
        return EXIT_VALIDATION
    return EXIT_STAGE


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(_exit_code(exc))


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Resource estimates for UCCSD-VQE circuits from FCIDUMP integrals."""


@main.command()
@click.option("--fcidump", required=True, type=click.Path(dir_okay=False), help="FCIDUMP file.")
@click.option(
    "--mapping",
    default="jw",
    show_default=True,
    type=click.Choice(["jw", "bk", "parity"], case_sensitive=False),
)
@click.option("--freeze-core", "freeze_core", default="0", show_default=True, help="Core orbitals to freeze, or 'auto'.")
@click.option("--heavy-atoms", type=int, default=None, help="Heavy-atom count used by --freeze-core auto.")
@click.option("--taper", is_flag=True, help="Remove qubits via Z2 symmetries.")
@click.option("--sector", default=None, help="Override the symmetry sector, e.g. '+1,-1,1'.")
@click.option("--emit", default="json", show_default=True, type=click.Choice(["json", "csv"]))
@click.option("--dump-circuit", type=click.Path(dir_okay=False), default=None, help="Write the transpiled circuit here.")
@click.option("--verify", is_flag=True, help="Cross-check small systems against the dense oracle.")
@click.option("--label", default=None, help="Label used in the report (defaults to the file stem).")
def run(fcidump, mapping, freeze_core, heavy_atoms, taper, sector, emit, dump_circuit, verify, label):
    """Run every stage for one molecule and print the resource report."""
    try:
        if not pathlib.Path(fcidump).is_file():
            raise ValidationError(f"FCIDUMP file not found: {fcidump}")
        cfg = pipeline.RunConfig(
            fcidump=fcidump,
            mapping=mapping,
            frozen_core=freeze_core,
            taper=taper,
            sector=parse_sector(sector) if sector else None,
            heavy_atoms=heavy_atoms,
            emit=emit,
            dump_circuit=dump_circuit,
            verify=verify,
            label=label,
        )
        if sector and not taper:
            raise ValidationError("--sector only applies together with --taper")
        report = pipeline.run(cfg)
    except Ferm2QError as exc:
        _fail(exc)
        return
    if emit == "json":
        click.echo(report.to_json(), nl=False)
    else:
        click.echo(pipeline.report_to_csv(report), nl=False)
    if report.verification and report.verification.get("status") == "failed":
        click.echo("error: dense-oracle verification failed", err=True)
        sys.exit(EXIT_STAGE)


@main.command()
@click.option("--manifest", required=True, type=click.Path(dir_okay=False), help="TOML sweep manifest.")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="CSV output path.")
@click.option("--jobs", default=1, show_default=True, type=int, help="Worker processes (one molecule each).")
def sweep(manifest, out, jobs):
    """Run the molecule x mapping x reduction grid and write one CSV row per cell."""
    try:
        if not pathlib.Path(manifest).is_file():
            raise ValidationError(f"manifest not found: {manifest}")
        m = pipeline.load_manifest(manifest)
        rows = pipeline.sweep(m, jobs=jobs)
    except Ferm2QError as exc:
        _fail(exc)
        return
    pathlib.Path(out).write_text(pipeline.rows_to_csv(rows))
    n_err = sum(r["status"] == "error" for r in rows)
    click.echo(f"wrote {len(rows)} rows to {out} ({n_err} errors)")


if __name__ == "__main__":
    main()
