"""Command-line front end.

Every subcommand writes a CSV table (header row, fixed column order) or
the same fields as JSON.  Exit codes: 0 success, 2 usage error, 3 I/O
error, 4 numeric failure.  A JSON config file passed via --config
supplies per-subcommand defaults; the EMDOF_OUTPUT_DIR environment
variable prefixes relative output paths.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click
import numpy as np

from . import geometry, invsource, meshio, shapes
from .capacity import ChannelProblem, capacity_vs_snr, waterfill
from .discretize import (
    DEFAULT_DENSITY,
    ingest_pair,
    resistance_pair,
    sample_mesh,
)
from .errors import (
    DecompositionError,
    InvalidArgumentError,
    KindMismatchError,
    MalformedFileError,
    NoChannelError,
)
from .modes import NdofReport, radiation_modes
from .sphwave import LossModel, ball_spectrum, default_l_max, shell_spectrum

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map library errors onto the stable exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InvalidArgumentError, KindMismatchError) as exc:
            _fail(EXIT_USAGE, str(exc))
        except (MalformedFileError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
            _fail(EXIT_IO, str(exc))
        except (DecompositionError, NoChannelError, np.linalg.LinAlgError, FloatingPointError) as exc:
            _fail(EXIT_NUMERIC, str(exc))

    return wrapper


def _resolve_output(path: str | None) -> str | None:
    if path is None or path == "-":
        return None
    base = os.environ.get("EMDOF_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(rows: list[dict], fmt: str, output: str | None):
    """Write rows as CSV (fixed column order) or JSON with equal fields."""
    path = _resolve_output(output)
    if fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        cols = list(rows[0].keys()) if rows else []
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(_fmt_cell(row[c]) for c in cols))
        text = "\n".join(lines) + "\n"
    if path is None:
        click.echo(text, nl=False)
    else:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write {path}: {exc}")


def _fmt_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


@click.group()
@click.option(
    "--config",
    type=click.Path(dir_okay=False),
    default=None,
    help="JSON file with per-subcommand option defaults.",
)
@click.pass_context
def main(ctx, config):
    """Electromagnetic degrees of freedom of radiating bodies."""
    if config is not None:
        try:
            with open(config) as fh:
                ctx.default_map = json.load(fh)
        except OSError as exc:
            _fail(EXIT_IO, f"cannot read config {config}: {exc}")
        except json.JSONDecodeError as exc:
            _fail(EXIT_USAGE, f"malformed config {config}: {exc}")


@main.command()
@click.option("--ka", "ka_list", type=float, multiple=True, required=True,
              help="Electrical size; repeatable.")
@click.option("--loss", type=float, default=1e-5, show_default=True,
              help="Normalized loss: R_s/eta0 (shell) or k rho_r/eta0 (ball).")
@click.option("--kind", type=click.Choice(["shell", "ball"]), default="shell",
              show_default=True)
@click.option("--l-max", type=int, default=None, help="Truncation degree.")
@click.option("--dump-spectra", type=click.Path(file_okay=False), default=None,
              help="Directory for per-ka eigenvalue tables.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", default=None, help="Output path ('-' for stdout).")
@_guarded
def sphere(ka_list, loss, kind, l_max, dump_spectra, fmt, output):
    """Closed-form spherical shell/ball radiation-mode spectra and NDoF."""
    if not ka_list:
        raise InvalidArgumentError("at least one --ka value is required")
    rows = []
    for ka in ka_list:
        if kind == "shell":
            spec = shell_spectrum(ka, LossModel.surface(loss), l_max)
        else:
            spec = ball_spectrum(ka, LossModel.volume(loss), l_max)
        wavelength = 2.0 * np.pi / ka
        report = NdofReport.from_spectrum(spec, wavelength)
        rows.append(
            {
                "ka": float(ka),
                "l_max": l_max if l_max is not None else default_l_max(ka),
                "ndof_threshold": report.threshold_count,
                "effective_ndof": report.effective,
                "sum_efficiencies": report.sum_of_efficiencies,
                "avg_max_eff_area": report.avg_max_eff_area,
                "ndof_normalized": report.threshold_count / (2.0 * ka**2),
                "effective_normalized": report.effective / (2.0 * ka**2),
            }
        )
        if dump_spectra is not None:
            os.makedirs(dump_spectra, exist_ok=True)
            np.savetxt(
                os.path.join(dump_spectra, f"spectrum_ka{ka:g}.csv"),
                np.column_stack([spec.eigenvalues, spec.efficiencies]),
                delimiter=",",
                header="rho,nu",
                comments="",
            )
    _emit(rows, fmt, output)


def _load_mesh_arg(mesh_path: str | None, shape: str | None) -> geometry.TriangleMesh:
    if (mesh_path is None) == (shape is None):
        raise InvalidArgumentError("exactly one of --mesh and --shape is required")
    if mesh_path is not None:
        return meshio.load_mesh(mesh_path)
    return shapes.builtin_mesh(shape)


@main.command()
@click.option("--mesh", "mesh_path", type=click.Path(dir_okay=False), default=None)
@click.option("--shape", type=click.Choice(sorted(shapes.BUILTIN_SHAPES)), default=None,
              help="Built-in shape instead of a mesh file.")
@click.option("--wavelength", "wavelengths", type=float, multiple=True,
              default=(1.0,), show_default=True)
@click.option("--quadrature", type=int, default=590, show_default=True,
              help="Number of directions of the sphere covering.")
@click.option("--resolution", type=int, default=512, show_default=True)
@click.option("--sweep", is_flag=True,
              help="Use a polar sweep and emit the per-angle shadow curve "
                   "(bodies of revolution).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", default=None)
@_guarded
def shadow(mesh_path, shape, wavelengths, quadrature, resolution, sweep, fmt, output):
    """Direction-averaged shadow area and the NDoF estimate built on it."""
    mesh = _load_mesh_arg(mesh_path, shape)
    if sweep:
        quad = geometry.DirectionQuadrature.polar_sweep(quadrature)
    else:
        quad = geometry.DirectionQuadrature.fibonacci(quadrature)
    report = geometry.average_shadow_area(mesh, quad, resolution)
    area = geometry.surface_area(mesh)
    def row(lam=None, theta=None, a_s=None):
        return {
            "wavelength": float(lam) if lam is not None else "",
            "surface_area": area if lam is not None else "",
            "avg_shadow_area": report.average if lam is not None else "",
            "total_shadow_4pi": report.total if lam is not None else "",
            "convexity_gap": 4.0 * report.average / area if lam is not None else "",
            "asymptotic_ndof": (
                geometry.asymptotic_ndof(report.average, lam)
                if lam is not None
                else ""
            ),
            "theta": float(theta) if theta is not None else "",
            "shadow_at_theta": float(a_s) if a_s is not None else "",
        }

    rows = [row(lam=lam) for lam in wavelengths]
    if sweep:
        rows.extend(
            row(theta=t, a_s=a)
            for t, a in zip(quad.polar_angles, report.per_direction)
        )
    _emit(rows, fmt, output)


@main.command()
@click.option("--mesh", "mesh_path", type=click.Path(dir_okay=False), default=None)
@click.option("--shape", type=click.Choice(sorted(shapes.BUILTIN_SHAPES)), default=None)
@click.option("--matrix", "matrix_path", type=click.Path(dir_okay=False), default=None,
              help="Ingest a precomputed matrix pair instead of discretizing.")
@click.option("--wavelength", type=float, default=1.0, show_default=True)
@click.option("--loss", type=float, default=1e-3, show_default=True,
              help="Surface resistivity over eta0.")
@click.option("--l-max", type=int, default=None)
@click.option("--density", type=float, default=DEFAULT_DENSITY, show_default=True,
              help="Sample points per squared wavelength.")
@click.option("--shape-segments", type=int, default=None,
              help="Azimuthal segment count for built-in shapes "
                   "(default: sized to the wavelength).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", default=None)
@_guarded
def modes(mesh_path, shape, matrix_path, wavelength, loss, l_max, density,
          shape_segments, fmt, output):
    """Radiation-mode spectrum of a mesh or an ingested matrix pair."""
    if matrix_path is not None:
        if mesh_path is not None or shape is not None:
            raise InvalidArgumentError("--matrix excludes --mesh/--shape")
        pair = ingest_pair(matrix_path)
        mesh = None
    elif shape is not None:
        if shape_segments is None:
            # Size the base mesh to the sampling density so the refined
            # point count lands near density * A / lambda^2.
            spacing = wavelength / np.sqrt(max(density, 1.0))
            shape_segments = int(np.clip(np.ceil(2.0 * np.pi / spacing), 12, 96))
        mesh = shapes.builtin_mesh(shape, n_phi=shape_segments)
    else:
        mesh = _load_mesh_arg(mesh_path, shape)
    if mesh is not None:
        k = 2.0 * np.pi / wavelength
        if l_max is None:
            l_max = default_l_max(k * mesh.circumradius)
        disc = sample_mesh(mesh, k, LossModel.surface(loss), density)
        pair = resistance_pair(disc, l_max)
    spectrum, _ = radiation_modes(pair)
    report = NdofReport.from_spectrum(spectrum, wavelength)
    n_a = report.sum_of_efficiencies
    if mesh is not None:
        shadow_avg = geometry.average_shadow_area(mesh).average
        n_a = geometry.asymptotic_ndof(shadow_avg, wavelength)
    rows = [
        {
            "n": i + 1,
            "rho": float(rho),
            "nu": float(nu),
            "n_over_na": (i + 1) / n_a,
        }
        for i, (rho, nu) in enumerate(
            zip(spectrum.eigenvalues, spectrum.efficiencies)
        )
    ]
    header = {
        "n": "summary",
        "rho": f"ndof_threshold={report.threshold_count}",
        "nu": f"effective_ndof={report.effective:.6g}",
        "n_over_na": f"na={n_a:.6g}",
    }
    _emit([header] + rows, fmt, output)


def _parse_efficiencies(inline: str | None, path: str | None) -> np.ndarray:
    if (inline is None) == (path is None):
        raise InvalidArgumentError("exactly one of --nu and --nu-file is required")
    if inline is not None:
        try:
            return np.array([float(tok) for tok in inline.split(",") if tok.strip()])
        except ValueError as exc:
            raise InvalidArgumentError(f"bad --nu list: {exc}") from exc
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=1)
    except OSError:
        raise
    except ValueError as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc
    return np.atleast_1d(values.ravel())


@main.command()
@click.option("--nu", "inline", default=None,
              help="Comma-separated efficiencies, strongest first.")
@click.option("--nu-file", "nu_path", type=click.Path(dir_okay=False), default=None,
              help="File with one efficiency per line.")
@click.option("--gamma", "gamma_list", type=float, multiple=True, required=True,
              help="SNR value; repeatable, ascending.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", default=None)
@_guarded
def waterfill_cmd(inline, nu_path, gamma_list, fmt, output):
    """Waterfilling capacity over mode efficiencies."""
    nu = _parse_efficiencies(inline, nu_path)
    grid = np.array(sorted(gamma_list))
    if np.any(grid <= 0):
        raise InvalidArgumentError("--gamma values must be > 0")
    rows = []
    for gamma in grid:
        alloc = waterfill(ChannelProblem(nu, float(gamma)))
        row = {
            "gamma": float(gamma),
            "capacity_bits": alloc.capacity_bits,
            "active_count": alloc.active_count,
            "water_level": alloc.water_level,
        }
        for i, p in enumerate(alloc.powers):
            row[f"p{i + 1}"] = float(p)
        rows.append(row)
    _emit(rows, fmt, output)


main.add_command(waterfill_cmd, name="waterfill")


def _preset_geometry(preset: str, wavelength: float):
    """Surface area and average shadow area of the reconstruction presets.

    The hemisphere is the closed half-ball boundary.  The bowl is the
    open hemispherical sheet; both of its faces carry reconstruction
    cells, so its surface measure is twice the single-sided sheet area.
    The two bodies share the same silhouette.
    """
    dome = shapes.hemisphere()
    if preset == "bowl":
        keep = np.abs(dome.vertices[dome.triangles][:, :, 2]).max(axis=1) > 1e-12
        sheet = geometry.TriangleMesh(
            dome.vertices, dome.triangles[keep], closed=False
        )
        area = 2.0 * geometry.surface_area(sheet)
        mesh = sheet
    else:
        area = geometry.surface_area(dome)
        mesh = dome
    quad = geometry.DirectionQuadrature.polar_sweep(181)
    avg_shadow = geometry.average_shadow_area(mesh, quad).average
    return area, avg_shadow


@main.command()
@click.option("--spectrum-file", type=click.Path(dir_okay=False), default=None,
              help="CSV of eigenvalues rho_n, descending (first column).")
@click.option("--preset", type=click.Choice(["hemisphere", "bowl"]), default=None,
              help="Reconstruction-surface preset; prints the resolution summary.")
@click.option("--data-file", type=click.Path(dir_okay=False), default=None,
              help="Far-field CSV (index, real, imag); synthetic data if absent.")
@click.option("--excite", type=int, default=1, show_default=True,
              help="Synthetic data: number of leading modes driven with unit current.")
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--delta", type=float, default=1e-9, show_default=True)
@click.option("--cutoff", type=float, default=1.0, show_default=True)
@click.option("--wavelength", type=float, default=1.0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", default=None)
@_guarded
def invsource_cmd(spectrum_file, preset, data_file, excite, noise, seed, delta,
                  cutoff, wavelength, fmt, output):
    """Inverse source solve and/or the shadow-area resolution summary."""
    if preset is not None:
        area, avg_shadow = _preset_geometry(preset, wavelength)
        d, fraction = invsource.resolution_estimate(area, avg_shadow, wavelength)
        click.echo(
            f"{preset}: resolution lambda/{wavelength / d:.2g}"
            f" ({d:.6g} at wavelength {wavelength:g}),"
            f" radiating fraction {fraction:.2f}",
            err=False,
        )
        if spectrum_file is None:
            return
    if spectrum_file is None:
        raise InvalidArgumentError("--spectrum-file or --preset is required")
    try:
        rho = np.loadtxt(spectrum_file, delimiter=",", ndmin=2)[:, 0]
    except OSError:
        raise
    except ValueError as exc:
        raise MalformedFileError(f"{spectrum_file}: {exc}") from exc
    from .sphwave import Provenance, RadiationSpectrum

    spectrum = RadiationSpectrum(
        eigenvalues=np.sort(rho)[::-1],
        ka=None,
        wavelength=wavelength,
        provenance=Provenance.INGESTED,
    )
    if data_file is not None:
        try:
            raw = np.loadtxt(data_file, delimiter=",", ndmin=2)
        except OSError:
            raise
        except ValueError as exc:
            raise MalformedFileError(f"{data_file}: {exc}") from exc
        if raw.shape[1] < 3 or raw.shape[0] != len(spectrum):
            raise InvalidArgumentError(
                "data file must have rows (index, real, imag) matching the spectrum"
            )
        data = invsource.FarFieldData(raw[:, 1] + 1j * raw[:, 2], noise)
    else:
        currents = np.zeros(len(spectrum), dtype=complex)
        currents[: min(excite, len(spectrum))] = 1.0
        data = invsource.forward(currents, spectrum, noise, seed)
    tik = invsource.reconstruct_tikhonov(data, spectrum, delta)
    svd = invsource.reconstruct_svd(data, spectrum, cutoff)
    rows = [
        {
            "n": i + 1,
            "rho": float(spectrum.eigenvalues[i]),
            "f_real": float(data.coefficients[i].real),
            "f_imag": float(data.coefficients[i].imag),
            "tikhonov_real": float(tik.mode_coefficients[i].real),
            "tikhonov_imag": float(tik.mode_coefficients[i].imag),
            "svd_real": float(svd.mode_coefficients[i].real),
            "svd_imag": float(svd.mode_coefficients[i].imag),
        }
        for i in range(len(spectrum))
    ]
    rows.append(
        {
            "n": "summary",
            "rho": f"delta={delta:g}",
            "f_real": f"cutoff={cutoff:g}",
            "f_imag": f"tik_residual={tik.residual:.6g}",
            "tikhonov_real": f"tik_penalty={tik.penalty:.6g}",
            "tikhonov_imag": f"svd_residual={svd.residual:.6g}",
            "svd_real": f"svd_retained={int(np.count_nonzero(svd.mode_coefficients))}",
            "svd_imag": "",
        }
    )
    _emit(rows, fmt, output)


main.add_command(invsource_cmd, name="invsource")


if __name__ == "__main__":
    main()
