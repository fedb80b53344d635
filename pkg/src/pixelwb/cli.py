"""Command-line interface: estimate, illusion, benchmark, sweep, serve.

Exit codes: 0 success, 2 missing input file, 64 bad flag value,
65 invalid spec/manifest document.
"""

from __future__ import annotations

import json
import sys
import time

import click
import numpy as np

from . import bench, illusions, pipeline
from .errors import ConfigError, DegenerateSpecError, ManifestError, PixelwbError
from .imagecore import load_image, save_image

EXIT_OK = 0
EXIT_NOINPUT = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65


@click.group()
def cli():
    """Pixel-wise multi-illuminant white balance toolkit."""


def _params(algo: str, block: int, sigma: float, confidence: str) -> pipeline.PipelineParams:
    return pipeline.PipelineParams(beta=block, sigma=sigma, estimator=algo,
                                   confidence=confidence)


@cli.command("estimate")
@click.option("--in", "in_path", required=True, help="Input PNG")
@click.option("--algo", default="gray-world", show_default=True)
@click.option("--block", default=8, show_default=True, type=int)
@click.option("--sigma", default=24.0, show_default=True, type=float)
@click.option("--mode", default="pixelwise", show_default=True,
              type=click.Choice(["pixelwise", "global"]))
@click.option("--confidence", default="off", show_default=True,
              type=click.Choice(["off", "whiteness"]))
@click.option("--srgb", is_flag=True, help="Decode input as sRGB")
@click.option("--out-field", default=None, help="Field PNG output path")
@click.option("--out-corrected", default=None, help="Corrected PNG output path")
@click.option("--out-meta", default=None, help="Meta JSON output path")
def cmd_estimate(in_path, algo, block, sigma, mode, confidence, srgb,
                 out_field, out_corrected, out_meta):
    """Estimate the illuminant (field) of one image and correct it."""
    t0 = time.monotonic()
    img = load_image(in_path, transfer="srgb" if srgb else "linear")
    params = _params(algo, block, sigma, confidence)
    result = pipeline.run_pipeline(img, params)
    meta = {
        "params": params.to_dict(),
        "mode": mode,
        "globalEstimate": [float(c) for c in result.global_est],
        "degenerateBlocks": result.degenerate_blocks,
        "flaggedPixels": result.flagged_pixels,
        "whitenessDegenerate": result.whiteness_degenerate,
    }
    if mode == "pixelwise":
        if out_field:
            pipeline.save_field(result.field, out_field, meta)
        if out_corrected:
            save_image(np.clip(pipeline.apply_correction(img, result.field), 0, 1),
                       out_corrected, transfer="srgb" if srgb else "linear")
    else:
        if out_corrected:
            save_image(np.clip(pipeline.apply_correction(img, result.global_est), 0, 1),
                       out_corrected, transfer="srgb" if srgb else "linear")
    meta["timing"] = {"seconds": time.monotonic() - t0}
    if out_meta:
        with open(out_meta, "w") as fh:
            json.dump(meta, fh, indent=2)
    click.echo(json.dumps(meta["globalEstimate"]))


@cli.command("illusion")
@click.option("--spec", "spec_path", required=True, help="IllusionSpec JSON")
@click.option("--out", "out_path", required=True, help="Stimulus PNG output")
@click.option("--target-only", is_flag=True, help="Render the target-only view")
@click.option("--process", is_flag=True, help="Run the pipeline on the stimulus")
@click.option("--algo", default="gray-world", show_default=True)
@click.option("--block", default=8, show_default=True, type=int)
@click.option("--sigma", default=24.0, show_default=True, type=float)
@click.option("--out-processed", default=None, help="Corrected stimulus PNG")
@click.option("--out-report", default=None, help="Shift report JSON")
def cmd_illusion(spec_path, out_path, target_only, process, algo, block, sigma,
                 out_processed, out_report):
    """Render an assimilation stimulus, optionally process and score it."""
    with open(spec_path) as fh:
        spec = illusions.IllusionSpec.from_json(fh.read())
    stim = illusions.generate_illusion(spec)
    rendering = illusions.extract_target(stim) if target_only else stim.image
    save_image(rendering, out_path, transfer="linear", depth=16)
    if process:
        params = _params(algo, block, sigma, "off")
        result = pipeline.run_pipeline(stim.image, params)
        corrected = np.clip(pipeline.apply_correction(stim.image, result.field), 0, 1)
        if out_processed:
            save_image(corrected, out_processed, transfer="linear", depth=16)
        shifts = illusions.assimilation_shift(stim, corrected)
        report = {
            "params": params.to_dict(),
            "regions": [s.to_dict() for s in shifts],
            "meanDeltaDeg": float(np.mean([s.delta_deg for s in shifts])),
        }
        if out_report:
            with open(out_report, "w") as fh:
                json.dump(report, fh, indent=2)
        click.echo(f"mean delta {report['meanDeltaDeg']:.3f} deg "
                   f"over {len(shifts)} regions")


@cli.command("benchmark")
@click.option("--manifest", "manifest_path", required=True)
@click.option("--algo", default="gray-world", show_default=True)
@click.option("--block", default=8, show_default=True, type=int)
@click.option("--sigma", default=24.0, show_default=True, type=float)
@click.option("--mode", default="pixelwise", show_default=True,
              type=click.Choice(["pixelwise", "global"]))
@click.option("--confidence", default="off", show_default=True,
              type=click.Choice(["off", "whiteness"]))
@click.option("--report", "report_path", default=None, help="Report JSON path")
def cmd_benchmark(manifest_path, algo, block, sigma, mode, confidence, report_path):
    """Run a manifest through the pipeline and report angular errors."""
    manifest = bench.load_manifest(manifest_path)
    params = _params(algo, block, sigma, confidence)
    report = bench.run_benchmark(manifest, params, mode=mode)
    if report_path:
        report.save(report_path)
    agg = report.aggregate
    click.echo(f"{manifest.name}: mean {agg.mean:.3f} median {agg.median:.3f} "
               f"best25 {agg.best25_mean:.3f} worst25 {agg.worst25_mean:.3f} "
               f"max {agg.max:.3f} (n={agg.count})")


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{flag} must be a comma-separated integer list")
    if not vals:
        raise ConfigError(f"{flag} must be non-empty")
    return vals


@cli.command("sweep")
@click.option("--manifest", "manifest_path", required=True)
@click.option("--betas", default="4,8,16,32,48", show_default=True)
@click.option("--sigmas", default="2,8,24,48", show_default=True)
@click.option("--algo", default="gray-world", show_default=True)
@click.option("--out", "out_path", required=True, help="CSV output path")
def cmd_sweep(manifest_path, betas, sigmas, algo, out_path):
    """Mean pixel-wise error over a (beta, sigma) grid, persisted as CSV."""
    manifest = bench.load_manifest(manifest_path)
    beta_list = _parse_int_list(betas, "--betas")
    sigma_list = _parse_int_list(sigmas, "--sigmas")
    grid = bench.param_sweep(manifest, beta_list, sigma_list, estimator=algo)
    bench.save_sweep_csv(grid, beta_list, sigma_list, out_path)
    click.echo(f"wrote {len(beta_list)}x{len(sigma_list)} grid to {out_path}")


@cli.command("serve")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None,
              help="Directory with the explorer UI bundle")
def cmd_serve(port, host, static_dir):
    """Run the HTTP API (and optionally the explorer UI)."""
    import uvicorn

    from .server import create_app
    uvicorn.run(create_app(static_dir=static_dir), host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.NoSuchOption as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.exceptions.BadParameter as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.exceptions.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_NOINPUT
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_NOINPUT
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except (DegenerateSpecError, ManifestError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATAERR
    except PixelwbError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
