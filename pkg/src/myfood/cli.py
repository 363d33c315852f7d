from __future__ import annotations

import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import click

from .dataset import (dataset_stats, default_taxonomy, load_dataset, load_image,
                      split_dataset, validate_dataset)
from .dataset.store import SPLITS_FILE, build_dataset
from .errors import MyfoodError
from .evaluation import (DEFAULT_MIN_OVERLAP, ExperimentSpec, Grade, comparison_table,
                         grade_prediction, run_experiment)
from .metrics import format_mean_std
from .modelhub import (predict, reference_config, resolve_predictor, save_reference,
                       train_reference)
from .service import ServiceConfig, load_service_config, run_server

log = logging.getLogger("myfood.cli")


def _log_run(command: str, seed=None, **params) -> None:
    payload = json.dumps({"command": command, **params}, sort_keys=True, default=str)
    digest = hashlib.sha256(payload.encode()).hexdigest()[:12]
    log.info("run %s: config digest %s, seed %s", command, digest,
             "-" if seed is None else seed)


@click.group()
def main() -> None:
    """Food segmentation evaluation and nutrition service tools."""
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


# ---------------------------------------------------------------- dataset

@main.group()
def dataset() -> None:
    """Build, check, and split dataset directories."""


@dataset.command("build")
@click.option("--annotations", required=True, type=click.Path(exists=True),
              help="Polygon annotation export (JSON).")
@click.option("--images", "images_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--class-key", default="food", show_default=True,
              help="Region attribute holding the class name.")
def dataset_build(annotations: str, images_dir: str, out_dir: str, class_key: str) -> None:
    """Turn an annotation export plus image files into a dataset directory."""
    _log_run("dataset build", annotations=annotations, images=images_dir, out=out_dir)
    index = build_dataset(annotations, images_dir, out_dir, default_taxonomy(),
                          class_key=class_key)
    click.echo(f"built {len(index.records)} records into {out_dir}")


@dataset.command("validate")
@click.argument("root", type=click.Path(exists=True))
def dataset_validate(root: str) -> None:
    """Check a dataset directory for missing or inconsistent files."""
    _log_run("dataset validate", root=root)
    problems = validate_dataset(root)
    for problem in problems:
        click.echo(problem)
    if problems:
        raise MyfoodError(f"{len(problems)} problem(s) found")
    click.echo("ok")


@dataset.command("stats")
@click.argument("root", type=click.Path(exists=True))
def dataset_stats_cmd(root: str) -> None:
    """Per-class and per-split image counts."""
    _log_run("dataset stats", root=root)
    index = load_dataset(root)
    stats = dataset_stats(index)
    click.echo(f"images: {stats.total_images}")
    for split, count in stats.per_split.items():
        if count:
            click.echo(f"  {split}: {count}")
    for class_id, count in stats.per_class_images.items():
        click.echo(f"  {index.taxonomy.name_of(class_id)}: {count}")


@dataset.command("split")
@click.argument("root", type=click.Path(exists=True))
@click.option("--ratios", default="0.6,0.2,0.2", show_default=True,
              help="train,validation,test fractions (must sum to 1).")
@click.option("--seed", default=0, show_default=True, type=int)
def dataset_split(root: str, ratios: str, seed: int) -> None:
    """Assign splits by hashing image ids and rewrite splits.csv."""
    _log_run("dataset split", seed=seed, root=root, ratios=ratios)
    parts = tuple(float(r) for r in ratios.split(","))
    index = split_dataset(load_dataset(root), parts, seed)
    with open(Path(root) / SPLITS_FILE, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "split"])
        for record in index.records:
            writer.writerow([record.image_id, record.split])
    stats = dataset_stats(index)
    click.echo(" ".join(f"{s}={stats.per_split[s]}"
                        for s in ("train", "validation", "test")))


# ---------------------------------------------------------------- train

@main.command("train")
@click.option("--dataset", "dataset_root", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--split", default="train", show_default=True)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--epochs", default=10, show_default=True, type=int)
@click.option("--input-side", default=64, show_default=True, type=int)
def train(dataset_root: str, out_path: str, split: str, seed: int, epochs: int,
          input_side: int) -> None:
    """Train the reference model on a dataset split and save the weights."""
    _log_run("train", seed=seed, dataset=dataset_root, epochs=epochs)
    index = load_dataset(dataset_root)
    config = reference_config(input_side=input_side, epochs=epochs)
    handle = train_reference(config, index, seed, split=split)
    save_reference(handle, out_path)
    losses = handle.details["loss_history"]
    click.echo(f"trained {epochs} epochs: loss {losses[0]:.4f} -> {losses[-1]:.4f}")
    click.echo(f"weights digest {handle.digest}")
    click.echo(f"saved {out_path}")


# ---------------------------------------------------------------- eval

@main.group("eval")
def eval_group() -> None:
    """Run evaluations, grade detections, compare systems."""


@eval_group.command("run")
@click.option("--model", required=True,
              help="oracle, constant:<class>, reference:<weights>, or a backend name.")
@click.option("--dataset", "dataset_root", required=True, type=click.Path(exists=True))
@click.option("--split", default="test", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--no-overlays", is_flag=True, help="Skip writing overlay images.")
def eval_run(model: str, dataset_root: str, split: str, out_dir: str, seed: int,
             no_overlays: bool) -> None:
    """Evaluate a predictor over a split and write the report files."""
    _log_run("eval run", seed=seed, model=model, dataset=dataset_root, split=split)
    index = load_dataset(dataset_root)
    handle = resolve_predictor(model, dataset=index)
    result = run_experiment(ExperimentSpec(
        predictor=handle, split=split, dataset=index, output_path=out_dir,
        seed=seed, write_overlays=not no_overlays))
    for name in ("iou", "se", "sp", "bac", "ppv"):
        click.echo(f"{name}: {format_mean_std(result.report.overall[name])}")
    if result.exceptions:
        click.echo(f"{len(result.exceptions)} image(s) excluded; see exceptions.csv")
    click.echo(f"report written to {out_dir}")


@eval_group.command("grade")
@click.option("--images", "dataset_root", required=True, type=click.Path(exists=True),
              help="Dataset directory with annotations.")
@click.option("--model", default="oracle", show_default=True)
@click.option("--min-overlap", default=DEFAULT_MIN_OVERLAP, show_default=True,
              type=float)
def eval_grade(dataset_root: str, model: str, min_overlap: float) -> None:
    """Grade detections per image (bad/good/great) as CSV on stdout."""
    _log_run("eval grade", model=model, images=dataset_root, min_overlap=min_overlap)
    index = load_dataset(dataset_root)
    handle = resolve_predictor(model, dataset=index)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["image_id", "detected", "total", "grade"])
    for record in sorted(index.records, key=lambda r: r.image_id):
        if not record.regions:
            continue
        output = predict(handle, load_image(index.root, record))
        grade = grade_prediction(output, record.regions, min_overlap)
        writer.writerow([record.image_id, grade.detected, grade.total, grade.value])


@eval_group.command("compare")
@click.argument("grade_files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--names", default=None,
              help="Comma-separated system names (default: file stems).")
def eval_compare(grade_files: tuple[str, ...], names: str | None) -> None:
    """Render a side-by-side table from grades.csv files."""
    _log_run("eval compare", files=list(grade_files))
    system_names = (names.split(",") if names
                    else [Path(f).parent.name or Path(f).stem for f in grade_files])
    if len(system_names) != len(grade_files):
        raise MyfoodError(f"{len(system_names)} names for {len(grade_files)} files")
    grades: dict[str, list[Grade]] = {}
    ids_per_system: list[list[str]] = []
    for name, path in zip(system_names, grade_files):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        grades[name] = [Grade.from_counts(int(r["detected"]), int(r["total"]))
                        for r in rows]
        ids_per_system.append([r["image_id"] for r in rows])
    if any(ids != ids_per_system[0] for ids in ids_per_system[1:]):
        raise MyfoodError("grade files cover different image lists")
    click.echo(comparison_table(grades, ids_per_system[0]), nl=False)


main.add_command(eval_grade, name="grade")


# ---------------------------------------------------------------- serve

@main.command("serve")
@click.option("--config", "config_path", default=None, type=str,
              help="TOML config file; MYFOOD_* environment variables override it.")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--model", default=None)
@click.option("--dataset", "dataset_path", default=None)
def serve(config_path: str | None, host: str | None, port: int | None,
          model: str | None, dataset_path: str | None) -> None:
    """Run the HTTP service."""
    config = load_service_config(config_path)
    for name, value in (("host", host), ("port", port), ("model", model),
                        ("dataset_path", dataset_path)):
        if value is not None:
            setattr(config, name, value)
    _log_run("serve", config_digest=config.digest(), model=config.model)
    run_server(config)


def entrypoint() -> None:
    """Console entry point: single-line error classes, exit codes 0/1/2."""
    try:
        main(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        sys.exit(2)
    except click.ClickException as exc:
        click.echo(f"{type(exc).__name__}: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except MyfoodError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entrypoint()
