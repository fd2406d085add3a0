"""Command-line entry point for the trainer."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import dataset, features, train


@click.group()
def cli():
    """Train commit-classification models and export them as portable
    JSON."""


@cli.command("train")
@click.option("--task", type=click.Choice(["category", "significance"]),
              required=True)
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True),
              help="Labelled examples, one JSON object per line.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Where to write the exported model JSON.")
@click.option("--fixtures", "fixtures_path", type=click.Path(),
              help="Also write replay fixtures (JSONL) to this path.")
@click.option("--report", "report_path", type=click.Path(),
              help="Write the training report JSON here as well.")
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--dim", default=features.DEFAULT_DIM, show_default=True,
              type=int, help="Message embedding dimension.")
@click.option("--min-examples", default=dataset.MIN_EXAMPLES,
              show_default=True, type=int)
def train_command(task, data_path, out_path, fixtures_path, report_path,
                  seed, dim, min_examples):
    """Fit one task from a labelled JSONL dataset."""
    examples = dataset.read_jsonl(data_path)
    dataset.require(examples, minimum=min_examples, task=task)

    model_dict, report = train.train_task(examples, task, seed, dim=dim)

    from .export import save_model
    save_model(model_dict, out_path)
    click.echo(f"wrote {out_path}")
    click.echo(json.dumps(report.to_dict(), indent=2))
    if report_path:
        Path(report_path).write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")

    if fixtures_path:
        layout = features.build_feature_layout(dim)
        rows = [features.vectorise(e, layout, dim) for e in examples[:200]]
        n = train.export_parity_fixtures(model_dict, rows, fixtures_path)
        click.echo(f"wrote {n} fixtures to {fixtures_path}")


@cli.command("mine")
@click.argument("repos", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--task", type=click.Choice(["category"]),
              default="category", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def mine_command(repos, task, out_path):
    """Mine local clones into a labelled JSONL dataset."""
    mined = [dataset.mine_repo(path) for path in repos]
    examples = dataset.category_examples(mined)
    dataset.write_jsonl(examples, out_path)
    click.echo(f"wrote {len(examples)} examples to {out_path}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except dataset.InsufficientData as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except click.ClickException as exc:
        exc.show()
        return 4
    except click.exceptions.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
