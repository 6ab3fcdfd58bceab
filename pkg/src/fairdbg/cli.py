"""Headless command-line driver.

All stochastic commands require --seed so every run is reproducible; stdout
carries data (JSON by default), stderr carries logs. Exit codes: 0 success,
2 validation error, 1 internal error.
"""

from __future__ import annotations

import csv as csvmod
import functools
import json
import sys

import click

from . import counterfactual as cf
from . import explain as ex
from . import learners, metrics, search as se, store, tabular

VALIDATION_ERRORS = (
    tabular.SchemaError, tabular.ParseError, tabular.UsageError,
    tabular.SizeError, cf.ConfigError, cf.ValidityError,
    learners.HyperParamError, ValueError, KeyError,
    store.FormatError, store.IntegrityError, FileNotFoundError,
)


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except VALIDATION_ERRORS as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
    return wrapper


def emit(obj, fmt: str):
    if fmt == "json":
        click.echo(store.canonical_json(obj))
    else:
        click.echo(json.dumps(obj, indent=2, sort_keys=True))


@click.group()
@click.option("--project", "project_dir", type=click.Path(), default="fairdbg-project",
              help="Project directory (created by ingest).", show_default=True)
@click.pass_context
def main(ctx, project_dir):
    """Fairness debugging workbench."""
    ctx.ensure_object(dict)
    ctx.obj["dir"] = project_dir


def _load(ctx) -> store.Project:
    return store.load(ctx.obj["dir"])


def _save(ctx, project: store.Project):
    store.save(project, ctx.obj["dir"])


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--label", required=True)
@click.option("--positive", "positive_label", required=True)
@click.option("--kinds", "kinds_path", type=click.Path(exists=True), default=None,
              help="JSON file forcing column kinds.")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def ingest(ctx, csv_path, label, positive_label, kinds_path, fmt):
    """Create a project from a CSV file."""
    overrides = tabular.load_kind_overrides(kinds_path) if kinds_path else None
    with open(csv_path) as f:
        ds = tabular.ingest_csv(f, label, positive_label, overrides)
    project = store.Project.new(ds)
    _save(ctx, project)
    emit({"project_id": project.id, "rows": len(ds),
          "directory": ctx.obj["dir"]}, fmt)


@main.command()
@click.option("--column", required=True)
@click.option("--groups", required=True, help="Comma-separated group values.")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def protect(ctx, column, groups, fmt):
    """Declare the protected attribute and its groups."""
    project = _load(ctx)
    project.dataset = tabular.set_protected(project.dataset, column,
                                            groups.split(","))
    _save(ctx, project)
    emit(project.dataset.schema.to_dict(), fmt)


@main.command()
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def interactions(ctx, fmt):
    """Feature associations with the protected attribute."""
    project = _load(ctx)
    emit(tabular.interactions(project.dataset), fmt)


@main.command()
@click.option("--column", required=True)
@click.option("--values", default=None, help="Comma-separated values to collapse.")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def mask(ctx, column, values, fmt):
    """Mask a column (or selected categorical values of it)."""
    project = _load(ctx)
    project.dataset = tabular.mask(project.dataset, column,
                                   values.split(",") if values else None)
    _save(ctx, project)
    emit(project.dataset.schema.to_dict(), fmt)


@main.command()
@click.option("--algo", required=True, type=click.Choice(list(learners.SPACES)))
@click.option("--objective", default="EOD", type=click.Choice(["EOD", "AOD"]))
@click.option("--budget", default=200, show_default=True)
@click.option("--population", default=20, show_default=True)
@click.option("--band", default=0.05, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--split-seed", default=None, type=int,
              help="Seed for the 80/20 split (defaults to --seed).")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def search(ctx, algo, objective, budget, population, band, seed, split_seed, fmt):
    """Evolutionary accuracy/fairness search over one learner's space."""
    project = _load(ctx)
    split_seed = seed if split_seed is None else split_seed
    split = tabular.split_80_20(project.dataset, split_seed)
    cfg = se.SearchConfig(algorithm=algo, objective=objective,
                          accuracy_band=band, population_size=population,
                          evaluation_budget=budget, seed=seed)
    result = se.search(split, cfg)
    project.seeds["split"] = split_seed
    project.seeds["search"] = seed
    search_id = f"search-{algo}-{seed}"
    scatter = se.archive_to_scatter(result.archive, result.evaluated)
    project.put("archive", search_id, {
        "search_id": search_id,
        "config": cfg.to_dict(),
        "best_accuracy": result.archive.best_accuracy,
        "archive": result.archive.to_dict(),
        "points": scatter,
    })
    for cid, model in result.models.items():
        project.put("model", cid, learners.model_to_dict(model))
    _save(ctx, project)
    emit(project.get(search_id), fmt)


@main.group()
def tests():
    """Counterfactual test suites: generate, list, audit."""


@tests.command("generate")
@click.option("--model", "model_id", required=True)
@click.option("--n", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def tests_generate(ctx, model_id, n, seed, fmt):
    project = _load(ctx)
    model = learners.model_from_dict(project.get(model_id))
    pairs = cf.generate(model, project.dataset, n, seed)
    suite_id = f"suite-{model_id}-{seed}-{n}"
    counts = {c: 0 for c in cf.CATEGORIES}
    for p in pairs:
        counts[p.category] += 1
    project.put("test_suite", suite_id, {
        "suite_id": suite_id, "model_id": model_id, "n": n, "seed": seed,
        "category_counts": counts, "pairs": [p.to_dict() for p in pairs],
    })
    project.seeds[f"tests:{suite_id}"] = seed
    _save(ctx, project)
    emit({"suite_id": suite_id, "n": n, "category_counts": counts}, fmt)


@tests.command("list")
@click.option("--suite", "suite_id", required=True)
@click.option("--filter", "predicate", default=None)
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def tests_list(ctx, suite_id, predicate, fmt):
    project = _load(ctx)
    suite = project.get(suite_id)
    pairs = [cf.TestPair.from_dict(d) for d in suite["pairs"]]
    if predicate:
        pairs = cf.filter_pairs(pairs, predicate,
                                project.dataset.schema.positive_label)
    emit({"suite_id": suite_id, "total": len(pairs),
          "pairs": [p.to_dict() for p in pairs]}, fmt)


@tests.command("audit")
@click.option("--suite", "suite_id", required=True)
@click.option("--rules", "rules_path", default=None, type=click.Path(exists=True),
              help="Rule file; defaults to the bundled Adult Husband<->Wife rules.")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def tests_audit(ctx, suite_id, rules_path, fmt):
    project = _load(ctx)
    suite = project.get(suite_id)
    model = learners.model_from_dict(project.get(suite["model_id"]))
    rules = cf.load_rules(rules_path) if rules_path else cf.default_adult_rules()
    pairs = [cf.TestPair.from_dict(d) for d in suite["pairs"]]
    verdicts, summary = cf.audit(pairs, rules, model, project.dataset.schema)
    audit_id = f"audit-{suite_id}"
    project.put("audit", audit_id, {
        "audit_id": audit_id, "suite_id": suite_id, "summary": summary,
        "verdicts": [v.to_dict() for v in verdicts],
    })
    _save(ctx, project)
    emit({"audit_id": audit_id, "summary": summary}, fmt)


@main.command()
@click.option("--model", "model_id", required=True)
@click.option("--suite", "suite_id", default=None)
@click.option("--test", "test_id", default=None, help="Explain a test pair's original.")
@click.option("--instance", "instance_json", default=None,
              help="Explain an explicit schema-ordered JSON row.")
@click.option("--top-k", default=ex.DEFAULT_TOP_K, show_default=True)
@click.option("--samples", default=ex.DEFAULT_N_SAMPLES, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--story/--no-story", default=False)
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def explain(ctx, model_id, suite_id, test_id, instance_json, top_k, samples,
            seed, story, fmt):
    """Local surrogate explanation of one decision."""
    project = _load(ctx)
    model = learners.model_from_dict(project.get(model_id))
    instance_id = None
    if test_id is not None:
        if suite_id is None:
            raise click.UsageError("--test requires --suite")
        suite = project.get(suite_id)
        matches = [d for d in suite["pairs"] if d["id"] == test_id]
        if not matches:
            raise KeyError(f"no test pair {test_id!r} in {suite_id!r}")
        instance = tuple(matches[0]["original"])
        instance_id = test_id
    elif instance_json is not None:
        instance = tuple(json.loads(instance_json))
    else:
        raise click.UsageError("provide --test or --instance")
    split_seed = project.seeds.get("split", 0)
    split = tabular.split_80_20(project.dataset, split_seed)
    explanation = ex.explain(model, instance, split.train, top_k=top_k,
                             n_samples=samples, seed=seed,
                             instance_id=instance_id)
    result = explanation.to_dict()
    if story:
        result["story"] = ex.explanation_story(
            explanation, tabular.interactions(project.dataset))
    if test_id is not None:
        project.put("explanation", f"explain-{model_id}-{test_id}-{seed}", result)
        _save(ctx, project)
    emit(result, fmt)


@main.command()
@click.option("--model", "model_id", required=True)
@click.option("--split-seed", default=None, type=int)
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "pretty"]))
@click.pass_context
@handles_errors
def report(ctx, model_id, split_seed, fmt):
    """Fairness report for one model on the held-out split."""
    project = _load(ctx)
    model = learners.model_from_dict(project.get(model_id))
    if split_seed is None:
        split_seed = project.seeds.get("split", 0)
    split = tabular.split_80_20(project.dataset, split_seed)
    rep = metrics.evaluate(model, split.test, model_id=model_id,
                           split_id=str(split_seed))
    emit(rep.to_dict(), fmt)


@main.command()
@click.option("--suite", "suite_id", required=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
@handles_errors
def export(ctx, suite_id, out_dir):
    """Export a test suite as JSON lines plus a CSV rate summary."""
    import os
    project = _load(ctx)
    suite = project.get(suite_id)
    os.makedirs(out_dir, exist_ok=True)
    jsonl = os.path.join(out_dir, f"{suite_id}.jsonl")
    with open(jsonl, "w") as f:
        for d in suite["pairs"]:
            f.write(store.canonical_json(d) + "\n")
    csv_path = os.path.join(out_dir, f"{suite_id}_summary.csv")
    audit_id = f"audit-{suite_id}"
    with open(csv_path, "w", newline="") as f:
        w = csvmod.writer(f)
        w.writerow(["metric", "value"])
        w.writerow(["total_pairs", len(suite["pairs"])])
        for cat, count in sorted(suite.get("category_counts", {}).items()):
            w.writerow([cat, count])
        if audit_id in project.artifacts:
            summary = project.get(audit_id)["summary"]
            for k in ("TP", "FP", "TN", "FN"):
                w.writerow([f"rate_{k}", summary["rates"][k]])
    click.echo(store.canonical_json({"jsonl": jsonl, "csv": csv_path}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP/JSON API."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
