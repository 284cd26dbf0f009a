"""Command-line interface.

Pipeline: gen-corpus -> build-graphs / extract -> split -> train -> eval,
plus predict (rank candidates for one slot), ablate (edge-mask and
label-mode sweep), and nn (usage-representation neighbors).
"""

import csv
import glob
import json
import os

import click
import numpy as np

from .corpus import (CorpusConfig, write_corpus, extract_file, analyze_file,
                     split_corpus, SplitManifest, candidate_count_stats,
                     SPLIT_NAMES)
from .graphs import (graph_to_dict, sample_to_dict, sample_from_dict,
                     make_varmisuse_sample, SlotRejected)
from .metrics import nearest_neighbors
from .minilang import SOURCE_EXTENSION
from .train import RunConfig, train_run, load_run, evaluate, chance_accuracy


def _corpus_files(corpus_dir):
    pattern = os.path.join(corpus_dir, "*", "*" + SOURCE_EXTENSION)
    for path in sorted(glob.glob(pattern)):
        project = os.path.basename(os.path.dirname(path))
        file_id = f"{project}/{os.path.basename(path)}"
        with open(path) as f:
            yield file_id, f.read()


def _slug(file_id):
    return file_id.replace("/", "__").replace(SOURCE_EXTENSION, "")


@click.group()
def main():
    """Program graphs for variable misuse and naming on MiniLang."""


@main.command("gen-corpus")
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, type=int)
@click.option("--projects", default=8, type=int)
@click.option("--files-per-project", default=8, type=int)
@click.option("--functions-per-file", default=3, type=int)
@click.option("--profile", default="seen",
              type=click.Choice(["seen", "unseen"]))
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON file of CorpusConfig fields; CLI flags win.")
def gen_corpus(out, seed, projects, files_per_project, functions_per_file,
               profile, config_path):
    """Generate a MiniLang project tree."""
    fields = {}
    if config_path:
        with open(config_path) as f:
            fields = json.load(f)
    fields.update(seed=seed, projects=projects,
                  files_per_project=files_per_project,
                  functions_per_file=functions_per_file, profile=profile)
    paths = write_corpus(CorpusConfig(**fields), out)
    click.echo(f"wrote {len(paths)} files under {out}")


@main.command("build-graphs")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def build_graphs(corpus, out):
    """Emit the full program graph JSON of every corpus file."""
    os.makedirs(out, exist_ok=True)
    closures = {}
    n = 0
    for file_id, source in _corpus_files(corpus):
        fa = analyze_file(source, file_id)
        for t in sorted(fa.prog.lattice.names):
            closures[t] = sorted(fa.prog.lattice.supertype_closure(t))
        with open(os.path.join(out, _slug(file_id) + ".graph.json"), "w") as f:
            json.dump(graph_to_dict(fa.graph), f)
        n += 1
    with open(os.path.join(out, "closures.json"), "w") as f:
        json.dump(closures, f, indent=2, sort_keys=True)
    click.echo(f"wrote {n} graphs + closures.json under {out}")


@main.command("extract")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def extract(corpus, out):
    """Emit task-sample JSON files plus an index and type closures."""
    os.makedirs(out, exist_ok=True)
    index = {}
    closures = {}
    counts = {"misuse": 0, "naming": 0}
    stats_pool = []
    for file_id, source in _corpus_files(corpus):
        fs = extract_file(source, file_id)
        entry = {"misuse": [], "naming": []}
        for kind, samples in (("misuse", fs.misuse), ("naming", fs.naming)):
            for i, s in enumerate(samples):
                closures.update(s.type_closures)
                rel = f"{_slug(file_id)}.{kind}{i:03d}.json"
                with open(os.path.join(out, rel), "w") as f:
                    json.dump(sample_to_dict(s), f)
                entry[kind].append(rel)
                counts[kind] += 1
        stats_pool.extend(fs.misuse)
        index[file_id] = entry
    with open(os.path.join(out, "index.json"), "w") as f:
        json.dump(index, f, indent=2, sort_keys=True)
    with open(os.path.join(out, "closures.json"), "w") as f:
        json.dump(closures, f, indent=2, sort_keys=True)
    stats = candidate_count_stats(stats_pool)
    click.echo(f"wrote {counts['misuse']} misuse + {counts['naming']} naming "
               f"samples; mean candidates {stats['mean']:.2f}")


def load_samples(samples_dir, task, file_ids=None):
    """Load extracted samples, optionally restricted to a file-id list."""
    with open(os.path.join(samples_dir, "index.json")) as f:
        index = json.load(f)
    with open(os.path.join(samples_dir, "closures.json")) as f:
        closures = json.load(f)
    out = []
    for file_id in sorted(index):
        if file_ids is not None and file_id not in file_ids:
            continue
        for rel in index[file_id][task]:
            with open(os.path.join(samples_dir, rel)) as f:
                out.append(sample_from_dict(json.load(f), closures, file_id))
    return out


def _split_samples(samples_dir, manifest_path, task, split):
    manifest = SplitManifest.load(manifest_path)
    return load_samples(samples_dir, task, set(manifest.files(split)))


@main.command("split")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--unseen", default="", help="comma-separated project names")
@click.option("--ratios", default="0.6,0.1,0.3")
@click.option("--seed", default=0, type=int)
@click.option("--dev-fraction", default=0.0, type=float)
def split_cmd(corpus, out, unseen, ratios, seed, dev_fraction):
    """Write a train/valid/test split manifest (file-level, no leakage)."""
    file_ids = [fid for fid, _ in _corpus_files(corpus)]
    unseen_projects = [p for p in unseen.split(",") if p]
    manifest = split_corpus(file_ids, unseen_projects,
                            tuple(float(r) for r in ratios.split(",")),
                            seed=seed, dev_fraction=dev_fraction)
    manifest.save(out)
    sizes = {k: len(manifest.files(k)) for k in SPLIT_NAMES}
    click.echo(f"wrote {out}: {sizes}")


def _config_from_options(config_path, overrides):
    fields = {}
    if config_path:
        with open(config_path) as f:
            fields = json.load(f)
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**fields)


@main.command("train")
@click.option("--samples", "samples_dir", required=True,
              type=click.Path(exists=True))
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--task", type=click.Choice(["misuse", "naming"]))
@click.option("--model", type=click.Choice(["ggnn", "loc", "avgbirnn",
                                            "avglbl"]))
@click.option("--edge-mask", type=click.Choice(["full", "syntax", "semantic",
                                                "dataflow4"]))
@click.option("--label-mode", type=click.Choice(["subtoken", "token",
                                                 "disabled"]))
@click.option("--hidden", type=int)
@click.option("--steps", type=int)
@click.option("--epochs", type=int)
@click.option("--seed", type=int)
def train_cmd(samples_dir, manifest, out, config_path, **overrides):
    """Train a model on the manifest's train split."""
    config = _config_from_options(config_path, overrides)
    train = _split_samples(samples_dir, manifest, config.task, "train")
    valid = _split_samples(samples_dir, manifest, config.task, "valid")
    model = train_run(config, train, valid or None, out)
    click.echo(f"trained {config.model}/{config.task}; "
               f"best accuracy {model.best_accuracy_:.3f}; artifacts in {out}")


@main.command("eval")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--samples", "samples_dir", required=True,
              type=click.Path(exists=True))
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--split", default="test_seen", type=click.Choice(SPLIT_NAMES))
def eval_cmd(run_dir, samples_dir, manifest, split):
    """Evaluate a trained run on one split; writes report artifacts."""
    config, model = load_run(run_dir)
    samples = _split_samples(samples_dir, manifest, config.task, split)
    report = evaluate(model, samples, config.task, run_dir, tag=split)
    line = {k: round(v, 4) if isinstance(v, float) else v
            for k, v in report.to_dict().items() if k != "per_bucket"}
    if config.task == "misuse":
        line["chance"] = round(chance_accuracy(samples), 4)
    click.echo(json.dumps(line, sort_keys=True))


@main.command("predict")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--file", "source_path", required=True,
              type=click.Path(exists=True))
@click.option("--offset", required=True, type=int,
              help="byte offset of the variable token to treat as the slot")
def predict_cmd(run_dir, source_path, offset):
    """Rank the candidates for one slot in one source file."""
    config, model = load_run(run_dir)
    if config.task != "misuse":
        raise click.ClickException("predict requires a misuse run")
    with open(source_path) as f:
        source = f.read()
    fa = analyze_file(source, os.path.basename(source_path))
    tok = next((t for t in fa.prog.var_of_token
                if fa.prog.tokens[t].start == offset), None)
    if tok is None:
        raise click.ClickException(f"no variable token at byte {offset}")
    try:
        sample = make_varmisuse_sample(fa, tok)
    except SlotRejected as exc:
        raise click.ClickException(f"slot rejected: {exc}")
    pred = model.predict([sample])[0]
    order = np.argsort(-pred.probs)
    for rank, i in enumerate(order, 1):
        c = sample.candidates[i]
        mark = " (written here)" if c.gold else ""
        click.echo(f"{rank}. {c.name}: {pred.probs[i]:.3f}{mark}")


@main.command("ablate")
@click.option("--samples", "samples_dir", required=True,
              type=click.Path(exists=True))
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--edge-masks", default="full,syntax,semantic,dataflow4")
@click.option("--label-modes", default="subtoken,token,disabled")
@click.option("--epochs", type=int)
@click.option("--hidden", type=int)
@click.option("--seed", type=int)
def ablate_cmd(samples_dir, manifest, out, config_path, edge_masks,
               label_modes, **overrides):
    """Sweep edge masks and label modes for the misuse GGNN; CSV out."""
    base = _config_from_options(config_path, overrides)
    train = _split_samples(samples_dir, manifest, "misuse", "train")
    valid = _split_samples(samples_dir, manifest, "misuse", "valid")
    test = _split_samples(samples_dir, manifest, "misuse", "test_seen")
    rows = []
    runs = [("edge_mask", m) for m in edge_masks.split(",") if m]
    runs += [("label_mode", m) for m in label_modes.split(",")
             if m and m != base.label_mode]
    for axis, value in runs:
        config = RunConfig(**{**json.loads(base.to_json()), axis: value,
                              "task": "misuse", "model": "ggnn"})
        model = train_run(config, train, valid or None)
        report = evaluate(model, test, "misuse")
        rows.append({"axis": axis, "value": value,
                     "accuracy": round(report.accuracy, 4),
                     "pr_auc": round(report.pr_auc, 4)})
        click.echo(f"{axis}={value}: accuracy {report.accuracy:.3f}")
    with open(out, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["axis", "value", "accuracy",
                                          "pr_auc"])
        w.writeheader()
        w.writerows(rows)
    click.echo(f"wrote {out}")


@main.command("nn")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--samples", "samples_dir", required=True,
              type=click.Path(exists=True))
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--split", default="test_seen", type=click.Choice(SPLIT_NAMES))
@click.option("--query", default=0, type=int)
@click.option("-k", default=5, type=int)
def nn_cmd(run_dir, samples_dir, manifest, split, query, k):
    """Nearest usage representations by cosine similarity."""
    config, model = load_run(run_dir)
    if config.model != "ggnn" or config.task != "misuse":
        raise click.ClickException("nn requires a misuse GGNN run")
    samples = _split_samples(samples_dir, manifest, "misuse", split)
    reps, labels = model.usage_representations(samples)
    file_id, name, gold = labels[query]
    click.echo(f"query {query}: {name} in {file_id} (gold={gold})")
    for i, sim in nearest_neighbors(reps, query, k):
        file_id, name, gold = labels[i]
        click.echo(f"  {sim:.4f}  {name} in {file_id} (gold={gold})")


if __name__ == "__main__":
    main()
