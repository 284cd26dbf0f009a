"""Slot extraction: misuse samples for every qualifying variable usage
(declarations excluded, at least two type-correct in-scope candidates) and
naming samples for every variable."""

from dataclasses import dataclass

from ..minilang import analyze
from ..graphs import build_file_analysis, make_varmisuse_sample, \
    make_varnaming_sample, SlotRejected


@dataclass
class FileSamples:
    file_id: str
    misuse: list
    naming: list


def analyze_file(source, file_id):
    prog = analyze(source, file_id)
    return build_file_analysis(prog, file_id)


def extract_file(source, file_id):
    """All task samples of one source file."""
    fa = analyze_file(source, file_id)
    prog = fa.prog
    misuse = []
    for tok in sorted(prog.var_of_token):
        try:
            misuse.append(make_varmisuse_sample(fa, tok))
        except SlotRejected:
            pass
    naming = [make_varnaming_sample(fa, var_id)
              for var_id in sorted(prog.vars)
              if prog.variable_tokens(var_id)]
    return FileSamples(file_id, misuse, naming)


def extract_corpus(sources):
    """sources: {(project, file_name): source} as produced by the generator;
    returns {file_id: FileSamples}."""
    out = {}
    for (project, file_name), source in sources.items():
        file_id = f"{project}/{file_name}"
        out[file_id] = extract_file(source, file_id)
    return out


def candidate_count_stats(samples):
    counts = [len(s.candidates) for s in samples]
    if not counts:
        return {"mean": 0.0, "median": 0.0, "n": 0}
    ordered = sorted(counts)
    mid = len(ordered) // 2
    median = (ordered[mid] if len(ordered) % 2
              else (ordered[mid - 1] + ordered[mid]) / 2)
    return {"mean": sum(counts) / len(counts), "median": float(median),
            "n": len(counts)}
