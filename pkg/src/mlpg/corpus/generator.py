"""Synthetic MiniLang corpus generator.

Programs are built from templates that follow fixed authoring conventions,
so that which variable belongs in a slot is predictable from context:

- use-once discipline: ordinary variables are read exactly once after each
  write, so the variable belonging in a consuming position is the one that
  is still unread ("fresh");
- role by initializer: chained "carrier" variables are initialized from the
  previous carrier, one-shot "config" variables from literals, and each is
  consumed in matching positions (carrier chains vs comparisons/guards);
- accumulator loops: `total = total + step` style self-reference;
- guard-then-use: a guarded division/use references the tested variable;
- formal-argument matching: in-file helper calls pass the fresh variables
  in the helper's declared parameter order.

Two generator profiles (disjoint name pools and different template mixes)
stand in for seen vs unseen projects. Generation is deterministic: the same
config and seed produce byte-identical sources, and every emitted file must
typecheck (GenerationError otherwise).
"""

import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from ..minilang import analyze, SOURCE_EXTENSION


class GenerationError(Exception):
    pass


# --- name pools ----------------------------------------------------------------

NAME_POOLS = {
    "seen": {
        "seed": ["seed", "start_val", "base_num", "init_amount"],
        "carrier": ["cur_val", "stage_num", "mid_total", "work_item",
                    "next_val", "step_result", "chain_num", "hop_val"],
        "config": ["cap", "bound_num", "limit_val", "quota", "margin_num"],
        "acc": ["total_sum", "running_sum", "acc_amount", "tally"],
        "counter": ["idx", "loop_pos", "iter_num"],
        "step": ["step_size", "delta_val", "gain_num"],
        "guard": ["divisor", "denom_val", "scale_num"],
        "text": ["label_text", "path_str", "name_buf", "msg_text",
                 "tag_str", "note_buf"],
        "flag": ["is_done", "check_ok", "flag_val", "has_room"],
        "shape": ["shape_item", "figure_val", "outline_obj"],
        "sub": ["round_item", "disc_val", "ring_obj"],
        "fn": ["compute", "process", "update", "evaluate", "resolve",
               "combine", "reduce", "advance", "measure", "collect"],
        "helper": ["scale_pair", "mix_values", "join_parts", "clamp_range"],
    },
    "unseen": {
        "seed": ["origin_num", "entry_val", "feed_amount", "source_item"],
        "carrier": ["flow_val", "pipe_num", "relay_item", "trace_total",
                    "link_val", "pass_num", "carry_item", "shift_val"],
        "config": ["ceiling_num", "budget_val", "window_size", "cutoff"],
        "acc": ["gather_sum", "pool_total", "heap_amount", "bucket_sum"],
        "counter": ["turn_num", "spin_pos", "tick_count"],
        "step": ["pace_val", "stride_size", "boost_num"],
        "guard": ["splitter", "ratio_base", "chunk_size"],
        "text": ["title_str", "route_text", "alias_buf", "memo_str",
                 "badge_text", "stamp_buf"],
        "flag": ["was_seen", "fits_ok", "gate_open", "ready_bit"],
        "shape": ["panel_item", "layout_val", "frame_obj"],
        "sub": ["tile_item", "brick_val", "slab_obj"],
        "fn": ["refine", "digest", "convert", "assemble", "forward",
               "absorb", "distill", "arrange", "inspect", "stack"],
        "helper": ["blend_pair", "fold_values", "weave_parts", "trim_range"],
    },
}

TYPE_DECLS = {
    "seen": ("type Shape;\ntype Circle extends Shape;\n", "Shape", "Circle"),
    "unseen": ("type Panel;\ntype Tile extends Panel;\n", "Panel", "Tile"),
}

DEFAULT_WEIGHTS = {
    "seen": {"pipeline": 3, "sections": 4, "accumulator": 2, "guarded": 2,
             "helper_call": 2, "passthrough": 1},
    "unseen": {"pipeline": 2, "sections": 3, "accumulator": 2, "guarded": 3,
               "helper_call": 1, "passthrough": 2},
}


@dataclass
class CorpusConfig:
    seed: int = 0
    projects: int = 8
    files_per_project: int = 8
    functions_per_file: int = 3
    profile: str = "seen"
    template_weights: dict = field(default_factory=dict)

    def weights(self):
        w = dict(DEFAULT_WEIGHTS[self.profile])
        w.update(self.template_weights)
        return w

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


# --- per-function builder -------------------------------------------------------

class _Names:
    """Draw unique names per function, numbered once a pool is exhausted."""

    def __init__(self, pools, rng):
        self.pools = pools
        self.rng = rng
        self.used = set()
        self.counter = 0

    def pick(self, role):
        pool = self.pools[role]
        options = [n for n in pool if n not in self.used]
        if options:
            name = options[int(self.rng.integers(len(options)))]
        else:
            self.counter += 1
            name = f"{pool[int(self.rng.integers(len(pool)))]}{self.counter}"
        self.used.add(name)
        return name


class _Fn:
    def __init__(self, names, rng, name, params, ret=None):
        self.names = names
        self.rng = rng
        self.name = name
        self.params = params          # list of (name, type)
        self.ret = ret
        self.body = []
        self.pad_head = None          # name of the string log variable

    def line(self, text):
        self.body.append("    " + text)

    def lit(self, lo=1, hi=9):
        return str(int(self.rng.integers(lo, hi + 1)))

    def pad(self, count=1, indent=""):
        """Token filler: append literals onto the single string log variable.
        Keeping one string in scope means filler lines never become slots."""
        for _ in range(count):
            self.line(f'{indent}{self.pad_head} = '
                      f'{self.pad_head} + "{self._word()}";')

    def _word(self):
        letters = "abcdefghijklmnopqrstuvwxyz"
        k = int(self.rng.integers(2, 6))
        return "".join(letters[int(self.rng.integers(26))] for _ in range(k))

    def render(self):
        params = ", ".join(f"{n}: {t}" for n, t in self.params)
        ret = f" -> {self.ret}" if self.ret else ""
        body = "\n".join(self.body)
        return f"fn {self.name}({params}){ret} {{\n{body}\n}}"


def _consume_config(fn, name):
    """Spend a literal-initialized variable in a comparison."""
    flag = fn.names.pick("flag")
    op = ["<", ">", "<=", ">="][int(fn.rng.integers(4))]
    fn.line(f"var {flag}: bool = {name} {op} {fn.lit(2, 20)};")


def _config_var(fn):
    name = fn.names.pick("config")
    fn.line(f"var {name}: int = {fn.lit(2, 20)};")
    return name


# --- templates ------------------------------------------------------------------

def t_pipeline(names, rng, fname):
    """A chain of carrier assignments; each stage consumes the previous
    carrier, one-shot config variables are consumed in comparisons, and
    string pads stretch the distances."""
    seed = names.pick("seed")
    tag = names.pick("text")
    fn = _Fn(names, rng, fname, [(seed, "int"), (tag, "string")], "int")
    fn.pad_head = tag
    stages = int(rng.integers(3, 6))
    ops = ["+", "-", "*"]
    prev = None
    for i in range(stages):
        if rng.random() < 0.6:
            cfg = _config_var(fn)
            fn.pad(int(rng.integers(0, 2)))
            _consume_config(fn, cfg)
        cur = names.pick("carrier")
        src = prev if prev else seed
        op = ops[int(rng.integers(3))]
        fn.line(f"var {cur}: int = {src} {op} {fn.lit()};")
        fn.pad(int(rng.integers(0, 3)))
        prev = cur
    fn.line(f"return {prev};")
    return [fn]


def t_accumulator(names, rng, fname):
    """Counting loop with a self-referential accumulator."""
    limit = names.pick("config")
    tag = names.pick("text")
    fn = _Fn(names, rng, fname, [(limit, "int"), (tag, "string")], "int")
    fn.pad_head = tag
    step = names.pick("step")
    fn.line(f"var {step}: int = {fn.lit(1, 5)};")
    acc = names.pick("acc")
    fn.line(f"var {acc}: int = 0;")
    idx = names.pick("counter")
    fn.line(f"var {idx}: int = 0;")
    fn.pad(int(rng.integers(1, 4)))
    fn.line(f"while ({idx} < {limit}) {{")
    fn.line(f"    {acc} = {acc} + {step};")
    fn.line(f"    {idx} = {idx} + 1;")
    fn.line("}")
    fn.pad(int(rng.integers(0, 3)))
    cur = names.pick("carrier")
    fn.line(f"var {cur}: int = {acc} * {fn.lit(1, 4)};")
    fn.line(f"return {cur};")
    return [fn]


def t_guarded(names, rng, fname):
    """Guard-then-use: the guarded body reads the tested variable."""
    num = names.pick("seed")
    den = names.pick("guard")
    tag = names.pick("text")
    fn = _Fn(names, rng, fname, [(num, "int"), (den, "int"), (tag, "string")],
             "int")
    fn.pad_head = tag
    out = names.pick("carrier")
    fn.line(f"var {out}: int = {fn.lit(1, 5)};")
    fn.pad(int(rng.integers(1, 3)))
    if rng.random() < 0.5:
        fn.line(f"if ({den} != 0) {{")
        fn.line(f"    {out} = {num} / {den};")
        fn.line("}")
    else:
        fn.line(f"if ({den} > {fn.lit(1, 5)}) {{")
        fn.line(f"    {out} = {num} / {den};")
        fn.line("} else {")
        fn.line(f"    {out} = {num} + {fn.lit(1, 5)};")
        fn.line("}")
    fn.pad(int(rng.integers(1, 3)))
    cur = names.pick("carrier")
    fn.line(f"var {cur}: int = {out} + {fn.lit()};")
    fn.line(f"return {cur};")
    return [fn]


def t_helper_call(names, rng, fname):
    """An in-file helper plus a caller that passes its two fresh carriers
    in the helper's parameter order (FormalArgName signal)."""
    helper_name = names.pick("helper")
    ha = names.pick("seed")
    hb = names.pick("step")
    helper = _Fn(names, rng, helper_name, [(ha, "int"), (hb, "int")], "int")
    op = ["+", "-", "*"][int(rng.integers(3))]
    hout = names.pick("carrier")
    helper.line(f"var {hout}: int = {ha} {op} {hb};")
    helper.line(f"return {hout};")

    seed = names.pick("seed")
    tag = names.pick("text")
    caller = _Fn(names, rng, fname, [(seed, "int"), (tag, "string")], "int")
    caller.pad_head = tag
    first = names.pick("carrier")
    caller.line(f"var {first}: int = {seed} + {caller.lit()};")
    caller.pad(int(rng.integers(1, 3)))
    second = names.pick("step")
    caller.line(f"var {second}: int = {caller.lit(2, 9)};")
    caller.pad(int(rng.integers(1, 3)))
    got = names.pick("carrier")
    caller.line(f"var {got}: int = {helper_name}({first}, {second});")
    caller.line(f"return {got};")
    return [helper, caller]


def t_passthrough(names, rng, fname, type_info):
    """Custom-typed values assigned up the type lattice."""
    _, sup, sub = type_info
    a = names.pick("sub")
    b = names.pick("sub")
    pick = names.pick("flag")
    tag = names.pick("text")
    fn = _Fn(names, rng, fname,
             [(a, sub), (b, sub), (pick, "bool"), (tag, "string")], sup)
    fn.pad_head = tag
    chosen = names.pick("shape")
    fn.line(f"var {chosen}: {sup} = {a};")
    fn.pad(int(rng.integers(1, 3)))
    fn.line(f"if ({pick}) {{")
    fn.line(f"    {chosen} = {b};")
    fn.line("}")
    fn.pad(int(rng.integers(0, 2)))
    fn.line(f"return {chosen};")
    return [fn]


def t_sections(names, rng, fname):
    """Per-variable guarded sections: each section value is range-checked
    in its own guard and folded into the running output inside that guard's
    body; interleaved "floater" values are folded in by identical-looking
    top-level statements but never tested. Pads keep every test, use, and
    block delimiter outside one another's token neighbourhoods, so a body
    use and a floater use are locally indistinguishable and which value a
    guard tests is carried by the guard/dataflow structure alone."""
    tag = names.pick("text")
    fn = _Fn(names, rng, fname, [(tag, "string")], "int")
    fn.pad_head = tag
    secs = [names.pick("carrier") for _ in range(2)]
    floats = [names.pick("config") for _ in range(2)]
    for v in secs + floats:
        fn.line(f"var {v}: int = {fn.lit(1, 9)};")
        fn.pad(2)
    out = names.pick("acc")
    fn.line(f"var {out}: int = 0;")
    for s, f in zip(secs, floats):
        fn.pad(int(rng.integers(4, 6)))
        fn.line(f"if ({s} > {fn.lit(1, 5)}) {{")
        fn.pad(4, indent="    ")
        fn.line(f"    {out} = {out} + {s};")
        fn.pad(4, indent="    ")
        fn.line("}")
        fn.pad(int(rng.integers(4, 6)))
        fn.line(f"{out} = {out} + {f};")
    fn.pad(4)
    expr = " + ".join([out] + secs + floats)
    fn.line(f"return {expr};")
    return [fn]


TEMPLATES = {
    "pipeline": t_pipeline,
    "sections": t_sections,
    "accumulator": t_accumulator,
    "guarded": t_guarded,
    "helper_call": t_helper_call,
    "passthrough": t_passthrough,
}


# --- corpus assembly -------------------------------------------------------------

def _generate_file(config, rng, file_id):
    pools = NAME_POOLS[config.profile]
    type_info = TYPE_DECLS[config.profile]
    weights = config.weights()
    unknown = set(weights) - set(TEMPLATES)
    if unknown:
        raise GenerationError(f"unknown templates: {sorted(unknown)}")
    kinds = sorted(weights)
    probs = np.array([weights[k] for k in kinds], dtype=float)
    probs /= probs.sum()
    names = _Names(pools, rng)
    fns = []
    needs_types = False
    fn_names = set()
    for _ in range(config.functions_per_file):
        kind = kinds[int(rng.choice(len(kinds), p=probs))]
        fname = names.pick("fn")
        while fname in fn_names:
            fname = names.pick("fn")
        fn_names.add(fname)
        if kind == "passthrough":
            needs_types = True
            fns.extend(t_passthrough(names, rng, fname, type_info))
        else:
            fns.extend(TEMPLATES[kind](names, rng, fname))
    header = type_info[0] if needs_types else ""
    source = header + "\n".join(f.render() for f in fns) + "\n"
    try:
        analyze(source, file_id)
    except Exception as exc:
        raise GenerationError(f"{file_id}: {exc}\n{source}") from exc
    return source


def generate_corpus(config):
    """Returns {(project_id, file_name): source}, deterministic in config."""
    rng = np.random.default_rng(config.seed)
    out = {}
    for p in range(config.projects):
        project = f"{config.profile}_proj{p:02d}"
        for f in range(config.files_per_project):
            file_name = f"file{f:02d}{SOURCE_EXTENSION}"
            file_id = f"{project}/{file_name}"
            out[(project, file_name)] = _generate_file(config, rng, file_id)
    return out


def write_corpus(config, out_dir):
    """Write the project tree plus the config used; returns file paths."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "corpus_config.json"), "w") as f:
        f.write(config.to_json() + "\n")
    paths = []
    for (project, file_name), source in generate_corpus(config).items():
        pdir = os.path.join(out_dir, project)
        os.makedirs(pdir, exist_ok=True)
        path = os.path.join(pdir, file_name)
        with open(path, "w") as f:
            f.write(source)
        paths.append(path)
    return paths
