"""Last-use / last-write may-sets via a forward union fixpoint over the CFG.

At every variable occurrence v of variable X, the analysis reports the set
of occurrences of X that can immediately precede v on some execution path
(LastUse targets) and likewise the set of possible last writes (LastWrite
targets). Loop back edges make targets that appear later in source
reachable. Declaration tokens (params, var decls) count as writes.
"""


def unit_occurrences(prog, unit):
    """(token_idx, var_id, is_write) triples of one CFG unit in evaluation
    order: reads in leaf order, then writes (rhs before lhs)."""
    _, node = unit
    reads, writes = [], []
    for leaf in node.leaves():
        i = prog.leaf_pos(leaf)
        info = prog.var_of_token.get(i)
        if info is None:
            continue
        if prog.is_write[i]:
            writes.append((i, info.var_id, True))
        else:
            reads.append((i, info.var_id, False))
    return reads + writes


def function_occurrence_lists(prog, cfg):
    """Per-block occurrence lists; parameter declaration tokens are
    prepended to the entry block."""
    sig = prog.functions[cfg.fn_name]
    per_block = []
    for b in cfg.blocks:
        occs = []
        for unit in b.units:
            occs.extend(unit_occurrences(prog, unit))
        per_block.append(occs)
    entry_prefix = [(t, prog.var_of_token[t].var_id, True) for t in sig.param_tokens]
    per_block[cfg.entry] = entry_prefix + per_block[cfg.entry]
    return per_block


def _apply_override(occs, override):
    if not override:
        return occs
    return [(t, override.get(t, v), w) for t, v, w in occs]


def _transfer(state, occs):
    for tok, var, is_write in occs:
        last_occ, last_write = state.get(var, (frozenset(), frozenset()))
        new_occ = frozenset([tok])
        new_write = frozenset([tok]) if is_write else last_write
        state[var] = (new_occ, new_write)
    return state


def _merge(into, other):
    changed = False
    for var, (occ, wr) in other.items():
        cur_occ, cur_wr = into.get(var, (frozenset(), frozenset()))
        new_occ, new_wr = cur_occ | occ, cur_wr | wr
        if new_occ != cur_occ or new_wr != cur_wr:
            into[var] = (new_occ, new_wr)
            changed = True
    return changed


def compute_may_sets(prog, cfg, override=None):
    """Returns (last_use, last_write): token idx -> frozenset of token idxs.

    `override` remaps occurrence token -> var_id; used to re-run the
    analysis with a candidate variable speculatively placed at a slot.
    """
    per_block = [_apply_override(occs, override)
                 for occs in function_occurrence_lists(prog, cfg)]
    n = len(cfg.blocks)
    in_states = [dict() for _ in range(n)]
    work = [cfg.entry]
    seen_entry = {cfg.entry}
    while work:
        b = work.pop(0)
        state = {v: pair for v, pair in in_states[b].items()}
        _transfer(state, per_block[b])
        for s in cfg.blocks[b].succs:
            if _merge(in_states[s], state) or s not in seen_entry:
                seen_entry.add(s)
                if s not in work:
                    work.append(s)
    last_use, last_write = {}, {}
    for b in range(n):
        state = {v: pair for v, pair in in_states[b].items()}
        for tok, var, is_write in per_block[b]:
            occ, wr = state.get(var, (frozenset(), frozenset()))
            last_use[tok] = occ
            last_write[tok] = wr
            _transfer(state, [(tok, var, is_write)])
    return last_use, last_write


def lexical_use_chain(prog, fn_name, override=None):
    """token idx -> previous lexical occurrence token of the same variable."""
    prev = {}
    last_seen = {}
    for tok in prog.occurrences(fn_name):
        var = prog.var_of_token[tok].var_id
        if override and tok in override:
            var = override[tok]
        if var in last_seen:
            prev[tok] = last_seen[var]
        last_seen[var] = tok
    return prev
