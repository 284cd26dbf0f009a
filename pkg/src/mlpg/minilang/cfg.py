"""Statement-level control-flow graphs for MiniLang functions.

Blocks hold "units": ("stmt", node) for straight-line statements and
("cond", expr_node) for if/while conditions. Structured constructs
produce the usual shapes: while gets a body->cond back edge, if/else
gets a merge block.
"""

from dataclasses import dataclass, field


@dataclass
class Block:
    block_id: int
    units: list = field(default_factory=list)
    succs: list = field(default_factory=list)


@dataclass
class Cfg:
    fn_name: str
    blocks: list
    entry: int
    exit: int
    back_edges: list = field(default_factory=list)   # (src, dst) block pairs

    def reachable(self, src, dst):
        seen = set()
        stack = [src]
        while stack:
            b = stack.pop()
            if b == dst:
                return True
            if b in seen:
                continue
            seen.add(b)
            stack.extend(self.blocks[b].succs)
        return False

    def back_edge_count(self):
        return len(self.back_edges)


class _Builder:
    def __init__(self, fn_name):
        self.fn_name = fn_name
        self.blocks = []
        self.back_edges = []

    def new_block(self):
        b = Block(len(self.blocks))
        self.blocks.append(b)
        return b

    def link(self, src, dst):
        if dst.block_id not in src.succs:
            src.succs.append(dst.block_id)

    def build(self, body):
        entry = self.new_block()
        exit_block = self.new_block()
        self.exit = exit_block
        last = self.stmts(body, entry)
        if last is not None:
            self.link(last, exit_block)
        return self._prune(entry.block_id, exit_block.block_id)

    def _prune(self, entry_id, exit_id):
        """Drop blocks unreachable from entry (e.g. merge blocks after
        branches that both return) and renumber densely."""
        seen = set()
        stack = [entry_id]
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(self.blocks[b].succs)
        seen.add(exit_id)
        keep = sorted(seen)
        remap = {old: new for new, old in enumerate(keep)}
        blocks = []
        for old in keep:
            b = self.blocks[old]
            blocks.append(Block(remap[old], b.units,
                                [remap[s] for s in b.succs if s in remap]))
        back = [(remap[u], remap[v]) for u, v in self.back_edges
                if u in remap and v in remap]
        return Cfg(self.fn_name, blocks, remap[entry_id], remap[exit_id], back)

    def stmts(self, block_node, current):
        for c in block_node.children:
            if c.is_leaf:
                continue
            current = self.stmt(c, current)
            if current is None:
                break
        return current

    def stmt(self, node, current):
        """Append `node` after `current`; returns the fall-through block or
        None when control cannot continue (return)."""
        sym = node.symbol
        if sym == "Block":
            return self.stmts(node, current)
        if sym in ("VariableDeclaration", "AssignmentStatement",
                   "ExpressionStatement"):
            current.units.append(("stmt", node))
            return current
        if sym == "ReturnStatement":
            current.units.append(("stmt", node))
            self.link(current, self.exit)
            return None
        if sym == "IfStatement":
            cond = self.new_block()
            cond.units.append(("cond", node.children[2]))
            self.link(current, cond)
            merge = self.new_block()
            then_entry = self.new_block()
            self.link(cond, then_entry)
            then_exit = self.stmt(node.children[4], then_entry)
            if then_exit is not None:
                self.link(then_exit, merge)
            if len(node.children) > 5:
                else_entry = self.new_block()
                self.link(cond, else_entry)
                else_exit = self.stmt(node.children[6], else_entry)
                if else_exit is not None:
                    self.link(else_exit, merge)
            else:
                self.link(cond, merge)
            return merge
        if sym == "WhileStatement":
            cond = self.new_block()
            cond.units.append(("cond", node.children[2]))
            self.link(current, cond)
            body_entry = self.new_block()
            post = self.new_block()
            self.link(cond, body_entry)
            self.link(cond, post)
            body_exit = self.stmt(node.children[4], body_entry)
            if body_exit is not None:
                self.link(body_exit, cond)
                self.back_edges.append((body_exit.block_id, cond.block_id))
            return post
        raise ValueError(f"unexpected statement {sym}")


def build_cfg(prog, fn_name):
    node = prog.fn_nodes[fn_name]
    body = node.children[-1]
    return _Builder(fn_name).build(body)
