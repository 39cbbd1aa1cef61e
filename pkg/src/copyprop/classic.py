"""Single-definition copy propagation baseline.

This is the traditional rule for comparison runs: a use of t in a
computational statement (a binary operand or a branch condition) is replaced
by e when exactly one definition of t reaches the block, that definition is
the copy t = e, and the pair (t, e) is available at the block input, which
rules out a redefinition of e between the copy and the use. The replacement
is the copy's immediate source; chains are not followed, and copy sources
themselves are left to the chain-resolving pass, so a chain of n copies
needs n repetitions to feed through while the unified pass needs one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .analysis import run_acs
from .dataflow import CopyPair, predecessors, reachable_blocks
from .ir import (
    Binary,
    Block,
    Branch,
    Copy,
    Operand,
    Program,
    Var,
    defined_var,
    natural_key,
    sorted_labels,
)
from .propagate import Replacement, ReplacementReport


@dataclass(frozen=True)
class DefSite:
    block: str
    var: str


def reaching_definitions(prog: Program) -> dict[str, frozenset[DefSite]]:
    """Forward may-analysis: definition sites that can reach each reachable
    block's input. Joins take the union and the entry starts empty."""
    reach = reachable_blocks(prog)
    preds = predecessors(prog)
    gen: dict[str, frozenset[DefSite]] = {}
    for label in reach:
        d = defined_var(prog.blocks[label].stmt)
        gen[label] = frozenset({DefSite(label, d)}) if d is not None else frozenset()
    ins: dict[str, frozenset[DefSite]] = {label: frozenset() for label in reach}
    outs: dict[str, frozenset[DefSite]] = {label: frozenset() for label in reach}
    work = deque(sorted(reach, key=natural_key))
    queued = set(work)
    while work:
        label = work.popleft()
        queued.discard(label)
        in_f: frozenset[DefSite] = frozenset()
        for pred in preds[label]:
            if pred in reach:
                in_f |= outs[pred]
        d = defined_var(prog.blocks[label].stmt)
        out_f = in_f if d is None else frozenset(s for s in in_f if s.var != d)
        out_f |= gen[label]
        ins[label] = in_f
        if out_f != outs[label]:
            outs[label] = out_f
            for succ in prog.blocks[label].succs:
                if succ not in queued:
                    work.append(succ)
                    queued.add(succ)
    return ins


def classic_transform(prog: Program) -> tuple[Program, ReplacementReport]:
    """One pass of the baseline over the reachable blocks."""
    rd = reaching_definitions(prog)
    acs = run_acs(prog)
    new_blocks: dict[str, Block] = {}
    replacements: list[Replacement] = []
    for label in sorted_labels(prog):
        block = prog.blocks[label]
        if label not in acs.reachable:
            new_blocks[label] = block
            continue
        facts = acs.in_sets[label]
        sites = rd[label]

        def attempt(operand: Operand, position: str) -> Operand:
            if not isinstance(operand, Var):
                return operand
            name = operand.name
            own = [s for s in sites if s.var == name]
            if len(own) != 1:
                return operand
            def_stmt = prog.blocks[own[0].block].stmt
            if not isinstance(def_stmt, Copy):
                return operand
            src = def_stmt.src
            if src == operand:
                return operand
            if CopyPair(name, src) not in facts:
                return operand
            replacements.append(Replacement(label, position, name, src, 1))
            return src

        stmt = block.stmt
        if isinstance(stmt, Binary):
            stmt = Binary(stmt.dst, stmt.op, attempt(stmt.lhs, "binary-lhs"), attempt(stmt.rhs, "binary-rhs"))
        elif isinstance(stmt, Branch):
            stmt = Branch(attempt(stmt.cond, "branch-cond"))
        new_blocks[label] = Block(label, stmt, block.succs)
    return Program(new_blocks, prog.entry, prog.exit), ReplacementReport(tuple(replacements), pass_count=1)


def classic_to_fixpoint(prog: Program, max_rounds: int) -> tuple[Program, ReplacementReport]:
    """Repeat the baseline with reanalysis until a round changes nothing."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    replacements: list[Replacement] = []
    rounds = 0
    converged = False
    while rounds < max_rounds:
        rounds += 1
        prog, report = classic_transform(prog)
        replacements.extend(report.replacements)
        if not report.replacements:
            converged = True
            break
    return prog, ReplacementReport(tuple(replacements), rounds, converged)
