"""Chain-resolving propagation.

Each variable use is replaced by the endpoint of the unique pair chain that
starts at it: the first constant encountered, or the last variable with a
pair. Whole chains therefore collapse in one pass instead of one link per
pass. Only used operands move; assignment targets never change, so the
program keeps its shape.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import run_acs
from .dataflow import AnalysisResult, FactSet
from .ir import Binary, Block, Branch, Const, Copy, Operand, Program, Statement, Var, sorted_labels

SLOT_ORDER = ("copy-src", "binary-lhs", "binary-rhs", "branch-cond")


@dataclass(frozen=True)
class Replacement:
    block: str
    position: str
    original: str
    replacement: Operand
    chain_length: int


@dataclass(frozen=True)
class ReplacementReport:
    replacements: tuple[Replacement, ...]
    pass_count: int
    converged: bool = True


def resolve_chain(var: str, facts: FactSet) -> tuple[Operand, int]:
    """Follow pairs from var; return the endpoint and how many pairs were used.

    Stops at the first constant source, or at the first variable without a
    pair. Acyclicity of the fact set bounds the walk by its size.
    """
    name = var
    hops = 0
    while True:
        src = facts.lookup(name)
        if src is None:
            return Var(name), hops
        hops += 1
        if isinstance(src, Const):
            return src, hops
        name = src.name


def resolve(var: str, facts: FactSet) -> Operand:
    return resolve_chain(var, facts)[0]


def rewrite_statement(
    stmt: Statement, facts: FactSet, block: str = ""
) -> tuple[Statement, list[Replacement]]:
    """Rewrite every variable use in one statement against one fact set."""
    if facts.is_top:
        return stmt, []
    replacements: list[Replacement] = []

    def slot(operand: Operand, position: str) -> Operand:
        if not isinstance(operand, Var):
            return operand
        target, hops = resolve_chain(operand.name, facts)
        if hops == 0:
            return operand
        replacements.append(Replacement(block, position, operand.name, target, hops))
        return target

    if isinstance(stmt, Copy):
        stmt = Copy(stmt.dst, slot(stmt.src, "copy-src"))
    elif isinstance(stmt, Binary):
        stmt = Binary(stmt.dst, stmt.op, slot(stmt.lhs, "binary-lhs"), slot(stmt.rhs, "binary-rhs"))
    elif isinstance(stmt, Branch):
        stmt = Branch(slot(stmt.cond, "branch-cond"))
    return stmt, replacements


def transform(prog: Program, result: AnalysisResult) -> tuple[Program, ReplacementReport]:
    """One rewrite pass over the reachable blocks; unreachable blocks are kept as is."""
    new_blocks: dict[str, Block] = {}
    replacements: list[Replacement] = []
    for label in sorted_labels(prog):
        block = prog.blocks[label]
        facts = result.in_sets[label]
        if label in result.reachable and not facts.is_top:
            stmt, reps = rewrite_statement(block.stmt, facts, block=label)
            new_blocks[label] = Block(label, stmt, block.succs)
            replacements.extend(reps)
        else:
            new_blocks[label] = block
    report = ReplacementReport(tuple(replacements), pass_count=1)
    return Program(new_blocks, prog.entry, prog.exit), report


def transform_to_fixpoint(prog: Program, max_rounds: int) -> tuple[Program, ReplacementReport]:
    """Reanalyze and rewrite until a round changes nothing or max_rounds is hit.

    A rewritten copy can introduce pairs a later round resolves further, so a
    single pass is not always idempotent. Non-convergence inside max_rounds
    is reported, never raised.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    replacements: list[Replacement] = []
    rounds = 0
    converged = False
    while rounds < max_rounds:
        rounds += 1
        prog, report = transform(prog, run_acs(prog))
        replacements.extend(report.replacements)
        if not report.replacements:
            converged = True
            break
    return prog, ReplacementReport(tuple(replacements), rounds, converged)
