"""Independent checking machinery.

Everything here recomputes results by other means than the worklist solver:
meet-over-paths by brute-force path enumeration, a round-robin solver, a
concrete interpreter with a fuel budget, a random program generator, and a
differential check that runs original and transformed programs side by side
while replaying availability facts against live values.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Callable, Iterable

from .analysis import run_acs, transfer
from .dataflow import (
    EMPTY,
    TOP,
    AnalysisResult,
    FactSet,
    predecessors,
    reachable_blocks,
)
from .ir import (
    Binary,
    Block,
    Branch,
    Const,
    Copy,
    Nop,
    Operand,
    Program,
    Statement,
    Var,
    format_operand,
    natural_key,
    validate,
)
from .propagate import transform, transform_to_fixpoint

INT64_MASK = (1 << 64) - 1
Env = dict[str, int]


class CyclicGraphError(ValueError):
    pass


def _assert_acyclic(prog: Program) -> None:
    colors: dict[str, int] = {}
    for root in prog.blocks:
        if colors.get(root):
            continue
        colors[root] = 1
        stack = [(root, iter(prog.blocks[root].succs))]
        while stack:
            label, succs = stack[-1]
            advanced = False
            for succ in succs:
                state = colors.get(succ, 0)
                if state == 1:
                    raise CyclicGraphError("cyclic-cfg")
                if state == 0:
                    colors[succ] = 1
                    stack.append((succ, iter(prog.blocks[succ].succs)))
                    advanced = True
                    break
            if not advanced:
                colors[label] = 2
                stack.pop()


def enumerate_paths(prog: Program, target: str) -> list[tuple[str, ...]]:
    """All entry-to-target block sequences; only defined on acyclic graphs."""
    _assert_acyclic(prog)
    paths: list[tuple[str, ...]] = []
    path: list[str] = []

    def walk(label: str) -> None:
        path.append(label)
        if label == target:
            paths.append(tuple(path))
        else:
            for succ in prog.blocks[label].succs:
                walk(succ)
        path.pop()

    walk(prog.entry)
    return paths


def mop_in(prog: Program, target: str) -> FactSet:
    """Meet over all paths of the transfer composition, excluding the target's
    own statement. Ground truth for the solver on acyclic graphs."""
    paths = enumerate_paths(prog, target)
    if not paths:
        raise ValueError(f"no path from entry to {target}")
    acc: FactSet | None = None
    for path in paths:
        facts = EMPTY
        for label in path[:-1]:
            facts = transfer(prog.blocks[label].stmt, facts)
        acc = facts if acc is None else acc.meet(facts)
    return acc


def solve_round_robin(prog: Program) -> AnalysisResult:
    """Sweep the reachable blocks in label order until nothing changes.

    Deliberately shares no iteration logic with the worklist solver; the two
    must land on the same fixpoint.
    """
    reach = reachable_blocks(prog)
    preds = predecessors(prog)
    labels = sorted(reach, key=natural_key)
    ins = {label: TOP for label in prog.blocks}
    outs = {label: TOP for label in prog.blocks}
    ins[prog.entry] = EMPTY
    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        for label in labels:
            if label == prog.entry:
                in_f = EMPTY
            else:
                in_f = TOP
                for pred in preds[label]:
                    in_f = in_f.meet(outs[pred])
            out_f = transfer(prog.blocks[label].stmt, in_f)
            if in_f != ins[label] or out_f != outs[label]:
                ins[label] = in_f
                outs[label] = out_f
                changed = True
    return AnalysisResult(ins, outs, reach, sweeps)


@dataclass(frozen=True)
class Trace:
    labels: tuple[str, ...]
    envs: tuple[Env, ...] | None
    final_env: Env
    status: str  # "exit" | "fuel-exhausted" | "runtime-error"
    error: str | None = None

    def steps(self) -> list[tuple[str, Env]]:
        if self.envs is None:
            raise ValueError("environments were not recorded")
        return list(zip(self.labels, self.envs))


class _Stop(Exception):
    def __init__(self, code: str):
        self.code = code


def _wrap(value: int) -> int:
    return ((value + (1 << 63)) & INT64_MASK) - (1 << 63)


def _value(op: Operand, env: Env) -> int:
    if isinstance(op, Const):
        return op.value
    try:
        return env[op.name]
    except KeyError:
        raise _Stop(f"unbound-variable {op.name}") from None


def _apply(op: str, a: int, b: int) -> int:
    if op == "+":
        return _wrap(a + b)
    if op == "-":
        return _wrap(a - b)
    if op == "*":
        return _wrap(a * b)
    if b == 0:
        raise _Stop("div-by-zero")
    quot = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        quot = -quot
    return _wrap(quot)


StepHook = Callable[[str, Env], None]


def interpret(
    prog: Program,
    env0: Env,
    fuel: int,
    *,
    on_step: StepHook | None = None,
    record_envs: bool = True,
) -> Trace:
    """Run the program concretely, at most `fuel` block executions.

    Arithmetic wraps around 64 signed bits and division truncates toward
    zero. A nonzero branch condition takes the first successor. Division by
    zero and reads of unbound variables end the run as a runtime error.
    `on_step` sees each block label with the environment before its
    statement runs.
    """
    env = dict(env0)
    labels: list[str] = []
    envs: list[Env] | None = [] if record_envs else None
    status = "fuel-exhausted"
    error = None
    label = prog.entry
    for _ in range(fuel):
        block = prog.blocks[label]
        stmt = block.stmt
        if on_step is not None:
            on_step(label, env)
        try:
            if isinstance(stmt, Copy):
                env[stmt.dst] = _value(stmt.src, env)
                nxt = block.succs[0]
            elif isinstance(stmt, Binary):
                env[stmt.dst] = _apply(stmt.op, _value(stmt.lhs, env), _value(stmt.rhs, env))
                nxt = block.succs[0]
            elif isinstance(stmt, Branch):
                nxt = block.succs[0] if _value(stmt.cond, env) != 0 else block.succs[1]
            else:
                nxt = block.succs[0] if block.succs else ""
        except _Stop as stop:
            status, error = "runtime-error", stop.code
            break
        labels.append(label)
        if envs is not None:
            envs.append(dict(env))
        if label == prog.exit:
            status = "exit"
            break
        label = nxt
    return Trace(tuple(labels), tuple(envs) if envs is not None else None, dict(env), status, error)


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    min_blocks: int = 8
    max_blocks: int = 16
    num_vars: int = 4
    const_min: int = -8
    const_max: int = 8
    branch_prob: float = 0.25
    loop_prob: float = 0.1
    copy_ratio: float = 0.5
    allow_div: bool = False
    const_copy_only: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.num_vars <= 26:
            raise ValueError("num_vars must be in 1..26")
        # entry + exit + one init block per variable must fit
        if self.min_blocks < self.num_vars + 3:
            raise ValueError("min_blocks too small for the variable pool")
        if self.max_blocks < self.min_blocks:
            raise ValueError("max_blocks below min_blocks")
        if self.const_min > self.const_max:
            raise ValueError("bad constant range")
        for p in (self.branch_prob, self.loop_prob, self.copy_ratio):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must be in [0, 1]")


def random_program(params: GenParams) -> Program:
    """Deterministic random program for the given params.

    Always valid: a nop entry, one constant assignment per pool variable so
    nothing is ever read unbound, a body of copies, binaries and branches,
    and a nop exit. Back edges only appear with loop_prob; with it at zero
    every edge goes forward, so the graph is acyclic.
    """
    rng = random.Random(params.seed)
    pool = list(string.ascii_lowercase[: params.num_vars])
    total = rng.randint(params.min_blocks, params.max_blocks)
    labels = [f"B{i}" for i in range(total)]
    ops = ["+", "-", "*"] + (["/"] if params.allow_div else [])
    blocks: dict[str, Block] = {}

    def operand() -> Operand:
        if rng.random() < 0.7:
            return Var(rng.choice(pool))
        return Const(rng.randint(params.const_min, params.const_max))

    blocks[labels[0]] = Block(labels[0], Nop(), (labels[1],))
    for i, name in enumerate(pool, start=1):
        const = Const(rng.randint(params.const_min, params.const_max))
        blocks[labels[i]] = Block(labels[i], Copy(name, const), (labels[i + 1],))
    for i in range(len(pool) + 1, total - 1):
        label = labels[i]
        if rng.random() < params.branch_prob:
            if rng.random() < params.loop_prob:
                other = labels[rng.randint(1, i)]
            else:
                other = labels[rng.randint(i + 1, total - 1)]
            blocks[label] = Block(label, Branch(Var(rng.choice(pool))), (labels[i + 1], other))
            continue
        if rng.random() < params.copy_ratio:
            if params.const_copy_only or rng.random() < 0.4:
                src: Operand = Const(rng.randint(params.const_min, params.const_max))
            else:
                src = Var(rng.choice(pool))
            stmt: Statement = Copy(rng.choice(pool), src)
        else:
            stmt = Binary(rng.choice(pool), rng.choice(ops), operand(), operand())
        blocks[label] = Block(label, stmt, (labels[i + 1],))
    blocks[labels[-1]] = Block(labels[-1], Nop(), ())
    prog = Program(blocks, labels[0], labels[-1])
    diags = validate(prog)
    if diags:  # a generator bug, not a caller error
        raise AssertionError(f"generated invalid program: {diags}")
    return prog


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str | None = None
    env: Env | None = None
    step: int | None = None


def _pairs_by_label(result: AnalysisResult) -> dict[str, tuple[tuple[str, Operand], ...]]:
    table = {}
    for label in result.reachable:
        facts = result.in_sets[label]
        if not facts.is_top and facts.pairs:
            table[label] = tuple((p.dst, p.src) for p in facts.pairs)
    return table


def fact_soundness_violation(
    prog: Program, result: AnalysisResult, env0: Env, fuel: int
) -> tuple[str, int] | None:
    """Replay one run, checking every available pair against live values.

    At each executed block, every (x, e) in its IN set must satisfy
    value(x) == value(e) in the environment before the statement runs.
    Returns (reason, step index) for the first violation, or None.
    """
    table = _pairs_by_label(result)
    found: list[tuple[str, int]] = []
    counter = [0]

    def check(label: str, env: Env) -> None:
        step = counter[0]
        counter[0] += 1
        if found:
            return
        for dst, src in table.get(label, ()):
            have = env.get(dst)
            want = src.value if isinstance(src, Const) else env.get(src.name)
            if have is None or want is None or have != want:
                found.append(
                    (f"fact ({dst}, {format_operand(src)}) broken at {label}: {have} vs {want}", step)
                )
                return

    interpret(prog, env0, fuel, on_step=check, record_envs=False)
    return found[0] if found else None


def differential_check(
    prog: Program,
    envs: Iterable[Env],
    fuel: int,
    *,
    rounds: int = 1,
    check_facts: bool = True,
) -> Verdict:
    """Compare original and transformed runs over the given inputs.

    Equivalence means the same termination status, the same block sequence
    (hence the same branch decisions), and the same final environment. With
    check_facts the original run is also replayed against the analysis.
    """
    result = run_acs(prog)
    if rounds <= 1:
        transformed, _ = transform(prog, result)
    else:
        transformed, _ = transform_to_fixpoint(prog, rounds)
    for env0 in envs:
        t1 = interpret(prog, env0, fuel, record_envs=False)
        t2 = interpret(transformed, env0, fuel, record_envs=False)
        if t1.status != t2.status or t1.error != t2.error:
            return Verdict(
                False,
                f"status mismatch: {t1.status}/{t1.error} vs {t2.status}/{t2.error}",
                env0,
            )
        if t1.labels != t2.labels:
            step = next(
                (i for i, (a, b) in enumerate(zip(t1.labels, t2.labels)) if a != b),
                min(len(t1.labels), len(t2.labels)),
            )
            return Verdict(False, f"trace divergence at step {step}", env0, step)
        if t1.final_env != t2.final_env:
            keys = set(t1.final_env) | set(t2.final_env)
            bad = sorted(k for k in keys if t1.final_env.get(k) != t2.final_env.get(k))[0]
            return Verdict(
                False,
                f"final value of {bad} differs: {t1.final_env.get(bad)} vs {t2.final_env.get(bad)}",
                env0,
            )
        if check_facts:
            violation = fact_soundness_violation(prog, result, env0, fuel)
            if violation is not None:
                return Verdict(False, violation[0], env0, violation[1])
    return Verdict(True)
