from __future__ import annotations

from pathlib import Path

import pytest

from copyprop import Binary, Block, Branch, Const, Copy, Nop, Program, Statement, Var, parse_program

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> Program:
    return parse_program((FIXTURES / name).read_text())


@pytest.fixture(scope="session")
def fig1() -> Program:
    return load_fixture("fig1.tac")


@pytest.fixture(scope="session")
def fig2() -> Program:
    return load_fixture("fig2.tac")


def straight_line(*stmts: Statement) -> Program:
    """entry, one block per statement, exit; single-successor spine."""
    n = len(stmts)
    blocks = {"B0": Block("B0", Nop(), ("B1",))}
    for i, stmt in enumerate(stmts, start=1):
        blocks[f"B{i}"] = Block(f"B{i}", stmt, (f"B{i + 1}",))
    blocks[f"B{n + 1}"] = Block(f"B{n + 1}", Nop(), ())
    return Program(blocks, "B0", f"B{n + 1}")


def copy_chain(n: int) -> tuple[Program, str]:
    """x1 = x0; ...; xn = x(n-1); u = xn + 0. Returns (program, use label)."""
    stmts: list[Statement] = [Copy(f"x{i}", Var(f"x{i - 1}")) for i in range(1, n + 1)]
    stmts.append(Binary("u", "+", Var(f"x{n}"), Const(0)))
    return straight_line(*stmts), f"B{n + 1}"


def looped_counter() -> Program:
    """x = 0, then a loop body x = x + 1 guarded by branch p."""
    blocks = {
        "B0": Block("B0", Nop(), ("B1",)),
        "B1": Block("B1", Copy("x", Const(0)), ("B2",)),
        "B2": Block("B2", Binary("x", "+", Var("x"), Const(1)), ("B3",)),
        "B3": Block("B3", Branch(Var("p")), ("B2", "B4")),
        "B4": Block("B4", Nop(), ()),
    }
    return Program(blocks, "B0", "B4")
