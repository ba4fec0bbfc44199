"""Pure-Python byte-stream stepping kernel.

Mirrors the compiled kernel in ``_simkernel.pyx`` exactly: same outputs,
same ordering, same operation counting.  The program is a triple
``(step, init, always)`` where ``step[state]`` maps a byte value to the
tuple of epsilon-closed successor states, and ``init`` / ``always`` are
sorted tuples of the closed initial and every-cycle activation sets.
"""

from __future__ import annotations


def build_program(step: list[dict[int, tuple[int, ...]]],
                  init: tuple[int, ...], always: tuple[int, ...]):
    return (step, init, always)


def step_stream(program, data: bytes):
    """Return (per-cycle sorted active tuples, operation count)."""
    step, init, always = program
    active = init
    out = []
    work = 0
    for byte in data:
        nxt: set[int] = set()
        for s in active:
            targets = step[s].get(byte)
            if targets:
                work += len(targets)
                nxt.update(targets)
        work += len(always)
        nxt.update(always)
        active = tuple(sorted(nxt))
        out.append(active)
    return out, work
