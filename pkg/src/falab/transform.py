"""Language-preserving automaton transformations and verification oracles.

Determinization, both minimization algorithms, the signature-merge NFA
optimization, component splitting, pattern merging, and two independent
checkers: exact language equivalence (product construction) and a
quadratic pair-marking minimality oracle that shares no code with the
minimizers.

Deterministic automata here are partial: a missing transition means
rejection, and the implicit dead state is never materialized or counted.
"""

from __future__ import annotations

from collections import deque

from .core import (Automaton, StartKind, SymbolClass, FULL_MASK,
                   is_deterministic)

DEFAULT_STATE_CAP = 1 << 20
ORACLE_STATE_LIMIT = 512


class CapExceededError(RuntimeError):
    """Determinization materialized more states than the configured cap."""

    def __init__(self, cap: int):
        super().__init__(
            f"determinization exceeded the state cap ({cap}); raise the cap "
            f"to proceed")
        self.cap = cap


# ---------------------------------------------------------------------------
# Shared helpers


def epsilon_closures(a: Automaton) -> list[frozenset[int]]:
    """Per-state epsilon closure (always includes the state itself)."""
    adj = a.epsilon_adjacency()
    closures: list[frozenset[int]] = [frozenset()] * a.state_count
    for s in range(a.state_count):
        seen = {s}
        stack = [s]
        while stack:
            for d in adj[stack.pop()]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        closures[s] = frozenset(seen)
    return closures


def close_over(closures: list[frozenset[int]], states) -> frozenset[int]:
    out: set[int] = set()
    for s in states:
        out |= closures[s]
    return frozenset(out)


def partition_masks(masks: list[int]) -> list[int]:
    """Coarsest partition of the byte alphabet refining every given mask.

    Returns disjoint nonempty masks ("atoms") covering the union of the
    inputs; every input mask is an exact union of atoms.
    """
    parts: list[int] = []
    covered = 0
    for mask in set(masks):
        new_parts = []
        for p in parts:
            inside = p & mask
            outside = p & ~mask
            if inside and outside:
                new_parts.append(inside)
                new_parts.append(outside)
            else:
                new_parts.append(p)
        fresh = mask & ~covered
        if fresh:
            new_parts.append(fresh)
        parts = new_parts
        covered |= mask
    return parts


def trim(a: Automaton) -> Automaton:
    """Drop states unreachable from any start; renumber preserving order."""
    adj = a.adjacency()
    eps = a.epsilon_adjacency()
    seen = [False] * a.state_count
    stack = [s for s in a.starts]
    for s in stack:
        seen[s] = True
    while stack:
        u = stack.pop()
        for _, d in adj[u]:
            if not seen[d]:
                seen[d] = True
                stack.append(d)
        for d in eps[u]:
            if not seen[d]:
                seen[d] = True
                stack.append(d)
    if all(seen):
        return a
    keep = [s for s in range(a.state_count) if seen[s]]
    newid = {old: new for new, old in enumerate(keep)}
    labels = None
    if a.component_labels is not None:
        labels = {newid[s]: l for s, l in a.component_labels.items() if seen[s]}
    return Automaton(
        state_count=len(keep),
        edges=tuple((newid[s], c, newid[d]) for s, c, d in a.edges
                    if seen[s] and seen[d]),
        epsilon_edges=tuple((newid[s], newid[d]) for s, d in a.epsilon_edges
                            if seen[s] and seen[d]),
        starts={newid[s]: k for s, k in a.starts.items()},
        accepts=frozenset(newid[s] for s in a.accepts if seen[s]),
        deterministic=a.deterministic,
        component_labels=labels,
    )


def lower_all_input(a: Automaton) -> Automaton:
    """Replace ALL_INPUT markings by an explicit self-looping start.

    A fresh START_OF_DATA state gets a full-alphabet self-loop and epsilon
    edges to every ALL_INPUT state.  The language (acceptance after the
    whole input) is unchanged; this makes unanchored semantics visible to
    the purely language-based algorithms.  No-op when no ALL_INPUT start
    exists.
    """
    all_input = [s for s, k in a.starts.items() if k is StartKind.ALL_INPUT]
    if not all_input:
        return a
    fresh = a.state_count
    starts = {s: k for s, k in a.starts.items() if k is not StartKind.ALL_INPUT}
    starts[fresh] = StartKind.START_OF_DATA
    return Automaton(
        state_count=a.state_count + 1,
        edges=a.edges + ((fresh, SymbolClass.full(), fresh),),
        epsilon_edges=a.epsilon_edges + tuple((fresh, s) for s in sorted(all_input)),
        starts=starts,
        accepts=a.accepts,
        component_labels=a.component_labels,
    )


# ---------------------------------------------------------------------------
# Epsilon removal


def remove_epsilon(a: Automaton) -> Automaton:
    """Equivalent epsilon-free automaton on the same state set.

    Every state inherits the outgoing symbol edges and the acceptance of
    its epsilon closure; start markings are untouched.  Parallel edges to
    the same target are unioned.  No states are added or removed.
    """
    if not a.epsilon_edges:
        return a
    closures = epsilon_closures(a)
    adj = a.adjacency()
    edges: list[tuple[int, SymbolClass, int]] = []
    accepts = set(a.accepts)
    for s in range(a.state_count):
        merged: dict[int, int] = {}
        for member in closures[s]:
            for cls, dst in adj[member]:
                merged[dst] = merged.get(dst, 0) | cls.mask
        for dst in sorted(merged):
            edges.append((s, SymbolClass(merged[dst]), dst))
        if closures[s] & a.accepts:
            accepts.add(s)
    return Automaton(
        state_count=a.state_count,
        edges=tuple(edges),
        starts=a.starts,
        accepts=frozenset(accepts),
        component_labels=a.component_labels,
    )


# ---------------------------------------------------------------------------
# Determinization (subset construction)


def determinize(a: Automaton, cap: int = DEFAULT_STATE_CAP) -> Automaton:
    """Subset construction.  Only reachable subset states materialize.

    ALL_INPUT starts are lowered first.  The empty subset (dead state) is
    never created: missing transitions mean rejection.  Each output state
    records its source subset in ``origins``.  Raises
    :class:`CapExceededError` when more than ``cap`` states materialize.
    """
    a = lower_all_input(a)
    closures = epsilon_closures(a)
    adj = a.adjacency()
    out_masks: list[list[tuple[int, int]]] = [[] for _ in range(a.state_count)]
    for s in range(a.state_count):
        for cls, dst in adj[s]:
            out_masks[s].append((cls.mask, dst))

    init = close_over(closures, (s for s, k in a.starts.items()
                                 if k is StartKind.START_OF_DATA))
    ids: dict[frozenset[int], int] = {init: 0}
    order: list[frozenset[int]] = [init]
    edges: list[tuple[int, SymbolClass, int]] = []
    queue = deque([init])
    while queue:
        subset = queue.popleft()
        sid = ids[subset]
        pairs = [pair for s in subset for pair in out_masks[s]]
        for atom in partition_masks([m for m, _ in pairs]):
            target = close_over(closures,
                                (d for m, d in pairs if m & atom))
            tid = ids.get(target)
            if tid is None:
                if len(ids) >= cap:
                    raise CapExceededError(cap)
                tid = len(ids)
                ids[target] = tid
                order.append(target)
                queue.append(target)
            edges.append((sid, SymbolClass(atom), tid))

    # merge atoms that lead to the same successor
    merged: dict[tuple[int, int], int] = {}
    for src, cls, dst in edges:
        merged[(src, dst)] = merged.get((src, dst), 0) | cls.mask
    final_edges = tuple(sorted(((s, SymbolClass(m), d)
                                for (s, d), m in merged.items()),
                               key=lambda e: (e[0], e[1].mask, e[2])))
    return Automaton(
        state_count=len(order),
        edges=final_edges,
        starts={0: StartKind.START_OF_DATA},
        accepts=frozenset(i for i, subset in enumerate(order)
                          if subset & a.accepts),
        deterministic=True,
        origins=tuple(order),
    )


def reverse(a: Automaton) -> Automaton:
    """Mirror-language automaton: flipped edges, starts and accepts swapped.

    ALL_INPUT starts are lowered first so the unanchored language is what
    gets mirrored.  The result may momentarily violate the "has a start"
    invariant when the input accepts nothing; determinization handles
    that case.
    """
    a = lower_all_input(a)
    return Automaton(
        state_count=a.state_count,
        edges=tuple((d, c, s) for s, c, d in a.edges),
        epsilon_edges=tuple((d, s) for s, d in a.epsilon_edges),
        starts={s: StartKind.START_OF_DATA for s in sorted(a.accepts)},
        accepts=frozenset(a.starts),
    )


def minimize_brzozowski(a: Automaton, cap: int = DEFAULT_STATE_CAP) -> Automaton:
    """Reverse, determinize, reverse, determinize: the minimal DFA.

    Output is the unique minimal DFA modulo the (never materialized) dead
    state; its state count excludes that dead state by construction.
    """
    return determinize(reverse(determinize(reverse(a), cap)), cap)


# ---------------------------------------------------------------------------
# Hopcroft minimization (partition refinement)


def minimize_hopcroft(a: Automaton) -> Automaton:
    """Partition-refinement minimization of a DFA.

    The input must be deterministic (determinize first).  Internally the
    DFA is completed with a virtual dead state over the atom alphabet of
    its edge classes; states indistinguishable from the dead state are
    dropped from the output, so counts match :func:`minimize_brzozowski`.
    """
    if not is_deterministic(a):
        raise ValueError("minimize_hopcroft requires a deterministic automaton")
    a = trim(a)
    n = a.state_count
    atoms = partition_masks([c.mask for _, c, _ in a.edges])
    uncovered = FULL_MASK
    for m in atoms:
        uncovered &= ~m
    if uncovered:
        atoms.append(uncovered)
    atom_index = {m: i for i, m in enumerate(atoms)}
    dead = n
    total = n + 1

    delta = [[dead] * len(atoms) for _ in range(total)]
    for src, cls, dst in a.edges:
        rest = cls.mask
        for m, i in atom_index.items():
            if m & rest:
                delta[src][i] = dst
                rest &= ~m
                if not rest:
                    break
    preds: list[list[list[int]]] = [[[] for _ in range(total)]
                                    for _ in range(len(atoms))]
    for s in range(total):
        for i in range(len(atoms)):
            preds[i][delta[s][i]].append(s)

    accepting = frozenset(a.accepts)
    non_accepting = frozenset(set(range(total)) - accepting)
    blocks: list[set[int]] = []
    block_of = [0] * total
    for group in (accepting, non_accepting):
        if group:
            idx = len(blocks)
            blocks.append(set(group))
            for s in group:
                block_of[s] = idx
    worklist: set[tuple[int, int]] = {
        (b, i) for b in range(len(blocks)) for i in range(len(atoms))}

    while worklist:
        b, i = worklist.pop()
        splitter = blocks[b]
        moved: dict[int, list[int]] = {}
        for t in splitter:
            for s in preds[i][t]:
                moved.setdefault(block_of[s], []).append(s)
        for src_block, members in moved.items():
            block = blocks[src_block]
            if len(members) == len(block):
                continue
            new_idx = len(blocks)
            new_block = set(members)
            blocks.append(new_block)
            block -= new_block
            for s in new_block:
                block_of[s] = new_idx
            smaller = new_idx if len(new_block) <= len(block) else src_block
            for j in range(len(atoms)):
                if (src_block, j) in worklist:
                    worklist.add((new_idx, j))
                else:
                    worklist.add((smaller, j))

    dead_block = block_of[dead]
    start = next(iter(a.starts))
    if block_of[start] == dead_block:
        # empty language: a lone start state, no edges, no accepts
        return Automaton(state_count=1,
                         starts={0: StartKind.START_OF_DATA},
                         accepts=frozenset(),
                         deterministic=True)
    live = [b for b in range(len(blocks)) if b != dead_block and blocks[b]]
    # stable numbering: order blocks by their smallest member state
    live.sort(key=lambda b: min(blocks[b]))
    new_id = {b: i for i, b in enumerate(live)}
    merged: dict[tuple[int, int], int] = {}
    for b in live:
        rep = min(blocks[b])
        for i, m in enumerate(atoms):
            t = delta[rep][i]
            tb = block_of[t]
            if tb == dead_block:
                continue
            key = (new_id[b], new_id[tb])
            merged[key] = merged.get(key, 0) | m
    edges = tuple(sorted(((s, SymbolClass(m), d) for (s, d), m in merged.items()),
                         key=lambda e: (e[0], e[1].mask, e[2])))
    return Automaton(
        state_count=len(live),
        edges=edges,
        starts={new_id[block_of[start]]: StartKind.START_OF_DATA},
        accepts=frozenset(new_id[block_of[s]] for s in a.accepts),
        deterministic=True,
    )


# ---------------------------------------------------------------------------
# Heuristic NFA optimization


def optimize_nfa(a: Automaton) -> Automaton:
    """Merge states with identical outgoing behavior, to a fixpoint.

    Epsilon edges are removed first.  Two states merge when they agree on
    acceptance, start kind, component label, and their outgoing
    transitions as per-byte target sets (classes are normalized per
    target, so differently factored but equal labelings compare equal).
    Merging survivors can expose new identical groups, hence the fixpoint
    iteration.  The state count never increases and the language is
    preserved.
    """
    a = remove_epsilon(a)
    while True:
        adj = a.adjacency()
        labels = a.component_labels or {}
        signatures: dict[tuple, list[int]] = {}
        for s in range(a.state_count):
            merged: dict[int, int] = {}
            for cls, dst in adj[s]:
                merged[dst] = merged.get(dst, 0) | cls.mask
            sig = (s in a.accepts, a.starts.get(s), labels.get(s),
                   frozenset(merged.items()))
            signatures.setdefault(sig, []).append(s)
        groups = [members for members in signatures.values() if len(members) > 1]
        if not groups:
            return a
        target = list(range(a.state_count))
        for members in groups:
            survivor = min(members)
            for s in members:
                target[s] = survivor
        keep = sorted(set(target))
        newid = {old: new for new, old in enumerate(keep)}
        remap = [newid[target[s]] for s in range(a.state_count)]
        merged_edges: dict[tuple[int, int], int] = {}
        for src, cls, dst in a.edges:
            key = (remap[src], remap[dst])
            merged_edges[key] = merged_edges.get(key, 0) | cls.mask
        new_labels = None
        if a.component_labels is not None:
            new_labels = {remap[s]: l for s, l in a.component_labels.items()}
        a = Automaton(
            state_count=len(keep),
            edges=tuple(sorted(((s, SymbolClass(m), d)
                                for (s, d), m in merged_edges.items()),
                               key=lambda e: (e[0], e[1].mask, e[2]))),
            starts={remap[s]: k for s, k in a.starts.items()},
            accepts=frozenset(remap[s] for s in a.accepts),
            deterministic=a.deterministic,
            component_labels=new_labels,
        )


# ---------------------------------------------------------------------------
# Components and merging


def connected_components(a: Automaton) -> list[Automaton]:
    """Split into weakly-connected components, one automaton each.

    Components are ordered by their smallest original state index and
    keep their states in the original relative order.  Each component's
    states are labeled with the originating pattern id: the input's
    component label when present, else the component's position.  A
    component with accepts but no start is still returned; validate()
    flags it.
    """
    parent = list(range(a.state_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for s, _, d in a.edges:
        union(s, d)
    for s, d in a.epsilon_edges:
        union(s, d)

    members: dict[int, list[int]] = {}
    for s in range(a.state_count):
        members.setdefault(find(s), []).append(s)
    roots = sorted(members)
    out = []
    for index, root in enumerate(roots):
        states = members[root]
        newid = {old: new for new, old in enumerate(states)}
        in_comp = set(states)
        if a.component_labels is not None and states[0] in a.component_labels:
            label = a.component_labels[states[0]]
        else:
            label = index
        out.append(Automaton(
            state_count=len(states),
            edges=tuple((newid[s], c, newid[d]) for s, c, d in a.edges
                        if s in in_comp),
            epsilon_edges=tuple((newid[s], newid[d])
                                for s, d in a.epsilon_edges if s in in_comp),
            starts={newid[s]: k for s, k in a.starts.items() if s in in_comp},
            accepts=frozenset(newid[s] for s in a.accepts if s in in_comp),
            component_labels={newid[s]: label for s in states},
        ))
    return out


def merge_patterns(patterns: list[Automaton],
                   ids: list[int] | None = None) -> Automaton:
    """Disjoint union behind a fresh shared start.

    The shared START_OF_DATA state (the last state index) is epsilon
    linked to each pattern's start-of-data starts, which lose their own
    marking; ALL_INPUT starts keep theirs and are not rerouted.  States
    carry their originating pattern id in ``component_labels`` (the
    shared start stays unlabeled), which is what attributes accepting
    states to patterns.
    """
    if not patterns:
        raise ValueError("merge_patterns needs at least one automaton")
    if ids is None:
        ids = list(range(len(patterns)))
    if len(ids) != len(patterns):
        raise ValueError("ids and patterns lengths differ")
    offsets = []
    total = 0
    for p in patterns:
        offsets.append(total)
        total += p.state_count
    shared = total
    edges = []
    eps = []
    starts: dict[int, StartKind] = {shared: StartKind.START_OF_DATA}
    accepts: set[int] = set()
    labels: dict[int, int] = {}
    for p, off, pid in zip(patterns, offsets, ids):
        edges.extend((s + off, c, d + off) for s, c, d in p.edges)
        eps.extend((s + off, d + off) for s, d in p.epsilon_edges)
        for s, kind in p.starts.items():
            if kind is StartKind.ALL_INPUT:
                starts[s + off] = kind
            else:
                eps.append((shared, s + off))
        accepts.update(s + off for s in p.accepts)
        labels.update({s + off: pid for s in range(p.state_count)})
    return Automaton(
        state_count=total + 1,
        edges=tuple(edges),
        epsilon_edges=tuple(eps),
        starts=starts,
        accepts=frozenset(accepts),
        component_labels=labels,
    )


# ---------------------------------------------------------------------------
# Language membership and equivalence


def accepts(a: Automaton, data: bytes) -> bool:
    """Subset-simulation membership test (no trace machinery)."""
    closures = epsilon_closures(a)
    adj = a.adjacency()
    always = close_over(closures, (s for s, k in a.starts.items()
                                   if k is StartKind.ALL_INPUT))
    active = close_over(closures, a.starts) | always
    for byte in data:
        step = {d for s in active for c, d in adj[s] if byte in c}
        active = close_over(closures, step) | always
    return bool(active & a.accepts)


def equivalent(a: Automaton, b: Automaton,
               cap: int = DEFAULT_STATE_CAP) -> bool:
    """Exact language equivalence, no length bound.

    Determinizes both sides, then searches the product for a state pair
    with differing acceptance.  Missing transitions are tracked as the
    dead side of the pair.
    """
    da, db = determinize(a, cap), determinize(b, cap)
    adj_a, adj_b = da.adjacency(), db.adjacency()
    dead = -1
    start = (0, 0)
    seen = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        p_acc = p != dead and p in da.accepts
        q_acc = q != dead and q in db.accepts
        if p_acc != q_acc:
            return False
        pairs = []
        if p != dead:
            pairs += [(c.mask, d, 0) for c, d in adj_a[p]]
        if q != dead:
            pairs += [(c.mask, d, 1) for c, d in adj_b[q]]
        for atom in partition_masks([m for m, _, _ in pairs]):
            np_, nq = dead, dead
            for m, d, side in pairs:
                if m & atom:
                    if side == 0:
                        np_ = d
                    else:
                        nq = d
            if (np_, nq) == (dead, dead):
                continue
            if (np_, nq) not in seen:
                seen.add((np_, nq))
                queue.append((np_, nq))
    return True


# ---------------------------------------------------------------------------
# Minimality oracle (pair marking / table filling)


def brute_force_minimal_states(a: Automaton) -> int:
    """Count equivalence classes of live states by pair marking.

    Independent of both minimizers: completes the (trimmed) DFA with an
    explicit dead state, marks distinguishable pairs until fixpoint, then
    counts classes of reachable states that are not equivalent to the
    dead state.  The start state's class is always counted, so the empty
    language yields 1, matching the minimizers' degenerate output.
    Rejects nondeterministic inputs and DFAs above 512 states.
    """
    if not is_deterministic(a):
        raise ValueError("oracle requires a deterministic automaton")
    a = trim(a)
    n = a.state_count
    if n > ORACLE_STATE_LIMIT:
        raise ValueError(
            f"oracle limited to {ORACLE_STATE_LIMIT} states (got {n})")
    atoms = partition_masks([c.mask for _, c, _ in a.edges])
    dead = n
    total = n + 1
    delta = [[dead] * len(atoms) for _ in range(total)]
    for src, cls, dst in a.edges:
        for i, m in enumerate(atoms):
            if m & cls.mask:
                delta[src][i] = dst

    marked = [[False] * total for _ in range(total)]
    for p in range(total):
        for q in range(p):
            p_acc = p in a.accepts
            q_acc = q in a.accepts
            if p_acc != q_acc:
                marked[p][q] = True
    changed = True
    while changed:
        changed = False
        for p in range(total):
            for q in range(p):
                if marked[p][q]:
                    continue
                for i in range(len(atoms)):
                    tp, tq = delta[p][i], delta[q][i]
                    if tp == tq:
                        continue
                    hi, lo = max(tp, tq), min(tp, tq)
                    if marked[hi][lo]:
                        marked[p][q] = True
                        changed = True
                        break

    def same(p: int, q: int) -> bool:
        if p == q:
            return True
        return not marked[max(p, q)][min(p, q)]

    start = next(iter(a.starts))
    classes: list[int] = []
    for s in range(n):
        if same(s, dead) and s != start:
            continue
        if not any(same(s, rep) for rep in classes):
            classes.append(s)
    return len(classes)
