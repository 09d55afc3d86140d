"""Progressive-edge-growth construction of multi-edge LDPC matrices.

Edges are placed type by type: within a type, variables are processed in
ascending degree and each new edge goes to a check at maximal graph
distance from the variable (unreached checks first), among those the one
with most free sockets, with a seeded permutation breaking remaining
ties.  While placing edges of type t the distance search walks only the
subgraph of types <= t, so the cycle structure of the core types is not
obscured by later, denser types.

Check sockets are hard capacities, which pins the row-degree profile
exactly but can force short cycles near the end of a phase; a same-type
edge-swap pass afterwards removes any length-4 cycles it can.
"""

from __future__ import annotations

import numpy as np

from ..errors import InfeasibleDistributionError
from .degrees import DegreeDistribution
from .matrix import ParityCheckMatrix

__all__ = ["peg_construct"]


def peg_construct(dist: DegreeDistribution, n_vars: int, seed: int = 0,
                  remove_4cycles: bool = True) -> ParityCheckMatrix:
    """Build a parity-check matrix realizing ``dist`` at size ``n_vars``.

    Deterministic for a given seed.  Column degrees match the realized
    node counts exactly; row degrees match the realized socket capacities
    up to the rounding repair done in ``DegreeDistribution.realize``.
    """
    var_deg, chk_cap = dist.realize(n_vars)
    n_types = var_deg.shape[1]
    n_checks = chk_cap.shape[0]

    max_vd = int(var_deg.sum(axis=1).max())
    max_cd = int(chk_cap.sum(axis=1).max())
    var_adj = np.full((n_vars, max_vd), -1, dtype=np.int32)
    var_typ = np.full((n_vars, max_vd), -1, dtype=np.int8)
    var_cnt = np.zeros(n_vars, dtype=np.int32)
    chk_adj = np.full((n_checks, max_cd), -1, dtype=np.int32)
    chk_typ = np.full((n_checks, max_cd), -1, dtype=np.int8)
    chk_cnt = np.zeros(n_checks, dtype=np.int32)
    free = chk_cap.astype(np.int32).copy()

    rng = np.random.default_rng(seed)
    tie_rank = np.empty(n_checks, dtype=np.int64)
    tie_rank[rng.permutation(n_checks)] = np.arange(n_checks)

    def bfs_distances(v: int, max_type: int, candidates: np.ndarray) -> np.ndarray:
        """Check distances from v over the subgraph of types <= max_type,
        stopping early once every candidate check has been reached."""
        dist_c = np.full(n_checks, -1, dtype=np.int32)
        seen_v = np.zeros(n_vars, dtype=bool)
        seen_v[v] = True
        frontier = np.array([v], dtype=np.int32)
        remaining = candidates.size
        depth = 0
        while frontier.size and remaining > 0:
            rows = var_adj[frontier]
            keep = (var_typ[frontier] >= 0) & (var_typ[frontier] <= max_type)
            flat = np.unique(rows[keep])
            if flat.size == 0:
                break
            new_c = flat[dist_c[flat] < 0]
            if new_c.size == 0:
                break
            dist_c[new_c] = depth
            remaining -= int(np.count_nonzero(dist_c[candidates] == depth))
            rows2 = chk_adj[new_c]
            keep2 = (chk_typ[new_c] >= 0) & (chk_typ[new_c] <= max_type)
            flat2 = np.unique(rows2[keep2])
            if flat2.size == 0:
                break
            new_v = flat2[~seen_v[flat2]]
            seen_v[new_v] = True
            frontier = new_v
            depth += 1
        return dist_c

    def place_edge(v: int, t: int) -> None:
        cand_mask = free[:, t] > 0
        nbrs = var_adj[v, : var_cnt[v]]
        cand_mask[nbrs[nbrs >= 0]] = False
        cand = np.flatnonzero(cand_mask)
        if cand.size == 0:
            raise InfeasibleDistributionError(
                f"no check with a free type-{t} socket available for "
                f"variable {v} (construction deadlock; try another seed)"
            )
        if var_cnt[v] > 0:
            dist_c = bfs_distances(v, t, cand)
            d_cand = dist_c[cand]
            unreached = cand[d_cand < 0]
            cand = unreached if unreached.size else cand[d_cand == d_cand.max()]
        fr = free[cand].sum(axis=1)
        best = cand[fr == fr.max()]
        c = int(best[np.argmin(tie_rank[best])])
        var_adj[v, var_cnt[v]] = c
        var_typ[v, var_cnt[v]] = t
        var_cnt[v] += 1
        chk_adj[c, chk_cnt[c]] = v
        chk_typ[c, chk_cnt[c]] = t
        chk_cnt[c] += 1
        free[c, t] -= 1

    for t in range(n_types):
        active = np.flatnonzero(var_deg[:, t] > 0)
        active = active[np.argsort(var_deg[active, t], kind="stable")]
        for v in active:
            for _ in range(int(var_deg[v, t])):
                place_edge(int(v), t)

    rows = [chk_adj[c, : chk_cnt[c]].astype(np.int64) for c in range(n_checks)]
    types = [chk_typ[c, : chk_cnt[c]].copy() for c in range(n_checks)]
    if remove_4cycles:
        rows = _swap_out_4cycles(n_vars, rows, types, seed=seed + 1)
    return ParityCheckMatrix(
        n_vars=n_vars,
        n_checks=n_checks,
        rows=tuple(np.sort(r) for r in rows),
        code_id=f"{dist.dist_id}-n{n_vars}-s{seed}",
    )


def _find_shared_pairs(rows):
    """Check pairs sharing >= 2 variables (each such pair is a 4-cycle)."""
    seen: dict[tuple[int, int], int] = {}
    bad = []
    for ci, row in enumerate(rows):
        rs = sorted(int(v) for v in row)
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                key = (rs[i], rs[j])
                if key in seen:
                    bad.append((seen[key], ci, key))
                else:
                    seen[key] = ci
    return bad


def _swap_out_4cycles(n_vars, rows, types, seed: int, max_rounds: int = 40):
    """Remove 4-cycles by swapping same-type edges between two checks.

    Best effort: a swap is applied only when it provably creates no new
    4-cycle at either endpoint; anything irreducible is left in place.
    """
    rng = np.random.default_rng(seed)
    rows = [list(map(int, r)) for r in rows]
    types = [list(map(int, t)) for t in types]
    n_checks = len(rows)
    row_sets = [set(r) for r in rows]
    var_checks: list[list[int]] = [[] for _ in range(n_vars)]
    for ci, row in enumerate(rows):
        for v in row:
            var_checks[v].append(ci)

    def creates_4cycle(x: int, cx: int) -> bool:
        # Would attaching variable x to check cx create a shared pair?
        sx = row_sets[cx]
        for c_other in var_checks[x]:
            if c_other == cx:
                continue
            inter = 0
            other = row_sets[c_other]
            for w in sx:
                if w != x and w in other:
                    inter += 1
                    if inter >= 1:
                        return True
        return False

    for _ in range(max_rounds):
        bad = _find_shared_pairs(rows)
        if not bad:
            break
        progressed = False
        for c1, c2, _pair in bad:
            shared = sorted(row_sets[c1] & row_sets[c2])
            if len(shared) < 2:
                continue
            v = shared[-1]
            k = rows[c2].index(v)
            t = types[c2][k]
            for c3 in rng.permutation(n_checks):
                c3 = int(c3)
                if c3 in (c1, c2):
                    continue
                if v in row_sets[c3]:
                    continue
                swapped = False
                for k3, (w, t3) in enumerate(zip(rows[c3], types[c3])):
                    if t3 != t or w == v or w in row_sets[c2]:
                        continue
                    # tentative swap (v,c2)<->(w,c3); test both endpoints
                    row_sets[c2].discard(v)
                    row_sets[c3].discard(w)
                    ok = not creates_4cycle(v, c3) and not creates_4cycle(w, c2)
                    if ok:
                        rows[c2][k] = w
                        rows[c3][k3] = v
                        row_sets[c2].add(w)
                        row_sets[c3].add(v)
                        var_checks[v].remove(c2)
                        var_checks[v].append(c3)
                        var_checks[w].remove(c3)
                        var_checks[w].append(c2)
                        swapped = True
                        progressed = True
                    else:
                        row_sets[c2].add(v)
                        row_sets[c3].add(w)
                    if swapped:
                        break
                if swapped:
                    break
        if not progressed:
            break
    return [np.asarray(r, dtype=np.int64) for r in rows]
