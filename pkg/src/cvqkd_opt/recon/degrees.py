"""Multi-edge-type degree distributions and their polynomial notation.

A distribution is published as two polynomials: ``v`` lists variable-node
classes, ``u`` check-node classes.  Each term ``f * r1 * x1^a * x2^b``
means a fraction ``f`` of nodes carrying ``a`` sockets on edge type 1 and
``b`` on type 2 (``r1`` marks channel-connected variable nodes and is not
a socket).  In the source notation both polynomials weight classes by the
fraction of *variable* nodes, so the check coefficients sum to 1 - R;
this module normalizes check fractions to sum to 1 over check nodes and
validates that per-type socket counts balance between the two sides.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleDistributionError

__all__ = ["DegreeDistribution", "parse_degree_polynomials"]

_BALANCE_TOL = 1e-9


@dataclass(frozen=True)
class DegreeDistribution:
    """Node-perspective degree distribution for code construction.

    ``variable_spec`` and ``check_spec`` are tuples of
    ``(fraction, {edge_type: degree})``; fractions sum to 1 within each
    spec.  ``threshold`` is the reported BIAWGN noise-sigma limit of the
    ensemble (informational).
    """

    code_rate: float
    variable_spec: tuple[tuple[float, dict[int, int]], ...]
    check_spec: tuple[tuple[float, dict[int, int]], ...]
    threshold: float | None = None
    dist_id: str = "custom"

    def __post_init__(self) -> None:
        if not 0.0 < self.code_rate < 1.0:
            raise ValueError("code_rate must lie in (0, 1)")
        for name, spec in (("variable_spec", self.variable_spec),
                           ("check_spec", self.check_spec)):
            total = sum(f for f, _ in spec)
            if abs(total - 1.0) > _BALANCE_TOL:
                raise ValueError(f"{name} fractions sum to {total}, expected 1")
            for frac, degs in spec:
                if frac < 0:
                    raise ValueError(f"{name} fractions must be non-negative")
                if any(d < 1 for d in degs.values()):
                    raise ValueError("degrees must be >= 1")

    @property
    def edge_types(self) -> tuple[int, ...]:
        types: set[int] = set()
        for _, degs in self.variable_spec:
            types.update(degs)
        for _, degs in self.check_spec:
            types.update(degs)
        return tuple(sorted(types))

    @classmethod
    def from_node_fractions(
        cls,
        code_rate: float,
        variable_terms,
        check_terms,
        threshold: float | None = None,
        dist_id: str = "custom",
    ) -> "DegreeDistribution":
        """Build from source notation where check coefficients are
        fractions of variable nodes (they must sum to 1 - R)."""
        check_total = sum(f for f, _ in check_terms)
        if abs(check_total - (1.0 - code_rate)) > 1e-6:
            raise ValueError(
                f"check fractions sum to {check_total}, expected "
                f"1 - R = {1.0 - code_rate}"
            )
        var_spec = tuple((float(f), dict(d)) for f, d in variable_terms)
        chk_spec = tuple((float(f) / check_total, dict(d)) for f, d in check_terms)
        dist = cls(
            code_rate=code_rate,
            variable_spec=var_spec,
            check_spec=chk_spec,
            threshold=threshold,
            dist_id=dist_id,
        )
        dist._validate_edge_balance(check_total)
        return dist

    def _validate_edge_balance(self, check_node_ratio: float) -> None:
        # per-type sockets per variable node must match on both sides
        for t in self.edge_types:
            ev = sum(f * d.get(t, 0) for f, d in self.variable_spec)
            ec = check_node_ratio * sum(f * d.get(t, 0) for f, d in self.check_spec)
            if abs(ev - ec) > 1e-6:
                raise ValueError(
                    f"edge type {t}: variable side emits {ev} sockets per node "
                    f"but check side offers {ec}"
                )

    def n_checks(self, n_vars: int) -> int:
        return int(round(n_vars * (1.0 - self.code_rate)))

    def realize(self, n_vars: int):
        """Integer node counts and per-check socket capacities at size n_vars.

        Counts are rounded by largest remainder so that class totals are
        exact; leftover per-type socket imbalance from rounding is repaired
        by adjusting single sockets on checks of the largest class carrying
        that type.  Returns (var_degrees, chk_capacities) as int arrays of
        shape (n_nodes, n_types) indexed by position in ``edge_types``.

        Raises InfeasibleDistributionError when some variable class needs
        more distinct sockets of a type than there are checks carrying it.
        """
        types = self.edge_types
        t_index = {t: i for i, t in enumerate(types)}
        n_chk = self.n_checks(n_vars)
        if n_chk < 1:
            raise InfeasibleDistributionError("block too small: no check nodes")
        var_counts = _largest_remainder([f for f, _ in self.variable_spec], n_vars)
        chk_counts = _largest_remainder([f for f, _ in self.check_spec], n_chk)

        var_deg = np.zeros((n_vars, len(types)), dtype=np.int64)
        pos = 0
        for cnt, (_, degs) in zip(var_counts, self.variable_spec):
            for t, d in degs.items():
                var_deg[pos:pos + cnt, t_index[t]] = d
            pos += cnt
        chk_cap = np.zeros((n_chk, len(types)), dtype=np.int64)
        pos = 0
        for cnt, (_, degs) in zip(chk_counts, self.check_spec):
            for t, d in degs.items():
                chk_cap[pos:pos + cnt, t_index[t]] = d
            pos += cnt

        # repair rounding-induced socket imbalance, one socket at a time
        for ti in range(len(types)):
            deficit = int(var_deg[:, ti].sum() - chk_cap[:, ti].sum())
            if deficit == 0:
                continue
            carriers = np.flatnonzero(chk_cap[:, ti] > 0)
            if carriers.size == 0:
                raise InfeasibleDistributionError(
                    f"edge type {types[ti]} has variable sockets but no checks"
                )
            step = 1 if deficit > 0 else -1
            k = 0
            while deficit != 0:
                c = carriers[k % carriers.size]
                if step < 0 and chk_cap[c, ti] <= 1:
                    k += 1
                    continue
                chk_cap[c, ti] += step
                deficit -= step
                k += 1

        for ti, t in enumerate(types):
            need = int(var_deg[:, ti].max())
            have = int(np.count_nonzero(chk_cap[:, ti]))
            if need > have:
                raise InfeasibleDistributionError(
                    f"edge type {t}: a variable node needs {need} distinct "
                    f"checks but only {have} carry that type"
                )
        return var_deg, chk_cap

    def variable_histogram(self, n_vars: int) -> dict[int, int]:
        """Expected column-weight histogram (total degree -> node count)."""
        counts = _largest_remainder([f for f, _ in self.variable_spec], n_vars)
        hist: dict[int, int] = {}
        for cnt, (_, degs) in zip(counts, self.variable_spec):
            d = sum(degs.values())
            hist[d] = hist.get(d, 0) + cnt
        return hist


def _largest_remainder(fractions, total: int) -> list[int]:
    raw = np.asarray(fractions, dtype=float) * total
    base = np.floor(raw).astype(int)
    short = total - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    for i in range(short):
        base[order[i % len(base)]] += 1
    return base.tolist()


_TERM_RE = re.compile(r"^([0-9.eE+-]+)$")
_SOCKET_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def _parse_polynomial(text: str):
    """Parse `0.0775r1x1^2x2^20 + ...` into [(fraction, {type: degree})]."""
    terms = []
    for chunk in text.replace("−", "-").split("+"):
        chunk = chunk.strip()
        if not chunk or chunk == "0":
            continue
        # split into coefficient and socket factors
        factors = re.findall(r"[0-9.eE-]+(?![0-9^.])|r\d+|x\d+(?:\^\d+)?", chunk.replace("*", " ").replace(" ", ""))
        coeff = None
        degs: dict[int, int] = {}
        for f in factors:
            if f.startswith("r"):
                continue
            m = _SOCKET_RE.match(f)
            if m:
                t = int(m.group(1))
                d = int(m.group(2) or 1)
                degs[t] = degs.get(t, 0) + d
                continue
            if _TERM_RE.match(f) and coeff is None:
                coeff = float(f)
                continue
            raise ValueError(f"cannot parse factor {f!r} in term {chunk!r}")
        if coeff is None:
            raise ValueError(f"term {chunk!r} has no coefficient")
        if not degs:
            raise ValueError(f"term {chunk!r} has no sockets")
        terms.append((coeff, degs))
    if not terms:
        raise ValueError("polynomial has no terms")
    return terms


def parse_degree_polynomials(
    variable_poly: str,
    check_poly: str,
    code_rate: float,
    threshold: float | None = None,
    dist_id: str = "parsed",
) -> DegreeDistribution:
    """Parse the published two-polynomial notation into a distribution.

    Interpretation: coefficients in both polynomials are node fractions
    relative to the variable-node count, so the check polynomial's
    coefficients sum to 1 - R; exponents count sockets per edge type.
    """
    return DegreeDistribution.from_node_fractions(
        code_rate=code_rate,
        variable_terms=_parse_polynomial(variable_poly),
        check_terms=_parse_polynomial(check_poly),
        threshold=threshold,
        dist_id=dist_id,
    )
