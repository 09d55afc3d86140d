"""Sparse binary parity-check matrices and the alist text format."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ParityCheckMatrix", "read_alist", "write_alist"]


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary parity-check matrix stored as per-check index lists.

    ``rows[c]`` holds the variable indices of check ``c`` (0-based, no
    duplicates).  The code rate is structural: R = 1 - n_checks / n_vars.
    """

    n_vars: int
    n_checks: int
    rows: tuple[np.ndarray, ...]
    code_id: str = "unnamed"
    code_rate: float = field(init=False)

    def __post_init__(self) -> None:
        if len(self.rows) != self.n_checks:
            raise ValueError("rows length must equal n_checks")
        col_seen = np.zeros(self.n_vars, dtype=bool)
        for c, row in enumerate(self.rows):
            arr = np.asarray(row, dtype=np.int64)
            if arr.size != np.unique(arr).size:
                raise ValueError(f"check {c} has duplicate entries")
            if arr.size and (arr.min() < 0 or arr.max() >= self.n_vars):
                raise ValueError(f"check {c} has out-of-range variable indices")
            col_seen[arr] = True
        if not col_seen.all():
            missing = int(np.flatnonzero(~col_seen)[0])
            raise ValueError(f"variable {missing} appears in no check")
        object.__setattr__(self, "code_rate", 1.0 - self.n_checks / self.n_vars)

    @property
    def n_edges(self) -> int:
        return int(sum(len(r) for r in self.rows))

    def column_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vars, dtype=np.int64)
        for row in self.rows:
            deg[row] += 1
        return deg

    def row_degrees(self) -> np.ndarray:
        return np.asarray([len(r) for r in self.rows], dtype=np.int64)

    def column_histogram(self) -> dict[int, int]:
        vals, counts = np.unique(self.column_degrees(), return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def columns(self) -> list[np.ndarray]:
        cols: list[list[int]] = [[] for _ in range(self.n_vars)]
        for c, row in enumerate(self.rows):
            for v in row:
                cols[int(v)].append(c)
        return [np.asarray(col, dtype=np.int64) for col in cols]

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        return np.asarray([int(bits[row].sum() & 1) for row in self.rows],
                          dtype=np.int64)


def write_alist(h: ParityCheckMatrix) -> str:
    """Serialize in the standard alist format (1-based, zero-padded)."""
    cols = h.columns()
    col_deg = [len(c) for c in cols]
    row_deg = [len(r) for r in h.rows]
    max_col = max(col_deg)
    max_row = max(row_deg)
    lines = [
        f"{h.n_vars} {h.n_checks}",
        f"{max_col} {max_row}",
        " ".join(str(d) for d in col_deg),
        " ".join(str(d) for d in row_deg),
    ]
    for col in cols:
        entries = [str(c + 1) for c in sorted(col.tolist())]
        entries += ["0"] * (max_col - len(entries))
        lines.append(" ".join(entries))
    for row in h.rows:
        entries = [str(v + 1) for v in sorted(row.tolist())]
        entries += ["0"] * (max_row - len(entries))
        lines.append(" ".join(entries))
    return "\n".join(lines) + "\n"


def read_alist(text: str, code_id: str = "alist") -> ParityCheckMatrix:
    """Parse alist text; accepts both zero-padded and unpadded variants."""
    tokens_per_line = [line.split() for line in text.splitlines()]
    tokens_per_line = [t for t in tokens_per_line if t]
    if len(tokens_per_line) < 4:
        raise ValueError("alist: expected at least 4 lines")
    try:
        n_vars, n_checks = (int(x) for x in tokens_per_line[0][:2])
        col_deg = [int(x) for x in tokens_per_line[2]]
        row_deg = [int(x) for x in tokens_per_line[3]]
    except ValueError as exc:
        raise ValueError(f"alist: bad header: {exc}") from None
    if len(col_deg) != n_vars:
        raise ValueError(f"alist line 3: expected {n_vars} column degrees")
    if len(row_deg) != n_checks:
        raise ValueError(f"alist line 4: expected {n_checks} row degrees")
    body = tokens_per_line[4:]
    if len(body) < n_vars + n_checks:
        raise ValueError("alist: truncated adjacency block")
    rows: list[np.ndarray] = []
    for c in range(n_checks):
        line_no = 4 + n_vars + c
        entries = [int(x) for x in body[n_vars + c] if int(x) != 0]
        if len(entries) != row_deg[c]:
            raise ValueError(
                f"alist line {line_no + 1}: check {c} lists {len(entries)} "
                f"entries, declared {row_deg[c]}"
            )
        rows.append(np.asarray(sorted(e - 1 for e in entries), dtype=np.int64))
    h = ParityCheckMatrix(n_vars=n_vars, n_checks=n_checks, rows=tuple(rows),
                          code_id=code_id)
    if h.column_degrees().tolist() != col_deg:
        raise ValueError("alist: column degrees inconsistent with adjacency")
    return h
