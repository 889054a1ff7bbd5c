"""Cross-file compatibility report for EMBF files meant for one corpus."""

from __future__ import annotations

from dataclasses import dataclass

from .embf import read_embf


@dataclass(frozen=True)
class CompatReport:
    compatible: bool
    lines: tuple

    def __str__(self) -> str:
        return "\n".join(self.lines)


def verify_compat(paths) -> CompatReport:
    """Check that row counts and ID tables agree; dims may differ per model."""
    paths = [str(p) for p in paths]
    if len(paths) < 2:
        raise ValueError("need at least 2 files to compare")
    loaded = []
    for p in paths:
        values, ids = read_embf(p)
        loaded.append((p, values.shape, ids))
    first_path, first_shape, first_ids = loaded[0]
    lines = [f"reference\t{first_path}\trows={first_shape[0]}\tdim={first_shape[1]}"]
    compatible = True
    for p, shape, ids in loaded[1:]:
        problems = []
        if shape[0] != first_shape[0]:
            problems.append(f"rows {shape[0]} != {first_shape[0]} ({first_path})")
        elif ids != first_ids:
            diff = next(i for i, (a, b) in enumerate(zip(ids, first_ids)) if a != b)
            problems.append(
                f"id mismatch at row {diff}: {ids[diff]!r} != {first_ids[diff]!r} ({first_path})"
            )
        if problems:
            compatible = False
            for problem in problems:
                lines.append(f"mismatch\t{p}\t{problem}")
        else:
            lines.append(f"ok\t{p}\trows={shape[0]}\tdim={shape[1]}")
    lines.append("compatible" if compatible else "incompatible")
    return CompatReport(compatible, tuple(lines))
