"""Flat ``name = value`` text files with ``#`` comments (fit reports and configs)."""

from __future__ import annotations

from pathlib import Path

__all__ = ["format_value", "read_kv", "write_kv"]


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_kv(path: str | Path, items, header: str | None = None) -> None:
    lines = []
    if header:
        lines.extend(f"# {line}" if line else "#" for line in header.splitlines())
    for key, value in items:
        if key.startswith("#"):
            lines.append(key)
            continue
        lines.append(f"{key} = {format_value(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_kv(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'name = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"{path}:{lineno}: empty key")
        out[key] = value
    return out
