"""Schema-versioned CSV emission.

Every CSV begins with a comment line `# schema: wnrqc.<kind>.v<version>`;
readers (including the plotting front end) refuse unknown schemas.  Floats
are written with 17 significant digits so outputs are reproducible
bit-for-bit across runs and checkable across languages.
"""

from __future__ import annotations

import io

from .errors import SchemaError

SCHEMA_VERSIONS = {
    "cg-sweep": 1,
    "walk": 1,
    "coupled": 1,
    "threshold": 1,
    "qoracle": 1,
    "xeb": 1,
}


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def schema_line(kind: str) -> str:
    if kind not in SCHEMA_VERSIONS:
        raise SchemaError(f"unknown CSV schema kind {kind!r}")
    return f"# schema: wnrqc.{kind}.v{SCHEMA_VERSIONS[kind]}"


def render_csv(kind: str, header: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(schema_line(kind) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(c) for c in row) + "\n")
    return buf.getvalue()


def write_csv(path, kind: str, header: list, rows: list) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(render_csv(kind, header, rows))


def read_csv(path, kind: str):
    """Returns (header, rows-of-strings); raises SchemaError on version or
    kind mismatch."""
    with open(path, encoding="ascii") as f:
        first = f.readline().strip()
        expected = schema_line(kind)
        if first != expected:
            raise SchemaError(f"expected {expected!r}, found {first!r}")
        header = f.readline().strip().split(",")
        rows = [line.strip().split(",") for line in f if line.strip()]
    return header, rows
