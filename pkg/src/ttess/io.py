"""File formats: line-set JSON, tessellation JSON / JSON-lines, run manifests.

A line-set file fixes the window polygon, the lines and (optionally) the
time axis; a null axis means one is chosen on load from the stored seed.
Tessellation files reference events by their rank in the table built from
the companion line-set file and may cross-reference it by content hash.
All writers emit canonical, byte-reproducible JSON.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import MalformedMarks
from .geometry import (
    EventTable,
    Line,
    Window,
    build_event_table,
    choose_time_axis,
)
from .tessellation import Prototessellation

TOOL_VERSION = "0.1.0"


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dump_json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_schema(kind: str) -> dict:
    """Shipped JSON schema for an artifact kind: lineset, tessellation,
    estimate, or manifest."""
    source = resources.files("ttess.schemas").joinpath(f"{kind}.schema.json")
    return json.loads(source.read_text())


def lineset_to_dict(lines, vertices, axis=None, seed: int = 0) -> dict:
    return {
        "window": [[float(x), float(y)] for x, y in vertices],
        "lines": [
            {"id": l.id, "alpha": l.alpha, "p": l.p}
            for l in sorted(lines, key=lambda l: l.id)
        ],
        "axis": None if axis is None else [float(axis[0]), float(axis[1])],
        "seed": seed,
    }


def save_lineset(path, lines, vertices, axis=None, seed: int = 0) -> None:
    Path(path).write_text(dump_json(lineset_to_dict(lines, vertices, axis, seed)))


def load_lineset(path) -> tuple[list[Line], Window, EventTable]:
    """Read a line-set file and build its scene (axis chosen if null)."""
    data = json.loads(Path(path).read_text())
    vertices = tuple((float(x), float(y)) for x, y in data["window"])
    lines = [
        Line(int(d["id"]), float(d["alpha"]), float(d["p"]))
        for d in data["lines"]
    ]
    lines.sort(key=lambda l: l.id)
    if data.get("axis") is None:
        window = choose_time_axis(lines, vertices, seed=int(data.get("seed", 0)))
    else:
        window = Window.with_axis(vertices, tuple(data["axis"]))
    table = build_event_table(lines, window)
    return lines, window, table


def _mark_to_json(mark: int) -> dict:
    return {"event": int(mark)}


def _mark_from_json(obj, line_id: int, table) -> int:
    if "event" in obj:
        return int(obj["event"])
    if obj.get("border_entry"):
        return table.entry_index[line_id]
    if obj.get("border_exit"):
        return table.exit_index[line_id]
    raise MalformedMarks(f"unreadable mark {obj!r} for line {line_id}")


def tessellation_to_dict(tess: Prototessellation, lines_hash=None) -> dict:
    data = {
        "births": {str(l): _mark_to_json(tess.births[l]) for l in range(tess.k)},
        "deaths": {str(l): _mark_to_json(tess.deaths[l]) for l in range(tess.k)},
    }
    if lines_hash is not None:
        data["lines_hash"] = lines_hash
    return data


def tessellation_from_dict(data: dict, table, lines_hash=None) -> Prototessellation:
    if lines_hash is not None and "lines_hash" in data:
        if data["lines_hash"] != lines_hash:
            raise MalformedMarks(
                "tessellation file references a different line-set file "
                f"(hash {data['lines_hash'][:12]}..., expected {lines_hash[:12]}...)"
            )
    births = []
    deaths = []
    for l in range(table.k):
        key = str(l)
        births.append(_mark_from_json(data["births"][key], l, table))
        deaths.append(_mark_from_json(data["deaths"][key], l, table))
    return Prototessellation(tuple(births), tuple(deaths))


def save_tessellation(path, tess, lines_hash=None) -> None:
    Path(path).write_text(dump_json(tessellation_to_dict(tess, lines_hash)))


def save_tessellation_lines(path, tessellations) -> None:
    """JSON-lines: one tessellation per line, streamable."""
    with open(path, "w") as handle:
        for tess in tessellations:
            handle.write(dump_json_line(tessellation_to_dict(tess)))


def load_tessellation_ref(ref: str, table, lines_hash=None) -> Prototessellation:
    """Load ``file.json`` or ``file.jsonl:INDEX``."""
    path, _, index = str(ref).rpartition(":")
    if path and index.isdigit():
        wanted = int(index)
        with open(path) as handle:
            for i, line in enumerate(handle):
                if i == wanted:
                    return tessellation_from_dict(json.loads(line), table, lines_hash)
        raise MalformedMarks(f"{path} has no record {wanted}")
    return tessellation_from_dict(
        json.loads(Path(ref).read_text()), table, lines_hash
    )


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility sidecar: rerunning the command must reproduce the
    artifact byte for byte (the manifest itself may differ in duration)."""

    command: str
    arguments: dict
    seeds: list
    input_hashes: dict
    version: str
    duration_s: float

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "arguments": self.arguments,
            "seeds": self.seeds,
            "input_hashes": self.input_hashes,
            "version": self.version,
            "duration_s": self.duration_s,
        }


def write_manifest(artifact_path, command, arguments, seeds, inputs,
                   duration_s) -> Path:
    manifest = RunManifest(
        command=command,
        arguments={k: v for k, v in sorted(arguments.items())},
        seeds=list(seeds),
        input_hashes={str(p): file_sha256(p) for p in inputs},
        version=TOOL_VERSION,
        duration_s=duration_s,
    )
    path = Path(str(artifact_path) + ".manifest.json")
    path.write_text(dump_json(manifest.to_dict()))
    return path
