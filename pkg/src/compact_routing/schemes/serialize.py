"""Binary container for built instances (build once, route many times).

Layout, little-endian: magic ``CRLB``, ``u16`` version, ``u16`` section
count, then per section ``u16`` name length, name, ``u64`` payload length,
payload.  The ``meta`` section is JSON, ``graph`` is the edge-list text,
the rest are pickles.  Only load files you produced yourself: unpickling
runs code.
"""
from __future__ import annotations

import json
import pickle
import struct
from fractions import Fraction
from pathlib import Path

from ..graph import format_graph, parse_graph
from .common import SchemeInstance, SchemeParams

MAGIC = b"CRLB"
VERSION = 1


class FormatError(ValueError):
    pass


def _graph_text(g) -> bytes:
    return format_graph(g).encode()


def dumps_instance(inst: SchemeInstance) -> bytes:
    meta = {"scheme": inst.scheme, "params": inst.params.as_dict(), "info": inst.info}
    sections = [
        ("meta", json.dumps(meta, sort_keys=True, default=str).encode()),
        ("graph", _graph_text(inst.graph)),
        ("tables", pickle.dumps(inst.tables, protocol=4)),
        ("labels", pickle.dumps(inst.labels, protocol=4)),
        ("aux", pickle.dumps(inst.aux, protocol=4)),
    ]
    out = [MAGIC, struct.pack("<HH", VERSION, len(sections))]
    for name, payload in sections:
        raw = name.encode()
        out += [struct.pack("<H", len(raw)), raw, struct.pack("<Q", len(payload)), payload]
    return b"".join(out)


def loads_instance(data: bytes) -> SchemeInstance:
    if data[:4] != MAGIC:
        raise FormatError("not a routing instance file")
    version, count = struct.unpack_from("<HH", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    pos = 8
    sections = {}
    for _ in range(count):
        (ln,) = struct.unpack_from("<H", data, pos)
        name = data[pos + 2: pos + 2 + ln].decode()
        pos += 2 + ln
        (size,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        sections[name] = data[pos: pos + size]
        if len(sections[name]) != size:
            raise FormatError(f"truncated section {name!r}")
        pos += size
    meta = json.loads(sections["meta"])
    p = dict(meta["params"])
    p["eps"] = Fraction(p["eps"])
    return SchemeInstance(
        meta["scheme"],
        SchemeParams(**p),
        parse_graph(sections["graph"].decode()),
        pickle.loads(sections["tables"]),
        pickle.loads(sections["labels"]),
        meta["info"],
        pickle.loads(sections["aux"]),
    )


def save_instance(inst: SchemeInstance, path: str | Path) -> None:
    Path(path).write_bytes(dumps_instance(inst))


def load_instance(path: str | Path) -> SchemeInstance:
    return loads_instance(Path(path).read_bytes())
