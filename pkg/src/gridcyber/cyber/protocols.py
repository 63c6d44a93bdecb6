"""Application protocol to port/transport bindings."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from ..errors import SettingsError

PROTOCOLS = ("DNP3", "ICCP", "HTTPS", "SQL")


@dataclass(frozen=True)
class Binding:
    port: int
    transport: str


class ProtocolTable(dict):
    """``{protocol: Binding}``; all four protocols must be present."""

    @classmethod
    def from_mapping(cls, data: Mapping) -> "ProtocolTable":
        table = cls()
        for name in PROTOCOLS:
            try:
                entry = data[name]
                port = int(entry["port"])
                transport = str(entry.get("transport", "tcp")).lower()
            except (KeyError, TypeError, ValueError):
                raise SettingsError(f"protocol table entry for {name} is missing or malformed") from None
            if not 0 < port < 65536:
                raise SettingsError(f"protocol {name}: port {port} out of range")
            table[name] = Binding(port, transport)
        return table

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ProtocolTable":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SettingsError(f"cannot read protocol table {path}: {exc}") from None
        return cls.from_mapping(data)

    @classmethod
    def default(cls) -> "ProtocolTable":
        text = resources.files("gridcyber.data").joinpath("protocols.json").read_text(encoding="utf-8")
        return cls.from_mapping(json.loads(text))

    def port(self, name: str) -> int:
        return self[name].port

    def to_dict(self) -> dict:
        return {k: {"port": v.port, "transport": v.transport} for k, v in sorted(self.items())}
