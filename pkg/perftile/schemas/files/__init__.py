# schemas/files/__init__.py

from __future__ import annotations

from .common import FileKind, TileHeader

__all__ = ["FileKind", "TileHeader"]
