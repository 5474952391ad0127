"""Inline content payloads (the Content-in-RDF chars/encoding pattern)."""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass
from enum import Enum


class ContentKind(Enum):
    TEXT = "ContentAsText"
    BASE64 = "ContentAsBase64"
    XML = "ContentAsXML"


@dataclass(frozen=True)
class InlineContent:
    chars: str
    character_encoding: str = "utf-8"
    kind: ContentKind = ContentKind.TEXT

    def __post_init__(self):
        if self.kind is ContentKind.BASE64:
            try:
                base64.b64decode(self.chars, validate=True)
            except (binascii.Error, ValueError) as exc:
                raise ValueError(f"invalid base64 payload: {exc}") from exc
