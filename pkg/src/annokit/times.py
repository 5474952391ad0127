"""Datetime helpers: xsd:dateTime (UTC, second precision) and RFC 1123."""

from __future__ import annotations

from datetime import datetime, timezone
from email.utils import format_datetime, parsedate_to_datetime


def to_utc(dt: datetime) -> datetime:
    """Normalize to UTC, truncated to whole seconds; naive input is taken as UTC."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_xsd(dt: datetime) -> str:
    return to_utc(dt).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_xsd(lexical: str) -> datetime:
    text = lexical.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return to_utc(datetime.fromisoformat(text))


def format_rfc1123(dt: datetime) -> str:
    return format_datetime(to_utc(dt), usegmt=True)


def parse_rfc1123(text: str) -> datetime:
    return to_utc(parsedate_to_datetime(text))
