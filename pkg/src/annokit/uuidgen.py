"""Seedable urn:uuid minting so test output stays byte-stable."""

from __future__ import annotations

import random
import uuid

from annokit.rdf import Iri


class UrnMinter:
    """Mints version-4 urn:uuid IRIs; deterministic when seeded."""

    def __init__(self, seed: int | None = None):
        self._rng = random.Random(seed)

    def __call__(self) -> Iri:
        u = uuid.UUID(int=self._rng.getrandbits(128), version=4)
        return Iri(f"urn:uuid:{u}")
