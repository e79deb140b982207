"""Registered checks, grouped by subject."""

from __future__ import annotations

from . import identities, killing, twokilling


def build_specs():
    return identities.build() + killing.build() + twokilling.build()
