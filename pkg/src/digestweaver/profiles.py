"""User profile terms: normalization, persistence, retrieval.

The store is one JSON file mapping profile_id -> {term: weight}. Writes are
atomic (temp file + rename) and serialized process-wide, so a concurrent
reader always sees a complete store.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass, field

from .errors import StoreCorruptError
from .scorer import tokenize

_store_lock = threading.Lock()


@dataclass(frozen=True)
class ProfileTerm:
    term: str
    weight: float = 1.0


@dataclass
class Profile:
    profile_id: str
    terms: dict[str, float] = field(default_factory=dict)


def normalize_terms(raw: list[str]) -> list[ProfileTerm]:
    """Run every raw string through the scorer's tokenizer.

    Each surviving token becomes a weight-1.0 term; duplicates collapse.
    Strings that tokenize to nothing are dropped.
    """
    seen: dict[str, ProfileTerm] = {}
    for item in raw:
        for tok in tokenize(item):
            if tok not in seen:
                seen[tok] = ProfileTerm(term=tok, weight=1.0)
    return list(seen.values())


def _read_store(store: str) -> dict:
    if not os.path.exists(store):
        return {}
    try:
        with open(store, encoding="utf-8") as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise StoreCorruptError(f"profile store {store!r} is unreadable: {exc}") from exc
    if not isinstance(data, dict):
        raise StoreCorruptError(f"profile store {store!r} must hold a JSON object")
    return data


def load_profile(store: str, profile_id: str) -> Profile:
    """Return the stored profile, or an empty one when the id is absent."""
    data = _read_store(store)
    entry = data.get(profile_id, {})
    if not isinstance(entry, dict):
        raise StoreCorruptError(f"profile {profile_id!r} in {store!r} is not an object")
    terms = {str(t): float(w) for t, w in entry.items()}
    return Profile(profile_id=profile_id, terms=terms)


def save_profile(store: str, p: Profile) -> None:
    """Persist one profile, keeping all others; readers never see a torn file."""
    with _store_lock:
        data = _read_store(store)
        data[p.profile_id] = dict(p.terms)
        directory = os.path.dirname(os.path.abspath(store))
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".profiles-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(data, fh, ensure_ascii=False, sort_keys=True, indent=2)
            os.replace(tmp_path, store)
        except BaseException:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise
