from __future__ import annotations

from pathlib import Path

import pytest

from wshift.errors import RegistryError
from wshift.theorems import PUBLIC_OPERATIONS, REGISTRY, check_registry, generate_theorem_index

DOCS = Path(__file__).resolve().parent.parent / "docs"


def rows(index):
    return [line for line in index.splitlines() if line.startswith("| `")]


def test_every_operation_has_one_row():
    index = generate_theorem_index()
    table = rows(index)
    assert len(table) == len(PUBLIC_OPERATIONS) == 31
    names = [line.split("`")[1] for line in table]
    assert sorted(names) == sorted(PUBLIC_OPERATIONS)
    assert len(set(names)) == len(names)


def test_spectral_picture_row():
    row = next(line for line in rows(generate_theorem_index()) if line.startswith("| `spectral_picture`"))
    assert "unilateral spectrum theorem" in row


def test_missing_operation_is_named():
    partial = {k: v for k, v in REGISTRY.items() if k != "hhat_eval"}
    with pytest.raises(RegistryError, match="hhat_eval"):
        generate_theorem_index(partial)


def test_stale_entries_and_bad_targets():
    with pytest.raises(RegistryError, match="ghost"):
        check_registry({**REGISTRY, "ghost": ["nothing"]})
    ops = {**PUBLIC_OPERATIONS, "ghost": "wshift.oracle:no_such_function"}
    with pytest.raises(RegistryError, match="ghost"):
        check_registry({**REGISTRY, "ghost": ["nothing"]}, ops)
    with pytest.raises(RegistryError, match="lists no result"):
        check_registry({**REGISTRY, "log_beta": []})


def test_checked_in_index_is_current():
    assert (DOCS / "theorem_index.md").read_text() == generate_theorem_index()


def test_rows_have_three_cells():
    for line in rows(generate_theorem_index()):
        assert line.replace("\\|", "").count("|") == 4, line
