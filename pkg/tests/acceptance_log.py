"""Shared store for acceptance results, printed by the conftest summary hook."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(key: int, ok: bool, line: str):
    RESULTS[key] = (bool(ok), line)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {line}")
