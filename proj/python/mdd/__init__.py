# Copyright 2026  The mdd-engine Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0

"""Non-autoregressive mispronunciation detection and diagnosis engine."""

from pathlib import Path

from ._mdd import (  # noqa: F401
    DataError,
    FoldingMap,
    Judgement,
    Models,
    PhoneInventory,
    TokenSpan,
    UtteranceRecord,
    align,
    classify,
    collapse,
    ctc_forward_logprob,
    evaluate,
    f1,
    greedy_path,
    load_corpus,
    per,
    read_matrix,
    synth_corpus,
    token_confidence,
    write_matrix,
)

__all__ = [
    "DataError", "FoldingMap", "Judgement", "Models", "PhoneInventory",
    "TokenSpan", "UtteranceRecord", "align", "classify", "collapse",
    "ctc_forward_logprob", "data_path", "evaluate", "f1", "greedy_path",
    "load_corpus", "per", "read_matrix", "synth_corpus", "token_confidence",
    "write_matrix",
]


def data_path(name: str) -> str:
    """Path to a bundled data file (phone inventory, folding map)."""
    p = Path(__file__).parent / "data" / name
    if not p.exists():
        raise FileNotFoundError(f"no bundled data file named {name!r}")
    return str(p)
