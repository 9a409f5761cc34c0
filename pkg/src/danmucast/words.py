"""Word counting with CJK support.

Pause and length budgets are expressed in words spoken at a fixed rate,
so the counting rule matters: for CJK text each character counts as one
word (Mandarin speech rate is measured in characters), while
space-separated scripts count whitespace tokens.
"""

from __future__ import annotations

import re

_CJK_RE = re.compile(r"[　-〿぀-ヿ一-鿿豈-﫿]")

WORD_MODE_CJK = "cjk_chars"
WORD_MODE_WHITESPACE = "whitespace"


def count_words(text: str, mode: str = WORD_MODE_CJK) -> int:
    """Count words under the configured rule.

    ``cjk_chars``: every CJK character is one word; remaining non-CJK runs
    are counted as whitespace tokens. ``whitespace``: plain token count.
    """
    if mode == WORD_MODE_WHITESPACE:
        return len(text.split())
    if mode != WORD_MODE_CJK:
        raise ValueError(f"unknown word-count mode {mode!r}")
    cjk = len(_CJK_RE.findall(text))
    rest = _CJK_RE.sub(" ", text)
    return cjk + len(rest.split())
