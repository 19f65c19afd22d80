"""Sentence splitting and tokenization for CJK-dominant legal text.

Every module that talks about "sentences" or "terms" goes through these two
functions, so their behavior is deliberately frozen: a fixed delimiter set
for sentences, and character bigrams plus ASCII alphanumeric runs for terms.
"""

from __future__ import annotations

from dataclasses import dataclass

SENTENCE_DELIMITERS = frozenset("。！？；…!?;\n")

# CJK Unified Ideographs, Extension A, and compatibility ideographs.
_CJK_RANGES = ((0x4E00, 0x9FFF), (0x3400, 0x4DBF), (0xF900, 0xFAFF))


@dataclass(frozen=True)
class Sentence:
    """A sentence with its 0-based index and [start, end) source offsets."""

    index: int
    text: str
    char_span: tuple[int, int]


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def split_sentences(text: str) -> list[Sentence]:
    """Split at 。！？；…!?;\\n with the delimiter kept on the left sentence.

    Fragments are trimmed of surrounding whitespace and dropped when that
    leaves nothing; `char_span` offsets index Unicode scalar values of the
    original string, so `text[span[0]:span[1]]` equals the sentence text.
    """
    sentences: list[Sentence] = []
    start = 0
    for i, ch in enumerate(text):
        if ch in SENTENCE_DELIMITERS:
            _append_fragment(sentences, text, start, i + 1)
            start = i + 1
    _append_fragment(sentences, text, start, len(text))
    return sentences


def _append_fragment(sentences: list[Sentence], text: str, lo: int, hi: int) -> None:
    while lo < hi and text[lo].isspace():
        lo += 1
    while hi > lo and text[hi - 1].isspace():
        hi -= 1
    if lo < hi:
        sentences.append(Sentence(index=len(sentences), text=text[lo:hi], char_span=(lo, hi)))


def tokenize(text: str) -> list[str]:
    """Emit overlapping bigrams over CJK runs and lowercased ASCII word runs.

    A CJK run of length 1 yields itself as a unigram; anything that is
    neither CJK nor ASCII alphanumeric yields nothing.
    """
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if _is_cjk(ch):
            j = i + 1
            while j < n and _is_cjk(text[j]):
                j += 1
            run = text[i:j]
            if len(run) == 1:
                tokens.append(run)
            else:
                tokens.extend(run[k : k + 2] for k in range(len(run) - 1))
            i = j
        elif ch.isascii() and ch.isalnum():
            j = i + 1
            while j < n and text[j].isascii() and text[j].isalnum():
                j += 1
            tokens.append(text[i:j].lower())
            i = j
        else:
            i += 1
    return tokens
