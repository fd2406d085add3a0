import math

from smartnote.tokens import count_tokens, set_token_counter


def test_empty_string():
    assert count_tokens("") == 0

def test_byte_heavy_text_uses_byte_estimate():
    text = "x" * 400  # one whitespace piece, 100 byte-tokens
    assert count_tokens(text) == 100

def test_word_heavy_text_uses_piece_count():
    text = "a b c d e f g h"
    assert count_tokens(text) == 8

def test_multibyte_characters_count_by_bytes():
    text = "é" * 40  # 80 utf-8 bytes
    assert count_tokens(text) == math.ceil(80 / 4)

def test_counter_is_pluggable():
    set_token_counter(lambda s: 7)
    try:
        assert count_tokens("whatever") == 7
    finally:
        set_token_counter(None)
