import sys
import unicodedata
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT / "src"))

import pytest
from pydantic import ValidationError
from returns.io import IOFailure
from returns.result import Failure, Success
from returns.unsafe import unsafe_perform_io

from lfspeech.errors import EmptyTokenization, IoFailure, TokenTableError, UnknownGrapheme
from lfspeech.text_norm import (
    TokenTable,
    load_token_table,
    normalize_transcript,
    parse_token_table,
    split_words,
    tokenize_word,
    tokenize_words,
)

DATA = Path(__file__).parent / "data"


@pytest.fixture
def table() -> TokenTable:
    return unsafe_perform_io(load_token_table(DATA / "tokens.tsv").unwrap())


def test_normalize_and_split():
    text = "  আমি\tভাত   খাই \n"
    assert normalize_transcript(text) == "আমি ভাত খাই"
    assert normalize_transcript(normalize_transcript(text)) == normalize_transcript(text)
    assert split_words(normalize_transcript(text)) == ["আমি", "ভাত", "খাই"]
    assert split_words(normalize_transcript(" \n\t ")) == []


def test_normalize_composes_nfc():
    # e-kar + aa-kar composes to o-kar
    assert normalize_transcript("কো") == "কো"
    # rra is a composition exclusion: NFC keeps it decomposed
    assert normalize_transcript("ড়") == unicodedata.normalize("NFC", "ড়") == "ড়"
    assert normalize_transcript("a  b\r\n") == "a b"


def test_token_table_file(table):
    assert table.blank_id == 0
    assert table.vocab_size == 14
    assert table.max_key_length == 3
    assert table.entries["ক্ষ"] == 8


def test_tokenize_word_longest_match(table):
    assert tokenize_word("আমি", table) == Success([1, 2, 3])
    assert tokenize_word("ক্ষ", table) == Success([8])
    assert tokenize_word("ক্", table) == Success([4, 9])
    assert tokenize_word("আxমি", table) == Success([1, 2, 3])
    assert tokenize_word("abc", table) == Failure(EmptyTokenization(word="abc"))


def test_tokenize_word_error_policy():
    strict = TokenTable(entries={"ক": 1, "খ": 2}, unknown_policy="error")
    assert tokenize_word("কখ", strict) == Success([1, 2])
    assert tokenize_word("কzখ", strict) == Failure(UnknownGrapheme(position=1, grapheme="z"))


def test_tokens_spell_the_word(table):
    inverse = {v: k for k, v in table.entries.items()}
    for word in ["আমি", "ভাত", "খাই", "ক্ষমা", "মাগি"]:
        tokens = tokenize_word(word, table).unwrap()
        assert table.blank_id not in tokens
        assert "".join(inverse[t] for t in tokens) == word


def test_tokenize_words_records_skips(table, caplog):
    plan = tokenize_words(["আমি", "zz", "ভাত"], table).unwrap()
    assert plan.tokens == (1, 2, 3, 11, 7, 12)
    assert plan.word_of_token == (0, 0, 0, 2, 2, 2)
    assert plan.skipped_words == ((1, "zz"),)
    assert plan.skipped_graphemes == 2
    assert plan.token_counts() == [("আমি", 3), ("ভাত", 3)]
    assert "unknown grapheme" in caplog.text


def test_parse_token_table_errors():
    assert parse_token_table("ক 1\n") == Failure(TokenTableError(line=1, reason="expected grapheme<TAB>id"))
    assert parse_token_table("ক\t1\nক\t2\n") == Failure(TokenTableError(line=2, reason="duplicate grapheme 'ক'"))
    assert parse_token_table("# c\nক\tx\n") == Failure(TokenTableError(line=2, reason="bad id 'x'"))

    sparse = parse_token_table("ক\t1\nখ\t5\n")
    assert isinstance(sparse, Failure)
    assert sparse.failure().line == 0
    assert "dense" in sparse.failure().reason

    assert parse_token_table("<blank>\t2\nক\t0\nখ\t1\n").unwrap().blank_id == 2


def test_load_missing_table(tmp_path):
    result = load_token_table(tmp_path / "nope.tsv")
    assert isinstance(result, IOFailure)
    assert isinstance(unsafe_perform_io(result.failure()), IoFailure)


def test_table_invariants():
    with pytest.raises(ValidationError):
        TokenTable(entries={"ক": 0})
    with pytest.raises(ValidationError):
        TokenTable(entries={"": 1})
