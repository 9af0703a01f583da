import numpy as np
import pytest
from hypothesis import given, strategies as st

from convobot.errors import CodeOutOfRange, EmptyCorpus, UnknownLabel
from convobot.features import (
    LabelCodec,
    build_char_alphabet,
    build_char_count_matrix,
    build_term_document_matrix,
    build_vocabulary,
    char_count_vector,
    decode_label,
    encode_label,
    vectorize_message,
)
from convobot.text import lemmatize, preprocess_for_intent, stem

from conftest import TABLE1_EXAMPLES, TABLE3_ENTITIES


class TestVocabulary:
    def test_first_appearance_order(self):
        vocab = build_vocabulary([["how", "are", "you"], ["what", "is", "your", "name"]])
        assert len(vocab) == 7
        assert vocab.terms[0] == "how"
        assert vocab.index["name"] == 6

    def test_uniqueness(self):
        vocab = build_vocabulary([["say", "say"]])
        assert vocab.terms == ("say",)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_vocabulary([])

    def test_no_tokens_at_all(self):
        with pytest.raises(EmptyCorpus):
            build_vocabulary([[], []])


class TestVectorizeMessage:
    def test_counts(self):
        vocab = build_vocabulary([["a", "b", "c"]])
        assert vectorize_message(["a", "a", "c"], vocab).tolist() == [2, 0, 1]

    def test_empty_tokens(self):
        vocab = build_vocabulary([["a"]])
        assert vectorize_message([], vocab).tolist() == [0]

    def test_oov_ignored(self):
        vocab = build_vocabulary([["a"]])
        assert vectorize_message(["zebra"], vocab).tolist() == [0]

    @given(st.lists(st.sampled_from("abcde"), max_size=20))
    def test_sum_equals_in_vocab_tokens(self, tokens):
        vocab = build_vocabulary([["a", "b", "c"]])
        vec = vectorize_message(tokens, vocab)
        assert vec.sum() == sum(1 for t in tokens if t in vocab.index)


class TestLabelCodec:
    def test_first_appearance_codes(self):
        codec = LabelCodec.from_labels(["LOC", "MISC", "ORG", "PER"])
        assert encode_label(codec, "LOC") == 0

    def test_round_trip(self):
        codec = LabelCodec.from_labels(["request_name", "request_rate"])
        assert decode_label(codec, encode_label(codec, "request_name")) == "request_name"

    def test_unknown_label(self):
        codec = LabelCodec.from_labels(["LOC", "MISC", "ORG", "PER"])
        with pytest.raises(UnknownLabel):
            encode_label(codec, "BANANA")

    def test_code_out_of_range(self):
        codec = LabelCodec.from_labels(["a", "b"])
        with pytest.raises(CodeOutOfRange):
            decode_label(codec, 2)


class TestCharAlphabet:
    def test_hand_enumerated_order(self):
        # first-appearance over "islamabad" then "taxi"
        alphabet = build_char_alphabet(["Islamabad", "Taxi"])
        assert alphabet.chars == ("i", "s", "l", "a", "m", "b", "d", "t", "x")

    def test_single_repeated_char(self):
        assert build_char_alphabet(["aaa"]).chars == ("a",)

    def test_empty(self):
        with pytest.raises(EmptyCorpus):
            build_char_alphabet([])

    def test_digits_and_hyphens_kept(self):
        alphabet = build_char_alphabet(["b-52"])
        assert set(alphabet.chars) == {"b", "-", "5", "2"}


class TestCharCountVector:
    def test_outside_alphabet_ignored(self):
        alphabet = build_char_alphabet(["ab"])
        assert char_count_vector("abzzz", alphabet).tolist() == [1, 1]

    def test_lowercased(self):
        alphabet = build_char_alphabet(["ab"])
        assert char_count_vector("AbA", alphabet).tolist() == [2, 1]

    @given(st.text(alphabet="islamabadtxi", min_size=1, max_size=12))
    def test_anagram_invariance(self, word):
        alphabet = build_char_alphabet(["islamabad", "taxi"])
        shuffled = "".join(sorted(word))
        assert np.array_equal(
            char_count_vector(word, alphabet), char_count_vector(shuffled, alphabet)
        )

    def test_amna_anam_identical(self):
        alphabet = build_char_alphabet(["amna", "anam", "karachi"])
        assert np.array_equal(
            char_count_vector("amna", alphabet), char_count_vector("anam", alphabet)
        )


# --- golden tables ----------------------------------------------------------
# Column headers displayed in the tables map through the same preprocessing
# as message text; a term or character the training corpus never produced
# has no column, which the tables render as 0.


def tdm_cell(matrix, row, header):
    term = stem(lemmatize(header.lower()))
    j = matrix.vocabulary.index.get(term)
    return 0 if j is None else int(matrix.rows[row, j])


def char_cell(vector, alphabet, ch):
    j = alphabet.index.get(ch)
    return 0 if j is None else int(vector[j])


TABLE1_CELLS = {
    0: {"please": 0, "are": 1, "need": 0, "which": 0, "how": 1, "taxi": 0,
        "rate": 0, "you": 1, "your": 0, "in": 0, "name": 0, "what": 0},
    1: {"please": 0, "are": 0, "need": 0, "which": 0, "how": 0, "taxi": 0,
        "rate": 0, "you": 0, "your": 1, "in": 0, "name": 1, "what": 1},
    2: {"please": 0, "are": 0, "need": 0, "which": 0, "how": 0, "taxi": 1,
        "rate": 1, "you": 0, "your": 0, "in": 1, "name": 0, "what": 1},
    3: {"please": 1, "are": 1, "need": 0, "which": 1, "how": 0, "taxi": 0,
        "rate": 0, "you": 0, "your": 0, "in": 0, "name": 0, "what": 0},
}

TABLE1_INTENTS = ["utter_greetings", "request_name", "request_rate", "request_docs"]

TABLE3_CELLS = {
    "Islamabad": {"a": 3, "b": 1, "c": 0, "d": 1, "e": 0, "f": 0, "g": 0,
                  "u": 0, "v": 0, "w": 0, "x": 0, "y": 0, "z": 0},
    "Karachi": {"a": 2, "b": 0, "c": 1, "d": 0, "e": 0, "f": 0, "g": 0,
                "u": 0, "v": 0, "w": 0, "x": 0, "y": 0, "z": 0},
    "Taxi": {"a": 1, "b": 0, "c": 0, "d": 0, "e": 0, "f": 0, "g": 0,
             "u": 0, "v": 0, "w": 0, "x": 1, "y": 0, "z": 0},
    "HiveWorx": {"a": 0, "b": 0, "c": 0, "d": 0, "e": 1, "f": 0, "g": 0,
                 "u": 0, "v": 1, "w": 1, "x": 1, "y": 0, "z": 0},
}

TABLE4_CELLS = {
    "taxi": {"a": 1, "b": 0, "c": 0, "d": 0, "e": 0, "f": 0, "g": 0,
             "u": 0, "v": 0, "w": 0, "x": 1, "y": 0, "z": 0},
    "rate": {"a": 1, "b": 0, "c": 0, "d": 0, "e": 1, "f": 0, "g": 0,
             "u": 0, "v": 0, "w": 0, "x": 0, "y": 0, "z": 0},
    "islamabad": {"a": 3, "b": 1, "c": 0, "d": 1, "e": 0, "f": 0, "g": 0,
                  "u": 0, "v": 0, "w": 0, "x": 0, "y": 0, "z": 0},
}


@pytest.fixture(scope="module")
def table1_matrix():
    codec = LabelCodec.from_labels(ex.intent for ex in TABLE1_EXAMPLES)
    return build_term_document_matrix(TABLE1_EXAMPLES, codec)


class TestGoldenTables:
    def test_table1_every_displayed_cell(self, table1_matrix):
        for row, cells in TABLE1_CELLS.items():
            for header, expected in cells.items():
                assert tdm_cell(table1_matrix, row, header) == expected, (row, header)

    def test_table1_labels_aligned(self, table1_matrix):
        decoded = [table1_matrix.codec.labels[c] for c in table1_matrix.labels]
        assert decoded == TABLE1_INTENTS

    def test_table1_four_rows_four_intents(self, table1_matrix):
        assert table1_matrix.rows.shape[0] == 4
        assert len(set(table1_matrix.labels.tolist())) == 4

    def test_table2_sentence_vector(self, table1_matrix):
        tokens = preprocess_for_intent("How are you?")
        vec = vectorize_message(tokens, table1_matrix.vocabulary)
        expected = TABLE1_CELLS[0]
        for header, value in expected.items():
            term = stem(lemmatize(header))
            j = table1_matrix.vocabulary.index.get(term)
            assert (0 if j is None else int(vec[j])) == value, header

    def test_table3_every_displayed_cell(self):
        alphabet = build_char_alphabet([value for value, _ in TABLE3_ENTITIES])
        for word, cells in TABLE3_CELLS.items():
            vec = char_count_vector(word, alphabet)
            for ch, expected in cells.items():
                assert char_cell(vec, alphabet, ch) == expected, (word, ch)

    def test_table3_matrix_labels(self):
        codec = LabelCodec.from_labels(("PER", "LOC", "ORG", "MISC"))
        matrix = build_char_count_matrix(
            [(v.lower(), t) for v, t in TABLE3_ENTITIES], codec
        )
        assert matrix.rows.shape == (4, len(matrix.alphabet))
        decoded = [codec.labels[c] for c in matrix.labels]
        assert decoded == ["LOC", "LOC", "MISC", "ORG"]

    def test_table4_every_displayed_cell(self):
        from convobot.text import preprocess_for_ner

        alphabet = build_char_alphabet([value for value, _ in TABLE3_ENTITIES])
        words = preprocess_for_ner("What is the taxi rate in Islamabad?")
        assert words == list(TABLE4_CELLS.keys())
        for word in words:
            vec = char_count_vector(word, alphabet)
            for ch, expected in TABLE4_CELLS[word].items():
                assert char_cell(vec, alphabet, ch) == expected, (word, ch)

    def test_matrix_rebuild_is_identical(self, table1_matrix):
        codec = LabelCodec.from_labels(ex.intent for ex in TABLE1_EXAMPLES)
        again = build_term_document_matrix(TABLE1_EXAMPLES, codec)
        assert np.array_equal(again.rows, table1_matrix.rows)
        assert np.array_equal(again.labels, table1_matrix.labels)
        assert again.vocabulary == table1_matrix.vocabulary
