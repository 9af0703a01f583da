import pytest
from hypothesis import given, strategies as st

from convobot.text import (
    default_stop_words,
    lemmatize,
    load_stop_words,
    preprocess_for_intent,
    preprocess_for_ner,
    remove_stop_words,
    stem,
    tokenize,
)


class TestTokenize:
    def test_table2_sentence(self):
        assert tokenize("How are you?") == ["how", "are", "you"]

    def test_empty(self):
        assert tokenize("") == []

    def test_duplicates_kept_digits_punct_stripped(self):
        assert tokenize("say say 42!!") == ["say", "say"]

    def test_numbers_inside_tokens(self):
        assert tokenize("ab3cd e5") == ["abcd", "e"]

    def test_non_ascii_letters_survive(self):
        assert tokenize("Café München!") == ["café", "münchen"]

    @given(st.text(max_size=60))
    def test_tokens_are_letters_only(self, text):
        for token in tokenize(text):
            assert token
            assert all(ch.isalpha() for ch in token)
            assert token == token.lower()

    @given(st.text(max_size=60))
    def test_multiplicity_bounded_by_words(self, text):
        assert len(tokenize(text)) <= len(text.split())


class TestLemmatize:
    @pytest.mark.parametrize(
        "word,expected",
        [
            ("says", "say"),
            ("say", "say"),
            ("cities", "city"),
            ("boxes", "box"),
            ("glasses", "glass"),
            ("this", "this"),
            ("bus", "bus"),
            ("ties", "tie"),
        ],
    )
    def test_rules(self, word, expected):
        assert lemmatize(word) == expected

    @given(st.text(alphabet=st.characters(min_codepoint=97, max_codepoint=122), max_size=15))
    def test_idempotent(self, word):
        assert lemmatize(lemmatize(word)) == lemmatize(word)


class TestStem:
    @pytest.mark.parametrize(
        "word,expected",
        [
            ("played", "play"),
            ("play", "play"),
            ("running", "run"),
            ("are", "are"),
            ("please", "please"),
            ("rate", "rate"),
            ("name", "name"),
            ("booking", "book"),
            ("cancelled", "cancel"),
            ("reservation", "reserv"),
            ("agreed", "agree"),
        ],
    )
    def test_examples(self, word, expected):
        assert stem(word) == expected

    @given(st.text(alphabet=st.characters(min_codepoint=97, max_codepoint=122), max_size=15))
    def test_idempotent(self, word):
        assert stem(stem(word)) == stem(word)

    @given(st.text(alphabet=st.characters(min_codepoint=97, max_codepoint=122), max_size=15))
    def test_lemmatize_then_stem_idempotent(self, word):
        once = stem(lemmatize(word))
        assert stem(lemmatize(once)) == once


class TestStopWords:
    def test_table4_tokens(self):
        tokens = ["what", "is", "the", "taxi", "rate", "in", "islamabad"]
        assert remove_stop_words(tokens) == ["taxi", "rate", "islamabad"]

    def test_empty(self):
        assert remove_stop_words([]) == []

    def test_no_stop_words_present(self):
        assert remove_stop_words(["taxi"]) == ["taxi"]

    @given(st.lists(st.sampled_from(["the", "taxi", "is", "rate", "a", "islamabad"]), max_size=12))
    def test_idempotent(self, tokens):
        once = remove_stop_words(tokens)
        assert remove_stop_words(once) == once

    def test_default_list_loaded_and_sane(self):
        stops = default_stop_words()
        assert 100 <= len(stops) <= 200
        assert {"what", "is", "the", "in", "how", "are", "you"} <= stops
        assert "taxi" not in stops and "islamabad" not in stops

    def test_load_custom_file(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_text("# comment line\nfoo\nBAR  # trailing comment\n\n", encoding="utf-8")
        assert load_stop_words(path) == frozenset({"foo", "bar"})


class TestPipelines:
    def test_intent_keeps_stop_words(self):
        assert preprocess_for_intent("How are you?") == ["how", "are", "you"]

    def test_intent_table1_row2(self):
        tokens = preprocess_for_intent("What is your name?")
        assert {"what", "your", "name"} <= set(tokens)

    def test_intent_empty(self):
        assert preprocess_for_intent("") == []

    def test_ner_drops_stop_words_keeps_surface(self):
        assert preprocess_for_ner("What is the taxi rate in Islamabad?") == [
            "taxi",
            "rate",
            "islamabad",
        ]

    def test_ner_single_entity(self):
        assert preprocess_for_ner("Islamabad") == ["islamabad"]

    def test_ner_all_stop_words(self):
        assert preprocess_for_ner("is the") == []

    def test_ner_does_not_stem(self):
        # stemming would mangle surface forms the character counter needs
        assert preprocess_for_ner("visiting Islamabad") == ["visiting", "islamabad"]
