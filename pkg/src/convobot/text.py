"""Deterministic text preprocessing.

Tokenization keeps letters only (punctuation and digits are stripped inside
tokens), lemmatization is a small fixed rule table for plural/verbal -s
endings, and stemming is a Porter-style suffix stripper iterated to a
fixpoint so that ``stem(stem(w)) == stem(w)`` holds for every input.

Two entry points exist because the intent and NER models disagree about
stop words: intent features keep them, entity recognition drops them before
any word reaches the character counter.
"""

from __future__ import annotations

from importlib import resources

__all__ = [
    "tokenize",
    "lemmatize",
    "stem",
    "remove_stop_words",
    "preprocess_for_intent",
    "preprocess_for_ner",
    "load_stop_words",
    "default_stop_words",
]


def tokenize(text: str) -> list[str]:
    """Split on whitespace, lowercase, and strip non-letter characters.

    Tokens emptied by stripping are dropped; duplicates are preserved.
    """
    tokens = []
    for word in text.split():
        cleaned = "".join(ch for ch in word.lower() if ch.isalpha())
        if cleaned:
            tokens.append(cleaned)
    return tokens


# --- lemmatizer -----------------------------------------------------------

def lemmatize(token: str) -> str:
    """Strip plural/verbal endings with a fixed rule table ("says" -> "say").

    Idempotent: no rule output ends in a strippable suffix.
    """
    if len(token) <= 3:
        return token
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith(("sses", "xes", "zes", "ches", "shes")):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    return token


# --- Porter-style stemmer -------------------------------------------------
#
# Departures from Porter (1980), all required by this artifact's contract:
#   * step 1c (trailing y -> i) is omitted: "play" must stem to itself;
#   * step 5a keeps only the m>1 clause: "are"/"please" must survive;
#   * the whole pass is iterated to a fixpoint to make stem() idempotent
#     (a single canonical pass is not: "response" -> "respons" -> "respon").

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem_: str) -> int:
    # m in the [C](VC)^m[V] decomposition
    m = 0
    prev_vowel = False
    for i in range(len(stem_)):
        cons = _is_consonant(stem_, i)
        if prev_vowel and cons:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem_: str) -> bool:
    return any(not _is_consonant(stem_, i) for i in range(len(stem_)))


def _ends_double_consonant(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_consonant(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _step1a(w: str) -> str:
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ies"):
        return w[:-2]
    if w.endswith("ss"):
        return w
    if w.endswith("s"):
        return w[:-1]
    return w


def _step1b(w: str) -> str:
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            return w[:-1]
        return w
    stripped = None
    if w.endswith("ed") and _has_vowel(w[:-2]):
        stripped = w[:-2]
    elif w.endswith("ing") and _has_vowel(w[:-3]):
        stripped = w[:-3]
    if stripped is None:
        return w
    if stripped.endswith(("at", "bl", "iz")):
        return stripped + "e"
    if _ends_double_consonant(stripped) and not stripped.endswith(("l", "s", "z")):
        return stripped[:-1]
    if _measure(stripped) == 1 and _ends_cvc(stripped):
        return stripped + "e"
    return stripped


_STEP2 = [
    ("ational", "ate"), ("ization", "ize"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("biliti", "ble"), ("tional", "tion"), ("entli", "ent"),
    ("ousli", "ous"), ("ation", "ate"), ("alism", "al"), ("aliti", "al"),
    ("iviti", "ive"), ("enci", "ence"), ("anci", "ance"), ("izer", "ize"),
    ("abli", "able"), ("alli", "al"), ("ator", "ate"), ("eli", "e"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
    "ate", "iti", "ous", "ive", "ize", "ion", "al", "er", "ic", "ou",
]


def _apply_table(w: str, table, min_measure: int) -> str:
    for suffix, replacement in table:
        if w.endswith(suffix):
            stem_ = w[: -len(suffix)]
            if _measure(stem_) > min_measure - 1:
                return stem_ + replacement
            return w
    return w


def _step4(w: str) -> str:
    for suffix in _STEP4:
        if w.endswith(suffix):
            stem_ = w[: -len(suffix)]
            if _measure(stem_) > 1:
                if suffix == "ion" and not stem_.endswith(("s", "t")):
                    return w
                return stem_
            return w
    return w


def _step5(w: str) -> str:
    if w.endswith("e") and _measure(w[:-1]) > 1:
        w = w[:-1]
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]
    return w


def _porter_pass(w: str) -> str:
    if len(w) <= 2:
        return w
    w = _step1a(w)
    w = _step1b(w)
    w = _apply_table(w, _STEP2, 1)
    w = _apply_table(w, _STEP3, 1)
    w = _step4(w)
    w = _step5(w)
    return w


def stem(token: str) -> str:
    """Suffix-stripping stem, iterated until the word stops changing."""
    current = token
    for _ in range(max(len(token), 1)):
        nxt = _porter_pass(current)
        if nxt == current:
            return current
        current = nxt
    return current


# --- stop words -----------------------------------------------------------

def load_stop_words(path) -> frozenset[str]:
    """Read a stop-word file: one lowercase word per line, '#' comments."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            entry = line.split("#", 1)[0].strip().lower()
            if entry:
                words.add(entry)
    return frozenset(words)


def _packaged_stop_words() -> frozenset[str]:
    text = resources.files("convobot.data").joinpath("stopwords.txt").read_text("utf-8")
    words = set()
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip().lower()
        if entry:
            words.add(entry)
    return frozenset(words)


_STOP_WORDS: frozenset[str] | None = None


def default_stop_words() -> frozenset[str]:
    global _STOP_WORDS
    if _STOP_WORDS is None:
        _STOP_WORDS = _packaged_stop_words()
    return _STOP_WORDS


def remove_stop_words(tokens: list[str], stop_words: frozenset[str] | None = None) -> list[str]:
    """Drop stop-word tokens, preserving the order of survivors."""
    stops = default_stop_words() if stop_words is None else stop_words
    return [t for t in tokens if t not in stops]


# --- composed pipelines ---------------------------------------------------

def preprocess_for_intent(text: str) -> list[str]:
    """tokenize -> lemmatize -> stem. Stop words and duplicates are kept."""
    return [stem(lemmatize(t)) for t in tokenize(text)]


def preprocess_for_ner(text: str, stop_words: frozenset[str] | None = None) -> list[str]:
    """tokenize -> drop stop words. No stemming: surface forms feed the
    character counter and must stay intact."""
    return remove_stop_words(tokenize(text), stop_words)
