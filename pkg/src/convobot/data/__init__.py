"""Packaged data files: the sample transportation knowledge base and the
stop-word list."""

from importlib import resources


def sample_kb_path() -> str:
    return str(resources.files(__name__).joinpath("sample_kb.json"))


def stop_words_path() -> str:
    return str(resources.files(__name__).joinpath("stopwords.txt"))
