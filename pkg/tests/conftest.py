import json

import pytest

from convobot.features import LabelCodec
from convobot.kb import EntityBinding, InputExample, load_kb
from convobot.net.mlp import MlpConfig


# the four messages behind the term-document matrix golden tests; the
# request_docs message is chosen to match the displayed row cells
TABLE1_EXAMPLES = [
    InputExample("How are you?", "utter_greetings"),
    InputExample("What is your name?", "request_name"),
    InputExample(
        "What is taxi rate in Islamabad?",
        "request_rate",
        (EntityBinding("MISC", "taxi"), EntityBinding("LOC", "Islamabad")),
    ),
    InputExample("Which documents are required please?", "request_docs"),
]

TABLE3_ENTITIES = [
    ("Islamabad", "LOC"),
    ("Karachi", "LOC"),
    ("Taxi", "MISC"),
    ("HiveWorx", "ORG"),
]


def small_kb_doc() -> dict:
    """A minimal valid KB whose entity inventory is exactly Table 3."""
    return {
        "input": [
            {
                "message": "What is taxi rate in Islamabad?",
                "intent": "request_rate",
                "entities": [
                    {"type": "MISC", "value": "taxi"},
                    {"type": "LOC", "value": "Islamabad"},
                ],
            },
            {
                "message": "What is the rate in Karachi?",
                "intent": "request_rate",
                "entities": [{"type": "LOC", "value": "Karachi"}],
            },
            {
                "message": "Is HiveWorx your company?",
                "intent": "request_company",
                "entities": [{"type": "ORG", "value": "HiveWorx"}],
            },
            {
                "message": "Which company runs this service?",
                "intent": "request_company",
                "entities": [],
            },
        ],
        "response": [
            {"intent": "request_rate", "templates": ["Rates depend on the city."]},
            {"intent": "request_company", "templates": ["HiveWorx runs this service."]},
        ],
        "ne_values": {
            "Islamabad": {
                "taxi": {"Starting": "20 Rs./km", "Minimum": "15 Rs./km"},
                "bike": {"Starting": "5 Rs./km", "Minimum": "4 Rs./km"},
                "business": {"Starting": "50Rs./km", "Minimum": "40Rs./km"},
            }
        },
    }


@pytest.fixture
def small_kb():
    return load_kb(json.dumps(small_kb_doc()))


@pytest.fixture(scope="session")
def sample_kb():
    from convobot.data import sample_kb_path
    from convobot.kb import load_kb_file

    return load_kb_file(sample_kb_path())


@pytest.fixture(scope="session")
def sample_intent_model(sample_kb):
    from convobot.intent import train_intent_model

    model, stats = train_intent_model(sample_kb, test_fraction=0.2, seed=0)
    return model, stats


@pytest.fixture(scope="session")
def sample_ner_model(sample_kb):
    from convobot.ner import train_ner_from_kb

    return train_ner_from_kb(sample_kb)


def tiny_mlp_config(n_in, n_out, **overrides) -> MlpConfig:
    defaults = dict(
        layer_sizes=(n_in, 8, 6, n_out),
        learning_rate=0.1,
        l2_lambda=0.0,
        max_epochs=50,
        patience=50,
        batch_size=4,
        seed=0,
    )
    defaults.update(overrides)
    return MlpConfig(**defaults)


CONLL_CODEC = LabelCodec.from_labels(("PER", "LOC", "ORG", "MISC"))
