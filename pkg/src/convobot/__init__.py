"""convobot: a task-oriented chatbot with a bag-of-words intent classifier
and a character-count named-entity recognizer, both trained from scratch."""

__version__ = "0.1.0"
