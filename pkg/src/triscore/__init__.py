"""Embedding-based quality scoring for speech-to-speech translation.

Scores a translation from three sentence embeddings (source, translation,
reference), either with a training-free cosine combination or with a small
regressor trained on human ratings, and ships the correlation/significance
statistics used to validate metrics against human judgments.
"""

__version__ = "0.1.0"
