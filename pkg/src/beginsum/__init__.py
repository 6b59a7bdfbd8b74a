"""Extractive summarization toolkit: beginning-aware bidirectional
attention inside two extractor architectures, plus baselines, keyword
and contextual-embedding augmentations, and ROUGE evaluation."""

__version__ = "0.1.0"
