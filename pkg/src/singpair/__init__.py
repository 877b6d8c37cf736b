"""Rank and select sentence singletons and pairs for extractive summarization.

The pipeline builds ground-truth instance sets from reference summaries,
featurizes every candidate singleton/pair, ranks them with LambdaMART (or
external scores), picks a summary with MMR and evaluates the picks against
primary/secondary ground truth and with ROUGE.
"""

__version__ = "0.1.0"
