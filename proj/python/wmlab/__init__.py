"""Text watermarking laboratory.

Thin python surface over the C++ core: corpus handling, a built-in trigram
language model, four watermark scheme generator/detector pairs (KGW, SIR,
Unbiased, EWD), simulated paraphrase/back-translation attacks, linguistic
feature extraction, and ROC/AUC + correlation evaluation.
"""

from wmlab._core import *  # noqa: F401,F403
from wmlab._core import __version__  # noqa: F401
