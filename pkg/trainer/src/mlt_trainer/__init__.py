"""Fine-tunes a causal language model on a meta-length-token corpus.

Consumes the benchmark toolkit's triples files and template config format
unchanged; extends the model vocabulary with the nine token surfaces,
masks the loss to the assistant span, runs the cosine-schedule recipe, and
verifies length behavior on held-out prompts.
"""

from .corpus import MltCorpus, Triple, load_triples, prepare_corpus
from .templates import ChatTemplate, load_template
from .tokenizing import extend_vocab, train_base_tokenizer
from .training import TrainConfig, train
from .verification import VerificationReport, verify_toy

__version__ = "0.1.0"
