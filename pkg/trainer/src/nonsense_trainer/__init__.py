"""Compact trainer proving generated corpora support seq2seq pretraining."""

__version__ = "0.1.0"

from .config import TrainConfig  # noqa: F401
from .data import Example, TokenVocab, read_records, to_examples  # noqa: F401
from .evaluate import EvalMetrics, evaluate, uniform_nll  # noqa: F401
from .model import MiniSeq2Seq, build_model  # noqa: F401
from .train import finetune, load_checkpoint, pretrain, save_checkpoint  # noqa: F401
