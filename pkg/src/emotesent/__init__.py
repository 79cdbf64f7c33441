"""Twitch-chat sentiment toolkit: emote-aware tokenization, bag-of-ngram
baselines, SGNS embeddings, the emote pseudo-dictionary, and the two-stage
LOOVE fusion classifier."""

__version__ = "0.1.0"

from .corpus import (CLASS_ORDER, ChatMessage, EmoteDictionary,
                     LabeledExample, SentimentLabel, SentimentLexicon,
                     SplitSpec, load_chat_log, load_emote_dictionary,
                     load_labeled_tsv, load_lexicon, stratified_split)
from .tokenizer import (ProcessingLevel, Token, TokenKind, process, tokenize)
from .features import FeatureKind, NgramVocab, build_vocab, vectorize
from .classify import (TrainedModel, evaluate, gini_importances, predict,
                       train)
from .embed import EmbedConfig, EmbeddingStore, train_embeddings
from .pseudodict import (PseudoDictConfig, PseudoDictEntry, build_pseudodict,
                         evaluate_pseudodict, infer_word_valences)
from .loove import (EmoteStats, LooveModel, extract_emote_stats,
                    feature_importance_loove, predict_loove, train_loove)
