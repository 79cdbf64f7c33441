"""End-to-end text classifier bundle: tokenizer + processing level + n-gram
vocab + trained model, with predict-on-raw-text convenience. This is the
CLF1 shape that the fusion classifier consumes."""

import json
from dataclasses import dataclass

from . import classify
from .corpus import SentimentLabel
from .errors import TrainingError
from .features import NgramVocab, build_vocab, vectorize
from .tokenizer import ProcessingLevel, Token, TokenKind, process, tokenize


@dataclass
class TextPipeline:
    emotes: object            # EmoteDictionary
    level: ProcessingLevel
    vocab: NgramVocab
    model: classify.TrainedModel
    stopwords: object = None
    lemmas: dict = None

    def prepare(self, text):
        return process(tokenize(text, self.emotes), self.level,
                       stopwords=self.stopwords, lemmas=self.lemmas)

    def vectorize_text(self, text):
        return vectorize(self.prepare(text), self.vocab)

    def predict_text(self, text):
        return classify.predict(self.model, self.vectorize_text(text))


def train_text_pipeline(examples, emotes, level=ProcessingLevel.P1, order=2,
                        algorithm="RF", min_count=1, seed=0, hyperparams=None,
                        stopwords=None, lemmas=None):
    """Tokenize + process labeled examples, build the vocab, train a model."""
    if not examples:
        raise TrainingError("no training examples")
    processed = [process(tokenize(ex.text, emotes), level,
                         stopwords=stopwords, lemmas=lemmas)
                 for ex in examples]
    vocab = build_vocab(processed, order=order, min_count=min_count)
    data = [(vectorize(toks, vocab), ex.label)
            for toks, ex in zip(processed, examples)]
    model = classify.train(algorithm, data, n_features=len(vocab), seed=seed,
                           hyperparams=hyperparams,
                           vocab_hash=vocab.content_hash())
    return TextPipeline(emotes=emotes, level=level, vocab=vocab, model=model,
                        stopwords=stopwords, lemmas=lemmas)


def evaluate_pipeline(pipeline, examples):
    data = [(pipeline.vectorize_text(ex.text), ex.label) for ex in examples]
    return classify.evaluate(pipeline.model, data)


def save_pipeline(pipeline, model_path, vocab_path):
    pipeline.vocab.save(vocab_path)
    blob = classify.model_to_json_dict(pipeline.model)
    blob["processing_level"] = pipeline.level.value
    with open(model_path, "w", encoding="utf-8") as f:
        json.dump(blob, f)


def load_pipeline(model_path, vocab_path, emotes, stopwords=None, lemmas=None):
    vocab = NgramVocab.load(vocab_path)
    with open(model_path, encoding="utf-8") as f:
        blob = json.load(f)
    model = classify.model_from_json_dict(blob)
    level = ProcessingLevel(blob.get("processing_level", "P1"))
    return TextPipeline(emotes=emotes, level=level, vocab=vocab, model=model,
                        stopwords=stopwords, lemmas=lemmas)
