"""Emotion prediction interface and backchannel realizations.

Trained emotion/backchannel models plug in behind a callable interface;
two deterministic implementations ship here: a scripted queue for driving
tests and a tiny word-valence lexicon for demos.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..tracking import (
    AROUSAL_LABELS,
    EMOTION_LABELS,
    VALENCE_LABELS,
    InvalidLabel,
)


class PredictorUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class EmotionPrediction:
    category: str = "neutral"
    arousal: str = "medium"
    valence: str = "neutral"

    def __post_init__(self):
        if self.category not in EMOTION_LABELS:
            raise InvalidLabel("category", self.category, EMOTION_LABELS)
        if self.arousal not in AROUSAL_LABELS:
            raise InvalidLabel("arousal", self.arousal, AROUSAL_LABELS)
        if self.valence not in VALENCE_LABELS:
            raise InvalidLabel("valence", self.valence, VALENCE_LABELS)


class ScriptedEmotionPredictor:
    """Replays a fixed sequence, then keeps answering all-neutral."""

    def __init__(self, script=()):
        self._queue = [
            p if isinstance(p, EmotionPrediction) else EmotionPrediction(*p)
            for p in script
        ]

    def __call__(self, features) -> EmotionPrediction:
        if self._queue:
            return self._queue.pop(0)
        return EmotionPrediction()


_WORD = re.compile(r"[a-z']+")


class LexiconEmotionPredictor:
    """Counts valence-labeled words in the input text; majority wins."""

    def __init__(self, lexicon: dict):
        for word, label in lexicon.items():
            if label not in ("negative", "positive"):
                raise InvalidLabel("valence", label, ("negative", "positive"))
            if word != word.lower():
                raise ValueError(f"lexicon words must be lowercase: {word!r}")
        self.lexicon = dict(lexicon)

    @classmethod
    def from_file(cls, path) -> "LexiconEmotionPredictor":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def __call__(self, text) -> EmotionPrediction:
        counts = {"negative": 0, "positive": 0}
        for word in _WORD.findall(str(text or "").lower()):
            label = self.lexicon.get(word)
            if label is not None:
                counts[label] += 1
        if counts["negative"] > counts["positive"]:
            return EmotionPrediction(category="sad", arousal="medium", valence="negative")
        if counts["positive"] > counts["negative"]:
            return EmotionPrediction(category="happy", arousal="medium", valence="positive")
        return EmotionPrediction()


def predict_emotion(features, predictor) -> EmotionPrediction:
    if predictor is None:
        raise PredictorUnavailable("no emotion predictor configured")
    prediction = predictor(features)
    if not isinstance(prediction, EmotionPrediction):
        raise TypeError("predictor must return an EmotionPrediction")
    return prediction


class BackchannelCategory(Enum):
    NO_BACKCHANNEL = "no-backchannel"
    CONTINUER = "backchannel-continuer"
    ASSESSMENT = "backchannel-assessment"


_REALIZATIONS = {
    BackchannelCategory.NO_BACKCHANNEL: None,
    BackchannelCategory.CONTINUER: "Uh-huh",
    BackchannelCategory.ASSESSMENT: "Right",
}


def backchannel_response(category: BackchannelCategory) -> Optional[str]:
    return _REALIZATIONS[BackchannelCategory(category)]
