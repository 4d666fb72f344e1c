from .audio import (
    AudioChunk,
    ChunkTooShort,
    dct_matrix,
    detect_end_of_utterance,
    frame_signal,
    hz_to_mel,
    load_wav,
    log_mel_filterbank,
    mel_filter_matrix,
    mel_to_hz,
    mfcc13,
)
from .emotion import (
    BackchannelCategory,
    EmotionPrediction,
    LexiconEmotionPredictor,
    PredictorUnavailable,
    ScriptedEmotionPredictor,
    backchannel_response,
    predict_emotion,
)
from .engagement import (
    EmptyStream,
    EngagementConfig,
    GazeSample,
    engagement_decide,
    load_gaze_csv,
)

__all__ = [
    "AudioChunk",
    "BackchannelCategory",
    "ChunkTooShort",
    "EmotionPrediction",
    "EmptyStream",
    "EngagementConfig",
    "GazeSample",
    "LexiconEmotionPredictor",
    "PredictorUnavailable",
    "ScriptedEmotionPredictor",
    "backchannel_response",
    "dct_matrix",
    "detect_end_of_utterance",
    "engagement_decide",
    "frame_signal",
    "hz_to_mel",
    "load_gaze_csv",
    "load_wav",
    "log_mel_filterbank",
    "mel_filter_matrix",
    "mel_to_hz",
    "mfcc13",
    "predict_emotion",
]
