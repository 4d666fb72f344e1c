"""Rule table mapping the tracked user state to a system emotion.

| condition (checked in order)                  | system emotion |
|-----------------------------------------------|----------------|
| emotion sad, or valence negative              | Compassionate  |
| emotion happy, or valence positive + arousal high | Enthusiastic |
| anything else                                 | Neutral        |

Domain-agnostic by construction: only the four user-state labels go in.
"""

from __future__ import annotations

from ..acts import SystemEmotion
from ..tracking import UserState


def affective_policy(us: UserState) -> SystemEmotion:
    if us.emotion == "sad" or us.valence == "negative":
        return SystemEmotion.COMPASSIONATE
    if us.emotion == "happy" or (us.valence == "positive" and us.arousal == "high"):
        return SystemEmotion.ENTHUSIASTIC
    return SystemEmotion.NEUTRAL
