"""Template generation: one utterance pattern per system act signature.

Template files are plain text. ``[emotion=Neutral]`` style headers open a
per-emotion section; entries look like

    inform_by_name(name, dish_type, vegan) :: The meal {name} is ...

Placeholders substitute slot values; ``{fn(slot, literal, ...)}`` calls one
of the shipped helpers (article, plural, capitalize, bool_text). Sets for
non-neutral emotions may stay partial; lookups fall back to the Neutral set,
which a load-time check proves total over the domain's action space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .acts import SysAct, SysActType, SystemEmotion


class ParseError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateSignature(ValueError):
    def __init__(self, signature, emotion):
        super().__init__(f"duplicate template for {signature} in {emotion.value} set")
        self.signature = signature
        self.emotion = emotion


class CoverageError(ValueError):
    def __init__(self, missing):
        missing = sorted(missing, key=lambda sig: (sig[0].value, sig[1]))
        names = ", ".join(f"{t.value}({', '.join(slots)})" for t, slots in missing)
        super().__init__(f"neutral template set is missing: {names}")
        self.missing = missing


class MissingSlotValue(KeyError):
    def __init__(self, slot, signature):
        super().__init__(f"no value for slot {slot!r} in act {signature}")
        self.slot = slot


@dataclass(frozen=True)
class Template:
    act_type: SysActType
    slots: tuple  # sorted slot names
    pattern: str

    @property
    def signature(self) -> tuple:
        return (self.act_type, self.slots)


class TemplateSet:
    def __init__(self, emotion: SystemEmotion):
        self.emotion = emotion
        self.templates: dict = {}

    def add(self, template: Template):
        if template.signature in self.templates:
            raise DuplicateSignature(template.signature, self.emotion)
        self.templates[template.signature] = template


def _article(value: str) -> str:
    return "an" if value[:1].lower() in "aeiou" else "a"


def _plural(value: str, singular: str, plural: str) -> str:
    return singular if value.strip() == "1" else plural


def _capitalize(value: str) -> str:
    return value[:1].upper() + value[1:]


def _bool_text(value: str, if_true: str, if_false: str) -> str:
    return if_true if value.strip().lower() == "true" else if_false


BUILTINS = {
    "article": (_article, 0),  # (function, extra literal args)
    "plural": (_plural, 2),
    "capitalize": (_capitalize, 0),
    "bool_text": (_bool_text, 2),
}

_SECTION = re.compile(r"^\[emotion=(?P<emotion>[A-Za-z]+)\]$")
_ENTRY = re.compile(r"^(?P<act>[a-z_]+)\((?P<slots>[^)]*)\)\s*::\s*(?P<pattern>.*)$")
_PLACEHOLDER = re.compile(r"\{(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\((?P<args>[^)}]*)\))?\}")


def _parse_entry(line_no, line) -> Template:
    match = _ENTRY.match(line)
    if match is None:
        raise ParseError(line_no, f"cannot parse template entry: {line!r}")
    try:
        act_type = SysActType(match.group("act"))
    except ValueError:
        raise ParseError(line_no, f"unknown act type {match.group('act')!r}") from None
    slots = tuple(sorted(s.strip() for s in match.group("slots").split(",") if s.strip()))
    pattern = match.group("pattern").rstrip()

    for ph in _PLACEHOLDER.finditer(pattern):
        name, args = ph.group("name"), ph.group("args")
        if args is None:
            if name not in slots:
                raise ParseError(line_no, f"placeholder {{{name}}} not in signature")
        else:
            if name not in BUILTINS:
                raise ParseError(line_no, f"unknown helper {name!r}")
            arg_list = [a.strip() for a in args.split(",")]
            _fn, extra = BUILTINS[name]
            if len(arg_list) != 1 + extra:
                raise ParseError(line_no, f"helper {name!r} takes {1 + extra} arguments")
            if arg_list[0] not in slots:
                raise ParseError(line_no, f"helper argument {arg_list[0]!r} not in signature")
    stripped = _PLACEHOLDER.sub("", pattern)
    if "{" in stripped or "}" in stripped:
        raise ParseError(line_no, "stray brace in pattern")
    return Template(act_type, slots, pattern)


def load_templates(path, required_signatures=None) -> dict:
    """Parse a template file into per-emotion sets and run the coverage check."""
    sets = {emotion: TemplateSet(emotion) for emotion in SystemEmotion}
    current = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            section = _SECTION.match(line)
            if section:
                try:
                    current = SystemEmotion(section.group("emotion"))
                except ValueError:
                    raise ParseError(
                        line_no, f"unknown emotion {section.group('emotion')!r}"
                    ) from None
                continue
            if current is None:
                raise ParseError(line_no, "template entry before any [emotion=...] header")
            sets[current].add(_parse_entry(line_no, line))

    if required_signatures is not None:
        covered = set(sets[SystemEmotion.NEUTRAL].templates)
        missing = set(required_signatures) - covered
        if missing:
            raise CoverageError(missing)
    return sets


def _substitute(template: Template, slot_values: dict) -> str:
    def lookup(slot):
        if slot not in slot_values:
            raise MissingSlotValue(slot, template.signature)
        return str(slot_values[slot])

    def replace(match):
        name, args = match.group("name"), match.group("args")
        if args is None:
            return lookup(name)
        fn, _extra = BUILTINS[name]
        arg_list = [a.strip() for a in args.split(",")]
        return fn(lookup(arg_list[0]), *arg_list[1:])

    return _PLACEHOLDER.sub(replace, template.pattern)


def generate(sys_act: SysAct, emotion: SystemEmotion,
             backchannel: Optional[str], sets: dict) -> str:
    """Render a system act; unknown signatures in the emotion's set fall back
    to the Neutral set."""
    signature = sys_act.signature()
    template = sets[emotion].templates.get(signature)
    if template is None:
        template = sets[SystemEmotion.NEUTRAL].templates.get(signature)
    if template is None:
        raise CoverageError([signature])
    utterance = _substitute(template, sys_act.slot_values)
    if backchannel:
        return f"{backchannel}, {utterance}"
    return utterance
