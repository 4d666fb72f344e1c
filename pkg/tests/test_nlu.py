"""Rule-based parsing, domain tracking and factual-question extraction."""

import pytest

from parley.acts import UserAct, UserActType
from parley.domains import UnknownSlot
from parley.nlu import (
    NluRuleSet,
    parse,
    parse_factual_question,
    track_domain,
)
from parley.services import load_domain_rules


def acts_of(result, act_type):
    return [a for a in result if a.act_type is act_type]


@pytest.fixture(scope="module")
def mensa_rules(mensa, general_rules):
    return load_domain_rules(mensa, general_rules)


@pytest.fixture(scope="module")
def weather_rules(weather, general_rules):
    return load_domain_rules(weather, general_rules)


# -- parsing ------------------------------------------------------------------


def test_empty_and_gibberish_fall_back_to_bad(mensa, mensa_rules):
    assert parse("", mensa.ontology, mensa_rules) == [UserAct(UserActType.BAD)]
    assert parse("   ", mensa.ontology, mensa_rules) == [UserAct(UserActType.BAD)]
    assert parse("qwertzuiop asdf", mensa.ontology, mensa_rules) == [
        UserAct(UserActType.BAD)
    ]


def test_general_acts_deduplicate(mensa, mensa_rules):
    result = parse("yes yes yes, sure", mensa.ontology, mensa_rules)
    assert result == [UserAct(UserActType.AFFIRM)]
    result = parse("hello there, thanks, good bye", mensa.ontology, mensa_rules)
    types = [a.act_type for a in result]
    assert types.count(UserActType.HELLO) == 1
    assert types.count(UserActType.THANKS) == 1
    assert types.count(UserActType.BYE) == 1


def test_request_rules_fire(mensa, mensa_rules):
    result = parse(
        "What does the mensa offer today?", mensa.ontology, mensa_rules
    )
    assert UserAct(UserActType.REQUEST, slot="name") in result
    result = parse("is the meal vegan?", mensa.ontology, mensa_rules)
    assert UserAct(UserActType.REQUEST, slot="vegan") in result


def test_value_informs_use_canonical_values(mensa, mensa_rules):
    result = parse("I would like a main dish.", mensa.ontology, mensa_rules)
    assert UserAct(UserActType.INFORM, slot="dish_type", value="main dish") in result
    # synonym surface maps to the canonical value
    result = parse("an entree would be nice", mensa.ontology, mensa_rules)
    assert UserAct(UserActType.INFORM, slot="dish_type", value="main dish") in result


def test_longest_overlapping_value_match_wins(mensa, mensa_rules):
    # "not vegan" contains the surface "vegan"; only the longer match counts
    result = parse("it should be not vegan", mensa.ontology, mensa_rules)
    informs = acts_of(result, UserActType.INFORM)
    assert informs == [UserAct(UserActType.INFORM, slot="vegan", value="false")]


def test_inform_suppressed_inside_request_span(mensa, mensa_rules):
    # the word "vegan" inside "is the meal vegan" is part of the request,
    # not a constraint
    result = parse("is the meal vegan?", mensa.ontology, mensa_rules)
    assert acts_of(result, UserActType.INFORM) == []
    assert acts_of(result, UserActType.REQUEST) == [
        UserAct(UserActType.REQUEST, slot="vegan")
    ]


def test_inform_outside_request_span_survives(mensa, mensa_rules):
    result = parse(
        "what kinds of food do you have? something vegan please",
        mensa.ontology,
        mensa_rules,
    )
    assert UserAct(UserActType.REQUEST, slot="dish_type") in result
    assert UserAct(UserActType.INFORM, slot="vegan", value="true") in result


def test_every_ontology_value_is_parseable(mensa, weather, mensa_rules, weather_rules):
    # coverage by construction: "i want <value>" must inform the right slot
    for domain, rules in ((mensa, mensa_rules), (weather, weather_rules)):
        for slot, values in domain.ontology.informable.items():
            for value in values:
                result = parse(f"i want {value}", domain.ontology, rules)
                assert UserAct(UserActType.INFORM, slot=slot, value=value) in result, (
                    slot,
                    value,
                )


def test_duplicate_informs_collapse(mensa, mensa_rules):
    result = parse("vegan, vegan, vegan!", mensa.ontology, mensa_rules)
    informs = acts_of(result, UserActType.INFORM)
    assert informs == [UserAct(UserActType.INFORM, slot="vegan", value="true")]


def test_request_alternatives(mensa, mensa_rules):
    result = parse("something else please", mensa.ontology, mensa_rules)
    assert UserAct(UserActType.REQUEST_ALTERNATIVES) in result


def test_weather_requests(weather, weather_rules):
    result = parse("What is the weather like?", weather.ontology, weather_rules)
    assert UserAct(UserActType.REQUEST, slot="condition") in result
    result = parse("how many degrees is it in Berlin?", weather.ontology, weather_rules)
    assert UserAct(UserActType.REQUEST, slot="temperature_c") in result
    assert UserAct(UserActType.INFORM, slot="city", value="Berlin") in result


def test_rule_set_merge_keeps_both_sides():
    a = NluRuleSet.from_dict(
        {"rules": [{"pattern": "alpha", "act_type": "hello"}], "synonyms": {"s": {"x": "y"}}}
    )
    b = NluRuleSet.from_dict(
        {"rules": [{"pattern": "beta", "act_type": "bye"}], "synonyms": {"s": {"z": "w"}}}
    )
    merged = a.merged_with(b)
    assert len(merged.rules) == 2
    assert merged.synonyms["s"] == {"x": "y", "z": "w"}


# -- domain tracking -------------------------------------------------------------


def test_track_domain_switches_on_keyword(mensa, weather):
    onts = [mensa.ontology, weather.ontology]
    name, act = track_domain("what does the mensa offer", None, onts)
    assert name == "mensa"
    assert act == UserAct(UserActType.SELECT_DOMAIN, value="mensa")


def test_track_domain_keeps_current_without_keyword(mensa, weather):
    onts = [mensa.ontology, weather.ontology]
    name, act = track_domain("yes please", "weather", onts)
    assert name == "weather"
    assert act is None


def test_track_domain_last_mention_wins(mensa, weather):
    onts = [mensa.ontology, weather.ontology]
    name, _ = track_domain("after lunch, how is the weather?", None, onts)
    assert name == "weather"
    name, _ = track_domain("forget the weather, i am hungry", None, onts)
    assert name == "mensa"


def test_track_domain_same_domain_no_act(mensa, weather):
    onts = [mensa.ontology, weather.ontology]
    name, act = track_domain("more food please", "mensa", onts)
    assert name == "mensa"
    assert act is None


def test_track_domain_unroutable_returns_none(mensa, weather):
    onts = [mensa.ontology, weather.ontology]
    name, act = track_domain("tell me a story", None, onts)
    assert name is None
    assert act is None


# -- factual questions -------------------------------------------------------------


def test_parse_factual_question_patterns():
    assert parse_factual_question("Where was Dirk Nowitzki born?") == (
        "Dirk Nowitzki",
        "place of birth",
    )
    assert parse_factual_question("what is the capital of France?") == (
        "France",
        "capital",
    )
    assert parse_factual_question("What is the occupation of Albert Einstein") == (
        "Albert Einstein",
        "occupation",
    )
    assert parse_factual_question("hello there") is None
    assert parse_factual_question("") is None
