"""Handcrafted policies, action grounding and belief vectorization."""

import numpy as np
import pytest

from parley.acts import SysAct, SysActType, SystemEmotion, UserAct, UserActType
from parley.domains import DONTCARE, query_entities
from parley.policy.actions import (
    DISCARDED_SLOT,
    AbstractAction,
    enumerate_actions,
    execute_action,
    expected_signatures,
    inform_by_alternatives,
)
from parley.policy.affective import affective_policy
from parley.policy.handcrafted import api_policy, handcrafted_policy
from parley.policy.vectorize import belief_dim, slot_fill_states, vectorize_belief
from parley.tracking import BeliefState, UserState, bst_update


def inform(slot, value):
    return UserAct(UserActType.INFORM, slot=slot, value=value)


def advance(bs, acts, db):
    return bst_update(bs, acts, db)


# -- entity policy rule order -----------------------------------------------------


def test_bye_wins_over_everything(mensa):
    bs = advance(
        BeliefState.initial(mensa.database),
        [UserAct(UserActType.BYE), inform("vegan", "true")],
        mensa.database,
    )
    assert handcrafted_policy(bs, mensa.database).act_type is SysActType.BYE


def test_all_bad_turn_is_admitted(mensa):
    bs = advance(BeliefState.initial(mensa.database), [UserAct(UserActType.BAD)], mensa.database)
    assert handcrafted_policy(bs, mensa.database).act_type is SysActType.BAD


def test_silent_start_greets(mensa):
    bs = BeliefState.initial(mensa.database)
    assert handcrafted_policy(bs, mensa.database).act_type is SysActType.WELCOME


def test_unique_match_is_offered_with_full_row(mensa):
    db = mensa.database
    bs = advance(
        BeliefState.initial(db),
        [inform("dish_type", "main dish"), inform("vegan", "true")],
        db,
    )
    rows = query_entities(db, bs.constraints())
    assert len(rows) == 1
    act = handcrafted_policy(bs, db)
    assert act.act_type is SysActType.INFORM_BY_NAME
    assert act.slot_values == {s: rows[0][s] for s in mensa.ontology.requestable}


def test_discriminating_request_comes_before_offers(mensa):
    db = mensa.database
    bs = advance(BeliefState.initial(db), [inform("vegan", "true")], db)
    assert bs.num_matches > 1
    act = handcrafted_policy(bs, db)
    assert act.act_type is SysActType.REQUEST
    slot = next(iter(act.slot_values))
    assert slot in bs.discriminable_slots


def test_zero_matches_relaxes_newest_constraint_first(mensa):
    db = mensa.database
    bs = BeliefState.initial(db)
    bs = advance(bs, [inform("dish_type", "dessert")], db)
    bs = advance(bs, [inform("vegan", "true")], db)  # no vegan dessert in the data
    assert bs.num_matches == 0
    act = handcrafted_policy(bs, db)
    assert act.act_type is SysActType.INFORM_BY_ALTERNATIVES
    assert act.slot_values[DISCARDED_SLOT] == "vegan"
    # the offer satisfies the surviving constraint
    assert act.slot_values["dish_type"] == "dessert"


def test_request_with_unique_match_informs(mensa):
    db = mensa.database
    bs = advance(
        BeliefState.initial(db),
        [
            inform("dish_type", "main dish"),
            inform("vegan", "true"),
            UserAct(UserActType.REQUEST, slot="name"),
        ],
        db,
    )
    act = handcrafted_policy(bs, db)
    assert act.act_type is SysActType.INFORM_BY_NAME


def test_exhausted_rejections_reset(mensa):
    db = mensa.database
    bs = BeliefState.initial(db)
    for row in db.rows:
        bs = advance(
            bs, [UserAct(UserActType.REQUEST_ALTERNATIVES, value=row["name"])], db
        )
    assert bs.num_matches == 0
    act = inform_by_alternatives(bs, db)
    assert act.act_type is SysActType.INFORM_BY_ALTERNATIVES
    assert act.slot_values["name"]  # still offers something


# -- api policy ---------------------------------------------------------------------


def test_api_policy_requests_missing_parameters_in_order(weather):
    bs = BeliefState.initial(None)
    act = api_policy(bs, weather.fixture, weather.mandatory_params, defaults={})
    assert act.act_type is SysActType.REQUEST
    assert next(iter(act.slot_values)) == "city"


def test_api_policy_defaults_fill_unstated_parameters(weather):
    bs = BeliefState.initial(None)
    act = api_policy(
        bs, weather.fixture, weather.mandatory_params, defaults=weather.param_defaults
    )
    assert act.act_type is SysActType.INFORM_BY_NAME
    assert act.slot_values["city"] == "Stuttgart"
    assert act.slot_values["temperature_c"] == 3
    assert act.slot_values["condition"] == "light snow"


def test_api_policy_dontcare_falls_back_to_default(weather):
    bs = bst_update(
        BeliefState.initial(None),
        [inform("city", DONTCARE)],
        None,
        ontology=weather.ontology,
    )
    act = api_policy(
        bs, weather.fixture, weather.mandatory_params, defaults=weather.param_defaults
    )
    assert act.act_type is SysActType.INFORM_BY_NAME
    assert act.slot_values["city"] == "Stuttgart"


def test_api_policy_unresolvable_parameters_is_bad(weather):
    bs = BeliefState.initial(None)
    # no defaults for date/time, user said nothing: request; but a parameter
    # combination outside the fixture must answer Bad, not crash
    fixture = weather.fixture
    bs = bst_update(
        BeliefState.initial(None),
        [inform("city", "Munich"), inform("date", "today"), inform("time", "9 AM")],
        None,
        ontology=weather.ontology,
    )
    act = api_policy(bs, fixture, weather.mandatory_params, defaults={})
    assert act.act_type in (SysActType.INFORM_BY_NAME, SysActType.BAD)


# -- abstract actions -----------------------------------------------------------------


def test_enumerate_actions_is_stable(mensa, weather):
    actions = enumerate_actions(mensa.ontology, kind="entity")
    labels = [a.label() for a in actions]
    assert labels == [
        "welcome",
        "request_more",
        "bad",
        "bye",
        "inform_by_name",
        "inform_by_alternatives",
        "request#dish_type",
        "confirm#dish_type",
        "select#dish_type",
        "request#vegan",
        "confirm#vegan",
        "select#vegan",
    ]
    api_actions = enumerate_actions(weather.ontology, kind="api")
    assert "inform_by_alternatives" not in [a.label() for a in api_actions]


def test_execute_action_grounding(mensa):
    db = mensa.database
    bs = advance(BeliefState.initial(db), [inform("vegan", "true")], db)
    request = execute_action(AbstractAction(SysActType.REQUEST, "dish_type"), bs, mensa)
    assert request == SysAct(SysActType.REQUEST, {"dish_type": ""})
    confirm = execute_action(AbstractAction(SysActType.CONFIRM, "vegan"), bs, mensa)
    assert confirm == SysAct(SysActType.CONFIRM, {"vegan": "true"})
    # confirm of an unconstrained slot falls back to the first legal value
    confirm2 = execute_action(AbstractAction(SysActType.CONFIRM, "dish_type"), bs, mensa)
    assert confirm2.slot_values == {"dish_type": "starter"}
    select = execute_action(AbstractAction(SysActType.SELECT, "vegan"), bs, mensa)
    assert select.slot_values == {"vegan": "true or false"}
    offer = execute_action(AbstractAction(SysActType.INFORM_BY_NAME), bs, mensa)
    assert set(offer.slot_values) == set(mensa.ontology.requestable)


def test_execute_action_api_inform(weather):
    bs = BeliefState.initial(None)
    act = execute_action(AbstractAction(SysActType.INFORM_BY_NAME), bs, weather)
    # defaults resolve every parameter in the shipped manifest
    assert act.act_type is SysActType.INFORM_BY_NAME
    assert act.slot_values["condition"] == "light snow"


def test_expected_signatures_match_grounded_acts(mensa, weather):
    # every grounding of every abstract action lands inside the declared set
    for domain in (mensa, weather):
        signatures = expected_signatures(domain)
        db = domain.database
        states = [BeliefState.initial(db)]
        if db is not None:
            states.append(
                advance(BeliefState.initial(db), [inform("vegan", "true")], db)
            )
        for bs in states:
            for action in enumerate_actions(domain.ontology, kind=domain.kind):
                act = execute_action(action, bs, domain)
                sig = (act.act_type, tuple(sorted(act.slot_values)))
                assert sig in signatures, (domain.name, action.label(), sig)


# -- affective policy ----------------------------------------------------------------


@pytest.mark.parametrize(
    "emotion,valence,arousal,expected",
    [
        ("sad", "neutral", "medium", SystemEmotion.COMPASSIONATE),
        ("neutral", "negative", "low", SystemEmotion.COMPASSIONATE),
        ("angry", "negative", "high", SystemEmotion.COMPASSIONATE),
        ("happy", "neutral", "medium", SystemEmotion.ENTHUSIASTIC),
        ("neutral", "positive", "high", SystemEmotion.ENTHUSIASTIC),
        ("neutral", "positive", "medium", SystemEmotion.NEUTRAL),
        ("neutral", "neutral", "medium", SystemEmotion.NEUTRAL),
    ],
)
def test_affective_rule_table(emotion, valence, arousal, expected):
    us = UserState(emotion=emotion, valence=valence, arousal=arousal)
    assert affective_policy(us) is expected


# -- vectorization ----------------------------------------------------------------------


def test_vector_dimension_and_decode(mensa):
    db = mensa.database
    dim = belief_dim(mensa.ontology)
    bs = BeliefState.initial(db)
    vec = vectorize_belief(bs, mensa.ontology)
    assert vec.shape == (dim,)
    assert slot_fill_states(vec, mensa.ontology) == {
        "dish_type": "empty",
        "vegan": "empty",
    }
    bs = advance(bs, [inform("dish_type", "starter"), inform("vegan", DONTCARE)], db)
    vec = vectorize_belief(bs, mensa.ontology)
    assert slot_fill_states(vec, mensa.ontology) == {
        "dish_type": "filled",
        "vegan": "dontcare",
    }


def test_match_bucket_one_hot(mensa):
    ont = mensa.ontology
    slots = 3 * len(ont.informable)
    for matches, bucket in ((0, 0), (1, 1), (2, 2), (4, 2), (5, 3), (17, 3)):
        vec = vectorize_belief(BeliefState(num_matches=matches), ont)
        hot = np.flatnonzero(vec[slots : slots + 4])
        assert list(hot) == [bucket], matches


def test_act_type_multi_hot(mensa):
    bs = BeliefState(
        last_act_types=frozenset({UserActType.INFORM, UserActType.REQUEST})
    )
    vec = vectorize_belief(bs, mensa.ontology)
    tail = vec[3 * len(mensa.ontology.informable) + 4 :]
    assert tail.sum() == 2.0
