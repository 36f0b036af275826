import math

import numpy as np
import pytest

from oracles import suffix_sums_quadratic
from tdsearch.evaluation import (
    ATANH_QUARTER,
    SquashConfig,
    WeightVector,
    feature_set,
    features_white,
    raw_eval,
    squash,
)
from tdsearch.games import GAMES
from tdsearch.games.base import DRAW, LOSS, Side, WIN
from tdsearch.learner import (
    AlphaSchedule,
    ClipPolicy,
    GameTrace,
    LearnerConfig,
    StepRecord,
    TemporalDifference,
    discounted_difference_sums,
    rebase_on_roots,
    state_hash,
    td_update,
    tdleaf_delta,
    tdleaf_update,
    temporal_differences,
    trace_to_log,
    traces_from_log,
)

T3 = GAMES["tictactoe"]
OFF = SquashConfig.disabled()


def mkstep(phi, value, predicted=False, lower=False, root=None, leaf=None, pv=()):
    phi = np.asarray(phi, dtype=np.float64)
    return StepRecord(
        root=root, leaf=leaf, pv=tuple(pv), leaf_features=phi,
        value=float(value), raw_value=float(value),
        opponent_move_predicted=predicted, opponent_rating_lower=lower,
    )


def mktrace(values, outcome, side=Side.WHITE, k=2, predicted=False):
    steps = tuple(
        mkstep(np.zeros(k), v, predicted=predicted) for v in values
    )
    return GameTrace(agent_side=side, steps=steps, outcome=outcome)


def cfg_of(lam=0.7, alpha=1.0, squash_cfg=OFF, clipping=ClipPolicy.NONE, **kw):
    return LearnerConfig(
        lambda_=lam, alpha=AlphaSchedule(base=alpha), squash=squash_cfg,
        clipping=clipping, **kw,
    )


# ---------------------------------------------------------------------------
# Temporal differences
# ---------------------------------------------------------------------------


def test_differences_for_white():
    tr = mktrace([0.1, -0.2, 0.3], WIN)
    ds = [d.d for d in temporal_differences(tr, cfg_of())]
    assert ds == pytest.approx([-0.3, 0.5, 0.7])


def test_differences_for_black_flip_stored_values():
    # stored values are White-centric; a Black agent sees them negated
    tr = mktrace([0.1, -0.2, 0.3], WIN, side=Side.BLACK)
    ds = [d.d for d in temporal_differences(tr, cfg_of())]
    assert ds == pytest.approx([0.3, -0.5, -0.7])


def test_final_difference_uses_reward_as_terminal_value():
    tr = mktrace([0.4], DRAW)
    (d,) = temporal_differences(tr, cfg_of())
    assert d.t == 0
    assert d.d == pytest.approx(-0.4)  # 0 - 0.4


def test_missing_outcome_rejected():
    tr = GameTrace(Side.WHITE, (mkstep([0.0, 0.0], 0.0),), None)
    with pytest.raises(ValueError):
        temporal_differences(tr, cfg_of())


def test_empty_trace_gives_no_differences():
    tr = GameTrace(Side.WHITE, (), WIN)
    assert temporal_differences(tr, cfg_of()) == []
    assert np.array_equal(
        tdleaf_delta(tr, cfg_of(), WeightVector(np.zeros(2))), np.zeros(2)
    )


# ---------------------------------------------------------------------------
# Clipping
# ---------------------------------------------------------------------------


def make_clip_trace(predicted, lower):
    # values 0.0, 0.5 then a loss: differences +0.5 and -1.5
    steps = (
        mkstep([1.0, 0.0], 0.0, predicted=predicted, lower=lower),
        mkstep([0.0, 1.0], 0.5, predicted=predicted, lower=lower),
    )
    return GameTrace(Side.WHITE, steps, LOSS)


def test_positive_difference_clipped_when_unpredicted():
    tr = make_clip_trace(predicted=False, lower=False)
    cfg = cfg_of(clipping=ClipPolicy.UNLESS_PREDICTED)
    assert [d.d for d in temporal_differences(tr, cfg)] == [0.0, -1.5]


def test_positive_difference_kept_when_predicted():
    tr = make_clip_trace(predicted=True, lower=False)
    cfg = cfg_of(clipping=ClipPolicy.UNLESS_PREDICTED)
    assert [d.d for d in temporal_differences(tr, cfg)] == [0.5, -1.5]


def test_negative_differences_never_clipped():
    tr = mktrace([0.9, 0.2], LOSS)
    cfg = cfg_of(clipping=ClipPolicy.UNLESS_PREDICTED)
    ds = [d.d for d in temporal_differences(tr, cfg)]
    assert ds == pytest.approx([-0.7, -1.2])


def test_stronger_opponent_variant_keeps_gains_from_equals():
    cfg = cfg_of(clipping=ClipPolicy.UNLESS_PREDICTED_OR_STRONGER)
    kept = make_clip_trace(predicted=False, lower=False)  # peer or stronger
    assert [d.d for d in temporal_differences(kept, cfg)][0] == 0.5
    dropped = make_clip_trace(predicted=False, lower=True)  # weaker opponent
    assert [d.d for d in temporal_differences(dropped, cfg)][0] == 0.0


def test_no_clipping_by_default():
    tr = make_clip_trace(predicted=False, lower=True)
    assert [d.d for d in temporal_differences(tr, cfg_of())] == [0.5, -1.5]


# ---------------------------------------------------------------------------
# Discounted sums
# ---------------------------------------------------------------------------


def test_discounted_sums_against_quadratic_oracle():
    rng = np.random.default_rng(2)
    for lam in (0.0, 0.3, 0.7, 0.95, 1.0):
        for n in (1, 2, 5, 17):
            ds = list(rng.normal(size=n))
            got = discounted_difference_sums(ds, lam)
            want = suffix_sums_quadratic(ds, lam)
            assert np.allclose(got, want, rtol=0, atol=1e-12)


def test_discounted_sums_accept_difference_records():
    ds = [TemporalDifference(0, 1.0), TemporalDifference(1, -2.0)]
    assert discounted_difference_sums(ds, 0.5) == [0.0, -2.0]


def test_lambda_zero_keeps_raw_differences():
    ds = [3.0, -1.0, 2.0]
    assert discounted_difference_sums(ds, 0.0) == ds


def test_lambda_one_gives_plain_suffix_sums():
    ds = [3.0, -1.0, 2.0]
    assert discounted_difference_sums(ds, 1.0) == [4.0, 1.0, 2.0]


# ---------------------------------------------------------------------------
# The update rule
# ---------------------------------------------------------------------------


def test_textbook_two_step_update():
    # two steps, unit feature on a different axis each, zero values, a win:
    # differences are [0, 1], suffix sums [0.7, 1.0], so the update is exact
    steps = (mkstep([1.0, 0.0], 0.0), mkstep([0.0, 1.0], 0.0))
    tr = GameTrace(Side.WHITE, steps, WIN)
    w = WeightVector(np.zeros(2))
    delta = tdleaf_delta(tr, cfg_of(lam=0.7, alpha=1.0), w)
    assert delta[0] == 0.7 and delta[1] == 1.0
    w2 = tdleaf_update(tr, cfg_of(lam=0.7, alpha=1.0), w)
    assert list(w2.values) == [0.7, 1.0]


def test_textbook_update_scales_with_alpha():
    steps = (mkstep([1.0, 0.0], 0.0), mkstep([0.0, 1.0], 0.0))
    tr = GameTrace(Side.WHITE, steps, WIN)
    delta = tdleaf_delta(tr, cfg_of(lam=0.7, alpha=0.25), WeightVector(np.zeros(2)))
    assert delta[0] == 0.25 * 0.7 and delta[1] == 0.25


def test_textbook_update_with_squashing():
    # at value 0 the squash derivative is exactly beta
    steps = (mkstep([1.0, 0.0], 0.0), mkstep([0.0, 1.0], 0.0))
    tr = GameTrace(Side.WHITE, steps, WIN)
    delta = tdleaf_delta(tr, cfg_of(squash_cfg=SquashConfig()), WeightVector(np.zeros(2)))
    assert delta[0] == 0.7 * ATANH_QUARTER
    assert delta[1] == 1.0 * ATANH_QUARTER


def test_black_agent_update_mirrors_white():
    steps = (mkstep([1.0, 0.0], 0.0), mkstep([0.0, 1.0], 0.0))
    # same stored trace, Black agent, Black lost (White won)
    tr = GameTrace(Side.BLACK, steps, WIN)
    delta = tdleaf_delta(tr, cfg_of(), WeightVector(np.zeros(2)))
    # differences are [0, -1] in Black's view; gradient sign flips once more,
    # so the weight movement lands in the same direction as a White loss
    assert delta[0] == 0.7 and delta[1] == 1.0


def test_gradient_uses_stored_value_not_current_weights():
    # batching replays old traces against moved weights; the derivative
    # factor must come from the recorded value
    cfg = cfg_of(squash_cfg=SquashConfig())
    step = mkstep([2.0, 0.0], 0.6)
    tr = GameTrace(Side.WHITE, (step,), WIN)
    w_a = WeightVector(np.zeros(2))
    w_b = WeightVector(np.array([5.0, 5.0]))
    d_a = tdleaf_delta(tr, cfg, w_a)
    d_b = tdleaf_delta(tr, cfg, w_b)
    assert np.array_equal(d_a, d_b)
    expected = (1.0 - 0.6) * ATANH_QUARTER * (1 - 0.6**2) * 2.0
    assert d_a[0] == pytest.approx(expected)


def test_anchored_weight_never_moves():
    fs = feature_set("minichess-material")
    w = fs.zero_weights()
    steps = (mkstep([1.0, 1.0, 0.0, 0.0, 0.0], 0.0),)
    tr = GameTrace(Side.WHITE, steps, WIN)
    w2 = tdleaf_update(tr, cfg_of(squash_cfg=fs.squash_config()), w)
    assert w2.values[0] == 1.0
    assert w2.values[1] > 0.0


def test_lambda_schedule_hook():
    steps = (mkstep([1.0, 0.0], 0.0), mkstep([0.0, 1.0], 0.0))
    tr = GameTrace(Side.WHITE, steps, WIN)
    cfg = cfg_of(lambda_schedule=lambda i: 0.0 if i >= 10 else 1.0)
    d_early = tdleaf_delta(tr, cfg, WeightVector(np.zeros(2)), game_index=0)
    d_late = tdleaf_delta(tr, cfg, WeightVector(np.zeros(2)), game_index=10)
    assert d_early[0] == 1.0  # lambda 1: the win reaches the first step whole
    assert d_late[0] == 0.0   # lambda 0: only the final step moves


# ---------------------------------------------------------------------------
# Alpha schedules
# ---------------------------------------------------------------------------


def test_constant_schedule():
    sched = AlphaSchedule(base=0.1)
    assert sched.at(0) == sched.at(10_000) == 0.1


def test_inverse_decay_schedule():
    sched = AlphaSchedule(kind="inverse", base=1.0, decay_games=100.0, floor=0.05)
    assert sched.at(0) == 1.0
    assert sched.at(100) == 0.5
    assert sched.at(300) == 0.25
    assert sched.at(10_000_000) == 0.05


def test_schedule_validation():
    with pytest.raises(ValueError):
        AlphaSchedule(kind="warmup")
    with pytest.raises(ValueError):
        AlphaSchedule(base=0.0)


# ---------------------------------------------------------------------------
# Root-based variant
# ---------------------------------------------------------------------------


def test_rebase_replaces_leaves_with_roots():
    fs = feature_set("tictactoe")
    squash_cfg = fs.squash_config()
    w = WeightVector(np.linspace(-0.4, 0.5, fs.k))
    root = T3.initial_state()
    leaf = T3.apply(T3.apply(root, 4), 0)
    phi_leaf = features_white(fs, leaf)
    step = StepRecord(
        root=root, leaf=leaf, pv=(4, 0), leaf_features=phi_leaf,
        value=squash(raw_eval(phi_leaf, w), squash_cfg),
        raw_value=raw_eval(phi_leaf, w),
        opponent_move_predicted=False, opponent_rating_lower=False,
    )
    tr = GameTrace(Side.WHITE, (step,), WIN)
    rebased = rebase_on_roots(tr, w, fs, squash_cfg)
    (rstep,) = rebased.steps
    assert rstep.leaf == root
    assert np.array_equal(rstep.leaf_features, features_white(fs, root))
    assert rstep.raw_value == raw_eval(features_white(fs, root), w)
    assert rstep.value == squash(rstep.raw_value, squash_cfg)
    # flags survive the rebase
    assert rstep.opponent_move_predicted == step.opponent_move_predicted


def test_td_update_equals_leaf_update_at_depth_zero():
    # when every leaf IS its root the two rules coincide bitwise
    fs = feature_set("tictactoe")
    squash_cfg = fs.squash_config()
    rng = np.random.default_rng(42)
    w = WeightVector(rng.normal(size=fs.k) * 0.1)
    root = T3.initial_state()
    steps = []
    s = root
    for _ in range(3):
        phi = features_white(fs, s)
        raw = raw_eval(phi, w)
        steps.append(StepRecord(
            root=s, leaf=s, pv=(), leaf_features=phi,
            value=squash(raw, squash_cfg), raw_value=raw,
            opponent_move_predicted=False, opponent_rating_lower=False,
        ))
        s = T3.apply(s, T3.legal_actions(s)[0])
        s = T3.apply(s, T3.legal_actions(s)[0])
    tr = GameTrace(Side.WHITE, tuple(steps), WIN)
    cfg = cfg_of(squash_cfg=squash_cfg)
    assert np.array_equal(td_update(tr, cfg, w, fs), tdleaf_delta(tr, cfg, w))


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------


def _played_trace():
    from tdsearch.arena import SearchAgent, RandomAgent, play_game

    fs = feature_set("tictactoe")
    rng = np.random.default_rng(3)
    agent = SearchAgent("a", fs, WeightVector(rng.normal(size=fs.k) * 0.2), 2)
    rec = play_game(
        T3, agent, RandomAgent("r"),
        record_sides=(Side.WHITE,), squash_cfg=fs.squash_config(), rng=rng,
    )
    return fs, rec.traces[Side.WHITE]


def test_trace_log_round_trip():
    fs, trace = _played_trace()
    text = trace_to_log(T3, trace, 7, "r")
    out = list(traces_from_log(text, T3, fs))
    assert len(out) == 1
    idx, opponent, back = out[0]
    assert idx == 7 and opponent == "r"
    assert back.agent_side is trace.agent_side
    assert back.outcome == trace.outcome
    assert len(back.steps) == len(trace.steps)
    for a, b in zip(trace.steps, back.steps):
        assert np.array_equal(a.leaf_features, b.leaf_features)
        assert a.value == b.value and a.raw_value == b.raw_value
        assert a.opponent_move_predicted == b.opponent_move_predicted
        assert a.opponent_rating_lower == b.opponent_rating_lower
        assert a.pv == b.pv


def test_trace_log_detects_corruption():
    fs, trace = _played_trace()
    text = trace_to_log(T3, trace, 0, "r")
    lines = text.splitlines()
    step_line = next(i for i, l in enumerate(lines) if l.startswith("step"))
    parts = lines[step_line].split()
    parts[2] = "0" * len(parts[2])  # clobber the position hash
    lines[step_line] = " ".join(parts)
    with pytest.raises(ValueError):
        list(traces_from_log("\n".join(lines) + "\n", T3, fs))


def test_trace_log_rejects_truncated_block():
    fs, trace = _played_trace()
    text = trace_to_log(T3, trace, 0, "r")
    no_outcome = "".join(
        line + "\n" for line in text.splitlines() if not line.startswith("outcome")
    )
    with pytest.raises(ValueError):
        list(traces_from_log(no_outcome, T3, fs))


def test_state_hash_is_stable():
    import hashlib

    s = T3.initial_state()
    want = hashlib.sha256(T3.to_text(s).encode()).hexdigest()[:16]
    assert state_hash(T3, s) == want
