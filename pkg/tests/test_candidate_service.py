"""
candidate_service 測試：觀測紀錄、偵測、初始候選集合、更新
"""
import numpy as np
import pytest

from services.candidate_service import (
    CandidateSet,
    Observation,
    ObservationLog,
    consistent_deterministic,
    consistent_noisy,
    detect,
    initialize_candidates,
    uniform_prior,
    update_deterministic,
    update_noisy,
)
from services.epidemic_service import simulate
from services.errors import DegenerateEvidenceError, DomainError


def everyone(n):
    return CandidateSet(tuple(range(n)), uniform_prior(n))


# ==================== 觀測紀錄 ====================

def test_log_rejects_second_positive():
    log = ObservationLog(anchor_node=0, anchor_time=0.0)
    log.tick(0.0)
    log.record(Observation(0, 0.0, 0, 0.0))
    log.tick(1.0)
    with pytest.raises(DomainError):
        log.record(Observation(0, 0.5, 1, 1.0))
    with pytest.raises(DomainError):
        log.record(Observation(0, None, 1, 1.0))


def test_log_rejects_positive_after_recording_time():
    log = ObservationLog(anchor_node=0, anchor_time=0.0)
    log.tick(0.0)
    with pytest.raises(DomainError):
        log.record(Observation(1, 2.0, 0, 0.0))


def test_log_rejects_decreasing_steps():
    log = ObservationLog(anchor_node=0, anchor_time=0.0)
    log.tick(0.0)
    log.tick(1.0)
    log.record(Observation(1, None, 1, 1.0))
    with pytest.raises(DomainError):
        log.record(Observation(2, None, 0, 0.0))


def test_negative_superseded_by_positive():
    log = ObservationLog(anchor_node=0, anchor_time=0.0)
    log.tick(0.0)
    log.record(Observation(0, 0.0, 0, 0.0))
    log.record(Observation(2, None, 0, 0.0))
    log.tick(1.0)
    log.record(Observation(2, 0.8, 1, 1.0))

    assert log.open_negatives() == []
    assert [obs.node for obs in log.open_negatives(up_to_step=0)] == [2]
    assert [obs.node for obs in log.positives()] == [0, 2]
    assert log.state(2).time == 0.8
    assert log.sensors() == [0, 2]
    assert log.step == 1 and log.tau == 1.0


# ==================== 偵測 ====================

def test_detect_simultaneous_first_sensors(p3):
    graph, _ = p3
    trace = simulate(graph, 1, 0.0, 0)
    tau0, first, log = detect(trace, [0, 2])
    assert tau0 == 1.0
    assert first == [0, 2]
    assert all(obs.positive for obs in log.observations)


def test_detect_records_negatives(p3):
    graph, _ = p3
    trace = simulate(graph, 0, 0.0, 0)
    tau0, first, log = detect(trace, [2, 0])
    assert tau0 == 0.0
    assert first == [0]
    assert (log.anchor_node, log.anchor_time) == (0, 0.0)
    assert [obs.node for obs in log.open_negatives()] == [2]


def test_detect_single_sensor(p3):
    graph, _ = p3
    trace = simulate(graph, 2, 0.0, 0)
    tau0, first, _ = detect(trace, [0])
    assert first == [0]
    assert tau0 == 2.0


def test_detect_needs_a_sensor(p3):
    graph, _ = p3
    with pytest.raises(DomainError):
        detect(simulate(graph, 0, 0.0, 0), [])


# ==================== 初始候選集合 ====================

def test_initialize_equidistant(p3):
    _, D = p3
    assert initialize_candidates(D, [0, 2], [0, 2]).members == (1,)


def test_initialize_single_first_sensor(p3):
    _, D = p3
    assert initialize_candidates(D, [0, 2], [0]).members == (0,)


def test_initialize_one_static_sensor_keeps_everyone(p3):
    _, D = p3
    assert initialize_candidates(D, [0], [0]).members == (0, 1, 2)


def test_initialize_respects_prior_support(p3):
    _, D = p3
    prior = np.array([0.5, 0.0, 0.5])
    assert initialize_candidates(D, [0], [0], prior).members == (0, 2)


def test_initialize_noisy_keeps_near_ties(p3):
    _, D = p3
    candidates = initialize_candidates(D, [0, 2], [0], epsilon=0.2)
    assert candidates.members == (0, 1)


def test_initialize_first_must_be_static(p3):
    _, D = p3
    with pytest.raises(DomainError):
        initialize_candidates(D, [0], [2])


# ==================== 確定性更新 ====================

def test_update_deterministic_positive_sequence(p3):
    _, D = p3
    anchor = (0, 2.0)
    b1 = update_deterministic(everyone(3), [Observation(1, 1.0, 1, 3.0)], anchor, 3.0, D)
    assert b1.members == (1, 2)
    b2 = update_deterministic(b1, [Observation(2, 0.0, 2, 4.0)], anchor, 4.0, D)
    assert b2.members == (2,)


def test_update_deterministic_negative(p3):
    _, D = p3
    b1 = update_deterministic(everyone(3), [Observation(2, None, 1, 1.0)], (0, 0.0), 1.0, D)
    assert b1.members == (0,)


def test_update_deterministic_contradiction(p3):
    _, D = p3
    with pytest.raises(DegenerateEvidenceError):
        update_deterministic(everyone(3), [Observation(2, 5.0, 1, 6.0)], (0, 0.0), 6.0, D)


def test_candidate_weights_renormalize(p3):
    _, D = p3
    candidates = CandidateSet((0, 2), np.array([0.25, 0.5, 0.25]))
    np.testing.assert_allclose(candidates.weights(), [0.5, 0.5])
    assert 2 in candidates and 1 not in candidates


# ==================== 雜訊更新 ====================

def noisy_log(*positives):
    log = ObservationLog(anchor_node=positives[0][0], anchor_time=positives[0][1])
    for step, (node, time) in enumerate(positives):
        log.tick(time)
        log.record(Observation(node, time, step, time))
    return log


def test_update_noisy_pair_excludes_middle(p3):
    _, D = p3
    log = noisy_log((0, 0.0), (2, 2.0))
    assert update_noisy(everyone(3), log, 0.2, 1.0, 2.0, D).members == (0,)


def test_update_noisy_single_positive_is_vacuous(p3):
    _, D = p3
    log = noisy_log((0, 0.0))
    assert update_noisy(everyone(3), log, 0.2, 1.0, 0.0, D).members == (0, 1, 2)


def test_update_noisy_full_noise_keeps_path_nodes(p5):
    _, D = p5
    log = noisy_log((1, 0.0), (3, 2.0))
    members = update_noisy(everyone(5), log, 1.0, 1.0, 2.0, D).members
    assert {0, 1} <= set(members)


def test_update_noisy_negative_tightens_with_time(p3):
    _, D = p3
    log = ObservationLog(anchor_node=0, anchor_time=0.0)
    log.tick(0.0)
    log.record(Observation(0, 0.0, 0, 0.0))
    log.record(Observation(2, None, 0, 0.0))
    # τ 前進時，c 仍未感染的證據越來越強
    assert update_noisy(everyone(3), log, 0.2, 1.0, 0.0, D).members == (0, 1)
    assert update_noisy(everyone(3), log, 0.2, 1.0, 1.0, D).members == (0,)


# ==================== 一致性檢查 ====================

def test_consistency_oracles_agree_with_updates(p3):
    _, D = p3
    log = noisy_log((0, 0.0), (2, 2.0))
    assert [v for v in range(3) if consistent_noisy(v, log, 0.2, 1.0, D)] == [0]

    log = ObservationLog(anchor_node=0, anchor_time=2.0)
    log.tick(2.0)
    log.record(Observation(0, 2.0, 0, 2.0))
    log.tick(3.0)
    log.record(Observation(1, 1.0, 1, 3.0))
    assert [v for v in range(3) if consistent_deterministic(v, log, D)] == [1, 2]
