# [파일 설명]
# - 목적: FF 타이밍 특성화(setup/hold/지연/latency)와 이분 탐색 경계 찾기를 검증한다.
# - 입력/출력: 게이팅/비게이팅/클록 버퍼 벤치 세 가지와 번들 프로파일을 사용한다.
# - 주의 사항: 오라클은 경계 근처 창을 0.1 ps 간격으로 선형 탐색한다.
# - 연관 모듈: app.services.characterize
from __future__ import annotations

import math

import pytest

from app.services.characterize import (
    PRIOR_ART_TIMING,
    TimingReport,
    _Bench,
    bisect_boundary,
    build_ff_bench,
    characterize_ff,
    delay_mean,
    find_hold,
    find_setup,
    latency,
    linear_sweep_boundary,
    measure_delay,
)
from app.services.errors import CharacterizationError
from app.services.logic import L0, L1
from app.services.netlist_ir import Instance, Netlist, make_netlist
from app.services.techlib import LibraryProfile

EPSILON = 1.0
PERIOD = 800.0


# [함수 설명]
# - 목적: 클록 버퍼를 거쳐 FF를 구동하는 세 번째 벤치.
def _buffered_bench() -> Netlist:
    return make_netlist(
        "ff_bench_buffered",
        ["clk", "D"],
        ["Q"],
        [
            Instance("cb", "CKBUF", {"A": "clk", "Y": "cbuf"}),
            Instance("ff", "DFF_CONV", {"D": "D", "CLK": "cbuf", "Q": "Q"}),
        ],
        wires=["cbuf"],
    )


# [함수 설명]
# - 목적: window(데이터 오프셋) 구간을 0.1 ps 간격으로 선형 탐색한 최악의 setup 또는 hold.
def _oracle(bench_netlist: Netlist, profile: LibraryProfile, kind: str, window: tuple[float, float]) -> float:
    bench = _Bench(bench_netlist, profile, PERIOD)
    worst = -math.inf
    for value in (L1, L0):
        reference = bench.reference_edge(value)
        trial = bench.setup_trial if kind == "setup" else bench.hold_trial

        # [함수 설명]
        # - 목적: 이 오프셋에서 value가 캡처되는지.
        def passes(offset: float, value=value, trial=trial) -> bool:
            return bench.captured(trial(offset, value), value)

        boundary = linear_sweep_boundary(passes, window[0], window[1], 0.1)
        data_time = bench.edge + boundary
        worst = max(worst, reference - data_time if kind == "setup" else data_time - reference)
    return worst


# [함수 설명]
# - 목적: latency와 평균 지연 산술.
def test_table_relations() -> None:
    assert round(latency(0.047, 1.46), 3) == 1.507
    assert round(latency(0.045, 0.154), 3) == 0.199
    assert delay_mean(0.213, 2.708) == pytest.approx(1.4605)
    assert round(delay_mean(0.213, 2.708), 2) == 1.46


# [함수 설명]
# - 목적: compose는 latency = setup + delay_mean을 정확히 지킨다.
def test_report_identity() -> None:
    report = TimingReport.compose(setup=238.0, hold=-144.0, delay_rise=60.0, delay_fall=55.0)

    assert report.delay_mean == 57.5
    assert report.latency - report.setup - report.delay_mean == 0
    assert TimingReport.compose(setup=12.0, hold=0.0, delay_rise=0.0, delay_fall=0.0).latency == 12.0


# [함수 설명]
# - 목적: 반복 수는 ceil(log2(범위/epsilon)) 이하이고 결과는 경계의 통과 쪽 epsilon 안.
def test_bisection_iteration_bound() -> None:
    boundary, iterations = bisect_boundary(lambda offset: offset >= 37.3, 0.0, 100.0, 1.0)

    assert iterations <= math.ceil(math.log2(100))
    assert 37.3 <= boundary <= 37.3 + 1.0


# [함수 설명]
# - 목적: 전환 없음은 UNCONSTRAINED, epsilon <= 0은 BAD_EPSILON.
def test_bisection_errors() -> None:
    with pytest.raises(CharacterizationError) as excinfo:
        bisect_boundary(lambda offset: True, 0.0, 10.0, 1.0)
    assert excinfo.value.code == "UNCONSTRAINED"

    with pytest.raises(CharacterizationError) as excinfo:
        bisect_boundary(lambda offset: offset > 5, 0.0, 10.0, 0.0)
    assert excinfo.value.code == "BAD_EPSILON"


# [함수 설명]
# - 목적: 이분 탐색 결과가 선형 탐색 경계와 epsilon 이내로 같다.
def test_bisection_matches_linear_sweep() -> None:
    # [함수 설명]
    # - 목적: 이 오프셋에서 value가 캡처되는지.
    def passes(offset: float) -> bool:
        return offset <= -12.34

    boundary, _iterations = bisect_boundary(passes, -100.0, 100.0, 1.0)

    assert abs(boundary - linear_sweep_boundary(passes, -100.0, 100.0, 0.1)) <= 1.0


# [함수 설명]
# - 목적: FF 클록 핀 기준 지연은 DFF 셀 지연 그대로다.
def test_delay_is_path_sum(profile: LibraryProfile) -> None:
    dff = profile.cell("DFF_CONV")

    for gated in (True, False):
        rise, fall, mean = measure_delay(build_ff_bench(profile, gated=gated), profile, PERIOD)
        assert (rise, fall) == (dff.t_rise, dff.t_fall)
        assert mean == pytest.approx(57.5)


# [함수 설명]
# - 목적: 비게이팅 벤치의 setup/hold는 셀 체크 창(25/8 ps)과 epsilon 이내로 같다.
def test_ungated_setup_and_hold_equal_check_windows(profile: LibraryProfile) -> None:
    bench = build_ff_bench(profile, gated=False)

    setup = find_setup(bench, profile, PERIOD, EPSILON)
    hold = find_hold(bench, profile, PERIOD, EPSILON)

    assert 25.0 <= setup <= 25.0 + EPSILON
    assert 8.0 <= hold <= 8.0 + EPSILON


# [함수 설명]
# - 목적: 게이팅 벤치의 setup/hold가 D -> XOR -> LECTOR-AND 경로와 ckg_bar 기준 에지로 손 계산한 값과 맞는지 확인한다.
# - 핵심 동작: enable은 클록 상승 5 ps 전까지 안정해야 하므로 데이터는 에지 35 ps 전까지 와야 한다.
#   기준 에지(ckg_bar 상승)는 상승 데이터 기준 의도 에지 + 203 ps 이다.
def test_gated_setup_and_negative_hold(profile: LibraryProfile) -> None:
    bench = build_ff_bench(profile, gated=True)

    setup = find_setup(bench, profile, PERIOD, EPSILON)
    hold = find_hold(bench, profile, PERIOD, EPSILON)

    assert 238.0 <= setup <= 238.0 + EPSILON
    assert -144.0 <= hold <= -144.0 + EPSILON
    assert hold < 0


@pytest.mark.parametrize(
    ("name", "gated_bench", "setup_window", "hold_window"),
    [
        ("gated", True, (-60.0, 20.0), (40.0, 70.0)),
        ("ungated", False, (-40.0, 10.0), (0.0, 20.0)),
        ("buffered", None, (-20.0, 30.0), (20.0, 60.0)),
    ],
)
# [함수 설명]
# - 목적: 세 벤치 모두에서 이분 탐색 setup/hold가 선형 탐색 오라클과 epsilon + 0.1 이내.
def test_bisection_within_epsilon_of_linear_sweep(
    profile: LibraryProfile,
    name: str,
    gated_bench: bool | None,
    setup_window: tuple[float, float],
    hold_window: tuple[float, float],
) -> None:
    bench = _buffered_bench() if gated_bench is None else build_ff_bench(profile, gated=gated_bench)

    setup = find_setup(bench, profile, PERIOD, EPSILON)
    hold = find_hold(bench, profile, PERIOD, EPSILON)

    assert abs(setup - _oracle(bench, profile, "setup", setup_window)) <= EPSILON + 0.1, name
    assert abs(hold - _oracle(bench, profile, "hold", hold_window)) <= EPSILON + 0.1, name


# [함수 설명]
# - 목적: characterize_ff가 측정값을 보고서로 묶는다.
def test_characterize_composes_report(profile: LibraryProfile) -> None:
    report = characterize_ff(build_ff_bench(profile, gated=False), profile, PERIOD, EPSILON)

    assert report.gated is False
    assert report.latency == report.setup + report.delay_mean
    assert (report.epsilon, report.clock_period) == (EPSILON, PERIOD)


# [함수 설명]
# - 목적: FF가 둘인 벤치는 BENCH_MISWIRED.
def test_bench_with_two_flip_flops_is_miswired(profile: LibraryProfile) -> None:
    bench = make_netlist(
        "two",
        ["clk", "D"],
        ["Q", "Q2"],
        [
            Instance("ff", "DFF_CONV", {"D": "D", "CLK": "clk", "Q": "Q"}),
            Instance("ff2", "DFF_CONV", {"D": "D", "CLK": "clk", "Q": "Q2"}),
        ],
    )

    with pytest.raises(CharacterizationError) as excinfo:
        find_setup(bench, profile)

    assert excinfo.value.code == "BENCH_MISWIRED"


# [함수 설명]
# - 목적: 참고 열 값이 표 그대로다.
def test_prior_art_columns_are_reference_values() -> None:
    assert PRIOR_ART_TIMING["double-gated FF"]["latency"] == 2.75
    assert PRIOR_ART_TIMING["NC2MOS-gated FF"]["hold"] == -1.01
