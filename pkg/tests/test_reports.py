# [파일 설명]
# - 목적: 보고서 텍스트(표, key=value, 헤더)의 숫자 형식과 결정론을 검증한다.
# - 연관 모듈: app.services.reports
from __future__ import annotations

import pytest

from app import __version__
from app.services.characterize import TimingReport
from app.services.power_model import ComparisonReport, PowerReport
from app.services.reports import (
    aligned_table,
    format_time,
    header_line,
    published_fixture_table,
    power_kv,
    power_table,
    render,
    timing_kv,
    timing_table,
    variation_kv,
)
from app.services.variation import VariationResult

GATED = TimingReport.compose(setup=238.0, hold=-144.0, delay_rise=60.0, delay_fall=55.0)
UNGATED = TimingReport.compose(setup=25.0, hold=8.0, delay_rise=60.0, delay_fall=55.0, gated=False)


# [함수 설명]
# - 목적: 총 전력과 트랜지스터 수만 의미 있는 PowerReport.
def _power(total: float, transistors: int) -> PowerReport:
    return PowerReport(
        p_dynamic=total - 0.5,
        p_contention=0.4,
        p_leakage=0.1,
        p_total=total,
        sim_window=80000.0,
        clock_freq=1.25,
        transistor_count=transistors,
    )


# [함수 설명]
# - 목적: ns 소수 3자리, ps 소수 1자리, 음수 부호 유지.
def test_format_time() -> None:
    assert format_time(238.0) == "0.238"
    assert format_time(-144.0) == "-0.144"
    assert format_time(57.5, "ps") == "57.5"
    with pytest.raises(ValueError):
        format_time(1.0, "us")


# [함수 설명]
# - 목적: 헤더 줄 형식.
def test_header_line() -> None:
    assert header_line(7, "abcd1234") == f"# cgforge {__version__} seed=7 config=abcd1234"


# [함수 설명]
# - 목적: 첫 열 왼쪽, 나머지 오른쪽 정렬.
def test_aligned_table() -> None:
    assert aligned_table([["a", "1"], ["long", "100"]]) == ["a" + " " * 7 + "1", "long  100"]


# [함수 설명]
# - 목적: 음수 hold가 표에 부호째 나오고 참고 열이 붙는다.
def test_timing_table_keeps_hold_sign() -> None:
    lines = timing_table(GATED, UNGATED)

    assert lines[0].split() == ["PARAMETER", "LB-CG", "NO", "GATING", "double-gated", "FF", "NC2MOS-gated", "FF"]
    hold_row = next(line for line in lines if line.startswith("Hold"))
    assert hold_row.split()[2:4] == ["-0.144", "0.008"]
    assert hold_row.split()[-2:] == ["-1.040", "-1.010"]
    setup_row = next(line for line in lines if line.startswith("Setup"))
    assert setup_row.split()[2:4] == ["0.238", "0.025"]


# [함수 설명]
# - 목적: 참고 열 없이 ps 단위 표.
def test_timing_table_without_prior_art_in_ps() -> None:
    lines = timing_table(GATED, None, units="ps", prior_art=False)

    assert lines == [
        "PARAMETER" + " " * 6 + "LB-CG",
        "Setup (ps)" + " " * 5 + "238.0",
        "Hold (ps)" + " " * 5 + "-144.0",
        "Delay (ps)" + " " * 6 + "57.5",
        "Latency (ps)" + " " * 3 + "295.5",
    ]


# [함수 설명]
# - 목적: 벤치 하나당 key=value 여덟 줄.
def test_timing_kv() -> None:
    lines = timing_kv({"gated": GATED}, units="ps")

    assert "timing.gated.hold_ps=-144.0" in lines
    assert "timing.gated.latency_ps=295.5" in lines
    assert len(lines) == 8


# [함수 설명]
# - 목적: 전력 표 행과 절감률 줄, kv 값.
def test_power_table_and_kv() -> None:
    report = ComparisonReport(gated=_power(56.43, 100), ungated=_power(61.19, 42), savings_percent=7.779)

    table = power_table(report)
    kv = power_kv(report)

    assert table[2].split()[-2:] == ["56.430", "61.190"]
    assert table[3].split()[-2:] == ["100", "42"]
    assert table[-1] == "Savings (%)  7.78"
    assert "power.savings_percent=7.7790" in kv
    assert "power.ungated.transistor_count=42" in kv


# [함수 설명]
# - 목적: 공개 수치 표의 재계산 절감률과 불일치 메모.
def test_published_fixture_table() -> None:
    lines = published_fixture_table()

    assert lines[2].split()[-2:] == ["56.43", "61.19"]
    assert lines[-2] == "Savings (%)  7.78"
    assert "7.69%" in lines[-1]


# [함수 설명]
# - 목적: 변동 결과 kv 줄 목록.
def test_variation_kv() -> None:
    lines = variation_kv(VariationResult(trials=100, perturbation=0.02, failures=0, seed=3))

    assert lines == [
        "variation.trials=100",
        "variation.perturbation=0.0200",
        "variation.seed=3",
        "variation.failures=0",
        "variation.temperature_c=30.0",
        "variation.stable=yes",
    ]


# [함수 설명]
# - 목적: 같은 섹션이면 같은 텍스트.
def test_render_is_deterministic() -> None:
    sections = [("timing", ["a=1"]), ("power", ["b=2"])]

    text = render("# head", sections)

    assert text == "# head\n\n[timing]\na=1\n\n[power]\nb=2\n"
    assert text == render("# head", sections)
