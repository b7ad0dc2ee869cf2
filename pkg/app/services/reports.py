# [파일 설명]
# - 목적: 타이밍/전력/변동 결과를 정렬된 텍스트 표와 key=value 라인으로 만든다.
# - 주의 사항: 숫자는 고정 소수점, 단위를 명시한다. 같은 입력이면 같은 바이트를 출력한다.
# - 연관 모듈: characterize, power_model, variation, cli
from __future__ import annotations

from collections.abc import Iterable, Sequence

from app import __version__
from app.services.characterize import PRIOR_ART_TIMING, TimingReport
from app.services.power_model import PUBLISHED_POWER_FIXTURE, ComparisonReport, discrepancy_note, savings_percent
from app.services.variation import VariationResult

UNITS = ("ns", "ps")
TIMING_ROWS = (("Setup", "setup"), ("Hold", "hold"), ("Delay", "delay_mean"), ("Latency", "latency"))


# [함수 설명]
# - 목적: 보고서 첫 줄(버전, seed, 설정 digest).
def header_line(seed: int, config_digest: str) -> str:
    return f"# cgforge {__version__} seed={seed} config={config_digest}"


# [함수 설명]
# - 목적: ps 값을 ns(소수 3자리) 또는 ps(소수 1자리) 문자열로.
# - 에러 처리: 모르는 단위는 ValueError(argparse choices가 먼저 막는다).
def format_time(value_ps: float, units: str = "ns") -> str:
    if units == "ns":
        return f"{value_ps / 1000.0:.3f}"
    if units == "ps":
        return f"{value_ps:.1f}"
    raise ValueError(f"units must be one of {UNITS}, got {units!r}")


# [함수 설명]
# - 목적: 첫 열은 왼쪽, 나머지는 오른쪽 정렬. 열 사이 공백 두 칸.
def aligned_table(rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(widths[i]) for i, cell in enumerate(row[1:], start=1)]
        lines.append("  ".join(cells).rstrip())
    return lines


# [함수 설명]
# - 목적: LB-CG / NO GATING 타이밍 비교 표. prior_art=True면 참고 열을 덧붙인다.
def timing_table(
    gated: TimingReport | None,
    ungated: TimingReport | None,
    units: str = "ns",
    prior_art: bool = True,
) -> list[str]:
    columns: list[tuple[str, dict[str, str]]] = []
    for title, report in (("LB-CG", gated), ("NO GATING", ungated)):
        if report is not None:
            columns.append((title, {key: format_time(getattr(report, key), units) for _label, key in TIMING_ROWS}))
    if prior_art:
        for title, values in PRIOR_ART_TIMING.items():
            # 참고 열은 ns 값이다
            rendered = {key: format_time(values[key.replace("delay_mean", "delay")] * 1000.0, units) for _l, key in TIMING_ROWS}
            columns.append((title, rendered))
    rows = [["PARAMETER", *(title for title, _v in columns)]]
    rows.extend([f"{label} ({units})", *(values[key] for _t, values in columns)] for label, key in TIMING_ROWS)
    return aligned_table(rows)


# [함수 설명]
# - 목적: 벤치별 타이밍 값을 key=value 라인으로.
def timing_kv(reports: dict[str, TimingReport], units: str = "ns") -> list[str]:
    lines = []
    for name, report in reports.items():
        for key in ("setup", "hold", "delay_rise", "delay_fall", "delay_mean", "latency", "epsilon", "clock_period"):
            lines.append(f"timing.{name}.{key}_{units}={format_time(getattr(report, key), units)}")
    return lines


# [함수 설명]
# - 목적: 게이팅/비게이팅 전력 비교 표와 절감률 줄.
def power_table(report: ComparisonReport, process_nm: int = 90) -> list[str]:
    # [함수 설명]
    # - 목적: uW 값 소수 3자리.
    def uw(value: float) -> str:
        return f"{value:.3f}"

    freq = report.gated.clock_freq
    rows = [
        ["PARAMETER", "WITH LB-CG", "WITHOUT CLOCK GATING"],
        ["Process Technology (nm)", str(process_nm), str(process_nm)],
        ["Average Power (uW)", uw(report.gated.p_total), uw(report.ungated.p_total)],
        ["Transistor Count", str(report.gated.transistor_count), str(report.ungated.transistor_count)],
        ["Clock Frequency (GHz)", *(["-"] * 2 if freq is None else [f"{freq:.3f}"] * 2)],
        ["Dynamic (uW)", uw(report.gated.p_dynamic), uw(report.ungated.p_dynamic)],
        ["Contention (uW)", uw(report.gated.p_contention), uw(report.ungated.p_contention)],
        ["Leakage (uW)", uw(report.gated.p_leakage), uw(report.ungated.p_leakage)],
    ]
    return [*aligned_table(rows), f"Savings (%)  {report.savings_percent:.2f}"]


# [함수 설명]
# - 목적: 전력 성분과 절감률을 key=value 라인으로.
def power_kv(report: ComparisonReport) -> list[str]:
    lines = []
    for name, side in (("gated", report.gated), ("ungated", report.ungated)):
        lines.extend(
            [
                f"power.{name}.p_dynamic_uw={side.p_dynamic:.6f}",
                f"power.{name}.p_contention_uw={side.p_contention:.6f}",
                f"power.{name}.p_leakage_uw={side.p_leakage:.6f}",
                f"power.{name}.p_total_uw={side.p_total:.6f}",
                f"power.{name}.transistor_count={side.transistor_count}",
                f"power.{name}.sim_window_ps={side.sim_window:.1f}",
            ]
        )
    lines.append(f"power.savings_percent={report.savings_percent:.4f}")
    return lines


# [함수 설명]
# - 목적: 공개된 전력 수치를 실측 비교와 같은 표로 배치하고 절감률 재계산 결과와 불일치 메모를 붙인다.
def published_fixture_table() -> list[str]:
    fixture = PUBLISHED_POWER_FIXTURE
    rows = [
        ["PARAMETER", "WITH LB-CG", "WITHOUT CLOCK GATING"],
        ["Process Technology (nm)", f"{fixture['process_nm']:.0f}", f"{fixture['process_nm']:.0f}"],
        ["Average Power (uW)", f"{fixture['gated_uw']:.2f}", f"{fixture['ungated_uw']:.2f}"],
        ["Transistor Count", f"{fixture['gated_transistors']:.0f}", f"{fixture['ungated_transistors']:.0f}"],
        ["Clock Frequency (GHz)", f"{fixture['clock_ghz']:.0f}", f"{fixture['clock_ghz']:.0f}"],
    ]
    computed = savings_percent(fixture["gated_uw"], fixture["ungated_uw"])
    return [*aligned_table(rows), f"Savings (%)  {computed:.2f}", discrepancy_note()]


# [함수 설명]
# - 목적: 변동 검사 결과를 key=value 라인으로.
def variation_kv(result: VariationResult) -> list[str]:
    return [
        f"variation.trials={result.trials}",
        f"variation.perturbation={result.perturbation:.4f}",
        f"variation.seed={result.seed}",
        f"variation.failures={result.failures}",
        f"variation.temperature_c={result.temperature_c:.1f}",
        f"variation.stable={'yes' if result.stable else 'no'}",
    ]


# [함수 설명]
# - 목적: 헤더 + "[섹션]" 블록을 이어 붙인 보고서 텍스트.
def render(header: str, sections: Iterable[tuple[str, Sequence[str]]]) -> str:
    lines = [header]
    for title, body in sections:
        lines.extend(["", f"[{title}]", *body])
    return "\n".join(lines) + "\n"
