# [파일 설명]
# - 목적: 활동 기반 평균 전력(동적 + 경합 + 누설) 추정과 게이팅/비게이팅 비교.
# - 제공 기능: estimate_power, compare, activity_sweep, savings_percent, discrepancy_note.
# - 단위: 에너지 fJ, 시간 ps, 누설 nW, 결과 µW. fJ/ps * 1000 = µW, nW / 1000 = µW.
# - 주의 사항: 동적 전력은 셀 출력 토글 * e_toggle 과 순차 셀 CLK 핀 토글 * e_clock 의 합이다.
#   모듈 입력은 이상적 소스라 구동 전력을 계산하지 않는다.
# - 연관 모듈: event_sim(Trace), techlib, stimulus(random_activity_stimulus), reports, cli
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from app.services.errors import PowerError
from app.services.event_sim import SimOptions, Trace, simulate
from app.services.logic import L0
from app.services.netlist_ir import Netlist
from app.services.stimulus import ClockSpec, Stimulus, random_activity_stimulus
from app.services.techlib import LibraryProfile, effective_leakage, transistor_total

logger = logging.getLogger(__name__)

FJ_PER_PS_TO_UW = 1000.0
NW_TO_UW = 1e-3
MIN_SWEEP_CYCLES = 100

# 표 형식 확인용 고정값. 보정 목표가 아니다.
PUBLISHED_POWER_FIXTURE: dict[str, float] = {
    "process_nm": 90,
    "gated_uw": 56.43,
    "ungated_uw": 61.19,
    "gated_transistors": 100,
    "ungated_transistors": 42,
    "clock_ghz": 18.0,
    "stated_savings_percent": 7.69,
}


# [클래스 설명]
# - 역할: 넷리스트 하나의 평균 전력 분해와 보고용 메타데이터.
# - 제약/주의: 전력은 µW, sim_window는 ps, toggle_energy/clock_energy는 fJ 합계다.
@dataclass(frozen=True)
class PowerReport:
    p_dynamic: float
    p_contention: float
    p_leakage: float
    p_total: float
    sim_window: float
    clock_freq: float | None
    transistor_count: int
    # 동적 항의 원천 에너지(fJ): 출력 토글분, CLK 핀분
    toggle_energy: float = 0.0
    clock_energy: float = 0.0


# [클래스 설명]
# - 역할: 같은 자극에서 얻은 게이팅/비게이팅 전력 비교 결과.
# - 핵심 동작: compare가 만든 결과는 두 Trace를 함께 담는다(VCD 출력, 등가성 검사에 재사용).
@dataclass(frozen=True)
class ComparisonReport:
    gated: PowerReport
    ungated: PowerReport
    savings_percent: float
    gated_trace: Trace | None = field(default=None, repr=False, compare=False)
    ungated_trace: Trace | None = field(default=None, repr=False, compare=False)


# [함수 설명]
# - 목적: 절감률(%) = 100 * (비게이팅 - 게이팅) / 비게이팅.
# - 에러 처리: 비게이팅 전력이 0 이하이면 PowerError(ZERO_POWER).
def savings_percent(gated_total: float, ungated_total: float) -> float:
    if ungated_total <= 0:
        raise PowerError("ungated total power must be > 0 to compute savings", code="ZERO_POWER")
    return 100.0 * (ungated_total - gated_total) / ungated_total


# [함수 설명]
# - 목적: Trace의 토글 수로 평균 전력을 계산한다.
# - 입력: t(n과 p로 만든 Trace), n, p, clock_period(보고용 클록 주파수 계산, 선택)
# - 출력: PowerReport. p_total = p_dynamic + p_contention + p_leakage
# - 에러 처리: 윈도가 0이거나 Trace와 넷리스트가 맞지 않으면 PowerError.
def estimate_power(
    t: Trace, n: Netlist, p: LibraryProfile, clock_period: float | None = None
) -> PowerReport:
    window = t.horizon
    if window <= 0:
        raise PowerError("simulation window must be > 0 ps", code="ZERO_WINDOW")
    if t.netlist_name != n.name or set(t.cell_toggles) != {inst.name for inst in n.instances}:
        raise PowerError(f"trace of '{t.netlist_name}' does not belong to netlist '{n.name}'", code="TRACE_MISMATCH")

    toggle_energy = 0.0
    clock_energy = 0.0
    contention_energy = 0.0
    for inst in n.instances:
        spec = p.cell(inst.cell_type)
        toggles = t.cell_toggles[inst.name]
        toggle_energy += toggles * spec.e_toggle
        contention_energy += toggles * spec.e_contention
        clock_energy += t.clock_pin_toggles.get(inst.name, 0) * spec.e_clock

    p_dynamic = (toggle_energy + clock_energy) / window * FJ_PER_PS_TO_UW
    p_contention = contention_energy / window * FJ_PER_PS_TO_UW
    p_leakage = effective_leakage(n, p) * NW_TO_UW
    report = PowerReport(
        p_dynamic=p_dynamic,
        p_contention=p_contention,
        p_leakage=p_leakage,
        p_total=p_dynamic + p_contention + p_leakage,
        sim_window=window,
        clock_freq=None if clock_period is None else 1000.0 / clock_period,
        transistor_count=transistor_total(n, p),
        toggle_energy=toggle_energy,
        clock_energy=clock_energy,
    )
    logger.info(
        "estimate_power: netlist=%s window=%s total_uw=%.6f dynamic_uw=%.6f",
        n.name,
        window,
        report.p_total,
        report.p_dynamic,
    )
    return report


# [함수 설명]
# - 목적: 자극의 첫 클록 주기(ps). 클록이 없으면 None.
def _clock_period(s: Stimulus) -> float | None:
    return s.clocks[0].period if s.clocks else None


# [함수 설명]
# - 목적: 두 넷리스트를 같은 자극으로 시뮬레이션하고 전력을 비교한다.
# - 입력: gated_n, ungated_n(같은 포트 집합), p, s. 플립플롭은 0에서 시작한다.
# - 출력: ComparisonReport(두 Trace 포함)
# - 에러 처리: 포트 집합이 다르면 PowerError(INTERFACE_MISMATCH).
def compare(gated_n: Netlist, ungated_n: Netlist, p: LibraryProfile, s: Stimulus) -> ComparisonReport:
    if set(gated_n.inputs) != set(ungated_n.inputs) or set(gated_n.outputs) != set(ungated_n.outputs):
        raise PowerError(
            f"'{gated_n.name}' and '{ungated_n.name}' have different port interfaces", code="INTERFACE_MISMATCH"
        )
    options = SimOptions(init_ffs=L0)
    period = _clock_period(s)
    gated_trace = simulate(gated_n, p, s, options)
    ungated_trace = simulate(ungated_n, p, s, options)
    gated = estimate_power(gated_trace, gated_n, p, period)
    ungated = estimate_power(ungated_trace, ungated_n, p, period)
    report = ComparisonReport(
        gated=gated,
        ungated=ungated,
        savings_percent=savings_percent(gated.p_total, ungated.p_total),
        gated_trace=gated_trace,
        ungated_trace=ungated_trace,
    )
    logger.info(
        "compare: gated=%s ungated=%s savings_percent=%.4f", gated_n.name, ungated_n.name, report.savings_percent
    )
    return report


# [함수 설명]
# - 목적: 플립플롭 클록 핀을 (직접 또는 게이팅 셀을 거쳐) 구동하는 모듈 입력을 찾는다.
# - 에러 처리: 찾지 못하면 PowerError(NO_CLOCK).
def clock_input(n: Netlist, p: LibraryProfile) -> str:
    candidates = [
        inst.net("CLK") for inst in n.instances if p.cell(inst.cell_type).function == "DFF_CONV"
    ]
    for net in candidates:
        if net in n.inputs:
            return net
    for inst in n.instances:
        if p.cell(inst.cell_type).function == "LECTOR_AND2" and inst.net("A") in n.inputs:
            return inst.net("A")
    raise PowerError(f"netlist '{n.name}' has no clock input", code="NO_CLOCK")


# [함수 설명]
# - 목적: 데이터 활동률 alpha별 절감률을 구한다(손익분기 관찰).
# - 입력: alphas(각각 [0, 1]), cycles(>= 100), seed, clock_period
# - 출력: [(alpha, savings_percent)] 입력 순서대로
def activity_sweep(
    gated_n: Netlist,
    ungated_n: Netlist,
    p: LibraryProfile,
    alphas: Sequence[float],
    cycles: int,
    seed: int,
    clock_period: float = 800.0,
) -> list[tuple[float, float]]:
    if cycles < MIN_SWEEP_CYCLES:
        raise PowerError(f"activity sweep needs >= {MIN_SWEEP_CYCLES} cycles, got {cycles}", code="BAD_CYCLES")
    clock = ClockSpec(net=clock_input(ungated_n, p), period=clock_period)
    data_nets = [net for net in ungated_n.inputs if net != clock.net]
    rows: list[tuple[float, float]] = []
    for alpha in alphas:
        stimulus = random_activity_stimulus(data_nets, clock, alpha, cycles, seed)
        rows.append((alpha, compare(gated_n, ungated_n, p, stimulus).savings_percent))
    logger.info("activity_sweep: points=%s cycles=%s seed=%s", len(rows), cycles, seed)
    return rows


# [함수 설명]
# - 목적: 공개된 전력 수치로 다시 계산한 절감률과 명시된 절감률의 차이를 한 줄로 설명한다.
# - 출력: 두 값이 소수 둘째 자리까지 같으면 일치 문구, 아니면 계산식과 차이.
def discrepancy_note(
    gated_total: float = PUBLISHED_POWER_FIXTURE["gated_uw"],
    ungated_total: float = PUBLISHED_POWER_FIXTURE["ungated_uw"],
    stated_percent: float = PUBLISHED_POWER_FIXTURE["stated_savings_percent"],
) -> str:
    computed = savings_percent(gated_total, ungated_total)
    if round(computed, 2) == round(stated_percent, 2):
        return f"savings {computed:.2f}% matches the stated {stated_percent:.2f}%"
    return (
        f"note: 100*({ungated_total:g} - {gated_total:g})/{ungated_total:g} = {computed:.2f}%, "
        f"stated figure is {stated_percent:.2f}% (difference {computed - stated_percent:+.2f} points)"
    )
