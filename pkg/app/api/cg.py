# [파일 설명]
# - 목적: cgforge 분석 기능을 HTTP로 노출하는 라우트와 요청/응답 모델을 정의한다.
# - 제공 기능: validate, gate, transistors, simulate, power/compare, characterize POST 엔드포인트.
# - 입력/출력: 넷리스트/자극/프로파일은 텍스트로 받고, 결과는 Pydantic 응답 모델로 반환한다.
# - 에러 처리: CgError는 422 {"code", "message"}로 변환한다(app.main 예외 핸들러).
# - 보안: 서버 파일 경로는 받지 않는다. 프로파일은 번들 이름 또는 본문 텍스트만 허용한다.
# - 연관 모듈: app.services.*
from __future__ import annotations

import logging
from typing import Literal

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app.services.characterize import build_ff_bench, characterize_ff
from app.services.errors import ProfileError
from app.services.event_sim import SimOptions, simulate
from app.services.gating import GatingMode, insert_clock_gating
from app.services.logic import LogicValue
from app.services.netlist_ir import parse_netlist, validate, write_netlist
from app.services.power_model import PowerReport, clock_input, compare
from app.services.stimulus import ClockSpec, parse_stimulus, random_activity_stimulus
from app.services.techlib import BUNDLED_PROFILES, LibraryProfile, load_profile, parse_profile, transistor_total
from app.services.text_digest import summarize_text

logger = logging.getLogger(__name__)

router = APIRouter()


# [클래스 설명]
# - 역할: 번들 프로파일 이름 또는 프로파일 본문 텍스트. text가 있으면 name보다 우선한다.
class ProfileSource(BaseModel):
    name: str = "paper-match"
    text: str | None = None


# [클래스 설명]
# - 역할: 넷리스트 텍스트와 프로파일을 받는 기본 요청 모델.
class NetlistRequest(BaseModel):
    netlist: str = Field(..., min_length=1)
    profile: ProfileSource = Field(default_factory=ProfileSource)


# [클래스 설명]
# - 역할: validate 진단 한 건(분류, 대상, 메시지).
class DiagnosticModel(BaseModel):
    category: str
    entity: str
    message: str


# [클래스 설명]
# - 역할: /cg/validate 응답. 진단이 없으면 ok=true.
class ValidateResponse(BaseModel):
    name: str
    ok: bool
    diagnostics: list[DiagnosticModel]


# [클래스 설명]
# - 역할: /cg/gate 요청. mode로 FF별/공유 게이팅을 고른다.
class GateRequest(NetlistRequest):
    mode: GatingMode = GatingMode.PER_FF


# [클래스 설명]
# - 역할: 게이팅된 넷리스트 텍스트와 삽입 보고.
class GateResponse(BaseModel):
    netlist: str
    gated_ffs: list[str]
    added_cells: list[str]
    new_nets: list[str]
    transistor_overhead: int


# [클래스 설명]
# - 역할: /cg/transistors 응답.
class TransistorsResponse(BaseModel):
    name: str
    transistor_count: int


# [클래스 설명]
# - 역할: /cg/simulate 요청. init_ffs는 "0"/"1"/"x".
class SimulateRequest(NetlistRequest):
    stimulus: str = Field(..., min_length=1)
    timing_checks: bool = False
    init_ffs: Literal["0", "1", "x"] = "x"


# [클래스 설명]
# - 역할: 타이밍 체크 위반 한 건.
class ViolationModel(BaseModel):
    time: float
    instance: str
    kind: str
    message: str


# [클래스 설명]
# - 역할: 시뮬레이션 요약(이벤트 수, 넷별 토글, 위반).
class SimulateResponse(BaseModel):
    netlist: str
    horizon: float
    event_count: int
    toggles: dict[str, int]
    violations: list[ViolationModel]


# [클래스 설명]
# - 역할: /cg/power/compare 요청. stimulus가 없으면 alpha/cycles/seed로 자극을 만든다.
class PowerCompareRequest(NetlistRequest):
    mode: GatingMode = GatingMode.PER_FF
    stimulus: str | None = None
    alpha: float = Field(default=0.1, ge=0, le=1)
    cycles: int = Field(default=1000, ge=1, le=100_000)
    seed: int = 0
    clock_period_ps: float = Field(default=800.0, gt=0)


# [클래스 설명]
# - 역할: 한쪽 넷리스트의 전력 성분(uW)과 트랜지스터 수.
class PowerModel(BaseModel):
    p_dynamic_uw: float
    p_contention_uw: float
    p_leakage_uw: float
    p_total_uw: float
    sim_window_ps: float
    transistor_count: int


# [클래스 설명]
# - 역할: 게이팅/비게이팅 전력과 절감률.
class PowerCompareResponse(BaseModel):
    gated: PowerModel
    ungated: PowerModel
    savings_percent: float


# [클래스 설명]
# - 역할: /cg/characterize 요청(클록 주기, 탐색 정밀도 ps).
class CharacterizeRequest(BaseModel):
    profile: ProfileSource = Field(default_factory=ProfileSource)
    clock_period_ps: float = Field(default=800.0, gt=0)
    epsilon_ps: float = Field(default=1.0, gt=0)


# [클래스 설명]
# - 역할: 한 FF 벤치의 타이밍 측정값(ps).
class TimingModel(BaseModel):
    setup_ps: float
    hold_ps: float
    delay_rise_ps: float
    delay_fall_ps: float
    delay_mean_ps: float
    latency_ps: float


# [클래스 설명]
# - 역할: 게이팅/비게이팅 벤치 타이밍.
class CharacterizeResponse(BaseModel):
    gated: TimingModel
    ungated: TimingModel


# [함수 설명]
# - 목적: 요청의 프로파일 소스를 LibraryProfile로 만든다.
# - 에러 처리: 모르는 번들 이름은 ProfileError(UNKNOWN_PROFILE).
def _profile(source: ProfileSource) -> LibraryProfile:
    if source.text is not None:
        return parse_profile(source.text)
    if source.name not in BUNDLED_PROFILES:
        raise ProfileError(f"unknown bundled profile '{source.name}'", code="UNKNOWN_PROFILE")
    return load_profile(source.name)


# [함수 설명]
# - 목적: PowerReport -> 응답 모델.
def _power(report: PowerReport) -> PowerModel:
    return PowerModel(
        p_dynamic_uw=report.p_dynamic,
        p_contention_uw=report.p_contention,
        p_leakage_uw=report.p_leakage,
        p_total_uw=report.p_total,
        sim_window_ps=report.sim_window,
        transistor_count=report.transistor_count,
    )


# [함수 설명]
# - 목적: 원문 대신 길이와 해시만 로그에 남긴다.
def _log_request(route: str, netlist: str) -> None:
    summary = summarize_text(netlist)
    logger.info("%s: netlist_len=%s netlist_hash=%s", route, summary["len"], summary["sha256_8"])


# [함수 설명]
# - 목적: 넷리스트 구조 검사 결과를 진단 목록으로 돌려준다.
# - 에러 처리: 문법 오류만 422로 가고, 구조 문제는 ok=false 와 diagnostics로 보고한다.
@router.post("/validate", response_model=ValidateResponse)
def validate_netlist(request: NetlistRequest) -> ValidateResponse:
    _log_request("/cg/validate", request.netlist)
    profile = _profile(request.profile)
    netlist = parse_netlist(request.netlist, profile.library, check=False)
    diagnostics = validate(netlist, profile.library)
    return ValidateResponse(
        name=netlist.name,
        ok=not diagnostics,
        diagnostics=[DiagnosticModel(category=d.category, entity=d.entity, message=d.message) for d in diagnostics],
    )


# [함수 설명]
# - 목적: 넷리스트에 클록 게이팅을 삽입하고 결과 넷리스트 텍스트를 돌려준다.
@router.post("/gate", response_model=GateResponse)
def gate(request: GateRequest) -> GateResponse:
    _log_request("/cg/gate", request.netlist)
    profile = _profile(request.profile)
    gated, report = insert_clock_gating(parse_netlist(request.netlist, profile.library), profile, request.mode)
    return GateResponse(
        netlist=write_netlist(gated, profile.library),
        gated_ffs=list(report.gated_ffs),
        added_cells=list(report.added_cells),
        new_nets=list(report.new_nets),
        transistor_overhead=report.transistor_overhead,
    )


# [함수 설명]
# - 목적: 넷리스트의 트랜지스터 총수.
@router.post("/transistors", response_model=TransistorsResponse)
def transistors(request: NetlistRequest) -> TransistorsResponse:
    profile = _profile(request.profile)
    netlist = parse_netlist(request.netlist, profile.library)
    return TransistorsResponse(name=netlist.name, transistor_count=transistor_total(netlist, profile))


# [함수 설명]
# - 목적: 넷리스트를 자극으로 시뮬레이션하고 토글/위반 요약을 돌려준다.
@router.post("/simulate", response_model=SimulateResponse)
def simulate_netlist(request: SimulateRequest) -> SimulateResponse:
    _log_request("/cg/simulate", request.netlist)
    profile = _profile(request.profile)
    netlist = parse_netlist(request.netlist, profile.library)
    stimulus = parse_stimulus(request.stimulus, netlist.inputs)
    init_ffs = None if request.init_ffs == "x" else LogicValue.parse(request.init_ffs)
    trace = simulate(netlist, profile, stimulus, SimOptions(timing_checks=request.timing_checks, init_ffs=init_ffs))
    return SimulateResponse(
        netlist=trace.netlist_name,
        horizon=trace.horizon,
        event_count=trace.event_count,
        toggles=dict(sorted(trace.toggles.items())),
        violations=[
            ViolationModel(time=v.time, instance=v.instance, kind=v.kind, message=v.message) for v in trace.violations
        ],
    )


# [함수 설명]
# - 목적: 게이팅 전/후 넷리스트를 같은 자극으로 시뮬레이션하고 전력을 비교한다.
# - 입력: 비게이팅 넷리스트. stimulus가 없으면 alpha/cycles/seed로 무작위 활동 자극을 만든다.
# - 출력: 양쪽 PowerModel과 savings_percent
@router.post("/power/compare", response_model=PowerCompareResponse)
def power_compare(request: PowerCompareRequest) -> PowerCompareResponse:
    _log_request("/cg/power/compare", request.netlist)
    profile = _profile(request.profile)
    ungated = parse_netlist(request.netlist, profile.library)
    gated, _report = insert_clock_gating(ungated, profile, request.mode)
    if request.stimulus is not None:
        stimulus = parse_stimulus(request.stimulus, ungated.inputs)
    else:
        clock = ClockSpec(net=clock_input(ungated, profile), period=request.clock_period_ps)
        data_nets = [net for net in ungated.inputs if net != clock.net]
        stimulus = random_activity_stimulus(data_nets, clock, request.alpha, request.cycles, request.seed)
    report = compare(gated, ungated, profile, stimulus)
    return PowerCompareResponse(
        gated=_power(report.gated), ungated=_power(report.ungated), savings_percent=report.savings_percent
    )


# [함수 설명]
# - 목적: 게이팅/비게이팅 FF 벤치의 setup, hold, 지연을 측정한다.
@router.post("/characterize", response_model=CharacterizeResponse)
def characterize(request: CharacterizeRequest) -> CharacterizeResponse:
    profile = _profile(request.profile)
    results = {}
    for name, gated in (("gated", True), ("ungated", False)):
        report = characterize_ff(
            build_ff_bench(profile, gated=gated), profile, request.clock_period_ps, request.epsilon_ps
        )
        results[name] = TimingModel(
            setup_ps=report.setup,
            hold_ps=report.hold,
            delay_rise_ps=report.delay_rise,
            delay_fall_ps=report.delay_fall,
            delay_mean_ps=report.delay_mean,
            latency_ps=report.latency,
        )
    return CharacterizeResponse(**results)
