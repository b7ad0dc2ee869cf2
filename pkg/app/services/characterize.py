# [파일 설명]
# - 목적: 단일 FF 테스트 벤치를 시뮬레이션해 setup/hold/지연/latency를 측정한다.
# - 제공 기능: build_ff_bench, measure_delay, find_setup, find_hold, characterize_ff,
#   bisect_boundary, linear_sweep_boundary, PRIOR_ART_TIMING.
# - 핵심 동작: 데이터 변화 오프셋을 의도한 클록 에지 기준으로 옮겨 가며 통과/실패를 판정하고
#   이분 탐색으로 경계를 찾는다. 공칭 실행에서 Q가 의도값에 도달한 시각에 Q가 다르거나 X면 실패다.
# - 주의 사항: 게이팅 벤치의 기준 에지는 ckg_bar의 상승 에지, 비게이팅 벤치는 FF 클록의 상승 에지다.
#   데이터 극성 두 가지를 모두 측정하고 최악값을 보고한다.
# - 연관 모듈: event_sim, gating, stimulus, reports
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from app.services.errors import CharacterizationError
from app.services.event_sim import SimOptions, Trace, simulate
from app.services.gating import insert_clock_gating, list_ffs
from app.services.logic import L0, L1, LX, LogicValue, v_not
from app.services.netlist_ir import Instance, Netlist, make_netlist
from app.services.stimulus import ClockSpec, make_stimulus
from app.services.techlib import LibraryProfile

logger = logging.getLogger(__name__)

DEFAULT_EPSILON_PS = 1.0
DEFAULT_PERIOD_PS = 800.0
PRESCAN_POINTS = 17

# 비교 열(ns). 모델 없이 표에 참고 행으로만 싣는다.
PRIOR_ART_TIMING: dict[str, dict[str, float]] = {
    "double-gated FF": {"setup": 1.40, "hold": -1.04, "delay": 1.35, "latency": 2.75},
    "NC2MOS-gated FF": {"setup": 1.07, "hold": -1.01, "delay": 0.98, "latency": 2.05},
}


# [함수 설명]
# - 목적: 상승/하강 지연의 평균.
def delay_mean(delay_rise: float, delay_fall: float) -> float:
    return (delay_rise + delay_fall) / 2.0


# [함수 설명]
# - 목적: latency = setup + 평균 지연.
def latency(setup: float, mean_delay: float) -> float:
    return setup + mean_delay


# [클래스 설명]
# - 역할: 한 FF 벤치의 setup, hold, 지연, latency 측정 결과(ps).
# - 사용 위치: reports.timing_table, cli timing/pipeline, api characterize.
@dataclass(frozen=True)
class TimingReport:
    setup: float
    hold: float
    delay_rise: float
    delay_fall: float
    delay_mean: float
    latency: float
    epsilon: float
    clock_period: float
    gated: bool = True

    # [함수 설명]
    # - 목적: 측정값에서 delay_mean과 latency를 유도해 TimingReport를 만든다.
    @classmethod
    def compose(
        cls,
        *,
        setup: float,
        hold: float,
        delay_rise: float,
        delay_fall: float,
        epsilon: float = DEFAULT_EPSILON_PS,
        clock_period: float = DEFAULT_PERIOD_PS,
        gated: bool = True,
    ) -> TimingReport:
        mean = delay_mean(delay_rise, delay_fall)
        return cls(
            setup=setup,
            hold=hold,
            delay_rise=delay_rise,
            delay_fall=delay_fall,
            delay_mean=mean,
            latency=latency(setup, mean),
            epsilon=epsilon,
            clock_period=clock_period,
            gated=gated,
        )


# [함수 설명]
# - 목적: 단일 FF 벤치(입력 clk, D / 출력 Q). gated=True면 클록 게이팅을 삽입한다.
def build_ff_bench(p: LibraryProfile, *, gated: bool = True) -> Netlist:
    ff = Instance(name="ff", cell_type=_dff_cell(p), pins={"D": "D", "CLK": "clk", "Q": "Q"})
    bench = make_netlist("ff_bench", ["clk", "D"], ["Q"], [ff])
    if not gated:
        return bench
    gated_bench, _report = insert_clock_gating(bench, p)
    return gated_bench


# [함수 설명]
# - 목적: 프로파일의 DFF_CONV 셀 이름.
# - 에러 처리: 없으면 CharacterizationError(BENCH_MISWIRED).
def _dff_cell(p: LibraryProfile) -> str:
    for name, spec in p.cells.items():
        if spec.function == "DFF_CONV":
            return name
    raise CharacterizationError(f"profile '{p.name}' has no DFF_CONV cell", code="BENCH_MISWIRED")


# [클래스 설명]
# - 역할: 벤치에서 관찰할 넷 이름 묶음(데이터, 클록, FF 클록 핀, Q, ckg_bar).
@dataclass(frozen=True)
class _BenchNets:
    ff: str
    data: str
    clock: str
    ff_clock: str
    q: str
    ckg_bar: str | None


# [함수 설명]
# - 목적: 벤치 구조를 확인하고 관찰 넷을 찾는다.
# - 에러 처리: FF가 하나가 아니거나 입력 구성이 다르면 CharacterizationError(BENCH_MISWIRED).
def _bench_nets(bench: Netlist, p: LibraryProfile) -> _BenchNets:
    ffs = list_ffs(bench, p.library)
    if len(ffs) != 1:
        raise CharacterizationError(
            f"bench '{bench.name}' must hold exactly one flip-flop, found {len(ffs)}", code="BENCH_MISWIRED"
        )
    ff = bench.instance(ffs[0])
    data = ff.net("D")
    clocks = [net for net in bench.inputs if net != data]
    if data not in bench.inputs or len(clocks) != 1:
        raise CharacterizationError(
            f"bench '{bench.name}' needs the FF data pin and one clock as its only inputs", code="BENCH_MISWIRED"
        )
    ckg_bar = None
    for inst in bench.instances:
        if p.cell(inst.cell_type).function == "LECTOR_INV" and inst.net("A") == ff.net("CLK"):
            ckg_bar = inst.net("Y")
    return _BenchNets(ff=ff.name, data=data, clock=clocks[0], ff_clock=ff.net("CLK"), q=ff.net("Q"), ckg_bar=ckg_bar)


# [클래스 설명]
# - 역할: 의도한 캡처 에지(두 번째 상승 에지) 주변 데이터 오프셋마다 벤치 시뮬레이션 한 번을 돌린다.
# - 핵심 동작: 오프셋 범위는 클록 low 구간 [-first_rise, P - first_rise].
class _Bench:

    # [함수 설명]
    # - 목적: 관찰 넷, 클록, 캡처 에지와 오프셋 범위를 준비한다.
    def __init__(self, bench: Netlist, p: LibraryProfile, clock_period: float) -> None:
        self.bench = bench
        self.profile = p
        self.nets = _bench_nets(bench, p)
        self.clock = ClockSpec(net=self.nets.clock, period=clock_period)
        # 의도한 캡처 에지는 두 번째 상승 에지다
        self.edge = clock_period + self.clock.first_rise
        self.horizon = self.edge + clock_period
        self.low = -self.clock.first_rise
        self.high = clock_period - self.clock.first_rise
        # 극성별로 공칭 실행에서 Q가 의도값에 도달한 시각
        self.settle: dict[LogicValue, float] = {}

    # [함수 설명]
    # - 목적: 주어진 데이터 이벤트로 벤치를 시뮬레이션한다.
    def run(self, events: list[tuple[float, str, LogicValue]], init: LogicValue, checks: bool = True) -> Trace:
        stimulus = make_stimulus(events, self.horizon, [self.clock])
        return simulate(self.bench, self.profile, stimulus, SimOptions(timing_checks=checks, init_ffs=init))

    # [함수 설명]
    # - 목적: 데이터가 에지 + offset에 value로 바뀌는 setup 시행.
    def setup_trial(self, offset: float, value: LogicValue) -> Trace:
        d = self.nets.data
        return self.run([(0.0, d, v_not(value)), (self.edge + offset, d, value)], v_not(value))

    # [함수 설명]
    # - 목적: low 구간 시작에 value로 바뀌고 에지 + offset에 되돌아가는 hold 시행.
    def hold_trial(self, offset: float, value: LogicValue) -> Trace:
        d = self.nets.data
        events = [(0.0, d, v_not(value)), (self.edge + self.low, d, value), (self.edge + offset, d, v_not(value))]
        return self.run(events, v_not(value))

    # [함수 설명]
    # - 목적: 공칭 실행에서 Q가 value에 도달한 시각에 이 시행의 Q가 value인지 판정한다.
    def captured(self, trace: Trace, value: LogicValue) -> bool:
        if value not in self.settle:
            self.nominal(value)
        return trace.value_at(self.nets.q, self.settle[value]) is value

    # [함수 설명]
    # - 목적: 데이터를 low 구간 중간에 바꾸는 공칭 실행. Q 정착 시각을 기록한다.
    # - 에러 처리: 공칭 실행이 캡처에 실패하면 CharacterizationError(BENCH_MISWIRED).
    def nominal(self, value: LogicValue) -> Trace:
        trace = self.setup_trial(self.low / 2.0, value)
        trigger = _first_edge_at_or_after(trace, self.nets.ff_clock, self.edge, rising=True)
        settle = _first_edge_at_or_after(trace, self.nets.q, trigger, rising=value is L1)
        if settle >= self.horizon or trace.value_before(self.nets.q, self.horizon) is not value:
            raise CharacterizationError(
                f"bench '{self.bench.name}' does not capture {value.value} with data in the low phase",
                code="BENCH_MISWIRED",
            )
        self.settle[value] = settle
        return trace

    # [함수 설명]
    # - 목적: 측정 기준 에지(ckg_bar가 있으면 그 상승 에지, 없으면 FF 클록 핀).
    def reference_edge(self, value: LogicValue) -> float:
        trace = self.nominal(value)
        net = self.nets.ckg_bar or self.nets.ff_clock
        return _first_edge_at_or_after(trace, net, self.edge, rising=True)


# [함수 설명]
# - 목적: time 이후 첫 상승/하강 에지 시각.
# - 에러 처리: 없으면 CharacterizationError(BENCH_MISWIRED).
def _first_edge_at_or_after(trace: Trace, net: str, time: float, rising: bool) -> float:
    for edge in trace.edges(net, rising=rising):
        if edge >= time:
            return edge
    raise CharacterizationError(f"no {'rising' if rising else 'falling'} edge on '{net}' after {time} ps", code="BENCH_MISWIRED")


# [함수 설명]
# - 목적: 통과/실패 경계를 이분 탐색한다.
# - 입력: passes(offset), lo/hi(판정이 서로 다른 두 점), epsilon
# - 출력: (통과 쪽 경계 오프셋, 반복 횟수). |결과 - 실제 경계| <= epsilon
def bisect_boundary(
    passes: Callable[[float], bool], lo: float, hi: float, epsilon: float
) -> tuple[float, int]:
    if epsilon <= 0:
        raise CharacterizationError("epsilon must be > 0", code="BAD_EPSILON")
    lo_pass = passes(lo)
    if lo_pass == passes(hi):
        raise CharacterizationError("search range has no pass/fail transition", code="UNCONSTRAINED")
    iterations = 0
    while hi - lo > epsilon:
        mid = (lo + hi) / 2.0
        if passes(mid) == lo_pass:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return (lo if lo_pass else hi), iterations


# [함수 설명]
# - 목적: lo에서 step씩 전진하며 찾은 통과 쪽 경계. bisect_boundary의 기준값으로 쓴다.
def linear_sweep_boundary(passes: Callable[[float], bool], lo: float, hi: float, step: float) -> float:
    points = [lo + k * step for k in range(int(math.floor((hi - lo) / step)) + 1)]
    first = passes(points[0])
    previous = points[0]
    for point in points[1:]:
        if passes(point) != first:
            return previous if first else point
        previous = point
    raise CharacterizationError("sweep found no pass/fail transition", code="UNCONSTRAINED")


# [함수 설명]
# - 목적: 고정 점들에서 판정해 통과/실패 전환이 정확히 하나인지 확인하고 둘러싸는 구간을 돌려준다.
# - 에러 처리: 전환이 없으면 UNCONSTRAINED, 둘 이상이면 NON_MONOTONE.
def _prescan(passes: Callable[[float], bool], lo: float, hi: float) -> tuple[float, float]:
    step = (hi - lo) / (PRESCAN_POINTS - 1)
    points = [lo + k * step for k in range(PRESCAN_POINTS)]
    verdicts = [passes(point) for point in points]
    if all(verdicts):
        raise CharacterizationError("no failing data offset in the search range (unconstrained)", code="UNCONSTRAINED")
    if not any(verdicts):
        raise CharacterizationError("no passing data offset in the search range", code="UNCONSTRAINED")
    flips = [k for k in range(1, len(verdicts)) if verdicts[k] != verdicts[k - 1]]
    if len(flips) != 1:
        raise CharacterizationError(
            f"pass/fail is not monotone over the data offset ({len(flips)} transitions)", code="NON_MONOTONE"
        )
    k = flips[0]
    return points[k - 1], points[k]


# [함수 설명]
# - 목적: 사전 스캔 후 이분 탐색으로 경계 오프셋을 찾는다.
def _search(passes: Callable[[float], bool], bench: _Bench, epsilon: float) -> float:
    lo, hi = _prescan(passes, bench.low + epsilon, bench.high - epsilon)
    boundary, iterations = bisect_boundary(passes, lo, hi, epsilon)
    logger.debug("bisect_boundary: boundary=%s iterations=%s", boundary, iterations)
    return boundary


# [함수 설명]
# - 목적: 두 극성 중 최악의 setup 시간(기준 에지 - 경계 시각).
def find_setup(
    ff_bench: Netlist,
    p: LibraryProfile,
    clock_period: float = DEFAULT_PERIOD_PS,
    epsilon: float = DEFAULT_EPSILON_PS,
) -> float:
    bench = _Bench(ff_bench, p, clock_period)
    worst = -math.inf
    for value in (L1, L0):
        reference = bench.reference_edge(value)

        # [함수 설명]
        # - 목적: 이 오프셋에서 value가 캡처되는지.
        def passes(offset: float, value: LogicValue = value) -> bool:
            return bench.captured(bench.setup_trial(offset, value), value)

        boundary = _search(passes, bench, epsilon)
        worst = max(worst, reference - (bench.edge + boundary))
    logger.info("find_setup: bench=%s period=%s epsilon=%s setup=%s", ff_bench.name, clock_period, epsilon, worst)
    return worst


# [함수 설명]
# - 목적: 두 극성 중 최악의 hold 시간(경계 시각 - 기준 에지).
def find_hold(
    ff_bench: Netlist,
    p: LibraryProfile,
    clock_period: float = DEFAULT_PERIOD_PS,
    epsilon: float = DEFAULT_EPSILON_PS,
) -> float:
    bench = _Bench(ff_bench, p, clock_period)
    worst = -math.inf
    for value in (L1, L0):
        reference = bench.reference_edge(value)

        # [함수 설명]
        # - 목적: 이 오프셋에서 value가 캡처되는지.
        def passes(offset: float, value: LogicValue = value) -> bool:
            return bench.captured(bench.hold_trial(offset, value), value)

        boundary = _search(passes, bench, epsilon)
        worst = max(worst, (bench.edge + boundary) - reference)
    logger.info("find_hold: bench=%s period=%s epsilon=%s hold=%s", ff_bench.name, clock_period, epsilon, worst)
    return worst


# [함수 설명]
# - 목적: FF 클록 핀 상승 에지에서 Q 에지까지의 (상승, 하강, 평균) 지연.
# - 에러 처리: 공칭 실행의 관찰 넷에 X가 있으면 CharacterizationError(BENCH_MISWIRED).
def measure_delay(
    ff_bench: Netlist, p: LibraryProfile, clock_period: float = DEFAULT_PERIOD_PS
) -> tuple[float, float, float]:
    bench = _Bench(ff_bench, p, clock_period)
    delays: dict[LogicValue, float] = {}
    for value in (L1, L0):
        trace = bench.nominal(value)
        if LX in (trace.value_before(bench.nets.q, bench.horizon), trace.value_before(bench.nets.ff_clock, bench.horizon)):
            raise CharacterizationError("X on measured nets in the nominal run", code="BENCH_MISWIRED")
        trigger = _first_edge_at_or_after(trace, bench.nets.ff_clock, bench.edge, rising=True)
        q_edge = _first_edge_at_or_after(trace, bench.nets.q, trigger, rising=value is L1)
        delays[value] = q_edge - trigger
    rise, fall = delays[L1], delays[L0]
    return rise, fall, delay_mean(rise, fall)


# [함수 설명]
# - 목적: setup, hold, 지연을 한 번에 측정해 TimingReport를 만든다.
# - 출력: latency = setup + delay_mean
# - 에러 처리: 구성 측정의 CharacterizationError를 그대로 전파한다.
def characterize_ff(
    ff_bench: Netlist,
    p: LibraryProfile,
    clock_period: float = DEFAULT_PERIOD_PS,
    epsilon: float = DEFAULT_EPSILON_PS,
) -> TimingReport:
    rise, fall, _mean = measure_delay(ff_bench, p, clock_period)
    report = TimingReport.compose(
        setup=find_setup(ff_bench, p, clock_period, epsilon),
        hold=find_hold(ff_bench, p, clock_period, epsilon),
        delay_rise=rise,
        delay_fall=fall,
        epsilon=epsilon,
        clock_period=clock_period,
        gated=_bench_nets(ff_bench, p).ckg_bar is not None,
    )
    logger.info(
        "characterize_ff: bench=%s gated=%s setup=%s hold=%s delay_mean=%s latency=%s",
        ff_bench.name,
        report.gated,
        report.setup,
        report.hold,
        report.delay_mean,
        report.latency,
    )
    return report
