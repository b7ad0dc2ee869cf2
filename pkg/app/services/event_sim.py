# [파일 설명]
# - 목적: 지연 주석이 달린 셀 위에서 동작하는 결정론적 이벤트 구동 시뮬레이터.
# - 제공 기능: simulate, count_toggles, sample_outputs, check_equivalence.
# - 입력/출력: Netlist + LibraryProfile + Stimulus -> Trace(파형, 토글 수, 위반 목록).
# - 주의 사항: 관성 지연 모델. 대기 중인 반대 극성 이벤트는 새 평가 시 취소된다.
#   같은 시각의 이벤트는 (넷 이름 사전순, 삽입 순서)로 처리한다.
# - 성능: 셀별 평가 함수/지연/분기 종류는 생성 시 한 번 풀어 둔다. 취소된 이벤트는 넷별 대기
#   항목(pending)과 순번이 다른 것으로 판별해 버린다.
# - 연관 모듈: logic(3값 논리), stimulus, vcd_export, power_model, characterize
from __future__ import annotations

import bisect
import heapq
import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

from app.services.errors import SimulationError, StimulusError
from app.services.logic import COMBINATIONAL, L0, L1, LX, LogicValue, is_toggle
from app.services.netlist_ir import CELL_INTERFACES, SEQUENTIAL_FUNCTIONS, Netlist
from app.services.stimulus import Stimulus
from app.services.techlib import CellSpec, LibraryProfile

logger = logging.getLogger(__name__)

DEFAULT_MAX_EVENTS = 5_000_000

# 팬아웃 분기 종류
_COMBINATIONAL = 0
_SEQUENTIAL = 1
_CHECKED_GATE = 2


# [클래스 설명]
# - 역할: 시뮬레이션 실행 옵션.
# - 핵심 동작: timing_checks가 켜지면 FF setup/hold와 게이팅 셀 enable 조건을 검사해 위반 시 X를 낸다.
# - 제약/주의: init_ffs가 None이면 플립플롭 초기 상태는 X다.
@dataclass(frozen=True)
class SimOptions:
    timing_checks: bool = False
    init_ffs: LogicValue | None = None
    max_events: int = DEFAULT_MAX_EVENTS
    # 인스턴스 이름 -> 셀 스펙 (변동 실행용 지연 덮어쓰기)
    cell_overrides: Mapping[str, CellSpec] | None = field(default=None, hash=False)


# [클래스 설명]
# - 역할: 타이밍 체크 위반 한 건(시각, 인스턴스, 종류 setup/hold/gating, 설명).
@dataclass(frozen=True)
class Violation:
    time: float
    instance: str
    kind: str
    message: str


# [클래스 설명]
# - 역할: 시뮬레이션 결과. 넷별 파형 [(시각, 값)], 넷/셀/클록 핀 토글 수, 이벤트 수, 위반 목록.
# - 사용 위치: power_model(토글 -> 에너지), vcd_export, characterize, check_equivalence.
# - 제약/주의: 파형의 첫 항목은 t=0 초기값이다. 토글은 0<->1 전이만 센다(X 관련 변화 제외).
@dataclass
class Trace:
    netlist_name: str
    horizon: float
    waveforms: dict[str, list[tuple[float, LogicValue]]]
    toggles: dict[str, int]
    cell_toggles: dict[str, int]
    clock_pin_toggles: dict[str, int]
    event_count: int
    violations: list[Violation] = field(default_factory=list)
    _times: dict[str, list[float]] = field(default_factory=dict, repr=False, compare=False)

    # [함수 설명]
    # - 목적: 넷의 변화 시각 목록(이분 탐색용 캐시).
    def _change_times(self, net: str) -> list[float]:
        times = self._times.get(net)
        if times is None:
            times = self._times[net] = [t for t, _v in self.waveforms[net]]
        return times

    # [함수 설명]
    # - 목적: `time` 직전에 유지되던 값(엄밀히 이전인 마지막 변화). 클록 에지 샘플링에 쓴다.
    def value_before(self, net: str, time: float) -> LogicValue:
        waveform = self.waveforms[net]
        times = self._change_times(net)
        index = bisect.bisect_left(times, time) - 1
        return waveform[max(index, 0)][1]

    # [함수 설명]
    # - 목적: `time` 시각(같은 시각 변화 포함)의 값.
    def value_at(self, net: str, time: float) -> LogicValue:
        waveform = self.waveforms[net]
        times = self._change_times(net)
        index = bisect.bisect_right(times, time) - 1
        return waveform[max(index, 0)][1]

    # [함수 설명]
    # - 목적: 넷의 상승(또는 하강) 에지 시각 목록. X에서 나오는 변화는 에지로 치지 않는다.
    def edges(self, net: str, rising: bool = True) -> list[float]:
        target = L1 if rising else L0
        waveform = self.waveforms[net]
        return [
            t
            for (_t0, old), (t, new) in zip(waveform, waveform[1:], strict=False)
            if new is target and old is not target and old is not LX
        ]


# [클래스 설명]
# - 역할: 시뮬레이터 내부의 인스턴스 한 개. 평가 함수, 입력 넷 순서, 극성별 지연을 미리 풀어 둔다.
@dataclass(eq=False)
class _Cell:
    name: str
    function: str
    spec: CellSpec
    inputs: dict[str, str]
    output: str
    kind: int
    evaluate: Callable[..., LogicValue] | None
    input_nets: tuple[str, ...]
    rise: float
    fall: float
    slow: float


# [클래스 설명]
# - 역할: 시뮬레이션 한 번. 이벤트 큐와 넷 상태를 소유한다.
# - 핵심 동작: 힙 (시각, 넷, 순번, 값) 순서로 이벤트를 꺼내 넷 값을 바꾸고 팬아웃 셀을 다시 평가한다.
# - 제약/주의: 한 번 run한 인스턴스는 다시 쓰지 않는다.
class EventSimulator:
    # [함수 설명]
    # - 목적: 셀 테이블, 팬아웃, 드라이버 맵과 초기 상태를 만든다.
    # - 입력: netlist, profile, options(cell_overrides가 있으면 해당 인스턴스 스펙을 대체)
    def __init__(
        self, netlist: Netlist, profile: LibraryProfile, options: SimOptions | None = None
    ) -> None:
        self.netlist = netlist
        self.options = options or SimOptions()
        overrides = self.options.cell_overrides or {}
        self.cells: dict[str, _Cell] = {}
        fanout: dict[str, list[tuple[_Cell, str]]] = {net: [] for net in netlist.nets}
        self.driver: dict[str, str] = {}
        for inst in netlist.instances:
            spec = overrides.get(inst.name) or profile.cell(inst.cell_type)
            ins, outs = CELL_INTERFACES[spec.function]
            inputs = {pin: inst.pins[pin] for pin in ins}
            if spec.function in SEQUENTIAL_FUNCTIONS:
                kind = _SEQUENTIAL
            elif self.options.timing_checks and spec.function == "LECTOR_AND2":
                kind = _CHECKED_GATE
            else:
                kind = _COMBINATIONAL
            cell = _Cell(
                name=inst.name,
                function=spec.function,
                spec=spec,
                inputs=inputs,
                output=inst.pins[outs[0]],
                kind=kind,
                evaluate=COMBINATIONAL.get(spec.function),
                input_nets=tuple(inputs.values()),
                rise=spec.t_rise,
                fall=spec.t_fall,
                slow=max(spec.t_rise, spec.t_fall),
            )
            self.cells[inst.name] = cell
            self.driver[cell.output] = inst.name
            for pin, net in inputs.items():
                fanout.setdefault(net, []).append((cell, pin))
        self.fanout: dict[str, tuple[tuple[_Cell, str], ...]] = {net: tuple(sinks) for net, sinks in fanout.items()}

        self.values: dict[str, LogicValue] = {net: LX for net in netlist.nets}
        self.last_change: dict[str, float] = {net: -math.inf for net in netlist.nets}
        self.ff_state: dict[str, LogicValue] = {}
        self.last_capture: dict[str, float] = {}
        self.queue: list[tuple[float, str, int, LogicValue]] = []
        # 셀 출력 넷 -> 유효한 대기 이벤트 (시각, 순번, 값)
        self.pending: dict[str, tuple[float, int, LogicValue]] = {}
        self.seq = 0
        self.waveforms: dict[str, list[tuple[float, LogicValue]]] = {}
        self.toggles: dict[str, int] = {net: 0 for net in netlist.nets}
        self.cell_toggles: dict[str, int] = {name: 0 for name in self.cells}
        self.clock_pin_toggles: dict[str, int] = {
            name: 0 for name, cell in self.cells.items() if cell.kind == _SEQUENTIAL
        }
        self.violations: list[Violation] = []
        self.event_count = 0

    # [함수 설명]
    # - 목적: 자극을 적용하고 horizon까지 이벤트를 처리한다.
    # - 출력: Trace
    # - 에러 처리: 입력이 아닌 넷을 구동하는 자극은 StimulusError(NON_INPUT_NET).
    def run(self, stimulus: Stimulus) -> Trace:
        inputs = set(self.netlist.inputs)
        for _time, net, _value in stimulus.events:
            if net not in inputs:
                raise StimulusError(
                    f"stimulus drives '{net}', which is not an input of '{self.netlist.name}'",
                    code="NON_INPUT_NET",
                )

        # t=0 할당은 초기 조건이다(파형의 첫 값).
        for time, net, value in stimulus.events:
            if time == 0:
                self.values[net] = value
            else:
                self._push(time, net, value)
        for name, cell in self.cells.items():
            if cell.kind == _SEQUENTIAL:
                initial = self.options.init_ffs or LX
                self.ff_state[name] = initial
                self.values[cell.output] = initial
        self.waveforms = {net: [(0.0, value)] for net, value in self.values.items()}

        for cell in self.cells.values():
            if cell.kind != _SEQUENTIAL:
                self._evaluate(cell, 0.0)

        queue = self.queue
        pending = self.pending
        driven = self.driver
        horizon = stimulus.horizon
        apply = self._apply
        pop = heapq.heappop
        while queue:
            time, net, seq, value = pop(queue)
            if time > horizon:
                break
            if net in driven:
                # 셀 출력 이벤트는 대기 항목과 순번이 같을 때만 유효하다
                entry = pending.get(net)
                if entry is None or entry[1] != seq:
                    continue
                del pending[net]
            apply(time, net, value)

        logger.info(
            "simulate: netlist=%s events=%s violations=%s horizon=%s",
            self.netlist.name,
            self.event_count,
            len(self.violations),
            stimulus.horizon,
        )
        return Trace(
            netlist_name=self.netlist.name,
            horizon=stimulus.horizon,
            waveforms=self.waveforms,
            toggles=self.toggles,
            cell_toggles=self.cell_toggles,
            clock_pin_toggles=self.clock_pin_toggles,
            event_count=self.event_count,
            violations=self.violations,
        )

    # [함수 설명]
    # - 목적: 이벤트를 힙에 넣고 순번을 돌려준다.
    def _push(self, time: float, net: str, value: LogicValue) -> int:
        self.seq += 1
        heapq.heappush(self.queue, (time, net, self.seq, value))
        return self.seq

    # [함수 설명]
    # - 목적: 넷 값을 바꾸고 파형/토글을 기록한 뒤 팬아웃 셀을 갱신한다.
    # - 에러 처리: 이벤트 상한을 넘으면 SimulationError(OSCILLATION).
    def _apply(self, time: float, net: str, value: LogicValue) -> None:
        values = self.values
        old = values[net]
        if old is value:
            return
        self.event_count += 1
        if self.event_count > self.options.max_events:
            raise SimulationError(
                f"event cap {self.options.max_events} exceeded at t={time} ps; circuit oscillates",
                code="OSCILLATION",
            )
        values[net] = value
        self.last_change[net] = time
        self.waveforms[net].append((time, value))
        if old is not LX and value is not LX:
            self.toggles[net] += 1
            driver = self.driver.get(net)
            if driver is not None:
                self.cell_toggles[driver] += 1
        for cell, pin in self.fanout[net]:
            kind = cell.kind
            if kind == _COMBINATIONAL:
                self._schedule(cell, cell.evaluate(*[values[n] for n in cell.input_nets]), time)
            elif kind == _SEQUENTIAL:
                self._flip_flop(cell, pin, old, value, time)
            elif not self._check_gating(cell, pin, value, time):
                self._evaluate(cell, time)

    # [함수 설명]
    # - 목적: 조합 셀 출력을 현재 입력으로 계산해 예약한다. forced가 있으면 그 값(위반 시 X)을 쓴다.
    def _evaluate(self, cell: _Cell, now: float, forced: LogicValue | None = None) -> None:
        if forced is not None:
            value = forced
        else:
            value = cell.evaluate(*[self.values[net] for net in cell.input_nets])
        self._schedule(cell, value, now)

    # [함수 설명]
    # - 목적: 관성 지연으로 출력 변화를 예약한다.
    # - 핵심 동작: 같은 값이 이미 대기 중이면 유지, 다른 값이 대기 중이면 그 이벤트를 무효화한다.
    #   지연은 목표 값 극성(1이면 t_rise, 0이면 t_fall, X면 둘 중 큰 값)으로 고른다.
    def _schedule(self, cell: _Cell, value: LogicValue, now: float) -> None:
        net = cell.output
        pending = self.pending.get(net)
        if pending is not None:
            if pending[2] is value:
                return
            del self.pending[net]
        if self.values[net] is value:
            return
        if value is L1:
            delay = cell.rise
        elif value is L0:
            delay = cell.fall
        else:
            delay = cell.slow
        seq = self._push(now + delay, net, value)
        self.pending[net] = (now + delay, seq, value)

    # [함수 설명]
    # - 목적: LECTOR_AND2 게이팅 조건 검사(timing_checks일 때만 이 분기로 온다).
    # - 출력: 위반으로 출력을 X로 강제했으면 True.
    # - 핵심 동작: 클록이 high인 동안 enable이 올라가거나, enable 변화 직후 t_setup 안에 클록이 오르면 위반.
    def _check_gating(self, cell: _Cell, pin: str, value: LogicValue, now: float) -> bool:
        clock_net, enable_net = cell.inputs["A"], cell.inputs["B"]
        if pin == "B" and value is not L0 and self.values[clock_net] is L1:
            self._violate(cell, now, "gating", f"enable {enable_net} rose while {clock_net} is high")
            return True
        if (
            pin == "A"
            and value is L1
            and self.values[enable_net] is not L0
            and now - self.last_change[enable_net] < cell.spec.t_setup
        ):
            self._violate(cell, now, "gating", f"enable {enable_net} changed within setup of {clock_net}")
            return True
        return False

    # [함수 설명]
    # - 목적: 위반을 기록하고 셀 출력(플립플롭이면 상태도)을 X로 만든다.
    def _violate(self, cell: _Cell, now: float, kind: str, message: str) -> None:
        self.violations.append(Violation(time=now, instance=cell.name, kind=kind, message=message))
        if cell.kind == _SEQUENTIAL:
            self.ff_state[cell.name] = LX
        self._evaluate(cell, now, forced=LX)

    # [함수 설명]
    # - 목적: 상승 에지 트리거 D 플립플롭 동작.
    # - 핵심 동작: CLK 0->1에서 D를 잡는다. 0->X 또는 X->1 클록에서는 D가 상태와 다르면 X가 된다.
    #   timing_checks면 setup(에지 전 t_setup 안의 D 변화)과 hold(에지 후 t_hold 안의 D 변화)를 검사한다.
    def _flip_flop(self, cell: _Cell, pin: str, old: LogicValue, new: LogicValue, now: float) -> None:
        data_net = cell.inputs["D"]
        checks = self.options.timing_checks
        if pin == "CLK":
            if is_toggle(old, new):
                self.clock_pin_toggles[cell.name] += 1
            if old is L0 and new is L1:
                self.last_capture[cell.name] = now
                if checks and now - self.last_change[data_net] < cell.spec.t_setup:
                    self._violate(cell, now, "setup", f"{data_net} changed within setup window")
                    return
                self.ff_state[cell.name] = self.values[data_net]
                self._schedule(cell, self.ff_state[cell.name], now)
            elif (old is L0 and new is LX) or (old is LX and new is L1):
                if self.values[data_net] is not self.ff_state[cell.name]:
                    self.ff_state[cell.name] = LX
                    self._schedule(cell, LX, now)
        elif pin == "D" and checks:
            captured = self.last_capture.get(cell.name)
            if captured is not None and now - captured < cell.spec.t_hold:
                self._violate(cell, now, "hold", f"{data_net} changed within hold window")


# [함수 설명]
# - 목적: 넷리스트를 주어진 자극으로 시뮬레이션한다.
# - 입력: n, p, s, options(타이밍 체크, FF 초기화, 이벤트 상한, 셀 덮어쓰기)
# - 출력: Trace. 동일 입력이면 비트 단위로 동일하다.
# - 에러 처리: 입력이 아닌 넷 구동은 StimulusError, 이벤트 상한 초과는 SimulationError.
def simulate(
    n: Netlist, p: LibraryProfile, s: Stimulus, options: SimOptions | None = None
) -> Trace:
    return EventSimulator(n, p, options).run(s)


# [함수 설명]
# - 목적: 넷 하나의 0<->1 토글 수.
# - 에러 처리: Trace에 없는 넷이면 SimulationError(UNKNOWN_NET).
def count_toggles(t: Trace, net: str) -> int:
    try:
        return t.toggles[net]
    except KeyError:
        raise SimulationError(f"net '{net}' not in trace of '{t.netlist_name}'", code="UNKNOWN_NET") from None


# [함수 설명]
# - 목적: 샘플 시각마다 nets의 직전 값 튜플을 만든다(사이클 단위 출력 비교용).
def sample_outputs(
    t: Trace, nets: Sequence[str], sample_times: Sequence[float]
) -> list[tuple[LogicValue, ...]]:
    return [tuple(t.value_before(net, time) for net in nets) for time in sample_times]


# [클래스 설명]
# - 역할: 두 Trace의 첫 불일치 사이클, 샘플 시각, 넷별 (a 값, b 값).
@dataclass(frozen=True)
class Divergence:
    cycle: int
    time: float
    diff: dict[str, tuple[str, str]]


# [함수 설명]
# - 목적: 샘플 출력이 처음 달라지는 클록 사이클을 찾는다.
# - 출력: Divergence 또는 끝까지 같으면 None
def check_equivalence(
    a: Trace, b: Trace, nets: Sequence[str], sample_times: Sequence[float]
) -> Divergence | None:
    for cycle, (time, left, right) in enumerate(
        zip(sample_times, sample_outputs(a, nets, sample_times), sample_outputs(b, nets, sample_times), strict=True)
    ):
        if left != right:
            diff = {
                net: (lv.value, rv.value)
                for net, lv, rv in zip(nets, left, right, strict=True)
                if lv is not rv
            }
            return Divergence(cycle=cycle, time=time, diff=diff)
    return None
