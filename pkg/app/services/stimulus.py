# [파일 설명]
# - 목적: 시뮬레이션 입력 자극(Stimulus)의 표현, 파일 형식, 생성기를 제공한다.
# - 제공 기능: parse_stimulus/write_stimulus, 클록 전개, 활동률 기반 랜덤 자극, 샘플 시점 계산.
# - 입력/출력: `<time_ps> <net> <0|1|x>`, `horizon <ps>`, `clock <net> <period> [<duty>]` 라인.
# - 주의 사항: 데이터 변화는 클록 low 구간 중앙에만 배치해 게이팅 판단과 경쟁하지 않게 한다.
# - 결정론: numpy Generator(seed)로만 난수를 만든다.
# - 연관 모듈: event_sim, gating(증인 자극), characterize, power_model
from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from app.services.errors import InputFileError, StimulusError
from app.services.logic import L0, L1, LogicValue
from app.services.text_digest import summarize_text

logger = logging.getLogger(__name__)


# [클래스 설명]
# - 역할: 사각파 클록 정의(넷, 주기 ps, duty).
# - 핵심 동작: t=0에 0, k*P + (1-duty)*P에 상승, (k+1)*P에 하강.
@dataclass(frozen=True)
class ClockSpec:
    net: str
    period: float
    duty: float = 0.5

    # [함수 설명]
    # - 목적: 첫 상승 에지 시각 (1-duty)*P.
    @property
    def first_rise(self) -> float:
        return (1.0 - self.duty) * self.period

    # [함수 설명]
    # - 목적: horizon 이하의 상승 에지 시각 목록.
    def rising_edges(self, horizon: float) -> list[float]:
        edges: list[float] = []
        t = self.first_rise
        while t <= horizon:
            edges.append(t)
            t += self.period
        return edges

    # [함수 설명]
    # - 목적: horizon까지의 클록 이벤트 목록(t=0 초기값 0 포함).
    def events(self, horizon: float) -> list[tuple[float, str, LogicValue]]:
        events: list[tuple[float, str, LogicValue]] = [(0.0, self.net, L0)]
        k = 0
        while True:
            rise = k * self.period + self.first_rise
            fall = (k + 1) * self.period
            if rise > horizon:
                break
            events.append((rise, self.net, L1))
            if fall <= horizon:
                events.append((fall, self.net, L0))
            k += 1
        return events


# [클래스 설명]
# - 역할: 시각순 입력 이벤트, 시뮬레이션 끝 시각, 전개된 클록 정의.
# - 사용 위치: event_sim 입력, 사이클 샘플 시점 계산, 자극 파일 왕복.
@dataclass(frozen=True)
class Stimulus:
    events: tuple[tuple[float, str, LogicValue], ...]
    horizon: float
    clocks: tuple[ClockSpec, ...] = ()

    # [함수 설명]
    # - 목적: (첫) 클록의 상승 에지 시각. 출력은 각 에지 직전 값으로 샘플한다.
    def sample_times(self, clock: str | None = None) -> list[float]:
        spec = self._clock(clock)
        return spec.rising_edges(self.horizon)

    # [함수 설명]
    # - 목적: 이름이 맞는(없으면 첫) 클록 정의.
    # - 에러 처리: 클록이 없으면 StimulusError(NO_CLOCK).
    def _clock(self, clock: str | None) -> ClockSpec:
        for spec in self.clocks:
            if clock is None or spec.net == clock:
                return spec
        raise StimulusError(f"stimulus has no clock '{clock}'", code="NO_CLOCK")

    # [함수 설명]
    # - 목적: 자극이 구동하는 넷 집합.
    @property
    def nets(self) -> set[str]:
        return {net for _t, net, _v in self.events}


# [함수 설명]
# - 목적: 데이터 이벤트와 클록 파형을 시각순으로 합쳐 Stimulus를 만든다.
# - 에러 처리: 마지막 이벤트가 horizon 뒤면 StimulusError(BAD_HORIZON).
def make_stimulus(
    events: Iterable[tuple[float, str, LogicValue]],
    horizon: float,
    clocks: Sequence[ClockSpec] = (),
) -> Stimulus:
    merged = list(events)
    for clock in clocks:
        merged.extend(clock.events(horizon))
    merged.sort(key=lambda item: item[0])
    if merged and merged[-1][0] > horizon:
        raise StimulusError(
            f"horizon {horizon} ps is before last event at {merged[-1][0]} ps", code="BAD_HORIZON"
        )
    return Stimulus(events=tuple(merged), horizon=horizon, clocks=tuple(clocks))


# [함수 설명]
# - 목적: 스티뮬러스 파일 텍스트를 파싱한다.
# - 입력: text, inputs(모듈 입력 넷 목록; 주어지면 넷 이름을 검증)
# - 에러 처리: 문법 오류, 시간 역행, 입력이 아닌 넷, horizon 누락은 StimulusError.
def parse_stimulus(text: str, inputs: Iterable[str] | None = None) -> Stimulus:
    summary = summarize_text(text)
    logger.info("parse_stimulus: text_len=%s text_hash=%s", summary["len"], summary["sha256_8"])
    allowed = set(inputs) if inputs is not None else None
    events: list[tuple[float, str, LogicValue]] = []
    clocks: list[ClockSpec] = []
    horizon: float | None = None
    last_time = 0.0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        try:
            if tokens[0] == "horizon" and len(tokens) == 2:
                horizon = float(tokens[1])
            elif tokens[0] == "clock" and len(tokens) in (3, 4):
                duty = float(tokens[3]) if len(tokens) == 4 else 0.5
                period = float(tokens[2])
                if period <= 0 or not 0 < duty < 1:
                    raise StimulusError(f"line {line_no}: bad clock period/duty", code="STIMULUS_SYNTAX")
                clocks.append(ClockSpec(net=tokens[1], period=period, duty=duty))
            elif len(tokens) == 3:
                time = float(tokens[0])
                if time < last_time:
                    raise StimulusError(f"line {line_no}: time goes backwards", code="STIMULUS_SYNTAX")
                last_time = time
                events.append((time, tokens[1], LogicValue.parse(tokens[2])))
            else:
                raise StimulusError(f"line {line_no}: cannot parse '{raw.strip()}'", code="STIMULUS_SYNTAX")
        except ValueError:
            raise StimulusError(f"line {line_no}: bad number or value in '{raw.strip()}'", code="STIMULUS_SYNTAX") from None

    if horizon is None:
        raise StimulusError("stimulus needs a 'horizon <ps>' directive", code="STIMULUS_SYNTAX")
    stimulus = make_stimulus(events, horizon, clocks)
    if allowed is not None:
        check_stimulus(stimulus, allowed)
    return stimulus


# [함수 설명]
# - 목적: 자극 파일을 읽어 parse_stimulus에 넘긴다.
# - 에러 처리: 읽기 실패는 InputFileError(exit 3).
def read_stimulus_file(path: str | Path, inputs: Iterable[str] | None = None) -> Stimulus:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read stimulus '{path}': {exc.strerror}") from exc
    return parse_stimulus(text, inputs)


# [함수 설명]
# - 목적: 모든 이벤트 넷이 모듈 입력인지 확인한다.
# - 에러 처리: 아니면 StimulusError(NON_INPUT_NET).
def check_stimulus(stimulus: Stimulus, inputs: Iterable[str]) -> None:
    allowed = set(inputs)
    for _time, net, _value in stimulus.events:
        if net not in allowed:
            raise StimulusError(f"stimulus drives '{net}', which is not a module input", code="NON_INPUT_NET")


# [함수 설명]
# - 목적: 자극 파일 텍스트. 클록 파형은 `clock` 지시문으로, 나머지는 일반 이벤트 줄로 쓴다.
def write_stimulus(stimulus: Stimulus) -> str:
    clock_nets = {clock.net for clock in stimulus.clocks}
    lines = [f"horizon {_fmt(stimulus.horizon)}"]
    lines.extend(f"clock {c.net} {_fmt(c.period)} {_fmt(c.duty)}" for c in stimulus.clocks)
    lines.extend(
        f"{_fmt(time)} {net} {value.value}"
        for time, net, value in stimulus.events
        if net not in clock_nets
    )
    return "\n".join(lines) + "\n"


# [함수 설명]
# - 목적: 정수 값은 정수로, 아니면 repr(float)으로 적어 왕복 시 값이 보존되게 한다.
def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


# [함수 설명]
# - 목적: 데이터 활동률 alpha의 시드 고정 랜덤 자극을 만든다.
# - 핵심 동작: 모든 데이터 넷은 t=0에 0, 이후 매 사이클 확률 alpha로 한 번 토글한다.
#   변화 시점은 사이클 k의 low 구간 중앙(k*P + (1-duty)*P/2)이다.
# - 결정론: 동일 seed면 동일 자극.
def random_activity_stimulus(
    data_nets: Sequence[str],
    clock: ClockSpec,
    alpha: float,
    cycles: int,
    seed: int,
) -> Stimulus:
    if not 0.0 <= alpha <= 1.0:
        raise StimulusError(f"alpha must be in [0, 1], got {alpha}", code="BAD_ALPHA")
    rng = np.random.default_rng(seed)
    toggles = rng.random((cycles, len(data_nets))) < alpha
    horizon = float(cycles) * clock.period + clock.first_rise
    low_mid = clock.first_rise / 2.0
    events: list[tuple[float, str, LogicValue]] = [(0.0, net, L0) for net in data_nets]
    state = [L0] * len(data_nets)
    for cycle in range(1, cycles):
        t = cycle * clock.period + low_mid
        for index, net in enumerate(data_nets):
            if toggles[cycle, index]:
                state[index] = L1 if state[index] is L0 else L0
                events.append((t, net, state[index]))
    logger.info(
        "random_activity_stimulus: nets=%s alpha=%s cycles=%s seed=%s events=%s",
        len(data_nets),
        alpha,
        cycles,
        seed,
        len(events),
    )
    return make_stimulus(events, horizon, [clock])


# [함수 설명]
# - 목적: 데이터 넷이 내내 value로 고정된 클록 자극.
def constant_stimulus(data_nets: Sequence[str], clock: ClockSpec, cycles: int, value: LogicValue = L0) -> Stimulus:
    horizon = float(cycles) * clock.period + clock.first_rise
    return make_stimulus([(0.0, net, value) for net in data_nets], horizon, [clock])
