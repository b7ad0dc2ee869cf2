# [파일 설명]
# - 목적: Trace를 VCD 파형 파일로 내보내고 다시 읽어 전이를 확인한다.
# - 입력/출력: Trace -> .vcd (timescale 1 ps 고정)
# - 주의 사항: 정수가 아닌 이벤트 시각(특성화 오프셋, 변동 지연)은 가장 가까운 ps로 반올림한다.
#   같은 넷의 변화 순서는 유지되며 반올림한 변화 수는 로그에 남긴다.
#   X는 'x'로 기록한다. 날짜 헤더를 고정해 같은 Trace는 같은 파일을 만든다.
# - 연관 모듈: event_sim(Trace), cli(sim --vcd, pipeline)
from __future__ import annotations

import logging
from pathlib import Path

from vcd import VCDWriter
from vcd.reader import TokenKind, tokenize

from app import __version__
from app.services.errors import SimulationError
from app.services.event_sim import Trace
from app.services.logic import L0, L1, LogicValue

logger = logging.getLogger(__name__)

TIMESCALE = "1 ps"
_VCD_VALUES: dict[LogicValue, int | str] = {L0: 0, L1: 1}
# 다른 도구가 만든 파일을 읽을 때의 단위 -> ps 배율
_UNIT_SCALE = {"fs": 1e-3, "ps": 1.0, "ns": 1e3, "us": 1e6}


# [함수 설명]
# - 목적: Trace 전체를 VCD로 쓴다. 넷 이름 순으로 변수를 등록하고 초기값은 t=0 덤프에 싣는다.
# - 입력: trace, path(상위 디렉터리가 없으면 만든다)
# - 출력: 쓴 파일 경로
# - 에러 처리: 넷이 하나도 없으면 SimulationError(EMPTY_TRACE).
def write_vcd(trace: Trace, path: str | Path) -> Path:
    if not trace.waveforms:
        raise SimulationError(f"trace of '{trace.netlist_name}' has no nets to dump", code="EMPTY_TRACE")
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    changes: list[tuple[int, str, LogicValue]] = []
    off_grid = 0
    with target.open("w", encoding="utf-8") as stream:
        with VCDWriter(stream, timescale=TIMESCALE, date="-", version=f"cgforge {__version__}") as writer:
            variables = {}
            for net in sorted(trace.waveforms):
                waveform = trace.waveforms[net]
                variables[net] = writer.register_var(
                    trace.netlist_name, net, "wire", size=1, init=_VCD_VALUES.get(waveform[0][1], "x")
                )
                for time, value in waveform[1:]:
                    tick = round(time)
                    off_grid += tick != time
                    changes.append((tick, net, value))
            # 정렬은 안정적이라 같은 넷의 같은 tick 변화는 원래 순서를 지킨다
            changes.sort(key=lambda item: (item[0], item[1]))
            for tick, net, value in changes:
                writer.change(variables[net], tick, _VCD_VALUES.get(value, "x"))

    logger.info(
        "write_vcd: netlist=%s nets=%s changes=%s rounded=%s path=%s",
        trace.netlist_name,
        len(variables),
        len(changes),
        off_grid,
        target,
    )
    return target


# [함수 설명]
# - 목적: VCD 파일을 pyvcd 토크나이저로 다시 읽는다.
# - 출력: 넷 -> [(시각 ps, 값 문자)], 첫 항목은 초기값
def read_vcd_transitions(path: str | Path) -> dict[str, list[tuple[float, str]]]:
    ids: dict[str, str] = {}
    result: dict[str, list[tuple[float, str]]] = {}
    ps_per_tick = 1.0
    now = 0
    with Path(path).open("rb") as stream:
        for token in tokenize(stream):
            if token.kind is TokenKind.TIMESCALE:
                ps_per_tick = getattr(token.data.magnitude, "value", token.data.magnitude) * _UNIT_SCALE[token.data.unit.value]
            elif token.kind is TokenKind.VAR:
                ids[token.data.id_code] = token.data.reference
                result.setdefault(token.data.reference, [])
            elif token.kind is TokenKind.CHANGE_TIME:
                now = token.data
            elif token.kind is TokenKind.CHANGE_SCALAR:
                net = ids[token.data.id_code]
                result[net].append((now * ps_per_tick, str(token.data.value).lower()))
    return result
