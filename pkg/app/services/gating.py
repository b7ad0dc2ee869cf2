# [파일 설명]
# - 목적: 플립플롭마다 XOR 비교기 + LECTOR-AND 게이팅 셀을 삽입하고 클록을 재배선한다.
# - 제공 기능: list_ffs, insert_clock_gating(per-ff/shared), gating_overhead,
#   rename_gated_clocks_fig2, shared_witness_stimulus.
# - 주의 사항: shared 모드는 첫 번째 FF의 enable을 모든 FF에 재사용하는 의도적 오류 모드다.
#   출력 불일치 데모 외에는 쓰지 않는다.
# - 연관 모듈: netlist_ir(IR/검증), techlib(셀 해석/트랜지스터 수), stimulus(증인 자극)
from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, replace
from enum import Enum

from app.services.errors import GatingError
from app.services.logic import L0, L1
from app.services.netlist_ir import (
    SEQUENTIAL_FUNCTIONS,
    Instance,
    Netlist,
    cell_function,
    driver_map,
    validate,
)
from app.services.stimulus import ClockSpec, Stimulus, make_stimulus
from app.services.techlib import LibraryProfile

logger = logging.getLogger(__name__)


# [클래스 설명]
# - 역할: 게이팅 방식. per-ff는 FF마다 enable을 만들고, shared는 첫 FF의 enable을 모두에 재사용한다.
class GatingMode(str, Enum):
    PER_FF = "per-ff"
    SHARED = "shared"


# [클래스 설명]
# - 역할: 게이팅 패스가 한 일의 기록(대상 FF, 추가 셀/넷, 트랜지스터 오버헤드, 이름 변경).
# - 사용 위치: cli gate 출력, api /cg/gate 응답, 도식 이름 바꾸기.
@dataclass(frozen=True)
class GatingReport:
    mode: GatingMode
    gated_ffs: tuple[str, ...]
    new_nets: tuple[str, ...]
    added_cells: tuple[str, ...]
    added_cell_types: tuple[str, ...]
    transistor_overhead: int
    # (요청한 이름, 실제 사용한 이름) - 충돌로 접미사가 붙은 경우만
    renamed: tuple[tuple[str, str], ...] = ()
    # FF 이름 -> 게이팅된 클록 넷
    clock_nets: tuple[tuple[str, str], ...] = ()

    # [함수 설명]
    # - 목적: FF 순서대로 게이팅된 클록 넷 이름.
    @property
    def ckg_nets(self) -> list[str]:
        return [net for _ff, net in self.clock_nets]


# [함수 설명]
# - 목적: 순차 셀 인스턴스 이름을 선언 순서대로.
def list_ffs(n: Netlist, library: Mapping[str, str] | None = None) -> list[str]:
    return [
        inst.name
        for inst in n.instances
        if cell_function(inst.cell_type, library) in SEQUENTIAL_FUNCTIONS
    ]


# [함수 설명]
# - 목적: 기능 태그를 구현하는 프로파일 셀 이름. 태그와 같은 이름을 먼저 고른다.
# - 에러 처리: 없으면 GatingError(UNKNOWN_CELL).
def _cell_for(p: LibraryProfile, function: str) -> str:
    if function in p.cells and p.cells[function].function == function:
        return function
    for name, spec in p.cells.items():
        if spec.function == function:
            return name
    raise GatingError(f"profile '{p.name}' has no {function} cell", code="UNKNOWN_CELL")


# [클래스 설명]
# - 역할: 사용 중이 아닌 이름을 나눠 준다. 충돌하면 `_<k>` 접미사를 붙이고 기록한다.
class _Namer:

    # [함수 설명]
    # - 목적: 이미 쓰인 이름 집합으로 시작한다.
    def __init__(self, taken: set[str]) -> None:
        self.taken = taken
        self.renamed: list[tuple[str, str]] = []

    # [함수 설명]
    # - 목적: wanted 또는 충돌을 피한 변형 이름을 예약해 돌려준다.
    def claim(self, wanted: str) -> str:
        name = wanted
        k = 1
        while name in self.taken:
            name = f"{wanted}_{k}"
            k += 1
        if name != wanted:
            self.renamed.append((wanted, name))
        self.taken.add(name)
        return name


# [함수 설명]
# - 목적: 클록 게이팅 패스. FF마다 en=XOR(D,Q), ckg=LECTOR_AND2(clk,en), ckg_bar=LECTOR_INV(ckg)을
#   추가하고 FF의 CLK를 ckg로 재배선한다.
# - 입력: n(유효 넷리스트), p(프로파일), mode(per-ff 기본)
# - 출력: (게이팅된 Netlist, GatingReport). 결과는 validate()를 통과한다.
# - 에러 처리: FF 없음(NO_FLIP_FLOPS), 이미 게이팅됨(ALREADY_GATED), 프로파일에 없는 셀(UNKNOWN_CELL).
def insert_clock_gating(
    n: Netlist, p: LibraryProfile, mode: GatingMode | str = GatingMode.PER_FF
) -> tuple[Netlist, GatingReport]:
    mode = GatingMode(mode)
    library = p.library
    for inst in n.instances:
        if inst.cell_type not in p.cells:
            raise GatingError(
                f"instance '{inst.name}' uses cell '{inst.cell_type}' unknown to profile '{p.name}'",
                code="UNKNOWN_CELL",
            )
    ffs = list_ffs(n, library)
    if not ffs:
        raise GatingError(f"netlist '{n.name}' has no flip-flops to gate", code="NO_FLIP_FLOPS")

    drivers = driver_map(n, library)
    for name in ffs:
        clock = n.instance(name).net("CLK")
        driver = drivers.get(clock, "")
        if driver and library.get(n.instance(driver).cell_type) == "LECTOR_AND2":
            raise GatingError(f"flip-flop '{name}' is already gated by '{driver}'", code="ALREADY_GATED")

    xor_cell = _cell_for(p, "XOR2")
    and_cell = _cell_for(p, "LECTOR_AND2")
    inv_cell = _cell_for(p, "LECTOR_INV")

    inst_names = _Namer({inst.name for inst in n.instances})
    net_names = _Namer(set(n.nets))
    added: list[Instance] = []
    new_nets: list[str] = []
    rebound: dict[str, str] = {}

    # [함수 설명]
    # - 목적: FF 하나에 XOR2/LECTOR_AND2/LECTOR_INV 세 셀과 en/ckg/ckg_bar 넷을 만든다.
    # - 출력: 게이팅된 클록 넷 이름
    def add_gate(ff: Instance) -> str:
        en = net_names.claim(f"en_{ff.name}")
        ckg = net_names.claim(f"ckg_{ff.name}")
        ckg_bar = net_names.claim(f"ckg_bar_{ff.name}")
        added.extend(
            [
                Instance(inst_names.claim(f"{ff.name}_cmp"), xor_cell, {"A": ff.net("D"), "B": ff.net("Q"), "Y": en}),
                Instance(inst_names.claim(f"{ff.name}_cg"), and_cell, {"A": ff.net("CLK"), "B": en, "Y": ckg}),
                Instance(inst_names.claim(f"{ff.name}_cgb"), inv_cell, {"A": ckg, "Y": ckg_bar}),
            ]
        )
        new_nets.extend([en, ckg, ckg_bar])
        return ckg

    if mode is GatingMode.PER_FF:
        for name in ffs:
            rebound[name] = add_gate(n.instance(name))
    else:
        # 같은 클록을 쓰는 FF들은 첫 FF의 enable 하나로 묶인다
        shared: dict[str, str] = {}
        for name in ffs:
            ff = n.instance(name)
            clock = ff.net("CLK")
            if clock not in shared:
                shared[clock] = add_gate(ff)
            rebound[name] = shared[clock]

    instances = [
        replace(inst, pins={**inst.pins, "CLK": rebound[inst.name]}) if inst.name in rebound else inst
        for inst in n.instances
    ]
    gated = replace(n, nets=n.nets | frozenset(new_nets), instances=(*instances, *added))

    diagnostics = validate(gated, library)
    if diagnostics:
        first = diagnostics[0]
        raise GatingError(f"gated netlist is invalid: {first.category} at {first.entity}", code="GATING_INVALID")

    report = GatingReport(
        mode=mode,
        gated_ffs=tuple(ffs),
        new_nets=tuple(new_nets),
        added_cells=tuple(inst.name for inst in added),
        added_cell_types=tuple(inst.cell_type for inst in added),
        transistor_overhead=sum(p.cell(inst.cell_type).transistors for inst in added),
        renamed=(*inst_names.renamed, *net_names.renamed),
        clock_nets=tuple((name, rebound[name]) for name in ffs),
    )
    logger.info(
        "insert_clock_gating: netlist=%s mode=%s ffs=%s added=%s overhead=%s renamed=%s",
        n.name,
        mode.value,
        len(ffs),
        len(added),
        report.transistor_overhead,
        len(report.renamed),
    )
    return gated, report


# [함수 설명]
# - 목적: 추가된 셀들의 트랜지스터 수 합.
def gating_overhead(report: GatingReport, p: LibraryProfile) -> int:
    return sum(p.cell(cell_type).transistors for cell_type in report.added_cell_types)


# [함수 설명]
# - 목적: 넷 이름을 mapping대로 바꾼 사본(포트, nets, 핀 바인딩 모두).
# - 에러 처리: 이미 있는 넷 위로 이름을 바꾸려 하면 GatingError(NAME_COLLISION).
def rename_nets(n: Netlist, mapping: Mapping[str, str]) -> Netlist:
    clash = sorted(new for new in mapping.values() if new in n.nets and new not in mapping)
    if clash:
        raise GatingError(f"cannot rename onto existing net(s): {', '.join(clash)}", code="NAME_COLLISION")

    # [함수 설명]
    # - 목적: mapping에 없으면 원래 이름.
    def _rename(net: str) -> str:
        return mapping.get(net, net)

    return replace(
        n,
        inputs=tuple(map(_rename, n.inputs)),
        outputs=tuple(map(_rename, n.outputs)),
        nets=frozenset(map(_rename, n.nets)),
        instances=tuple(
            replace(inst, pins={pin: _rename(net) for pin, net in inst.pins.items()}) for inst in n.instances
        ),
    )


# [함수 설명]
# - 목적: per-ff 게이팅 결과의 클록 넷을 레지스터 도식 이름(ckg, ckg_1, ...)으로 바꾼다.
# - 출력: (이름이 바뀐 Netlist, new_nets/clock_nets가 갱신된 GatingReport)
def rename_gated_clocks_fig2(n: Netlist, report: GatingReport) -> tuple[Netlist, GatingReport]:
    if report.mode is not GatingMode.PER_FF:
        raise GatingError("schematic clock names apply to per-ff gating only", code="BAD_MODE")
    mapping: dict[str, str] = {}
    for index, (ff, ckg) in enumerate(report.clock_nets):
        suffix = "" if index == 0 else f"_{index}"
        mapping[ckg] = f"ckg{suffix}"
        ckg_bar = report.new_nets[report.new_nets.index(ckg) + 1]
        if ckg_bar.startswith("ckg_bar_"):
            mapping[ckg_bar] = f"ckg_bar{suffix}"
        logger.debug("rename_gated_clocks_fig2: ff=%s %s -> %s", ff, ckg, mapping[ckg])
    renamed = rename_nets(n, mapping)
    new_report = replace(
        report,
        new_nets=tuple(mapping.get(net, net) for net in report.new_nets),
        clock_nets=tuple((ff, mapping.get(net, net)) for ff, net in report.clock_nets),
    )
    return renamed, new_report


# [함수 설명]
# - 목적: shared 게이팅이 ff2의 캡처를 놓치는 2비트 레지스터 자극.
# - 핵심 동작: D1은 변하지 않아 ff1에서 가져온 공유 enable이 낮게 유지되는 동안 D2가 1주기에 오른다.
# - 주의 사항: 플립플롭을 0으로 초기화해 실행한다.
def shared_witness_stimulus(period: float = 800.0, cycles: int = 4) -> Stimulus:
    clock = ClockSpec(net="clk", period=period)
    change = period + clock.first_rise / 2.0
    events = [(0.0, "D1", L0), (0.0, "D2", L0), (change, "D2", L1)]
    return make_stimulus(events, cycles * period + clock.first_rise, [clock])
