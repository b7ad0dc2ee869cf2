# [파일 설명]
# - 목적: 게이트 수준 회로의 구조 IR(Netlist/Instance)과 텍스트 직렬화를 제공한다.
# - 제공 기능: parse_netlist, write_netlist, validate, build_register_demo, 드라이버/팬아웃 맵.
# - 입력/출력: 라인 기반 넷리스트 텍스트 <-> 불변 Netlist 객체.
# - 주의 사항: 모듈 입력은 드라이버로 취급하므로 입력 넷을 셀 출력이 구동하면 다중 드라이버 오류다.
# - 연관 모듈: techlib, gating, event_sim 등 모든 패스가 이 IR을 소비한다.
from __future__ import annotations

import logging
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx

from app.services.errors import InputFileError, NetlistError, NetlistSyntaxError
from app.services.text_digest import summarize_text

logger = logging.getLogger(__name__)

IDENTIFIER_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

SEQUENTIAL_FUNCTIONS = frozenset({"DFF_CONV"})

# 기능 태그별 핀 인터페이스: (입력 핀, 출력 핀)
CELL_INTERFACES: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "INV": (("A",), ("Y",)),
    "BUF": (("A",), ("Y",)),
    "AND2": (("A", "B"), ("Y",)),
    "NAND2": (("A", "B"), ("Y",)),
    "XOR2": (("A", "B"), ("Y",)),
    "LECTOR_AND2": (("A", "B"), ("Y",)),
    "LECTOR_INV": (("A",), ("Y",)),
    "DFF_CONV": (("D", "CLK"), ("Q",)),
}

# 셀 이름 -> 기능 태그. 프로파일이 없을 때 사용하는 기본 라이브러리.
STANDARD_CELLS: dict[str, str] = {name: name for name in CELL_INTERFACES} | {"CKBUF": "BUF"}

DIAG_UNKNOWN_CELL = "unknown-cell"
DIAG_UNKNOWN_PIN = "unknown-pin"
DIAG_UNBOUND_PIN = "unbound-pin"
DIAG_UNDECLARED_NET = "undeclared-net"
DIAG_DUPLICATE_INSTANCE = "duplicate-instance"
DIAG_MULTIPLY_DRIVEN = "multiply-driven-net"
DIAG_UNDRIVEN = "undriven-net"
DIAG_CYCLE = "combinational-cycle"


# [클래스 설명]
# - 역할: 셀 인스턴스 하나(이름, 셀 타입, 핀 -> 넷 바인딩).
@dataclass(frozen=True)
class Instance:
    name: str
    cell_type: str
    pins: dict[str, str] = field(hash=False)

    # [함수 설명]
    # - 목적: 핀에 연결된 넷 이름.
    def net(self, pin: str) -> str:
        return self.pins[pin]


# [클래스 설명]
# - 역할: 불변 모듈 표현. 포트 순서를 유지하고, nets는 포트와 내부 wire를 모두 포함한다.
# - 사용 위치: 파서/작성기, 검증, 게이팅 변환, 시뮬레이터, 전력 모델.
# - 제약/주의: 구조 불변식(단일 드라이버, 조합 루프 없음 등)은 validate가 보장한다.
@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    nets: frozenset[str] = frozenset()
    instances: tuple[Instance, ...] = ()

    # [함수 설명]
    # - 목적: 이름으로 인스턴스를 찾는다. 없으면 KeyError.
    def instance(self, name: str) -> Instance:
        for inst in self.instances:
            if inst.name == name:
                return inst
        raise KeyError(name)

    # [함수 설명]
    # - 목적: 포트가 아닌 내부 넷 목록(정렬).
    @property
    def wires(self) -> list[str]:
        ports = set(self.inputs) | set(self.outputs)
        return sorted(net for net in self.nets if net not in ports)


# [클래스 설명]
# - 역할: validate 결과 한 건(범주, 대상 넷/인스턴스, 설명).
@dataclass(frozen=True)
class Diagnostic:
    category: str
    entity: str
    message: str


# [함수 설명]
# - 목적: 셀 타입 -> 기능 태그. library가 없으면 표준 셀 표를 쓴다. 모르는 셀이면 None.
def cell_function(cell_type: str, library: Mapping[str, str] | None = None) -> str | None:
    cells = STANDARD_CELLS if library is None else library
    return cells.get(cell_type)


# [함수 설명]
# - 목적: 기능 태그의 (입력 핀, 출력 핀) 인터페이스.
def cell_pins(function: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return CELL_INTERFACES[function]


# [함수 설명]
# - 목적: 넷리스트 텍스트를 파싱하고 타입 불변식을 검증한다.
# - 입력: text, library(셀 이름 -> 기능 태그, 기본 STANDARD_CELLS), check(False면 구조 검증 생략)
# - 출력: 검증을 통과한 Netlist
# - 에러 처리: 문법 오류는 NetlistSyntaxError(line/column), 구조 오류는 NetlistError.
def parse_netlist(text: str, library: Mapping[str, str] | None = None, *, check: bool = True) -> Netlist:
    summary = summarize_text(text)
    logger.info("parse_netlist: text_len=%s text_hash=%s", summary["len"], summary["sha256_8"])

    name: str | None = None
    inputs: list[str] = []
    outputs: list[str] = []
    wires: list[str] = []
    instances: list[Instance] = []
    ended = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = _tokenize(line)
        if not tokens:
            continue
        keyword, column = tokens[0]
        if ended:
            raise NetlistSyntaxError("statement after endmodule", line=line_no, column=column)
        if name is None:
            if keyword != "module" or len(tokens) != 2:
                raise NetlistSyntaxError("expected 'module <name>'", line=line_no, column=column)
            name = _identifier(tokens[1], line_no)
            continue
        if keyword == "endmodule":
            if len(tokens) != 1:
                raise NetlistSyntaxError(
                    "unexpected token after endmodule", line=line_no, column=tokens[1][1]
                )
            ended = True
        elif keyword in ("input", "output", "wire"):
            if len(tokens) < 2:
                raise NetlistSyntaxError(f"'{keyword}' needs a net", line=line_no, column=column)
            target = {"input": inputs, "output": outputs, "wire": wires}[keyword]
            target.extend(_identifier(token, line_no) for token in tokens[1:])
        elif keyword == "cell":
            instances.append(_parse_cell(tokens, line_no))
        else:
            raise NetlistSyntaxError(f"unknown statement '{keyword}'", line=line_no, column=column)

    if name is None:
        raise NetlistSyntaxError("missing module header", line=1, column=1)
    if not ended:
        raise NetlistSyntaxError("missing endmodule", line=len(text.splitlines()) + 1, column=1)

    netlist = Netlist(
        name=name,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        nets=frozenset(inputs) | frozenset(outputs) | frozenset(wires),
        instances=tuple(instances),
    )
    if not check:
        return netlist
    diagnostics = validate(netlist, library)
    if diagnostics:
        first = diagnostics[0]
        raise NetlistError(f"{first.category}: {first.message}", code=first.category)
    return netlist


# [함수 설명]
# - 목적: 한 줄을 (토큰, 1부터 센 열 번호) 목록으로 나눈다.
def _tokenize(line: str) -> list[tuple[str, int]]:
    return [(match.group(0), match.start() + 1) for match in re.finditer(r"\S+", line)]


# [함수 설명]
# - 목적: 식별자 규칙 검사. 어긋나면 줄/열이 붙은 NetlistSyntaxError.
def _identifier(token: tuple[str, int], line_no: int) -> str:
    text, column = token
    if not IDENTIFIER_PATTERN.match(text):
        raise NetlistSyntaxError(f"invalid identifier '{text}'", line=line_no, column=column)
    return text


# [함수 설명]
# - 목적: `cell <CELLTYPE> <instname> <PIN>=<net> ...` 한 줄을 Instance로 만든다.
# - 에러 처리: 토큰 부족, PIN=net 형식 위반, 같은 핀 두 번 바인딩은 NetlistSyntaxError.
def _parse_cell(tokens: list[tuple[str, int]], line_no: int) -> Instance:
    if len(tokens) < 3:
        raise NetlistSyntaxError(
            "expected 'cell <CELLTYPE> <instname> <PIN>=<net> ...'",
            line=line_no,
            column=tokens[0][1],
        )
    cell_type = _identifier(tokens[1], line_no)
    inst_name = _identifier(tokens[2], line_no)
    pins: dict[str, str] = {}
    for text, column in tokens[3:]:
        pin, sep, net = text.partition("=")
        if not sep:
            raise NetlistSyntaxError(f"expected PIN=net, got '{text}'", line=line_no, column=column)
        pin = _identifier((pin, column), line_no)
        net = _identifier((net, column + len(pin) + 1), line_no)
        if pin in pins:
            raise NetlistSyntaxError(f"pin '{pin}' bound twice", line=line_no, column=column)
        pins[pin] = net
    return Instance(name=inst_name, cell_type=cell_type, pins=pins)


# [함수 설명]
# - 목적: Netlist를 정규 텍스트 형태로 직렬화한다.
# - 출력: parse_netlist로 되읽으면 구조적으로 동일한 텍스트. 빈 섹션은 생략한다.
def write_netlist(n: Netlist, library: Mapping[str, str] | None = None) -> str:
    lines = [f"module {n.name}"]
    if n.inputs:
        lines.append("input " + " ".join(n.inputs))
    if n.outputs:
        lines.append("output " + " ".join(n.outputs))
    if n.wires:
        lines.append("wire " + " ".join(n.wires))
    for inst in n.instances:
        bindings = " ".join(f"{pin}={inst.pins[pin]}" for pin in _pin_order(inst, library))
        lines.append(f"cell {inst.cell_type} {inst.name} {bindings}".rstrip())
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


# [함수 설명]
# - 목적: 직렬화용 핀 순서. 알려진 셀은 인터페이스 순(입력 -> 출력), 나머지는 이름순.
def _pin_order(inst: Instance, library: Mapping[str, str] | None) -> list[str]:
    function = cell_function(inst.cell_type, library)
    if function is None:
        return sorted(inst.pins)
    ins, outs = cell_pins(function)
    known = [pin for pin in (*ins, *outs) if pin in inst.pins]
    return known + sorted(pin for pin in inst.pins if pin not in known)


# [함수 설명]
# - 목적: 파일을 읽어 parse_netlist에 넘긴다.
# - 에러 처리: 읽기 실패는 InputFileError(exit 3).
def read_netlist_file(
    path: str | Path, library: Mapping[str, str] | None = None, *, check: bool = True
) -> Netlist:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read netlist '{path}': {exc.strerror}") from exc
    return parse_netlist(text, library, check=check)


# [함수 설명]
# - 목적: write_netlist 결과를 파일로 쓰고 경로를 돌려준다.
def write_netlist_file(n: Netlist, path: str | Path) -> Path:
    target = Path(path)
    target.write_text(write_netlist(n), encoding="utf-8")
    return target


# [함수 설명]
# - 목적: 네 가지 타입 불변식과 셀 인터페이스 규칙을 검사한다.
# - 출력: 위반이 없으면 빈 목록. 각 Diagnostic은 category와 문제 엔티티 이름을 가진다.
# - 에러 처리: 예외를 던지지 않는다.
# - 결정론: 선언 순서대로 검사하고 사이클은 정렬된 대표 인스턴스 이름으로 보고한다.
def validate(n: Netlist, library: Mapping[str, str] | None = None) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    drivers: dict[str, list[str]] = {net: [f"input:{net}"] for net in n.inputs}

    for inst in n.instances:
        if inst.name in seen:
            diagnostics.append(
                Diagnostic(DIAG_DUPLICATE_INSTANCE, inst.name, f"instance '{inst.name}' declared twice")
            )
        seen.add(inst.name)

        function = cell_function(inst.cell_type, library)
        if function is None:
            diagnostics.append(
                Diagnostic(DIAG_UNKNOWN_CELL, inst.name, f"unknown cell type '{inst.cell_type}'")
            )
            continue
        ins, outs = cell_pins(function)
        for pin in (*ins, *outs):
            if pin not in inst.pins:
                diagnostics.append(
                    Diagnostic(DIAG_UNBOUND_PIN, inst.name, f"pin {inst.name}.{pin} is unbound")
                )
        for pin, net in inst.pins.items():
            if pin not in ins and pin not in outs:
                diagnostics.append(
                    Diagnostic(
                        DIAG_UNKNOWN_PIN, inst.name, f"{inst.cell_type} has no pin '{pin}'"
                    )
                )
            elif net not in n.nets:
                diagnostics.append(
                    Diagnostic(DIAG_UNDECLARED_NET, net, f"pin {inst.name}.{pin} binds undeclared net '{net}'")
                )
            elif pin in outs:
                drivers.setdefault(net, []).append(f"{inst.name}.{pin}")

    for net in sorted(n.nets):
        count = len(drivers.get(net, []))
        if count == 0:
            diagnostics.append(Diagnostic(DIAG_UNDRIVEN, net, f"net '{net}' has no driver"))
        elif count > 1:
            diagnostics.append(
                Diagnostic(
                    DIAG_MULTIPLY_DRIVEN,
                    net,
                    f"net '{net}' driven by {', '.join(drivers[net])}",
                )
            )

    for cycle in _combinational_cycles(n, library):
        diagnostics.append(
            Diagnostic(DIAG_CYCLE, cycle[0], "combinational cycle through " + ", ".join(cycle))
        )
    return diagnostics


# [함수 설명]
# - 목적: 조합 그래프의 강결합 요소 중 루프인 것(크기 2 이상 또는 자기 루프)을 정렬해 돌려준다.
def _combinational_cycles(n: Netlist, library: Mapping[str, str] | None) -> list[list[str]]:
    graph = combinational_graph(n, library)
    cycles: list[list[str]] = []
    for component in nx.strongly_connected_components(graph):
        members = sorted(component)
        if len(members) > 1 or graph.has_edge(members[0], members[0]):
            cycles.append(members)
    cycles.sort()
    return cycles


# [함수 설명]
# - 목적: 조합 셀만으로 만든 인스턴스 단위 networkx 유향 그래프. 플립플롭은 모든 경로를 끊는다.
def combinational_graph(n: Netlist, library: Mapping[str, str] | None = None) -> nx.DiGraph:
    graph = nx.DiGraph()
    readers = fanout_map(n, library)
    for inst in n.instances:
        function = cell_function(inst.cell_type, library)
        if function is None or function in SEQUENTIAL_FUNCTIONS:
            continue
        graph.add_node(inst.name)
        _, outs = cell_pins(function)
        for pin in outs:
            net = inst.pins.get(pin)
            for reader, _pin in readers.get(net, []):
                reader_function = cell_function(n.instance(reader).cell_type, library)
                if reader_function is not None and reader_function not in SEQUENTIAL_FUNCTIONS:
                    graph.add_edge(inst.name, reader)
    return graph


# [함수 설명]
# - 목적: 넷 -> 구동 인스턴스 이름. 모듈 입력은 ''로 표시한다.
def driver_map(n: Netlist, library: Mapping[str, str] | None = None) -> dict[str, str]:
    drivers: dict[str, str] = {net: "" for net in n.inputs}
    for inst in n.instances:
        function = cell_function(inst.cell_type, library)
        if function is None:
            continue
        for pin in cell_pins(function)[1]:
            if pin in inst.pins:
                drivers[inst.pins[pin]] = inst.name
    return drivers


# [함수 설명]
# - 목적: 넷 -> [(인스턴스, 입력 핀)] 선언 순서대로.
def fanout_map(
    n: Netlist, library: Mapping[str, str] | None = None
) -> dict[str, list[tuple[str, str]]]:
    readers: dict[str, list[tuple[str, str]]] = {}
    for inst in n.instances:
        function = cell_function(inst.cell_type, library)
        if function is None:
            continue
        for pin in cell_pins(function)[0]:
            if pin in inst.pins:
                readers.setdefault(inst.pins[pin], []).append((inst.name, pin))
    return readers


# [함수 설명]
# - 목적: 포트/인스턴스/wire 목록으로 Netlist를 만든다. nets는 세 집합의 합이다.
def make_netlist(
    name: str,
    inputs: Iterable[str],
    outputs: Iterable[str],
    instances: Iterable[Instance],
    wires: Iterable[str] = (),
) -> Netlist:
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    return Netlist(
        name=name,
        inputs=inputs,
        outputs=outputs,
        nets=frozenset(inputs) | frozenset(outputs) | frozenset(wires),
        instances=tuple(instances),
    )


# [함수 설명]
# - 목적: 2단 레지스터를 width 비트로 일반화해 생성한다.
# - 입력: width >= 1
# - 출력: DFF_CONV width개, 공유 클록 clk, 입력 D1..Dw, 출력 Q1..Qw. 게이팅은 하지 않는다.
# - 에러 처리: width < 1이면 NetlistError.
def build_register_demo(width: int) -> Netlist:
    if width < 1:
        raise NetlistError(f"register width must be >= 1, got {width}", code="BAD_WIDTH")
    data = [f"D{i}" for i in range(1, width + 1)]
    outs = [f"Q{i}" for i in range(1, width + 1)]
    instances = [
        Instance(name=f"ff{i}", cell_type="DFF_CONV", pins={"D": d, "CLK": "clk", "Q": q})
        for i, (d, q) in enumerate(zip(data, outs, strict=True), start=1)
    ]
    logger.info("build_register_demo: width=%s", width)
    return make_netlist(f"register{width}", ["clk", *data], outs, instances)
