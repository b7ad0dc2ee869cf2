# [파일 설명]
# - 목적: 넷리스트 IR 파서/직렬화기/검증기의 기대 동작을 검증한다.
# - 입력/출력: 고정 넷리스트 텍스트와 build_register_demo 결과를 사용한다.
# - 연관 모듈: app.services.netlist_ir
from __future__ import annotations

import numpy as np
import pytest

from app.services.errors import InputFileError, NetlistError, NetlistSyntaxError
from app.services.netlist_ir import (
    DIAG_CYCLE,
    DIAG_DUPLICATE_INSTANCE,
    DIAG_MULTIPLY_DRIVEN,
    DIAG_UNBOUND_PIN,
    DIAG_UNDRIVEN,
    DIAG_UNKNOWN_CELL,
    Instance,
    Netlist,
    build_register_demo,
    driver_map,
    fanout_map,
    make_netlist,
    parse_netlist,
    read_netlist_file,
    validate,
    write_netlist,
    write_netlist_file,
)
from app.services.techlib import LibraryProfile

INV1 = """\
module inv1
input a
output y
cell INV u1 A=a Y=y
endmodule
"""


# [함수 설명]
# - 목적: 최소 인버터 모듈의 이름, 인스턴스, 넷, 핀 연결을 읽는다.
def test_parse_minimal_inverter() -> None:
    netlist = parse_netlist(INV1)

    assert netlist.name == "inv1"
    assert len(netlist.instances) == 1
    assert netlist.nets == frozenset({"a", "y"})
    assert netlist.instance("u1").pins == {"A": "a", "Y": "y"}


# [함수 설명]
# - 목적: 인버터 모듈의 표준 출력은 다섯 줄이고 원문과 같다.
def test_write_inverter_is_five_canonical_lines() -> None:
    text = write_netlist(parse_netlist(INV1))

    assert text == INV1
    assert len(text.splitlines()) == 5


# [함수 설명]
# - 목적: 빈 모듈은 module/endmodule 두 줄만 쓴다.
def test_write_empty_module_has_header_and_footer_only() -> None:
    assert write_netlist(make_netlist("empty", [], [], [])) == "module empty\nendmodule\n"


# [함수 설명]
# - 목적: 주석과 빈 줄은 결과에 영향을 주지 않는다.
def test_parse_ignores_comments_and_blank_lines() -> None:
    text = "# header\nmodule inv1  # name\n\ninput a\noutput y\ncell INV u1 A=a Y=y # driver\nendmodule\n"

    assert parse_netlist(text) == parse_netlist(INV1)


# [함수 설명]
# - 목적: 레지스터 데모가 write -> parse 왕복 후 구조적으로 같은지 검증한다.
# - 결정론: 두 번째 직렬화 결과도 첫 번째와 바이트 단위로 같아야 한다.
def test_register_round_trip() -> None:
    register = build_register_demo(2)

    text = write_netlist(register)
    reparsed = parse_netlist(text)

    assert reparsed == register
    assert write_netlist(reparsed) == text


@pytest.mark.parametrize(
    ("text", "line", "column"),
    [
        ("input a\n", 1, 1),
        ("module m\ninput 1a\nendmodule\n", 2, 7),
        ("module m\ninput a\ncell INV u1 A=a Y\nendmodule\n", 3, 17),
        ("module m\nfoo bar\nendmodule\n", 2, 1),
    ],
)
# [함수 설명]
# - 목적: 문법 오류는 1부터 센 줄/열 위치와 exit 3을 가진다.
def test_syntax_errors_report_line_and_column(text: str, line: int, column: int) -> None:
    with pytest.raises(NetlistSyntaxError) as excinfo:
        parse_netlist(text)

    assert excinfo.value.line == line
    assert excinfo.value.column == column
    assert excinfo.value.exit_code == 3


# [함수 설명]
# - 목적: endmodule이 없으면 문법 오류.
def test_missing_endmodule_is_a_syntax_error() -> None:
    with pytest.raises(NetlistSyntaxError, match="missing endmodule"):
        parse_netlist("module m\ninput a\n")


# [함수 설명]
# - 목적: 검사 모드 파싱은 다중 드라이버 넷 이름을 담아 NetlistError를 던진다.
def test_multiply_driven_net_names_the_net() -> None:
    text = "module m\ninput a\noutput y\ncell INV u1 A=a Y=y\ncell INV u2 A=a Y=y\nendmodule\n"

    with pytest.raises(NetlistError) as excinfo:
        parse_netlist(text)

    assert excinfo.value.code == DIAG_MULTIPLY_DRIVEN
    assert "'y'" in excinfo.value.message


# [함수 설명]
# - 목적: 모르는 셀 타입은 unknown-cell로 거부한다.
def test_unknown_cell_is_rejected() -> None:
    with pytest.raises(NetlistError) as excinfo:
        parse_netlist("module m\ninput a\noutput y\ncell FOO u1 A=a Y=y\nendmodule\n")

    assert excinfo.value.code == DIAG_UNKNOWN_CELL


# [함수 설명]
# - 목적: 레지스터 데모는 진단이 없다.
def test_validate_register_demo_is_clean() -> None:
    assert validate(build_register_demo(2)) == []


# [함수 설명]
# - 목적: 드라이버 없는 wire 하나가 undriven-net 진단 하나가 된다.
def test_validate_reports_undriven_net() -> None:
    text = "module m\ninput a\noutput y\nwire floating\ncell INV u1 A=a Y=y\nendmodule\n"

    diagnostics = validate(parse_netlist(text, check=False))

    assert [(d.category, d.entity) for d in diagnostics] == [(DIAG_UNDRIVEN, "floating")]


# [함수 설명]
# - 목적: 자기 자신을 읽는 셀은 조합 루프다.
def test_validate_reports_self_loop_as_cycle() -> None:
    text = "module m\noutput y\ncell INV u1 A=y Y=y\nendmodule\n"

    diagnostics = validate(parse_netlist(text, check=False))

    assert [(d.category, d.entity) for d in diagnostics] == [(DIAG_CYCLE, "u1")]


# [함수 설명]
# - 목적: 두 셀 고리는 루프 진단 하나로 묶여 두 인스턴스를 모두 언급한다.
def test_validate_reports_two_cell_ring() -> None:
    ring = make_netlist(
        "ring",
        [],
        ["a"],
        [
            Instance("u1", "INV", {"A": "a", "Y": "b"}),
            Instance("u2", "INV", {"A": "b", "Y": "a"}),
        ],
        wires=["b"],
    )

    diagnostics = validate(ring)

    assert len(diagnostics) == 1
    assert diagnostics[0].category == DIAG_CYCLE
    assert "u1, u2" in diagnostics[0].message


# [함수 설명]
# - 목적: 플립플롭을 거치는 되먹임은 루프가 아니다.
def test_flip_flop_breaks_feedback_loop() -> None:
    toggle = make_netlist(
        "toggle",
        ["clk"],
        ["q"],
        [
            Instance("ff", "DFF_CONV", {"D": "qn", "CLK": "clk", "Q": "q"}),
            Instance("u1", "INV", {"A": "q", "Y": "qn"}),
        ],
        wires=["qn"],
    )

    assert validate(toggle) == []


# [함수 설명]
# - 목적: 중복 인스턴스와 미연결 핀을 함께 보고한다.
def test_validate_duplicate_instance_and_unbound_pin() -> None:
    broken = make_netlist(
        "broken",
        ["a"],
        ["y", "z"],
        [
            Instance("u1", "INV", {"A": "a", "Y": "y"}),
            Instance("u1", "AND2", {"A": "a", "Y": "z"}),
        ],
    )

    categories = {d.category for d in validate(broken)}

    assert categories == {DIAG_DUPLICATE_INSTANCE, DIAG_UNBOUND_PIN}


# [함수 설명]
# - 목적: width 비트 데모의 포트 순서와 인스턴스 수.
@pytest.mark.parametrize("width", [1, 2, 8, 64])
def test_register_demo_shapes(width: int) -> None:
    register = build_register_demo(width)

    assert len(register.instances) == width
    assert register.inputs == ("clk", *(f"D{i}" for i in range(1, width + 1)))
    assert register.outputs == tuple(f"Q{i}" for i in range(1, width + 1))
    assert validate(register) == []


# [함수 설명]
# - 목적: 폭 0은 NetlistError.
def test_register_demo_rejects_zero_width() -> None:
    with pytest.raises(NetlistError):
        build_register_demo(0)


# [함수 설명]
# - 목적: 모듈 입력의 드라이버는 '', 팬아웃은 선언 순서.
def test_driver_and_fanout_maps() -> None:
    register = build_register_demo(2)

    drivers = driver_map(register)
    readers = fanout_map(register)

    assert drivers["clk"] == ""
    assert drivers["Q2"] == "ff2"
    assert readers["clk"] == [("ff1", "CLK"), ("ff2", "CLK")]


# [함수 설명]
# - 목적: 파일 쓰기/읽기 왕복과 없는 파일의 InputFileError.
def test_file_helpers(tmp_path) -> None:
    register = build_register_demo(3)
    path = write_netlist_file(register, tmp_path / "r3.net")

    assert read_netlist_file(path) == register
    with pytest.raises(InputFileError):
        read_netlist_file(tmp_path / "missing.net")


# [함수 설명]
# - 목적: 결함 주입 대상이 될 출력 핀 이름.
def _output_pin(inst: Instance) -> str:
    return "Q" if inst.cell_type == "DFF_CONV" else "Y"


# [함수 설명]
# - 목적: 임의 인스턴스의 데이터 입력 하나를 아무도 구동하지 않는 새 wire로 바꾼다.
def _inject_undriven(n: Netlist, rng: np.random.Generator) -> Netlist:
    instances = list(n.instances)
    k = int(rng.integers(0, len(instances)))
    victim = instances[k]
    pin = "D" if victim.cell_type == "DFF_CONV" else "A"
    instances[k] = Instance(victim.name, victim.cell_type, {**victim.pins, pin: "floating"})
    return make_netlist(n.name, n.inputs, n.outputs, instances, wires=[*n.wires, "floating"])


# [함수 설명]
# - 목적: 모듈 입력만 읽는 인버터를 추가해 기존 셀 출력 넷에 두 번째 드라이버를 붙인다.
def _inject_second_driver(n: Netlist, rng: np.random.Generator) -> Netlist:
    target = n.instances[int(rng.integers(0, len(n.instances)))]
    extra = Instance("extra_driver", "INV", {"A": "i0", "Y": target.net(_output_pin(target))})
    return make_netlist(n.name, n.inputs, n.outputs, [*n.instances, extra], wires=n.wires)


# [함수 설명]
# - 목적: 기존 인스턴스와 같은 이름, 같은 입력의 복제본을 새 출력 wire로 추가한다.
def _inject_duplicate_instance(n: Netlist, rng: np.random.Generator) -> Netlist:
    original = n.instances[int(rng.integers(0, len(n.instances)))]
    copy = Instance(original.name, original.cell_type, {**original.pins, _output_pin(original): "copy_out"})
    return make_netlist(n.name, n.inputs, n.outputs, [*n.instances, copy], wires=[*n.wires, "copy_out"])


# [함수 설명]
# - 목적: 조합 셀 두 개 i < j를 골라 j가 i의 출력을, i가 j의 출력을 읽게 해 역방향 간선을 만든다.
def _inject_back_edge(n: Netlist, rng: np.random.Generator) -> Netlist:
    instances = list(n.instances)
    combinational = [k for k, inst in enumerate(instances) if inst.cell_type != "DFF_CONV"]
    early, late = sorted(int(k) for k in rng.choice(combinational, size=2, replace=False))
    first, second = instances[early], instances[late]
    instances[late] = Instance(second.name, second.cell_type, {**second.pins, "A": first.net("Y")})
    instances[early] = Instance(first.name, first.cell_type, {**first.pins, "A": second.net("Y")})
    return make_netlist(n.name, n.inputs, n.outputs, instances, wires=n.wires)


DEFECTS = {
    DIAG_UNDRIVEN: _inject_undriven,
    DIAG_MULTIPLY_DRIVEN: _inject_second_driver,
    DIAG_DUPLICATE_INSTANCE: _inject_duplicate_instance,
    DIAG_CYCLE: _inject_back_edge,
}


# [함수 설명]
# - 목적: 유효한 무작위 넷리스트에 결함 하나를 주입하면 validate는 정확히 그 범주의 진단 하나만 낸다.
# - 결정론: 범주마다 고정 seed의 numpy Generator로 넷리스트와 주입 위치를 고른다.
@pytest.mark.parametrize("category", sorted(DEFECTS))
def test_single_injected_defect_is_the_only_diagnostic(category: str, profile: LibraryProfile, random_netlist) -> None:
    rng = np.random.default_rng(sorted(DEFECTS).index(category) + 100)

    for index in range(25):
        clean = random_netlist(index, rng)
        assert validate(clean, profile.library) == []

        diagnostics = validate(DEFECTS[category](clean, rng), profile.library)

        assert [d.category for d in diagnostics] == [category], (index, diagnostics)
