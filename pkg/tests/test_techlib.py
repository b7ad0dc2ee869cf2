# [파일 설명]
# - 목적: 셀 프로파일 로딩, 불변식 검증, 트랜지스터/누설 합산을 검증한다.
# - 연관 모듈: app.services.techlib
from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from app.services.errors import ProfileError
from app.services.gating import insert_clock_gating
from app.services.netlist_ir import Instance, build_register_demo, make_netlist
from app.services.techlib import (
    BUNDLED_PROFILES,
    LibraryProfile,
    check_profile,
    derive_profile,
    effective_leakage,
    load_profile,
    parse_profile,
    scale_delays,
    scale_energies,
    transistor_total,
)

BASE_TEXT = BUNDLED_PROFILES["paper-match"].read_text(encoding="utf-8")


# [함수 설명]
# - 목적: 번들 프로파일 텍스트에서 한 구절을 바꾼 사본(구절이 있어야 한다).
def _edit(old: str, new: str) -> str:
    assert old in BASE_TEXT
    return BASE_TEXT.replace(old, new)


# [함수 설명]
# - 목적: 번들 프로파일의 DFF 값과 게이팅 셀 3종 트랜지스터 합 29.
def test_bundled_profile_cells(profile: LibraryProfile) -> None:
    dff = profile.cell("DFF_CONV")

    assert profile.name == "paper-match"
    assert dff.transistors == 21
    assert dff.e_clock == 5.0
    assert (dff.t_setup, dff.t_hold) == (25.0, 8.0)
    overhead = sum(profile.cell(name).transistors for name in ("XOR2", "LECTOR_AND2", "LECTOR_INV"))
    assert overhead == 29


# [함수 설명]
# - 목적: library 뷰는 셀 이름 -> 기능 태그.
def test_library_view_maps_names_to_functions(profile: LibraryProfile) -> None:
    assert profile.library["CKBUF"] == "BUF"
    assert profile.library["LECTOR_AND2"] == "LECTOR_AND2"


# [함수 설명]
# - 목적: 없는 셀 이름은 UNKNOWN_CELL.
def test_unknown_cell_lookup(profile: LibraryProfile) -> None:
    with pytest.raises(ProfileError) as excinfo:
        profile.cell("NOR3")

    assert excinfo.value.code == "UNKNOWN_CELL"


# [함수 설명]
# - 목적: 없는 프로파일 파일은 PROFILE_IO(exit 3)이고 경로를 메시지에 담는다.
def test_missing_profile_file_is_input_error(tmp_path) -> None:
    with pytest.raises(ProfileError) as excinfo:
        load_profile(tmp_path / "nope.profile")

    assert excinfo.value.code == "PROFILE_IO"
    assert excinfo.value.exit_code == 3
    assert "nope.profile" in excinfo.value.message


# [함수 설명]
# - 목적: 누설 계수 1.0이면 LECTOR 셀 누설이 대응 셀과 같아도 받아들인다.
def test_identity_leak_factor_loads() -> None:
    text = _edit("param lector_leak_factor 0.2", "param lector_leak_factor 1.0")
    text = text.replace("p_leak=2.8", "p_leak=14").replace("p_leak=1.2", "p_leak=6")

    profile = parse_profile(text)

    assert profile.cell("LECTOR_AND2").p_leak == profile.cell("AND2").p_leak
    assert profile.cell("LECTOR_INV").p_leak == profile.cell("INV").p_leak


# [함수 설명]
# - 목적: 대응 인버터보다 누설이 큰 LECTOR_INV는 거부한다.
def test_leakier_lector_inverter_is_rejected() -> None:
    text = _edit("LECTOR_INV t_rise=23 t_fall=23 e_toggle=0.9 e_contention=0.02 p_leak=1.2", "LECTOR_INV t_rise=23 t_fall=23 e_toggle=0.9 e_contention=0.02 p_leak=7")

    with pytest.raises(ProfileError) as excinfo:
        parse_profile(text)

    assert excinfo.value.code == "PROFILE_INVARIANT"


@pytest.mark.parametrize(
    ("old", "new"),
    [
        ("p_leak=2.8", "p_leak=2.9"),
        ("e_contention=0.05", "e_contention=0.04"),
        ("LECTOR_INV t_rise=23", "LECTOR_INV t_rise=23.5"),
    ],
)
# [함수 설명]
# - 목적: 계수 관계를 깨는 고정 편집 세 가지를 거부한다.
def test_factor_relation_mutations_are_rejected(old: str, new: str) -> None:
    with pytest.raises(ProfileError) as excinfo:
        parse_profile(_edit(old, new))

    assert excinfo.value.code == "PROFILE_INVARIANT"


# [함수 설명]
# - 목적: 필수 셀이 빠지면 PROFILE_MISSING_CELL.
def test_missing_required_cell() -> None:
    text = "\n".join(line for line in BASE_TEXT.splitlines() if not line.startswith("cell XOR2"))

    with pytest.raises(ProfileError) as excinfo:
        parse_profile(text)

    assert excinfo.value.code == "PROFILE_MISSING_CELL"


@pytest.mark.parametrize(
    "text",
    [
        "cell INV INV t_rise=1\n",
        "profile p\nparam bogus 1\nendprofile\n",
        BASE_TEXT.replace("endprofile", ""),
        BASE_TEXT.replace("transistors=21", "transistors=21.5"),
    ],
)
# [함수 설명]
# - 목적: 헤더 누락, 모르는 param, endprofile 누락, 정수가 아닌 트랜지스터 수는 PROFILE_SYNTAX.
def test_syntax_problems(text: str) -> None:
    with pytest.raises(ProfileError) as excinfo:
        parse_profile(text)

    assert excinfo.value.code == "PROFILE_SYNTAX"


# [함수 설명]
# - 목적: 레지스터 42 / 게이팅 100 / 빈 모듈 0.
def test_transistor_totals_match_register_figures(profile: LibraryProfile) -> None:
    register = build_register_demo(2)
    gated, _report = insert_clock_gating(register, profile)

    assert transistor_total(register, profile) == 42
    assert transistor_total(gated, profile) == 100
    assert transistor_total(make_netlist("empty", [], [], []), profile) == 0


# [함수 설명]
# - 목적: 트랜지스터 수와 누설은 서로소 인스턴스 합집합에 대해 더해진다.
def test_transistor_total_is_additive(profile: LibraryProfile) -> None:
    left = build_register_demo(3)
    right = make_netlist("inv", ["a"], ["y"], [Instance("u1", "INV", {"A": "a", "Y": "y"})])
    both = make_netlist("both", [*left.inputs, "a"], [*left.outputs, "y"], [*left.instances, *right.instances])

    assert transistor_total(both, profile) == transistor_total(left, profile) + transistor_total(right, profile)
    assert effective_leakage(both, profile) == pytest.approx(
        effective_leakage(left, profile) + effective_leakage(right, profile)
    )


# [함수 설명]
# - 목적: 인버터 하나의 누설 6 nW, 빈 모듈 0.
def test_effective_leakage_single_inverter(profile: LibraryProfile) -> None:
    inv = make_netlist("inv", ["a"], ["y"], [Instance("u1", "INV", {"A": "a", "Y": "y"})])

    assert effective_leakage(inv, profile) == 6.0
    assert effective_leakage(make_netlist("empty", [], [], []), profile) == 0.0


# [함수 설명]
# - 목적: LECTOR 누설 계수를 절반으로 줄이면 게이팅 회로의 누설만 감소하는지 확인한다.
def test_halved_leak_factor_only_affects_gated(profile: LibraryProfile) -> None:
    halved = derive_profile(profile, lector_leak_factor=profile.lector_leak_factor / 2)
    register = build_register_demo(2)
    gated, _report = insert_clock_gating(register, profile)

    assert effective_leakage(gated, halved) < effective_leakage(gated, profile)
    assert effective_leakage(register, halved) == effective_leakage(register, profile)
    assert halved.cell("LECTOR_AND2").p_leak == pytest.approx(1.4)


# [함수 설명]
# - 목적: 지연 패널티 < 1은 거부한다.
def test_derive_profile_rejects_bad_factor(profile: LibraryProfile) -> None:
    with pytest.raises(ProfileError):
        derive_profile(profile, lector_delay_penalty=0.5)


# [함수 설명]
# - 목적: 에너지 배율은 에너지만 바꾸고 지연은 그대로 둔다.
def test_scale_energies_keeps_delays(profile: LibraryProfile) -> None:
    scaled = scale_energies(profile, 3.0)

    assert scaled.cell("INV").e_toggle == pytest.approx(2.4)
    assert scaled.cell("DFF_CONV").e_clock == pytest.approx(15.0)
    assert scaled.cell("INV").t_rise == profile.cell("INV").t_rise


# [함수 설명]
# - 목적: 배율이 주어진 인스턴스만 지연이 바뀐다.
def test_scale_delays_is_per_instance(profile: LibraryProfile) -> None:
    register = build_register_demo(2)

    scaled = scale_delays(register, profile, {"ff1": (1.1, 0.9)})

    assert scaled["ff1"].t_rise == pytest.approx(66.0)
    assert scaled["ff1"].t_fall == pytest.approx(49.5)
    assert scaled["ff2"] == profile.cell("DFF_CONV")


LECTOR_CELLS = ("LECTOR_AND2", "LECTOR_INV")
FACTOR_ATTRIBUTES = ("p_leak", "e_contention", "t_rise", "t_fall")


# [함수 설명]
# - 목적: 한 셀의 한 속성에 배율을 곱한 프로파일 사본.
def _scaled_cell(profile: LibraryProfile, cell: str, attribute: str, scale: float) -> LibraryProfile:
    spec = profile.cell(cell)
    cells = {**profile.cells, cell: replace(spec, **{attribute: getattr(spec, attribute) * scale})}
    return replace(profile, cells=cells)


# [함수 설명]
# - 목적: LECTOR 셀 값 하나를 허용 오차보다 크게 흔들면 항상 PROFILE_INVARIANT로 거부한다.
# - 결정론: 셀, 속성, 부호, 크기(1e-6 ~ 5e-2)를 고정 seed의 numpy Generator로 뽑는다.
@pytest.mark.parametrize("seed", range(5))
def test_random_lector_perturbations_are_rejected(profile: LibraryProfile, seed: int) -> None:
    rng = np.random.default_rng(seed)

    for _ in range(40):
        cell = str(rng.choice(LECTOR_CELLS))
        attribute = str(rng.choice(FACTOR_ATTRIBUTES))
        delta = float(rng.uniform(1e-6, 5e-2)) * float(rng.choice([-1.0, 1.0]))

        with pytest.raises(ProfileError) as excinfo:
            check_profile(_scaled_cell(profile, cell, attribute, 1.0 + delta))

        assert excinfo.value.code == "PROFILE_INVARIANT", (cell, attribute, delta)


# [함수 설명]
# - 목적: 계수 param 하나만 흔들고 셀 값을 그대로 두어도 관계가 깨져 거부된다.
@pytest.mark.parametrize("factor", ["lector_leak_factor", "lector_contention_factor", "lector_delay_penalty"])
def test_random_factor_perturbations_are_rejected(profile: LibraryProfile, factor: str) -> None:
    rng = np.random.default_rng(7)

    for _ in range(20):
        scale = 1.0 + float(rng.uniform(1e-6, 5e-2)) * float(rng.choice([-1.0, 1.0]))
        shaken = replace(profile, **{factor: getattr(profile, factor) * scale})

        with pytest.raises(ProfileError) as excinfo:
            check_profile(shaken)

        assert excinfo.value.code == "PROFILE_INVARIANT"


# [함수 설명]
# - 목적: 허용 오차 안의 흔들림(1e-12 이하)은 받아들인다.
def test_perturbation_within_tolerance_is_accepted(profile: LibraryProfile) -> None:
    for cell in LECTOR_CELLS:
        for attribute in FACTOR_ATTRIBUTES:
            check_profile(_scaled_cell(profile, cell, attribute, 1.0 + 1e-12))


# [함수 설명]
# - 목적: 범위 안의 무작위 계수로 유도한 프로파일은 항상 검사를 통과하고 관계를 지킨다.
def test_random_valid_factors_derive_consistent_profiles(profile: LibraryProfile) -> None:
    rng = np.random.default_rng(11)

    for _ in range(30):
        leak, contention = (float(value) for value in rng.uniform(0.01, 1.0, size=2))
        penalty = float(rng.uniform(1.0, 2.0))

        derived = derive_profile(profile, lector_leak_factor=leak, lector_contention_factor=contention, lector_delay_penalty=penalty)

        check_profile(derived)
        assert derived.cell("LECTOR_INV").p_leak == pytest.approx(leak * profile.cell("INV").p_leak)
        assert derived.cell("LECTOR_AND2").t_rise == pytest.approx(penalty * profile.cell("AND2").t_rise)
