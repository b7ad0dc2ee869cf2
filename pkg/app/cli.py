# [파일 설명]
# - 목적: cgforge 명령행 진입점. demo/validate/gate/sim/char/power/mc/pipeline 서브커맨드를 제공한다.
# - 입력/출력: argparse 플래그 + RunConfig -> 표준 출력 요약, output_dir 아래 보고서/넷리스트/VCD 파일.
# - 에러 처리: CgError는 "error: <command>[/<stage>]: [code] message"로 stderr에 출력하고 exit_code를 반환한다.
#   종료 코드: 0 성공, 1 분석 실패, 2 사용법 오류, 3 입력 파일 오류.
# - 결정론: 같은 설정과 seed면 보고서 파일이 바이트 단위로 같다.
# - 연관 모듈: app.config, app.services.*
from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path

from app import __version__
from app.config import RunConfig, build_config, config_digest, load_environment
from app.services import reports
from app.services.characterize import build_ff_bench, characterize_ff
from app.services.errors import EXIT_ANALYSIS, EXIT_INPUT, EXIT_OK, CgError, EquivalenceError
from app.services.event_sim import SimOptions, check_equivalence, simulate
from app.services.gating import (
    GatingMode,
    insert_clock_gating,
    rename_gated_clocks_fig2,
    shared_witness_stimulus,
)
from app.services.logic import LogicValue
from app.services.netlist_ir import (
    Netlist,
    build_register_demo,
    read_netlist_file,
    validate,
    write_netlist_file,
)
from app.services.power_model import activity_sweep, clock_input, compare
from app.services.stimulus import (
    ClockSpec,
    Stimulus,
    random_activity_stimulus,
    read_stimulus_file,
    write_stimulus,
)
from app.services.techlib import LibraryProfile, load_profile
from app.services.variation import run_variation
from app.services.vcd_export import write_vcd

logger = logging.getLogger("cgforge")

# Monte Carlo 시행마다 쓰는 자극 길이(사이클)
VARIATION_CYCLES = 100


# [함수 설명]
# - 목적: argparse 타입 변환기. 1 이상의 정수만 받는다.
def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


# [함수 설명]
# - 목적: "0,0.25,0.5" 형식의 활동률 목록을 float 리스트로 바꾼다.
def _alpha_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# [함수 설명]
# - 목적: 서브커맨드 파서를 만든다. 공통/타이밍/활동률 플래그는 부모 파서로 공유한다.
# - 출력: argparse.ArgumentParser (사용법 오류는 argparse가 exit 2로 처리)
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key/value config file")
    common.add_argument("--log-level", default=None, help="logging level (default WARNING or CGFORGE_LOG_LEVEL)")
    common.add_argument("--profile", dest="profile_path", help="profile file or bundled name (paper-match)")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--seed", type=int)

    timing = argparse.ArgumentParser(add_help=False)
    timing.add_argument("--clock-period", dest="clock_period_ps", type=float, help="clock period in ps")
    timing.add_argument("--epsilon", dest="epsilon_ps", type=float, help="bisection resolution in ps")
    timing.add_argument("--units", choices=["ns", "ps"])

    activity = argparse.ArgumentParser(add_help=False)
    activity.add_argument("--alpha", type=float, help="per-cycle data toggle probability")
    activity.add_argument("--cycles", type=_positive_int)

    parser = argparse.ArgumentParser(prog="cgforge", description="LECTOR-based clock gating netlist toolchain")
    parser.add_argument("--version", action="version", version=f"cgforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", parents=[common, timing, activity], help="write the register demo netlists and stimulus")
    demo.add_argument("--width", type=_positive_int)
    demo.add_argument("--fig2-names", action="store_true", help="name gated clocks ckg, ckg_1, ...")
    demo.add_argument("--witness", action="store_true", help="also write the shared-gating witness stimulus")

    check = sub.add_parser("validate", parents=[common], help="parse and validate a netlist")
    check.add_argument("netlist", help="netlist file")

    gate = sub.add_parser("gate", parents=[common], help="insert LECTOR clock gating")
    gate.add_argument("netlist")
    gate.add_argument("--mode", choices=[mode.value for mode in GatingMode])
    gate.add_argument("--out", help="gated netlist path (default <output-dir>/<name>_gated.net)")

    sim = sub.add_parser("sim", parents=[common], help="simulate a netlist")
    sim.add_argument("netlist")
    sim.add_argument("stimulus")
    sim.add_argument("--vcd", help="write the trace as VCD")
    sim.add_argument("--timing-checks", action="store_true")
    sim.add_argument("--init-ffs", choices=["0", "1", "x"], default="x")

    char = sub.add_parser("char", parents=[common, timing], help="characterize the gated and ungated flip-flop")
    char.add_argument("--no-prior-art", action="store_true", help="omit the reference columns")

    power = sub.add_parser("power", parents=[common, timing, activity], help="gated vs ungated power comparison")
    power.add_argument("--width", type=_positive_int)
    power.add_argument("--mode", choices=[mode.value for mode in GatingMode])
    power.add_argument("--stimulus", dest="stimulus_path")
    power.add_argument("--sweep", type=_alpha_list, help="comma-separated alpha list")
    power.add_argument("--published-fixture", action="store_true", help="print the published figures and savings note")

    mc = sub.add_parser("mc", parents=[common, timing], help="process-variation Monte Carlo")
    mc.add_argument("--width", type=_positive_int)
    mc.add_argument("--trials", type=_positive_int)
    mc.add_argument("--perturbation", type=float)
    mc.add_argument("--netlist", dest="netlist_path")
    mc.add_argument("--stimulus", dest="stimulus_path")

    pipeline = sub.add_parser("pipeline", parents=[common, timing, activity], help="timing, power and variation reports")
    pipeline.add_argument("--width", type=_positive_int)
    pipeline.add_argument("--mode", choices=[mode.value for mode in GatingMode])
    pipeline.add_argument("--netlist", dest="netlist_path")
    pipeline.add_argument("--stimulus", dest="stimulus_path")
    pipeline.add_argument("--trials", type=_positive_int)
    pipeline.add_argument("--perturbation", type=float)
    return parser


# [함수 설명]
# - 목적: 로그 레벨을 결정한다. --log-level > CGFORGE_LOG_LEVEL(.env 포함) > WARNING.
# - 주의 사항: .env 값을 보려면 load_environment 이후에 호출해야 한다.
def log_level(flag: str | None) -> int:
    name = (flag or os.environ.get("CGFORGE_LOG_LEVEL") or "WARNING").upper()
    return getattr(logging, name, logging.WARNING)


# [함수 설명]
# - 목적: 루트 로거를 한 번 설정한다(레벨 이름 + 로거 이름 + 메시지).
def _configure_logging(level: int) -> None:
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


# [함수 설명]
# - 목적: 설정의 profile_path(파일 경로 또는 번들 이름)로 프로파일을 읽는다.
def _profile(config: RunConfig) -> LibraryProfile:
    return load_profile(config.profile_path)


# [함수 설명]
# - 목적: 출력 디렉터리를 만들고 돌려준다.
def _out_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# [함수 설명]
# - 목적: 보고서 첫 줄(버전, seed, 설정 다이제스트).
def _header(config: RunConfig) -> str:
    return reports.header_line(config.seed, config_digest(config))


# [함수 설명]
# - 목적: 분석 대상 넷리스트. --netlist가 있으면 파일, 없으면 width 비트 레지스터 데모.
def _design(config: RunConfig, profile: LibraryProfile) -> Netlist:
    if config.netlist_path:
        return read_netlist_file(config.netlist_path, profile.library)
    return build_register_demo(config.width)


# [함수 설명]
# - 목적: 전력/변동 분석용 자극. --stimulus 파일이 있으면 읽고, 없으면 alpha/seed로 무작위 생성한다.
# - 입력: n(클록 입력을 찾을 비게이팅 넷리스트), cycles
def _activity_stimulus(n: Netlist, profile: LibraryProfile, config: RunConfig, cycles: int) -> Stimulus:
    if config.stimulus_path:
        return read_stimulus_file(config.stimulus_path, n.inputs)
    clock = ClockSpec(net=clock_input(n, profile), period=config.clock_period_ps)
    data_nets = [net for net in n.inputs if net != clock.net]
    return random_activity_stimulus(data_nets, clock, config.alpha, cycles, config.seed)


# [함수 설명]
# - 목적: 파이프라인 단계 하나를 감싼다. 단계 안에서 난 CgError에 단계 이름을 붙여 다시 던진다.
# - 에러 처리: 이미 단계 이름이 있는 예외는 그대로 둔다(바깥 단계가 덮어쓰지 않음).
@contextmanager
def pipeline_stage(name: str) -> Iterator[None]:
    logger.info("pipeline: stage=%s", name)
    try:
        yield
    except CgError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


# [함수 설명]
# - 목적: 레지스터 데모(비게이팅/게이팅 넷리스트)와 무작위 자극 파일을 쓴다.
# - 입력: fig2_names(게이팅 클록을 ckg, ckg_1 ...로), witness(공유 게이팅 반례 자극도 함께)
# - 출력: 쓴 파일 경로를 한 줄씩 출력, exit 0
def cmd_demo(config: RunConfig, fig2_names: bool = False, witness: bool = False) -> int:
    profile = _profile(config)
    out = _out_dir(config)
    register = build_register_demo(config.width)
    gated, report = insert_clock_gating(register, profile, GatingMode.PER_FF)
    if fig2_names:
        gated, report = rename_gated_clocks_fig2(gated, report)
    clock = ClockSpec(net="clk", period=config.clock_period_ps)
    data_nets = [net for net in register.inputs if net != "clk"]
    stimulus = random_activity_stimulus(data_nets, clock, config.alpha, config.cycles, config.seed)

    written = [
        write_netlist_file(register, out / f"{register.name}.net"),
        write_netlist_file(gated, out / f"{register.name}_gated.net"),
    ]
    stim_path = out / "demo.stim"
    stim_path.write_text(write_stimulus(stimulus), encoding="utf-8")
    written.append(stim_path)
    if witness:
        witness_path = out / "witness.stim"
        witness_path.write_text(write_stimulus(shared_witness_stimulus(config.clock_period_ps)), encoding="utf-8")
        written.append(witness_path)
    for path in written:
        print(path)
    return EXIT_OK


# [함수 설명]
# - 목적: 넷리스트를 파싱만 하고(check=False) 진단 목록을 출력한다.
# - 출력: 진단이 있으면 "<category> <entity>: <message>" 줄들과 exit 3, 없으면 요약 한 줄과 exit 0.
def cmd_validate(config: RunConfig, netlist_path: str) -> int:
    profile = _profile(config)
    netlist = read_netlist_file(netlist_path, profile.library, check=False)
    diagnostics = validate(netlist, profile.library)
    for diag in diagnostics:
        print(f"{diag.category} {diag.entity}: {diag.message}")
    if diagnostics:
        return EXIT_INPUT
    print(f"ok {netlist.name} inputs={len(netlist.inputs)} outputs={len(netlist.outputs)} instances={len(netlist.instances)}")
    return EXIT_OK


# [함수 설명]
# - 목적: 넷리스트 파일에 클록 게이팅을 넣어 새 파일로 쓰고 GatingReport를 key=value로 출력한다.
def cmd_gate(config: RunConfig, netlist_path: str, out_path: str | None) -> int:
    profile = _profile(config)
    netlist = read_netlist_file(netlist_path, profile.library)
    gated, report = insert_clock_gating(netlist, profile, config.mode)
    target = Path(out_path) if out_path else _out_dir(config) / f"{netlist.name}_gated.net"
    write_netlist_file(gated, target)
    print(f"gated_ffs={','.join(report.gated_ffs)}")
    print(f"added_cells={','.join(report.added_cells)}")
    print(f"new_nets={','.join(report.new_nets)}")
    print(f"transistor_overhead={report.transistor_overhead}")
    for wanted, used in report.renamed:
        print(f"renamed {wanted} -> {used}")
    print(target)
    return EXIT_OK


# [함수 설명]
# - 목적: 넷리스트와 자극 파일로 시뮬레이션하고 이벤트 수, 넷별 토글, 타이밍 위반을 출력한다.
# - 입력: vcd(선택 VCD 경로), checks(타이밍 체크), init("0"/"1"/"x" 플립플롭 초기값)
def cmd_sim(config: RunConfig, netlist_path: str, stimulus_path: str, vcd: str | None, checks: bool, init: str) -> int:
    profile = _profile(config)
    netlist = read_netlist_file(netlist_path, profile.library)
    stimulus = read_stimulus_file(stimulus_path, netlist.inputs)
    init_ffs = None if init == "x" else LogicValue.parse(init)
    trace = simulate(netlist, profile, stimulus, SimOptions(timing_checks=checks, init_ffs=init_ffs))
    print(f"events={trace.event_count}")
    for net in sorted(trace.toggles):
        print(f"toggles.{net}={trace.toggles[net]}")
    for violation in trace.violations:
        print(f"violation {violation.kind} {violation.instance} t={violation.time:.1f}ps: {violation.message}")
    if vcd:
        print(write_vcd(trace, vcd))
    return EXIT_OK


# [함수 설명]
# - 목적: 게이팅/비게이팅 FF 벤치를 특성화해 timing.rpt를 쓰고 같은 내용을 출력한다.
def cmd_char(config: RunConfig, prior_art: bool = True) -> int:
    profile = _profile(config)
    gated = characterize_ff(build_ff_bench(profile, gated=True), profile, config.clock_period_ps, config.epsilon_ps)
    ungated = characterize_ff(build_ff_bench(profile, gated=False), profile, config.clock_period_ps, config.epsilon_ps)
    body = reports.timing_table(gated, ungated, config.units, prior_art=prior_art)
    kv = reports.timing_kv({"gated": gated, "ungated": ungated}, config.units)
    text = reports.render(_header(config), [("timing", body), ("timing.kv", kv)])
    (_out_dir(config) / "timing.rpt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


# [함수 설명]
# - 목적: 게이팅 전후 전력 비교(또는 --sweep 활동률 스윕)를 power.rpt로 쓴다.
# - 입력: sweep(활동률 목록), published_fixture(공개 수치 표와 절감률 메모만 출력)
def cmd_power(config: RunConfig, sweep: list[float] | None = None, published_fixture: bool = False) -> int:
    if published_fixture:
        text = reports.render(_header(config), [("power.published", reports.published_fixture_table())])
        sys.stdout.write(text)
        return EXIT_OK
    profile = _profile(config)
    ungated = _design(config, profile)
    gated, _report = insert_clock_gating(ungated, profile, config.mode)
    sections: list[tuple[str, list[str]]] = []
    if sweep:
        rows = activity_sweep(gated, ungated, profile, sweep, config.cycles, config.seed, config.clock_period_ps)
        sections.append(("power.sweep", [f"alpha={alpha:.2f} savings_percent={value:.4f}" for alpha, value in rows]))
    else:
        stimulus = _activity_stimulus(ungated, profile, config, config.cycles)
        comparison = compare(gated, ungated, profile, stimulus)
        sections.extend([("power", reports.power_table(comparison)), ("power.kv", reports.power_kv(comparison))])
    text = reports.render(_header(config), sections)
    (_out_dir(config) / "power.rpt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


# [함수 설명]
# - 목적: 게이팅 넷리스트에 공정 변동 Monte Carlo를 돌려 variation.rpt를 쓴다.
# - 출력: 실패 시행이 없으면 exit 0, 있으면 exit 1.
def cmd_mc(config: RunConfig) -> int:
    profile = _profile(config)
    ungated = _design(config, profile)
    gated, _report = insert_clock_gating(ungated, profile, config.mode)
    stimulus = _activity_stimulus(ungated, profile, config, VARIATION_CYCLES)
    result = run_variation(gated, profile, stimulus, config.perturbation, config.trials, config.seed)
    text = reports.render(_header(config), [("variation", reports.variation_kv(result))])
    (_out_dir(config) / "variation.rpt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if result.stable else EXIT_ANALYSIS


# [함수 설명]
# - 목적: design, gating, power, equivalence, timing, variation 단계를 순서대로 실행하고 보고서를 남긴다.
# - 출력: timing.rpt, power.rpt, variation.rpt, gated.vcd, ungated.vcd
# - 에러 처리: 단계에서 난 CgError는 단계 이름을 달고 올라간다.
#   게이팅 결과가 비게이팅과 다르면 equivalence 단계의 EquivalenceError(exit 1)로 첫 불일치 사이클을 알린다.
def cmd_pipeline(config: RunConfig) -> int:
    with pipeline_stage("design"):
        profile = _profile(config)
        ungated = _design(config, profile)
    out = _out_dir(config)
    header = _header(config)

    with pipeline_stage("gating"):
        gated, gating = insert_clock_gating(ungated, profile, config.mode)
    logger.info("pipeline: design=%s gated_ffs=%s", ungated.name, len(gating.gated_ffs))

    with pipeline_stage("power"):
        stimulus = _activity_stimulus(ungated, profile, config, config.cycles)
        comparison = compare(gated, ungated, profile, stimulus)
        write_vcd(comparison.gated_trace, out / "gated.vcd")
        write_vcd(comparison.ungated_trace, out / "ungated.vcd")

    with pipeline_stage("equivalence"):
        sample_times = stimulus.sample_times()
        divergence = check_equivalence(
            comparison.ungated_trace, comparison.gated_trace, list(ungated.outputs), sample_times
        )
        if divergence is not None:
            detail = ", ".join(f"{net} ungated={a} gated={b}" for net, (a, b) in sorted(divergence.diff.items()))
            raise EquivalenceError(
                f"gated outputs diverge at cycle {divergence.cycle} (t={divergence.time:.1f}ps): {detail}",
                cycle=divergence.cycle,
                diff=divergence.diff,
            )

    with pipeline_stage("timing"):
        timing_gated = characterize_ff(build_ff_bench(profile, gated=True), profile, config.clock_period_ps, config.epsilon_ps)
        timing_ungated = characterize_ff(
            build_ff_bench(profile, gated=False), profile, config.clock_period_ps, config.epsilon_ps
        )
    timing_text = reports.render(
        header,
        [
            ("timing", reports.timing_table(timing_gated, timing_ungated, config.units)),
            ("timing.kv", reports.timing_kv({"gated": timing_gated, "ungated": timing_ungated}, config.units)),
        ],
    )
    power_text = reports.render(
        header,
        [
            ("power", reports.power_table(comparison)),
            ("power.kv", reports.power_kv(comparison)),
            ("equivalence", [f"equivalence.cycles_checked={len(sample_times)}", "equivalence.mismatches=0"]),
        ],
    )

    with pipeline_stage("variation"):
        variation_stimulus = _activity_stimulus(ungated, profile, config, min(config.cycles, VARIATION_CYCLES))
        variation = run_variation(gated, profile, variation_stimulus, config.perturbation, config.trials, config.seed)
    variation_text = reports.render(header, [("variation", reports.variation_kv(variation))])

    for name, text in (("timing.rpt", timing_text), ("power.rpt", power_text), ("variation.rpt", variation_text)):
        path = out / name
        path.write_text(text, encoding="utf-8")
        print(path)
    return EXIT_OK if variation.stable else EXIT_ANALYSIS


_FLAG_FIELDS = (
    "profile_path",
    "output_dir",
    "seed",
    "clock_period_ps",
    "epsilon_ps",
    "units",
    "alpha",
    "cycles",
    "width",
    "mode",
    "netlist_path",
    "stimulus_path",
    "trials",
    "perturbation",
)


# [함수 설명]
# - 목적: CLI 진입점. .env 로드 -> 로깅 설정 -> RunConfig 조립 -> 서브커맨드 실행.
# - 입력: argv(None이면 sys.argv[1:])
# - 출력: 종료 코드
# - 에러 처리: CgError는 "error: <command>[/<stage>]: [code] message"로 stderr에 쓰고 exit_code를 돌려준다.
def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    load_environment()
    _configure_logging(log_level(args.log_level))
    command = args.command
    try:
        flags = {name: getattr(args, name, None) for name in _FLAG_FIELDS}
        config = build_config(flags, config_path=args.config)
        if command == "demo":
            return cmd_demo(config, args.fig2_names, args.witness)
        if command == "validate":
            return cmd_validate(config, args.netlist)
        if command == "gate":
            return cmd_gate(config, args.netlist, args.out)
        if command == "sim":
            return cmd_sim(config, args.netlist, args.stimulus, args.vcd, args.timing_checks, args.init_ffs)
        if command == "char":
            return cmd_char(config, prior_art=not args.no_prior_art)
        if command == "power":
            return cmd_power(config, args.sweep, args.published_fixture)
        if command == "mc":
            return cmd_mc(config)
        return cmd_pipeline(config)
    except CgError as exc:
        where = command if exc.stage is None else f"{command}/{exc.stage}"
        print(f"error: {where}: [{exc.code}] {exc.message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
