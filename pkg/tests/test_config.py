import math
import textwrap

import pytest

from colorcache.config import (
    ConfigError,
    DecayConfig,
    TaskSpec,
    build_config,
    load_config,
)

MINIMAL = {"workload": {"tasks": [{"id": "a", "budget": 1000, "kind": "loop", "length": 100}]}}


def _with(overrides):
    data = {"workload": {"tasks": [dict(MINIMAL["workload"]["tasks"][0])]}}
    for key, val in overrides.items():
        if key == "workload":
            data["workload"].update(val)
        else:
            data[key] = val
    return data


def test_defaults_from_empty_sections():
    cfg = build_config(MINIMAL)
    assert cfg.geometry.sets == 4096
    assert cfg.timing.mem_penalty == 90.0
    assert cfg.energy.p_leak_l2 == 2.016
    assert cfg.controller.interval_length == 10_000_000
    assert cfg.decay.decay_interval == 6.4e6
    assert cfg.charge_flush_writebacks is True
    assert cfg.workload.tasks[0].id == "a"


def test_toml_file_round_trip(tmp_path):
    text = textwrap.dedent("""\
        charge_flush_writebacks = false

        [geometry]
        sets = 1024
        ways = 4

        [timing]
        mem_penalty = 120
        overlap = 0.6

        [controller]
        interval_length = 500000
        gain_threshold = 150
        min_colors = 2

        [decay]
        decay_interval = 1.0e6

        [workload]
        scale = 0.5
        preempt_points = [200, 400]

        [[workload.tasks]]
        id = "seq"
        budget = 1000
        kind = "sequential"
        length = 500

        [[workload.tasks]]
        id = "loop"
        budget = 1000
        kind = "loop"
        length = 500
        working_set = 8192

        [[workload.tasks]]
        id = "mix"
        budget = 1000
        kind = "mixed"
        length = 500
        store_fraction = 0.3
        seed = 7
    """)
    path = tmp_path / "run.toml"
    path.write_text(text)
    cfg = load_config(path)
    assert cfg.geometry.colors == 16
    assert cfg.timing.mem_penalty == 120.0  # TOML int coerced to float
    assert cfg.timing.overlap == 0.6
    assert cfg.controller.gain_threshold == 150.0
    assert cfg.controller.min_colors == 2
    assert cfg.decay.decay_interval == 1.0e6
    assert cfg.charge_flush_writebacks is False
    assert [t.id for t in cfg.workload.tasks] == ["seq", "loop", "mix"]
    assert cfg.workload.tasks[2].store_fraction == 0.3
    assert cfg.workload.preempt_points == [200, 400]
    assert cfg.workload.scale == 0.5


def test_unknown_top_level_key():
    with pytest.raises(ConfigError, match="unknown section"):
        build_config(_with({"geomtry": {"sets": 64}}))


def test_unknown_key_names_its_path():
    with pytest.raises(ConfigError, match=r"timing: unknown key\(s\) mem_pen"):
        build_config(_with({"timing": {"mem_pen": 5}}))
    with pytest.raises(ConfigError, match=r"workload.tasks\[0\]"):
        cfg = _with({})
        cfg["workload"]["tasks"][0]["budgets"] = 5
        build_config(cfg)


def test_bad_value_names_its_path():
    with pytest.raises(ConfigError, match="geometry"):
        build_config(_with({"geometry": {"sets": 1000}}))
    with pytest.raises(ConfigError, match="timing"):
        build_config(_with({"timing": {"overlap": 0.0}}))


def test_task_needs_exactly_one_source():
    with pytest.raises(ConfigError, match="exactly one"):
        build_config({"workload": {"tasks": [{"id": "a", "budget": 1}]}})
    with pytest.raises(ConfigError, match="exactly one"):
        build_config({"workload": {"tasks": [
            {"id": "a", "budget": 1, "kind": "loop", "length": 5, "trace": "t.bin"}]}})
    # trace-backed tasks don't take synthetic knobs' required length
    TaskSpec(id="a", budget=1, trace="t.bin")


def test_synthetic_task_validation():
    with pytest.raises(ValueError, match="kind must be one of"):
        TaskSpec(id="a", budget=1, kind="zigzag", length=5)
    with pytest.raises(ValueError, match="positive length"):
        TaskSpec(id="a", budget=1, kind="loop")
    with pytest.raises(ValueError, match="format"):
        TaskSpec(id="a", budget=1, trace="t", format="csv")


def test_task_count_must_be_one_or_three():
    two = {"workload": {"tasks": [
        {"id": "a", "budget": 1, "kind": "loop", "length": 5},
        {"id": "b", "budget": 1, "kind": "loop", "length": 5},
    ], "preempt_points": [1, 2]}}
    with pytest.raises(ConfigError, match="1 or 3"):
        build_config(two)
    with pytest.raises(ConfigError, match="unique"):
        build_config({"workload": {"tasks": [
            {"id": "a", "budget": 1, "kind": "loop", "length": 5},
            {"id": "a", "budget": 1, "kind": "loop", "length": 5},
            {"id": "c", "budget": 1, "kind": "loop", "length": 5},
        ], "preempt_points": [1, 2]}})


def test_preempt_point_count_matches_task_count():
    three = lambda pts: {"workload": {"tasks": [
        {"id": t, "budget": 10, "kind": "loop", "length": 5} for t in "abc"
    ], "preempt_points": pts}}
    with pytest.raises(ConfigError, match="two points"):
        build_config(three([5]))
    build_config(three([5, 6]))
    with pytest.raises(ConfigError, match="no preemption"):
        build_config(_with({"workload": {"preempt_points": [5]}}))


def test_profiling_constraints_are_cross_checked():
    with pytest.raises(ConfigError, match="divisible by 16"):
        build_config(_with({"geometry": {"sets": 512, "ways": 4}}))  # 8 colors
    with pytest.raises(ConfigError, match="sampling_ratio"):
        build_config(_with({"controller": {"sampling_ratio": 48}}))
    with pytest.raises(ConfigError, match="profiled range"):
        build_config(_with({"controller": {"min_colors": 3}}))
    with pytest.raises(ConfigError, match="initial_colors"):
        build_config(_with({"controller": {"initial_colors": 2}}))


def test_charge_flag_must_be_boolean():
    with pytest.raises(ConfigError, match="boolean"):
        build_config(_with({"charge_flush_writebacks": 1}))


def test_decay_accepts_infinity():
    cfg = build_config(_with({"decay": {"decay_interval": math.inf}}))
    assert cfg.decay.period() == math.inf
    assert DecayConfig(decay_interval=1000.0).period() == 250.0
    assert DecayConfig(decay_interval=1000.0, sweep_period=10.0).period() == 10.0


def test_malformed_toml_reports_the_file(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[geometry\nsets = 1\n")
    with pytest.raises(ConfigError, match="bad.toml"):
        load_config(path)
