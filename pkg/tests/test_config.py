"""Tests for config parsing, validation diagnostics, and round-tripping."""

import pytest

from fjfade import ConfigError, parse_config, serialize_config
from fjfade.config import ExperimentConfig, GraphSpec, ScheduleSpec

GOOD = """\
[experiment]
n = 6
horizon = 40
seed = 3
out_dir = results
eps_conv = 1e-9

[graph]
kind = er
p = 0.4

[weights]
kind = metropolis

[x0]
uniform = 0 5

[schedule.fast]
kind = exponential
rate = 0.5

[schedule.slow]
kind = hyperbolic

[schedule.hold]
kind = adversarial
tstar = auto
target = argmax
"""


class TestParsing:
    def test_good_config(self):
        cfg = parse_config(GOOD)
        assert cfg.n == 6
        assert cfg.horizon == 40
        assert cfg.seed == 3
        assert cfg.eps_conv == 1e-9
        assert cfg.graph == GraphSpec(kind="er", p=0.4)
        assert cfg.weights == "metropolis"
        assert cfg.x0_uniform == (0.0, 5.0)
        assert cfg.x0_values is None
        labels = [s.label for s in cfg.schedules]
        assert labels == ["fast", "slow", "hold"]
        hold = cfg.schedules[2]
        assert hold.is_adversarial and hold.tstar == "auto" and hold.target == "argmax"

    def test_defaults(self):
        cfg = parse_config(
            "[experiment]\nn = 4\n[graph]\nkind = star\n[weights]\nkind = metropolis\n"
            "[x0]\nvalues = 1 2 3 4\n[schedule.h]\nkind = hyperbolic\n"
        )
        assert cfg.horizon == 1000
        assert cfg.seed == 0
        assert cfg.out_dir == "results"
        assert cfg.underflow == 1e-14
        assert not cfg.emit_alt_distance

    def test_explicit_values(self):
        cfg = parse_config(GOOD.replace("uniform = 0 5", "values = 1 2 3 4 5 6"))
        assert cfg.x0_values == (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)

    def test_custom_and_constant_schedules(self):
        text = GOOD + "\n[schedule.mix]\nkind = custom\nseq = 0.5 0.25 0.1\n" \
                      "\n[schedule.flat]\nkind = constant\nlam = 0.3\n"
        cfg = parse_config(text)
        by_label = {s.label: s for s in cfg.schedules}
        assert by_label["mix"].seq == (0.5, 0.25, 0.1)
        assert by_label["flat"].lam == 0.3
        assert by_label["flat"].build_uniform().value(9) == 0.3

    def test_adversarial_fixed_values(self):
        text = GOOD.replace("tstar = auto", "tstar = 12").replace("target = argmax", "target = 2")
        hold = parse_config(text).schedules[2]
        assert hold.tstar == 12 and hold.target == 2


class TestRejection:
    def test_unknown_key_reports_line_and_field(self):
        text = GOOD.replace("p = 0.4", "p = 0.4\nwat = 1")
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        assert exc.value.field == "graph.wat"
        assert exc.value.line == 11
        assert "wat" in str(exc.value)

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match=r"unknown section"):
            parse_config(GOOD + "\n[plotting]\nstyle = dark\n")

    def test_missing_section(self):
        with pytest.raises(ConfigError, match=r"\[weights\]"):
            parse_config(GOOD.replace("[weights]\nkind = metropolis\n", ""))

    def test_missing_required_key(self):
        with pytest.raises(ConfigError, match="kind"):
            parse_config(GOOD.replace("kind = metropolis", ""))

    def test_bad_types(self):
        with pytest.raises(ConfigError, match="integer"):
            parse_config(GOOD.replace("n = 6", "n = six"))
        with pytest.raises(ConfigError, match="number"):
            parse_config(GOOD.replace("p = 0.4", "p = high"))

    def test_bad_values(self):
        with pytest.raises(ConfigError):
            parse_config(GOOD.replace("n = 6", "n = 1"))
        with pytest.raises(ConfigError):
            parse_config(GOOD.replace("p = 0.4", "p = 1.4"))
        with pytest.raises(ConfigError):
            parse_config(GOOD.replace("rate = 0.5", "rate = -1"))
        with pytest.raises(ConfigError):
            parse_config(GOOD.replace("tstar = auto", "tstar = -3"))
        with pytest.raises(ConfigError):
            parse_config(GOOD.replace("target = argmax", "target = 17"))

    def test_x0_exactly_one_source(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(GOOD.replace("uniform = 0 5", "uniform = 0 5\nvalues = 1 2 3 4 5 6"))
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(GOOD.replace("uniform = 0 5", ""))

    def test_x0_length_mismatch(self):
        with pytest.raises(ConfigError, match="6 values"):
            parse_config(GOOD.replace("uniform = 0 5", "values = 1 2 3"))

    def test_x0_uniform_needs_ordered_pair(self):
        with pytest.raises(ConfigError, match="low high"):
            parse_config(GOOD.replace("uniform = 0 5", "uniform = 5 0"))

    def test_no_schedules(self):
        head = GOOD.split("[schedule.fast]")[0]
        with pytest.raises(ConfigError, match="schedule"):
            parse_config(head)

    def test_bad_label(self):
        with pytest.raises(ConfigError, match="label"):
            parse_config(GOOD.replace("[schedule.fast]", "[schedule.fa st]"))

    def test_duplicate_section(self):
        with pytest.raises(ConfigError, match="syntax"):
            parse_config(GOOD + "\n[graph]\nkind = star\n")

    def test_p_only_for_er(self):
        text = GOOD.replace("kind = er", "kind = star")
        with pytest.raises(ConfigError, match="'p' only applies"):
            parse_config(text)

    def test_schedule_param_for_wrong_kind(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(GOOD.replace("kind = hyperbolic", "kind = hyperbolic\nrate = 2"))


class TestRoundTrip:
    def test_parse_serialize_parse_fixed_point(self):
        cfg = parse_config(GOOD)
        text = serialize_config(cfg)
        assert parse_config(text) == cfg
        # serialization is itself a fixed point
        assert serialize_config(parse_config(text)) == text

    def test_values_roundtrip_exactly(self):
        cfg = parse_config(GOOD.replace("uniform = 0 5", "values = 0.1 0.2 0.3 0.4 0.5 0.6"))
        assert parse_config(serialize_config(cfg)) == cfg

    def test_all_schedule_kinds_roundtrip(self):
        text = GOOD + "\n[schedule.mix]\nkind = custom\nseq = 0.5 0.25\n" \
                      "\n[schedule.flat]\nkind = constant\nlam = 0.3\n" \
                      "\n[schedule.quiet]\nkind = zero\n"
        cfg = parse_config(text)
        assert parse_config(serialize_config(cfg)) == cfg


def test_schedule_spec_guards():
    spec = ScheduleSpec(label="hold", kind="adversarial", tstar=3, target=0)
    with pytest.raises(ConfigError):
        spec.build_uniform()


def test_config_error_formats_location():
    err = ConfigError("boom", line=4, field="graph.p")
    assert "line 4" in str(err)
    assert "graph.p" in str(err)
    assert err.line == 4 and err.field == "graph.p"
