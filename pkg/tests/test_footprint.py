"""Lambda-rule tables and footprint arithmetic."""

import json

import pytest

from vnwfet.footprint import (CellFootprint, LambdaRuleSet, RulesetError,
                              builtin_rulesets, compare, comparison_report,
                              format_report, inverter_footprint, load_ruleset,
                              vnwfet_ruleset)


@pytest.fixture
def rulesets():
    return builtin_rulesets()


class TestRuleTables:
    def test_lambda_values(self, rulesets):
        fin, nw = rulesets
        assert fin.lambda_nm == 3.5
        assert nw.lambda_nm == 11.0

    def test_finfet_rows(self, rulesets):
        fin, _ = rulesets
        assert fin.in_nm("fin_thickness") == pytest.approx(3.5)
        assert fin.in_nm("fin_length") == pytest.approx(7.0)
        assert fin.in_nm("height") == pytest.approx(14.0)
        assert fin.in_nm("pitch") == pytest.approx(10.5)     # 2l + T_fin
        assert fin.in_nm("contact_size") == pytest.approx(10.5)
        assert fin.in_nm("gate_to_contact") == pytest.approx(7.0)
        assert fin.in_nm("t_ox_nm") == pytest.approx(1.55)

    def test_vnwfet_rows(self, rulesets):
        _, nw = rulesets
        assert nw.in_nm("diameter") == pytest.approx(11.0)
        assert nw.in_nm("pitch") == pytest.approx(33.0)      # 2l + D
        assert nw.in_nm("contact_size") == pytest.approx(33.0)
        assert nw.in_nm("gate_to_contact") == pytest.approx(22.0)
        assert nw.in_nm("height_nm") == pytest.approx(30.0)
        assert nw.in_nm("t_ox_nm") == pytest.approx(5.0)

    def test_current_technology_alternate(self):
        alt = vnwfet_ruleset(16.0)
        assert alt.in_nm("diameter") == pytest.approx(16.0)
        assert alt.in_nm("pitch") == pytest.approx(48.0)

    def test_validation(self):
        with pytest.raises(RulesetError):
            LambdaRuleSet("x", 0.0, {"a": 1.0})
        with pytest.raises(RulesetError):
            LambdaRuleSet("x", 1.0, {"a": -1.0})

    def test_unit_conversion_48l(self, rulesets):
        fin, _ = rulesets
        assert 48 * fin.lambda_nm == pytest.approx(168.0)


class TestFootprints:
    def test_inverter_dimensions(self, rulesets):
        fin_rules, nw_rules = rulesets
        fin = inverter_footprint(fin_rules, "finfet")
        nw = inverter_footprint(nw_rules, "vnwfet")
        assert (fin.height_lambda, fin.width_lambda) == (48.0, 18.0)
        assert (nw.height_lambda, nw.width_lambda) == (31.0, 15.0)
        assert fin.area_lambda2 == 864.0
        assert nw.area_lambda2 == 465.0
        assert fin.supply_overhead_lambda == 12.0
        assert nw.supply_overhead_lambda == 12.0

    def test_technology_mismatch_rejected(self, rulesets):
        fin_rules, nw_rules = rulesets
        with pytest.raises(RulesetError):
            inverter_footprint(fin_rules, "vnwfet")
        with pytest.raises(RulesetError):
            inverter_footprint(fin_rules, "gaafet")

    def test_area_consistency_invariant(self):
        fp = CellFootprint(10.0, 4.0, 2.0)
        assert fp.area_lambda2 == fp.height_lambda * fp.width_lambda

    def test_positive_dimensions_enforced(self):
        with pytest.raises(RulesetError):
            CellFootprint(-1.0, 4.0)


class TestCompare:
    def test_identity_is_zero(self):
        fp = CellFootprint(10.0, 4.0)
        assert compare(fp, fp) == 0.0

    def test_half_area(self):
        a = CellFootprint(10.0, 4.0)
        b = CellFootprint(10.0, 2.0)
        assert compare(a, b) == pytest.approx(0.5)

    def test_antitone_in_second_area(self):
        a = CellFootprint(10.0, 10.0)
        smaller = [compare(a, CellFootprint(10.0, w)) for w in (9, 6, 3, 1)]
        assert all(x < y for x, y in zip(smaller, smaller[1:]))

    def test_full_reduction_from_dimensions(self, rulesets):
        fin_rules, nw_rules = rulesets
        fin = inverter_footprint(fin_rules, "finfet")
        nw = inverter_footprint(nw_rules, "vnwfet")
        assert compare(fin, nw) == pytest.approx(1 - 465 / 864, abs=1e-12)

    def test_supply_strip(self):
        a = CellFootprint(48.0, 18.0, 12.0)
        b = CellFootprint(31.0, 15.0, 12.0)
        assert compare(a, b, include_supply=False) == pytest.approx(
            1 - (19 * 15) / (36 * 18), abs=1e-12)


class TestReport:
    def test_report_contents(self):
        rep = comparison_report()
        assert rep["full_area_reduction"] == pytest.approx(0.4618, abs=5e-4)
        assert rep["finfet"]["area_lambda2"] == 864.0
        assert rep["vnwfet"]["area_lambda2"] == 465.0
        assert any("46.2%" in n for n in rep["notes"])
        json.dumps(rep)  # must be serializable

    def test_format_report_mentions_reductions(self):
        text = format_report(comparison_report())
        assert "46.2%" in text and "finfet" in text and "vnwfet" in text


class TestLoadRuleset:
    def test_load_from_file(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps({
            "name": "vnwfet", "lambda_nm": 13.0,
            "rules": {"diameter": 1.0, "pitch": 3.0},
            "extras": {"height_nm": 25.0}}))
        rs = load_ruleset(path)
        assert rs.lambda_nm == 13.0
        assert rs.in_nm("pitch") == pytest.approx(39.0)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps({"name": "x"}))
        with pytest.raises(RulesetError):
            load_ruleset(path)
