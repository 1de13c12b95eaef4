import hashlib
import json
from pathlib import Path

import pytest

from tarakit import (
    Backend,
    EvitaMethodResult,
    HeavensMethodResult,
    IncompleteInputError,
    build_report,
    load_model,
    render_json,
    render_text,
)
from tarakit.cli import main
from tarakit.fixtures import attack_records_path, rsl_path

RSL = str(rsl_path())


# --- report content ---------------------------------------------------------

def test_evita_report_rows(rsl_model):
    report = build_report(rsl_model, Backend.EVITA)
    rows = {row.result.method_id: row for row in report.rows}
    assert list(rows) == [
        "impersonate-authority",
        "influence-roadside-equipment",
        "control-roadside-units",
        "control-roadside-units-enforcement",
    ]
    expectations = {
        "impersonate-authority": (2, "R2", "R1", "R3"),
        "influence-roadside-equipment": (5, "R5", "R4", "R6"),
        "control-roadside-units": (1, "R1", "R0", "R2"),
        "control-roadside-units-enforcement": (1, "R3", "R1", "R0"),
    }
    for method_id, (rating, r_s, r_f, r_o) in expectations.items():
        result = rows[method_id].result
        assert isinstance(result, EvitaMethodResult)
        assert result.rating == rating
        assert str(result.risks.safety) == r_s
        assert str(result.risks.financial) == r_f
        assert str(result.risks.operational) == r_o
        assert str(result.risks.privacy) == "R0"


def test_evita_report_paths_exclude_out_of_scope_leaves(rsl_model):
    report = build_report(rsl_model, Backend.EVITA)
    by_method = {row.result.method_id: row.attack_paths for row in report.rows}
    assert by_method["impersonate-authority"] == (("replay-speed-limit-message",),)
    assert by_method["control-roadside-units"] == (
        ("exploit-configuration-errors",),
        ("exploit-protocol-flaws",),
        ("gain-root-access",),
    )


def test_evita_report_warnings(rsl_model):
    report = build_report(rsl_model, Backend.EVITA)
    warnings = [(w.subject, w.message) for w in report.warnings]
    assert ("matrices.evita_risk", "non-normative default table in effect") in warnings
    assert ("acquire-authorization-keys", "node is out of scope") in warnings
    assert ("fake-wired-speed-limit-message", "node is out of scope") in warnings
    assert ("fake-wired-speed-updates", "method is out of scope (no in-scope asset attacks)") in warnings
    assert ("lower-speed", "tree skipped: no evita severity on any objective") in warnings


def test_heavens_report_rows(rsl_model):
    report = build_report(rsl_model, Backend.HEAVENS)
    assert [row.result.method_id for row in report.rows] == ["spoof-com-ecu-input", "tamper-roadside-units"]
    spoofed, tampered = (row.result for row in report.rows)
    assert isinstance(spoofed, HeavensMethodResult)
    assert spoofed.label == "Com. ECU input signal spoofed"
    assert spoofed.feasibility_class.value == "high"
    assert spoofed.impact_class.value == "major"
    assert spoofed.risk == 5
    assert tampered.label == "Roadside units tampering"
    assert tampered.feasibility_class.value == "low"
    assert tampered.impact_class.value == "major"
    assert tampered.risk == 3
    assert spoofed.impact_value == pytest.approx(210 / 2200, abs=1e-12)


def test_heavens_text_report_prints_four_decimal_impact(rsl_model):
    text = render_text(build_report(rsl_model, Backend.HEAVENS))
    assert "0.0955" in text
    assert "Com. ECU input signal spoofed" in text
    assert "Major" in text and "High" in text and "Low" in text


def test_incomplete_inputs_list_every_node(rsl_document):
    document = json.loads(rsl_document)
    tree = document["attack_trees"][0]
    del tree["children"][0]["children"][0]["children"][0]["potential_profile"]
    del tree["children"][1]["severity"]
    model = load_model(json.dumps(document))
    with pytest.raises(IncompleteInputError) as excinfo:
        build_report(model, Backend.EVITA)
    assert set(excinfo.value.node_ids) == {"replay-speed-limit-message", "increase-enforced-speed"}


def test_heavens_extended_impact_categories(rsl_document):
    document = json.loads(rsl_document)
    heavens_objective = document["attack_trees"][1]["children"][0]
    heavens_objective["impact"] = {
        "entries": [
            {"category": "safety", "value": 1, "weight": 10},
            {"category": "financial", "value": 10, "weight": 10},
            {"category": "operational", "value": 100, "weight": 1},
            {"category": "privacy", "value": 0, "weight": 1},
            {"category": "legislation", "value": 10, "weight": 1},
        ]
    }
    model = load_model(json.dumps(document))
    report = build_report(model, Backend.HEAVENS)
    spoofed = report.rows[0].result
    # weighted sum 220 over 100 * 23 total weight
    assert spoofed.impact_value == pytest.approx(220 / 2300, abs=1e-12)
    assert spoofed.impact_class.value == "major"


def test_out_of_scope_tree_root_produces_no_rows(rsl_document):
    document = json.loads(rsl_document)
    document["attack_trees"][0]["in_scope"] = False
    # the objectives below the dead root must not demand severities or ratings
    del document["attack_trees"][0]["children"][0]["severity"]
    model = load_model(json.dumps(document))
    report = build_report(model, Backend.EVITA)
    assert report.rows == ()
    assert any(w.subject == "manipulate-speed-limits" and "out of scope" in w.message for w in report.warnings)


def test_cli_mixed_rating_approaches_in_one_tree_exit_two(tmp_path, capsys):
    document = json.loads(rsl_path().read_text())
    leafs = document["attack_trees"][1]["children"][0]["children"][0]["children"]
    # Eq-style profile next to a proximity-only sibling under the same method
    leafs[0]["potential_profile"] = {
        "heavens": {"expertise": 3, "knowledge": 3, "window": 3, "equipment": 3}
    }
    path = tmp_path / "model.json"
    path.write_text(json.dumps(document))
    assert main(["assess", str(path), "--backend", "heavens"]) == 2
    assert "mix" in capsys.readouterr().out


def test_heavens_profile_with_window_inputs(rsl_document):
    document = json.loads(rsl_document)
    heavens_tree = document["attack_trees"][1]
    leafs = heavens_tree["children"][0]["children"][0]["children"]
    leafs[0]["potential_profile"] = {
        "heavens": {"expertise": 3, "knowledge": 3, "equipment": 3},
        "window_inputs": {"access_means": "remote-2", "exposure": "unlimited"},
    }
    leafs[1]["potential_profile"] = {
        "heavens": {"expertise": 0, "knowledge": 0, "window": 0, "equipment": 0},
    }
    model = load_model(json.dumps(document))
    report = build_report(model, Backend.HEAVENS)
    spoofed = report.rows[0].result
    # window resolves to 3 through the matrix, so all four parameters are 3
    assert spoofed.feasibility_value == pytest.approx(1.0)
    assert spoofed.feasibility_class.value == "high"
    assert spoofed.risk == 5


# --- CLI ---------------------------------------------------------------------

def test_cli_validate_fixture_exits_zero_and_silent(capsys):
    assert main(["validate", RSL]) == 0
    out = capsys.readouterr()
    assert out.out == ""


def test_cli_validate_missing_file_exits_one(capsys):
    assert main(["validate", "/no/such/file.json"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_cli_validate_malformed_file_exits_one(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert main(["validate", str(path)]) == 1
    assert "parse error" in capsys.readouterr().err


def test_cli_validate_dangling_reference_exits_two(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_text(
        json.dumps(
            {
                "item": {"name": "x"},
                "threat_scenarios": [{"id": "t", "description": "d", "damage_refs": ["ghost"]}],
            }
        )
    )
    assert main(["validate", str(path)]) == 2
    out = capsys.readouterr().out
    assert out.count("\n") == 1
    assert "ghost" in out


def test_cli_validate_violations_one_per_line(tmp_path, capsys):
    document = json.loads(rsl_path().read_text())
    document["assets"][0]["properties"] = []
    document["damage_scenarios"][0]["asset_refs"] = []
    path = tmp_path / "model.json"
    path.write_text(json.dumps(document))
    assert main(["validate", str(path)]) == 2
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 2


def test_cli_assess_evita_text_contains_published_values(capsys):
    assert main(["assess", RSL, "--backend", "evita"]) == 0
    out = capsys.readouterr().out
    assert "impersonate-authority" in out
    assert "A=2" in out and "A=5" in out and "A=1" in out
    assert "R_S=R2" in out and "R_F=R1" in out and "R_O=R3" in out
    assert "R_S=R5" in out and "R_F=R4" in out and "R_O=R6" in out
    assert "R_P=R0 (n/a)" in out


def test_cli_assess_heavens_text_contains_published_values(capsys):
    assert main(["assess", RSL, "--backend", "heavens"]) == 0
    out = capsys.readouterr().out
    assert "0.0955" in out
    for fragment in ("Com. ECU input signal spoofed", "Roadside units tampering"):
        assert fragment in out
    lines = [line for line in out.splitlines() if line.strip().endswith(("5", "3"))]
    assert any("High" in line and "5" in line for line in lines)
    assert any("Low" in line and "3" in line for line in lines)


def test_cli_assess_json_deterministic(capsys):
    assert main(["assess", RSL, "--backend", "evita", "--format", "json"]) == 0
    first = capsys.readouterr().out
    assert main(["assess", RSL, "--backend", "evita", "--format", "json"]) == 0
    second = capsys.readouterr().out
    assert first == second
    parsed = json.loads(first)
    assert parsed["backend"] == "evita"
    assert [row["method"] for row in parsed["rows"]] == [
        "impersonate-authority",
        "influence-roadside-equipment",
        "control-roadside-units",
        "control-roadside-units-enforcement",
    ]


def test_cli_assess_incomplete_model_exits_three(tmp_path, capsys):
    # the model validates clean: profiles exist everywhere, but one leaf's
    # profile cannot serve the EVITA backend and one objective has no severity
    document = json.loads(rsl_path().read_text())
    tree = document["attack_trees"][0]
    tree["children"][0]["children"][0]["children"][0]["potential_profile"] = {
        "access_means": "remote-2"
    }
    del tree["children"][1]["severity"]
    path = tmp_path / "model.json"
    path.write_text(json.dumps(document))
    assert main(["validate", str(path)]) == 0
    assert main(["assess", str(path), "--backend", "evita"]) == 3
    out = capsys.readouterr()
    assert "replay-speed-limit-message" in out.out
    assert "increase-enforced-speed" in out.out


def test_cli_assess_validation_failure_exits_two(tmp_path, capsys):
    document = json.loads(rsl_path().read_text())
    document["assets"][0]["properties"] = []
    path = tmp_path / "model.json"
    path.write_text(json.dumps(document))
    assert main(["assess", str(path), "--backend", "evita"]) == 2


def test_cli_assess_with_matrix_override(tmp_path, capsys):
    overrides = tmp_path / "matrices.json"
    overrides.write_text(json.dumps({"heavens_risk": [[1, 1, 1, 1]] * 4}))
    assert main(["assess", RSL, "--backend", "heavens", "--matrices", str(overrides), "--format", "json"]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert [row["risk"] for row in parsed["rows"]] == [1, 1]
    warnings = {w["subject"] for w in parsed["warnings"]}
    assert "matrices.heavens_risk" not in warnings
    assert "matrices.window" in warnings


def test_cli_taxonomy_add_query_export(tmp_path, capsys):
    store = tmp_path / "store.jsonl"
    record_path = tmp_path / "record.json"
    fixture_lines = attack_records_path().read_text().splitlines()
    record_path.write_text(fixture_lines[0])

    assert main(["taxonomy", "add", str(record_path), "--store", str(store)]) == 0
    assert store.read_text().count("\n") == 1

    assert main(["taxonomy", "query", "--store", str(store), "--eq", "attack_class=spoofing"]) == 0
    out = capsys.readouterr().out
    assert out.strip() == fixture_lines[0]

    assert main(["taxonomy", "query", "--store", str(store), "--eq", "attack_class=tampering"]) == 0
    assert capsys.readouterr().out == ""

    assert main(["taxonomy", "export", "--store", str(store)]) == 0
    assert capsys.readouterr().out.strip() == fixture_lines[0]


def test_cli_taxonomy_add_invalid_record_exits_two(tmp_path, capsys):
    record_path = tmp_path / "record.json"
    record = json.loads(attack_records_path().read_text().splitlines()[0])
    del record["interface"]
    record_path.write_text(json.dumps(record))
    assert main(["taxonomy", "add", str(record_path), "--store", str(tmp_path / "s.jsonl")]) == 2
    out = capsys.readouterr().out
    assert "interface" in out


def test_cli_taxonomy_query_empty_store_exits_zero(tmp_path, capsys):
    assert main(["taxonomy", "query", "--store", str(tmp_path / "missing.jsonl")]) == 0
    assert capsys.readouterr().out == ""


def test_cli_matrix_show_heavens_risk(capsys):
    assert main(["matrix", "show", "heavens-risk"]) == 0
    out = capsys.readouterr().out
    assert "negligible" in out and "severe" in out
    cells = [int(token) for token in out.split() if token.isdigit()]
    assert min(cells) == 1 and max(cells) == 5


def test_cli_matrix_show_window_is_five_by_four(capsys):
    assert main(["matrix", "show", "window"]) == 0
    out = capsys.readouterr().out
    rows = [line for line in out.splitlines() if line.startswith(("physical", "remote"))]
    assert len(rows) == 5
    assert all(len(row.split()) == 5 for row in rows)


def test_cli_matrix_show_stride_map(capsys):
    assert main(["matrix", "show", "stride-map"]) == 0
    out = capsys.readouterr().out
    assert "process: spoofing, tampering, repudiation" in out


def test_cli_matrix_show_evita_risk(capsys):
    assert main(["matrix", "show", "evita-risk"]) == 0
    out = capsys.readouterr().out
    assert "non-safety" in out
    assert "C4" in out


def test_cli_matrix_show_unknown_exits_two(capsys):
    assert main(["matrix", "show", "unknown"]) == 2
    assert "unknown matrix" in capsys.readouterr().err


# --- golden files and fixture stability ---------------------------------------

GOLDEN_DIR = Path(__file__).parent / "data"


@pytest.mark.parametrize("backend", ["evita", "heavens"])
def test_machine_report_matches_golden_file(backend, capsys):
    assert main(["assess", RSL, "--backend", backend, "--format", "json"]) == 0
    out = capsys.readouterr().out
    golden = (GOLDEN_DIR / f"golden_rsl_{backend}.json").read_text()
    assert out == golden


def test_rsl_fixture_is_byte_stable():
    digest = hashlib.sha256(rsl_path().read_bytes()).hexdigest()
    assert digest == "2281244aaf62381d4dfab7278c24c98dc5c7154c571fd84229e1fe9fd4453f6d"


def test_concurrent_assessments_agree(rsl_model):
    # models are immutable and assessment is pure, so parallel runs over the
    # same model must all render identical bytes
    from concurrent.futures import ThreadPoolExecutor

    def render(backend):
        return render_json(build_report(rsl_model, backend))

    with ThreadPoolExecutor(max_workers=8) as pool:
        evita_runs = list(pool.map(render, ["evita"] * 16))
        heavens_runs = list(pool.map(render, ["heavens"] * 16))
    assert len(set(evita_runs)) == 1
    assert len(set(heavens_runs)) == 1
