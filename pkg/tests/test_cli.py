"""End-to-end tests for the command-line interface.

Every test drives ``quditdc.cli.main`` directly with an argv list and
checks the exit code plus the text or JSON it printed.  Exit codes: 0 =
success, 1 = a semantic check failed, 2 = usage problems.
"""

import json

import pytest

from quditdc import CheckMatrix, load_protocol, save_stabilizer, verify_protocol
from quditdc.cli import main
from tests.helpers import bell_matrix, ghz_matrix


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_stabilizer(tmp_path, matrix, name="stab.json"):
    path = tmp_path / name
    save_stabilizer(matrix, path)
    return str(path)


def write_json(tmp_path, obj, name):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def product_matrix_d2():
    # Two disentangled qubits: Z on each.  No protocol beats sending the
    # qudits themselves, so every synthesis route declines.
    return CheckMatrix(2, 2, rows=((0, 0, 1, 0), (0, 0, 0, 1)), phases=(0, 0))


def composite_matrix_d4():
    return CheckMatrix(4, 2, rows=((2, 1, 0, 0), (0, 0, 1, 2)), phases=(0, 0))


def chain_basis_rows(d, n):
    rows = [[1 if c == 0 else 0 for c in range(n)], [1 if c == 1 else 0 for c in range(n)]]
    for j in range(2, n):
        row = [0] * n
        row[j - 1] = -1 % d
        row[j] = 1
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def test_validate_pass_text(tmp_path, capsys):
    path = write_stabilizer(tmp_path, ghz_matrix(2, 3))
    code, out, err = run(capsys, "validate", path)
    assert code == 0 and err == ""
    assert "commuting:   pass" in out
    assert "overall:     pass" in out


def test_validate_fail_noncommuting(tmp_path, capsys):
    bad = CheckMatrix(2, 2, rows=((1, 0, 0, 0), (0, 0, 1, 0)), phases=(0, 0))
    path = write_stabilizer(tmp_path, bad)
    code, out, _ = run(capsys, "validate", path)
    assert code == 1
    assert "commuting:   FAIL" in out
    assert "overall:     FAIL" in out


def test_validate_json_output(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(3))
    code, out, _ = run(capsys, "validate", path, "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True
    assert obj["commuting"] is True and obj["complete"] is True
    assert obj["messages"] == []


def test_validate_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 2
    assert err.startswith("error:")


def test_validate_malformed_file(tmp_path, capsys):
    path = write_json(tmp_path, {"d": 2}, "bad.json")
    code, _, err = run(capsys, "validate", path)
    assert code == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def test_synth_auto_ghz(tmp_path, capsys):
    path = write_stabilizer(tmp_path, ghz_matrix(2, 3))
    code, out, _ = run(capsys, "synth", path, "--method", "auto")
    assert code == 0
    assert "partition: {1} | {3} | receiver {2}" in out
    assert "alphabet: (4, 2)" in out
    assert "optimal:  yes" in out
    assert "sender 1: free_z={1} free_x={1}" in out
    assert "sender 2: free_z={} free_x={3}" in out


def test_synth_auto_rejects_manual_flags(tmp_path, capsys):
    path = write_stabilizer(tmp_path, ghz_matrix(2, 3))
    code, _, err = run(capsys, "synth", path, "--method", "auto", "--partition", "1|2")
    assert code == 2
    assert "auto" in err


def test_synth_auto_reports_witness(tmp_path, capsys):
    path = write_stabilizer(tmp_path, product_matrix_d2())
    code, out, _ = run(capsys, "synth", path, "--method", "auto")
    assert code == 1
    assert "witness bipartition" in out
    assert "witness restrictions commute: yes" in out


def test_synth_column_sets_with_out(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(3))
    proto_path = str(tmp_path / "proto.json")
    code, out, _ = run(capsys, "synth", path, "--partition", "1|2", "--out", proto_path)
    assert code == 0
    assert "method:   column-sets" in out
    assert "alphabet: (9)" in out
    assert "sender 1: free_z={1} free_x={1}" in out
    assert f"saved: {proto_path}" in out
    proto, trace = load_protocol(proto_path)
    assert trace is None
    assert proto.alphabet == (9,)
    assert verify_protocol(proto)


def test_synth_column_sets_finds_nothing(tmp_path, capsys):
    path = write_stabilizer(tmp_path, product_matrix_d2())
    code, out, _ = run(capsys, "synth", path, "--partition", "1|2")
    assert code == 1
    assert "no protocol found by this method" in out


def test_synth_column_sets_pinned(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    choices = write_json(
        tmp_path, {"free_z": [[1]], "free_x": [[1]]}, "choices.json"
    )
    code, out, _ = run(capsys, "synth", path, "--partition", "1|2", "--choices", choices)
    assert code == 0
    assert "alphabet: (4)" in out


def test_synth_column_sets_pinned_dependent(tmp_path, capsys):
    path = write_stabilizer(tmp_path, product_matrix_d2())
    choices = write_json(tmp_path, {"free_z": [[1]], "free_x": [[]]}, "choices.json")
    code, _, err = run(capsys, "synth", path, "--partition", "1|2", "--choices", choices)
    assert code == 2
    assert "dependent" in err


def test_synth_choices_must_pin_both_sets(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    choices = write_json(tmp_path, {"free_z": [[1]]}, "choices.json")
    code, _, err = run(capsys, "synth", path, "--partition", "1|2", "--choices", choices)
    assert code == 2
    assert "together" in err


def test_synth_choices_unknown_keys(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    choices = write_json(tmp_path, {"freeZ": [[1]]}, "choices.json")
    code, _, err = run(capsys, "synth", path, "--partition", "1|2", "--choices", choices)
    assert code == 2
    assert "unknown keys" in err


def test_synth_requires_partition(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    code, _, err = run(capsys, "synth", path)
    assert code == 2
    assert "--partition" in err


@pytest.mark.parametrize("spec", ["1|", "1", "1|1", "1|3", "0|1"])
def test_synth_bad_partition(tmp_path, capsys, spec):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    code, _, err = run(capsys, "synth", path, "--partition", spec)
    assert code == 2
    assert err.startswith("error:")


def test_synth_partition_groups_are_sets(tmp_path, capsys):
    # A repeated qudit inside one group collapses; only cross-group overlap
    # is an error.
    path = write_stabilizer(tmp_path, bell_matrix(2))
    code, out, _ = run(capsys, "synth", path, "--partition", "1,1|2")
    assert code == 0
    assert "partition: {1} | receiver {2}" in out


def test_synth_basis_flag_needs_basis_chain(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    basis = write_json(tmp_path, [[1, 0], [0, 1]], "basis.json")
    code, _, err = run(capsys, "synth", path, "--partition", "1|2", "--basis", basis)
    assert code == 2
    assert "basis-chain" in err


def test_synth_basis_chain_default_identity(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(3))
    code, out, _ = run(
        capsys, "synth", path, "--partition", "1|2", "--method", "basis-chain"
    )
    assert code == 0
    assert "method:   basis-chain" in out
    assert "alphabet: (9)" in out
    assert "optimal:  yes" in out


def test_synth_basis_chain_with_basis_and_factors(tmp_path, capsys):
    path = write_stabilizer(tmp_path, ghz_matrix(3, 4))
    basis = write_json(tmp_path, chain_basis_rows(3, 4), "basis.json")
    choices = write_json(
        tmp_path,
        {"factor_vectors": [{"position": 1, "factors": [3, 1, 1]}]},
        "choices.json",
    )
    for extra in ([], ["--choices", choices]):
        code, out, _ = run(
            capsys,
            "synth",
            path,
            "--partition",
            "1|2|3|4",
            "--method",
            "basis-chain",
            "--basis",
            basis,
            *extra,
        )
        assert code == 0
        assert "alphabet: (9, 3, 3)" in out
        assert "product:  81 (ceiling 81)" in out


def test_synth_basis_chain_bad_basis_shape(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    basis = write_json(tmp_path, [[1, 0], [0, 1], [0, 0]], "basis.json")
    code, _, err = run(
        capsys,
        "synth", path, "--partition", "1|2", "--method", "basis-chain",
        "--basis", basis,
    )
    assert code == 2
    assert "basis file" in err


def test_synth_basis_chain_rejects_column_set_choices(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(2))
    choices = write_json(tmp_path, {"free_z": [[1]], "free_x": [[1]]}, "choices.json")
    code, _, err = run(
        capsys,
        "synth", path, "--partition", "1|2", "--method", "basis-chain",
        "--choices", choices,
    )
    assert code == 2
    assert "unknown keys" in err


def test_synth_basis_chain_emits_notes(tmp_path, capsys):
    # Composite dimension where step 1 has no unit leading coefficient: the
    # chain degrades that slot to 1 and says why.
    path = write_stabilizer(tmp_path, composite_matrix_d4())
    code, out, _ = run(
        capsys, "synth", path, "--partition", "1|2", "--method", "basis-chain"
    )
    assert code == 0
    assert "alphabet: (4)" in out
    assert "note:" in out


def test_synth_json_output(tmp_path, capsys):
    path = write_stabilizer(tmp_path, bell_matrix(3))
    code, out, _ = run(
        capsys, "synth", path, "--partition", "1|2", "--format", "json"
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["alphabet"] == [9]
    assert obj["optimal"] is True
    assert obj["free_z"] == [[1]] and obj["free_x"] == [[1]]
    assert obj["partition"] == {"senders": [[1]], "receiver": [2]}


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def synth_protocol_file(tmp_path, capsys, matrix, partition):
    stab = write_stabilizer(tmp_path, matrix)
    proto_path = str(tmp_path / "proto.json")
    code, _, _ = run(
        capsys, "synth", stab, "--partition", partition, "--out", proto_path
    )
    assert code == 0
    return proto_path


def test_verify_full_simulation(tmp_path, capsys):
    proto_path = synth_protocol_file(tmp_path, capsys, bell_matrix(2), "1|2")
    code, out, _ = run(capsys, "verify", proto_path, "--simulate")
    assert code == 0
    assert "labels distinct: yes" in out
    assert "simulation mode: full" in out
    assert "orthogonal: yes" in out
    assert "overall: pass" in out


def test_verify_sampled_simulation(tmp_path, capsys):
    proto_path = synth_protocol_file(tmp_path, capsys, ghz_matrix(3, 3), "1,2|3")
    code, out, _ = run(
        capsys, "verify", proto_path, "--simulate", "--sample", "10", "--seed", "3"
    )
    assert code == 0
    assert "simulation mode: sample" in out
    assert "pairs checked: 10" in out


def test_verify_json_output(tmp_path, capsys):
    proto_path = synth_protocol_file(tmp_path, capsys, bell_matrix(2), "1|2")
    code, out, _ = run(capsys, "verify", proto_path, "--simulate", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True and obj["messages"] == 4
    assert obj["simulation"]["mode"] == "full"
    assert obj["simulation"]["max_overlap"] < 1e-9


def test_verify_detects_duplicate_encoding(tmp_path, capsys):
    proto_path = synth_protocol_file(tmp_path, capsys, bell_matrix(2), "1|2")
    obj = json.loads(open(proto_path).read())
    obj["senders"][0]["encodings"][1] = obj["senders"][0]["encodings"][0]
    with open(proto_path, "w") as fh:
        json.dump(obj, fh)
    code, out, _ = run(capsys, "verify", proto_path)
    assert code == 1
    assert "labels distinct: NO" in out
    assert "overall: FAIL" in out


def test_verify_rejects_corrupted_hash(tmp_path, capsys):
    proto_path = synth_protocol_file(tmp_path, capsys, bell_matrix(2), "1|2")
    obj = json.loads(open(proto_path).read())
    obj["stabilizer_sha256"] = "0" * 64
    with open(proto_path, "w") as fh:
        json.dump(obj, fh)
    code, _, err = run(capsys, "verify", proto_path)
    assert code == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# standard-form
# ---------------------------------------------------------------------------


def test_standard_form_ghz(tmp_path, capsys):
    path = write_stabilizer(tmp_path, ghz_matrix(2, 3))
    code, out, _ = run(capsys, "standard-form", path)
    assert code == 0
    assert "r: 1" in out
    assert "qudit order: (1, 2, 3)" in out
    assert "partition: {1} | {3} | receiver {2}" in out


def test_standard_form_json(tmp_path, capsys):
    path = write_stabilizer(tmp_path, ghz_matrix(2, 3))
    code, out, _ = run(capsys, "standard-form", path, "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["r"] == 1
    assert obj["blocks"]["D"] == [[1], [1]]
    assert obj["partition"]["receiver"] == [2]


def test_standard_form_composite_dimension(tmp_path, capsys):
    path = write_stabilizer(tmp_path, composite_matrix_d4())
    code, out, _ = run(capsys, "standard-form", path)
    assert code == 1
    assert "prime" in out


def test_standard_form_witness(tmp_path, capsys):
    path = write_stabilizer(tmp_path, product_matrix_d2())
    code, out, _ = run(capsys, "standard-form", path)
    assert code == 0
    assert "no usable block entry" in out
    assert "restrictions commute: yes" in out


# ---------------------------------------------------------------------------
# environment caps
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("value", ["zebra", "0", "-3"])
def test_sim_cap_must_be_positive_integer(tmp_path, capsys, monkeypatch, value):
    monkeypatch.setenv("QUDITDC_SIM_CAP", value)
    path = write_stabilizer(tmp_path, bell_matrix(2))
    code, _, err = run(capsys, "validate", path)
    assert code == 2
    assert "QUDITDC_SIM_CAP" in err


def test_sim_cap_skips_completeness(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QUDITDC_SIM_CAP", "2")
    path = write_stabilizer(tmp_path, bell_matrix(2))
    code, out, _ = run(capsys, "validate", path)
    assert code == 0
    assert "complete:    skipped" in out
    assert "asserted by user" in out


def test_span_cap_limits_basis_chain(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QUDITDC_SPAN_CAP", "1")
    path = write_stabilizer(tmp_path, bell_matrix(3))
    code, _, err = run(
        capsys, "synth", path, "--partition", "1|2", "--method", "basis-chain"
    )
    assert code == 2
    assert "cap" in err
