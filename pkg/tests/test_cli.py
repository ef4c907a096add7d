import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sofic_entropy.cli import main
from sofic_entropy.expr import (
    ExpressionError,
    format_group,
    format_matrix,
    parse_group,
    parse_int_list,
    parse_ladder_spec,
    parse_matrix,
    parse_ring_expression,
)
from sofic_entropy.field import FieldSpec
from sofic_entropy.group import FreeGroup, GroupRingElem, IntegerLattice
from sofic_entropy.report import read_rows

F2 = FieldSpec(2)


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_examples():
    f = parse_ring_expression("1 + t", IntegerLattice(1), F2)
    assert f.support() == {(0,), (1,)}
    g = parse_ring_expression("1 + u + v", IntegerLattice(2), F2)
    assert g.support() == {(0, 0), (1, 0), (0, 1)}
    h = parse_ring_expression("1 + a + b", FreeGroup(2), F2)
    assert len(h.support()) == 3
    assert parse_ring_expression("", IntegerLattice(1), F2).is_zero()
    assert str(parse_ring_expression("2t^-1*t^3 + 1", IntegerLattice(1), FieldSpec(3))) == "1 + 2t^2"


@pytest.mark.parametrize(
    "text,msg",
    [("1 + x", "unknown generator"), ("t^", "malformed exponent"), ("3t", "not a residue"), ("1 ++ t", "expected a term")],
)
def test_parse_errors_carry_position(text, msg):
    with pytest.raises(ExpressionError, match=msg) as exc:
        parse_ring_expression(text, IntegerLattice(1), F2)
    assert "column" in str(exc.value)


def test_group_and_list_grammar():
    for text in ("Z", "Z^2", "free:2", "finite:Z/6", "finite:S3", "finite:D4"):
        assert format_group(parse_group(text)) == text
    assert parse_int_list("4..10:2") == [4, 6, 8, 10]
    assert parse_int_list("64..512:x2") == [64, 128, 256, 512]
    assert parse_ladder_spec("N=4,8") == ("N", [4, 8])
    with pytest.raises(ValueError):
        parse_group("SL2")


@settings(max_examples=80)
@given(
    st.lists(
        st.tuples(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=4).map(FreeGroup.reduce), st.integers(0, 4)),
        max_size=4,
    )
)
def test_round_trip(terms):
    field, group = FieldSpec(5), FreeGroup(2)
    f = GroupRingElem(field, group, tuple(terms))
    once = parse_ring_expression(str(f), group, field)
    assert once == f and str(once) == str(f)
    m = parse_matrix(f"{f}, 1 ; 0, {f}" if str(f) != "0" else "0, 1", group, field)
    assert parse_matrix(format_matrix(m), group, field) == m


def test_principal_command(capsys):
    code, out, _ = run(capsys, "entropy", "principal", "--group", "Z", "--q", "2", "--f", "1+t", "--ladder", "N=4..12")
    assert code == 0
    rows = read_rows(out)
    assert [int(r["d"]) for r in rows] == list(range(4, 13))
    for r in rows:
        assert int(r["dim_ker_sigma_bar_fstar"]) == 1
        assert float(r["h_top_est"]) == pytest.approx(math.log(2) / int(r["d"]), rel=1e-11)
        assert r["gap_ok"] == "pass"


def test_peters_command_json(capsys):
    code, out, _ = run(capsys, "verify", "peters", "--group", "finite:Z/2", "--q", "2", "--f", "1+s", "--format", "json")
    assert code == 0
    (row,) = [json.loads(x) for x in out.splitlines()]
    assert row["schema_version"] == 1
    assert row["h_top_est"] == pytest.approx(math.log(2) / 2) == row["h_alg_est"]
    assert row["peters_equal"] is True and row["finite_match"] is True


def test_free_module_command(capsys):
    code, out, _ = run(capsys, "entropy", "principal", "--group", "Z", "--q", "3", "--f", "", "--ladder", "N=4,8")
    assert code == 0
    assert all(float(r["h_alg_est"]) == pytest.approx(math.log(3)) for r in read_rows(out))


def test_other_commands(capsys, tmp_path):
    cmds = [
        ("entropy", "relative", "--group", "Z", "--patch", "free:2", "--ladder", "N=4", "--window", "t"),
        ("entropy", "folner", "--group", "Z", "--patch", "quotient:1+t", "--boxes", "1..8"),
        ("sofic", "check", "--group", "free:2", "--ladder", "d=50", "--seed", "3", "--dump", str(tmp_path / "p.json")),
        ("probe", "zero-divisor", "--group", "Z", "--f", "1+t", "--ladder", "N=8,16"),
        ("verify", "addition", "--group", "Z", "--f1", "1+t", "--f2", "1+t", "--ladder", "N=6"),
        ("oracle", "kernel", "--matrix", "1 1 0; 0 1 1"),
        ("oracle", "mapspace", "--group", "finite:Z/2"),
        ("oracle", "closure", "--group", "Z", "--patch", "free:2", "--ladder", "N=4", "--window", "t"),
        ("oracle", "pairing", "--group", "finite:S3", "--f", "1+s"),
    ]
    for cmd in cmds:
        code, out, err = run(capsys, *cmd)
        assert code == 0, (cmd, err)
        assert read_rows(out)
    dump = json.loads((tmp_path / "p.json").read_text())
    assert len(dump["rungs"][0]["generators"]) == 2
    _, _, err = run(capsys, "probe", "zero-divisor", "--group", "Z", "--f", "1+t", "--ladder", "N=64")
    assert "not a proof" in err
    _, _, err = run(capsys, "probe", "zero-divisor", "--group", "Z", "--f", "1+t", "--ladder", "N=8")
    assert "does not vanish" in err


def test_patch_json_file(capsys, tmp_path):
    patch = {
        "q": 2,
        "group": "Z",
        "basis": ["x"],
        "actions": {"1": [[1]], "t": [[1]], "t^-1": [[1]]},
        "A": [[1]],
        "B": [[1]],
    }
    path = tmp_path / "patch.json"
    path.write_text(json.dumps(patch))
    code, out, _ = run(capsys, "entropy", "relative", "--group", "Z", "--patch", str(path), "--ladder", "N=8")
    assert code == 0
    (row,) = read_rows(out)
    assert int(row["dim_image"]) == 1


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "entropy", "principal", "--group", "Z", "--f", "1+x", "--ladder", "N=4")[0] == 2
    assert run(capsys, "entropy", "principal", "--group", "Z", "--q", "4", "--f", "1", "--ladder", "N=4")[0] == 2
    assert run(capsys, "probe", "zero-divisor", "--group", "Z", "--f", "0", "--ladder", "N=4")[0] == 2
    assert run(capsys, "entropy", "principal", "--group", "Z", "--f", "1+t", "--ladder", "N=20000")[0] == 3
    assert run(capsys, "oracle", "kernel", "--matrix", " ".join(["1"] * 24))[0] == 3
    assert run(capsys, "entropy", "folner", "--group", "Z", "--patch", "free:2", "--boxes", "6")[0] == 2
    # an invariant failure: the finite-group map space with delta=0 must match the kernel value
    assert run(capsys, "oracle", "mapspace", "--group", "finite:Z/2", "--eps", "1/2")[0] == 0


def test_config_file_and_output(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# principal run\ngroup = Z\nf = 1+t+t^2\nladder = N=6\n")
    out_path = tmp_path / "report.csv"
    code, out, _ = run(capsys, "entropy", "principal", "--config", str(cfg), "--output", str(out_path))
    assert code == 0 and out == ""
    (row,) = read_rows(out_path.read_text())
    assert row["dim_ker_sigma_f"] == "2"
    # explicit flags override the config file
    code, out, _ = run(capsys, "entropy", "principal", "--config", str(cfg), "--ladder", "N=7")
    (row,) = read_rows(out)
    assert row["d"] == "7"


def test_threads_byte_identical(capsys):
    args = ("entropy", "principal", "--group", "free:2", "--f", "1+a+b", "--ladder", "d=30,60,90", "--seed", "5")
    outs = {run(capsys, *args, "--threads", str(k))[1] for k in (1, 3)}
    assert len(outs) == 1
