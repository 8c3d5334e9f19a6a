"""Tests for the command-line front end: exit codes, reports, determinism."""

import json

import numpy as np

from amok import algebra, cli, rand, serialize

M2 = algebra.AlgebraSpec.fd([2])
FD23 = algebra.AlgebraSpec.fd([2, 3])
CIRCLE1 = algebra.AlgebraSpec.circle(1, 64)


def write_json(path, obj):
    path.write_text(serialize.dumps_canonical(obj))
    return str(path)


def write_algebra(path, alg):
    return write_json(path, serialize.algebra_to_json(alg))


def write_element(path, v):
    return write_json(path, serialize.element_to_json(v))


def test_check_axioms_passes_small_run(tmp_path, capsys):
    spec = write_algebra(tmp_path / "alg.json", M2)
    code = cli.main(["check-axioms", spec, "--trials", "5", "--format", "json"])
    out = capsys.readouterr().out
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "check-axioms"
    assert all(p["passed"] for p in report["properties"])
    assert all(p["worst_residual"] <= 1e-8 for p in report["properties"])


def test_malformed_json_gives_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = cli.main(["check-axioms", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert "SpecParseError" in err


def test_unknown_field_gives_exit_2(tmp_path, capsys):
    spec = tmp_path / "alg.json"
    obj = serialize.algebra_to_json(M2)
    obj["bogus"] = 1
    spec.write_text(json.dumps(obj))
    assert cli.main(["check-axioms", str(spec)]) == 2
    capsys.readouterr()


def test_classify_unit(tmp_path, capsys):
    e = algebra.order_unit(M2, 2)
    path = write_element(tmp_path / "e.json", e)
    code = cli.main(["classify", path, "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    flags = report["flags"]
    assert flags["is_unitary"] and flags["is_order_projection"]
    assert abs(report["norm"] - 1.0) <= 1e-8


def test_classify_matrix_unit(tmp_path, capsys):
    v = algebra.Element(M2, 1, 1, (np.array([[0, 1], [0, 0]], dtype=complex),))
    path = write_element(tmp_path / "v.json", v)
    code = cli.main(["classify", path, "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    flags = report["flags"]
    assert flags["is_partial_isometry"]
    assert not flags["is_partial_unitary"]
    assert not flags["is_unitary"]


def test_classify_circle_coordinate(tmp_path, capsys):
    f = algebra.circle_function(CIRCLE1, 1, 1,
                                lambda z: np.array([[z]], dtype=complex))
    path = write_element(tmp_path / "f.json", f)
    code = cli.main(["classify", path, "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["flags"]["is_unitary"]


def test_kgroup_reports(tmp_path, capsys):
    spec = write_algebra(tmp_path / "fd.json", FD23)
    assert cli.main(["kgroup", spec, "--which", "k0", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["view"]["rank"] == 2
    assert report["view"]["order_unit"] == [2, 3]

    circle = write_algebra(tmp_path / "circle.json", CIRCLE1)
    assert cli.main(["kgroup", circle, "--which", "k1", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["view"]["rank"] == 1

    fd5 = write_algebra(tmp_path / "fd5.json", algebra.AlgebraSpec.fd([5]))
    assert cli.main(["kgroup", fd5, "--which", "k1", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["view"]["rank"] == 0


def test_equiv_mvn_certificate(tmp_path, capsys):
    p = algebra.Element(M2, 1, 1, (np.diag([1.0, 0.0]).astype(complex),))
    q = algebra.Element(M2, 1, 1, (np.diag([0.0, 1.0]).astype(complex),))
    pf = write_element(tmp_path / "p.json", p)
    qf = write_element(tmp_path / "q.json", q)
    code = cli.main(["equiv", "--relation", "mvn", pf, qf, "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["equivalent"] is True
    assert report["witness"]["kind"] == "certificate"


def test_equiv_constant_homotopy(tmp_path, capsys):
    rng = rand.stream(400, 0)
    u = rand.unitary(rng, M2, 1)
    uf = write_element(tmp_path / "u.json", u)
    code = cli.main(["equiv", "--relation", "h", uf, uf, "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["equivalent"] is True
    assert report["witness"]["kind"] == "path"


def test_equiv_circle_windings_reported(tmp_path, capsys):
    z = algebra.circle_function(CIRCLE1, 1, 1,
                                lambda s: np.array([[s]], dtype=complex))
    one = algebra.order_unit(CIRCLE1, 1)
    zf = write_element(tmp_path / "z.json", z)
    onef = write_element(tmp_path / "one.json", one)
    code = cli.main(["equiv", "--relation", "sim1", zf, onef,
                     "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["equivalent"] is False
    assert report["windings"] == [1, 0]


def test_equiv_domain_violation_gives_exit_2(tmp_path, capsys):
    v = algebra.order_unit(M2, 1).scale(0.5)
    vf = write_element(tmp_path / "v.json", v)
    assert cli.main(["equiv", "--relation", "mvn", vf, vf]) == 2
    capsys.readouterr()


def test_theta_command(tmp_path, capsys):
    rng = rand.stream(401, 0)
    u = rand.partial_unitary(rng, FD23, 1, ranks=[1, 2])
    z = algebra.zero(FD23, 1)
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps({"u": serialize.element_to_json(u),
                                "v": serialize.element_to_json(z)}))
    code = cli.main(["theta", str(pair), "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["k0_part"] == [1, 2]
    assert report["k1_part"] == []


def test_theta_of_zero_pair(tmp_path, capsys):
    z = algebra.zero(FD23, 1)
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps({"u": serialize.element_to_json(z),
                                "v": serialize.element_to_json(z)}))
    code = cli.main(["theta", str(pair), "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["k_class"] == [0, 0]
    assert report["k0_part"] == [0, 0]


def test_json_reports_are_byte_identical(tmp_path):
    spec = write_algebra(tmp_path / "alg.json", M2)
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        code = cli.main(["check-axioms", spec, "--trials", "5",
                         "--seed", "7", "--format", "json",
                         "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]

    outs = []
    for name in ("c.json", "d.json"):
        out = tmp_path / name
        assert cli.main(["kgroup", spec, "--which", "k",
                         "--format", "json", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
