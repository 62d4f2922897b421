import math

import pytest

import qmod


def test_special_functions():
    assert qmod.hyp2f1(0.3, 0.7, 1.0, 0.9) == pytest.approx(1.5295042158423404085, rel=1e-13)
    assert qmod.elliptic_k(0.0) == pytest.approx(math.pi / 2)
    assert qmod.mu(0.5, 1 / math.sqrt(2)) == pytest.approx(math.pi / 2)
    assert qmod.inv_mu(0.5, math.pi) == pytest.approx(0.1715728752538099024, rel=1e-11)


def test_exact_moduli():
    assert qmod.bowman_modulus(1.1) == pytest.approx(0.3403135, abs=5e-8)
    assert qmod.circular_quad_modulus(0.3, 0.4) == pytest.approx(2.498368, abs=1e-6)
    assert qmod.parallelogram_modulus(1.0, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert abs(qmod.bowman_asymptotic(4.0) - qmod.bowman_modulus(4.0)) < 1e-5


def test_quad_construction():
    q = qmod.quad_from_corners((1, 1), (0, 1), (0, 0), (1, 0))
    assert len(q) == 4
    assert q.area == pytest.approx(1.0)
    assert list(q.corners) == [0, 1, 2, 3]
    assert len(qmod.circular_quad(0.5, 0.4, 8)) == 32
    with pytest.raises(qmod._core.GeometryError):
        qmod.trapezoid(1.0)
    with pytest.raises(qmod._core.DomainError):
        qmod.mu(0.7, 0.5)


def test_compute_modulus():
    r = qmod.compute_modulus(qmod.trapezoid(1.5), budget=5000)
    assert r.modulus == pytest.approx(0.7769434, abs=1e-3)
    assert r.dofs <= 5000
    assert r.reciprocal_defect < 1e-2

    opts = qmod.AdaptiveOptions()
    opts.budget = 1000
    sq = qmod.compute_modulus(qmod.quad_from_corners((1, 1), (0, 1), (0, 0), (1, 0)), opts)
    assert sq.modulus == pytest.approx(1.0, abs=1e-6)


def test_read_polygon(tmp_path):
    path = tmp_path / "square.txt"
    path.write_text("# square\n4 0 1 2 3\n1 1\n0 1\n0 0\n1 0\n")
    q = qmod.read_polygon(str(path))
    assert q.vertices[0] == (1.0, 1.0)
