import math
from dataclasses import replace

import numpy as np
import pytest

from bryantsurf.bianchi_calo import BCData, envelope_at, horosphere_lift
from bryantsurf.curvature import (
    EnvelopeDerivatives,
    Metric2,
    brioschi_curvature,
    brioschi_richardson,
    cayley_hamilton_fit,
    cayley_hamilton_residual,
    conformal_factor_residual,
    envelope_stencil,
    fundamental_forms,
    induced_metric_s,
    mean_gauss,
    metric_stencil,
    node_report,
    rodrigues_offdiag,
    second_form_asymmetry,
    sigma_wedge,
    third_form,
    weingarten_residual,
)
from bryantsurf.errors import NonImmersed, StencilDegenerate
from bryantsurf.minkowski import E1, E2, O

IDENTITY = Metric2(1.0, 0.0, 1.0)


def test_synthetic_rodrigues_frame():
    d = EnvelopeDerivatives(O, E1, E2, E1 * -2.0, E2 * -3.0)
    I, II = fundamental_forms(d)
    assert I == IDENTITY
    assert II == Metric2(2.0, 0.0, 3.0)
    assert second_form_asymmetry(d) == 0


def test_degenerate_first_form():
    with pytest.raises(NonImmersed):
        fundamental_forms(EnvelopeDerivatives(O, E1, E1, E1, E2))


def test_mean_gauss_examples():
    c = mean_gauss(IDENTITY, Metric2(2.0, 0.0, 3.0))
    assert (c.H, c.K) == (2.5, 6.0)
    assert {c.k1, c.k2} == {2.0, 3.0}
    z = mean_gauss(IDENTITY, Metric2(0.0, 0.0, 0.0))
    assert (z.H, z.K) == (0.0, 0.0)


def test_umbilic_clamp():
    I = Metric2(2.0, 0.3, 1.1)
    c = mean_gauss(I, Metric2(*(3.0 * x for x in I)))
    assert c.k1 == c.k2 == pytest.approx(3.0, abs=1e-12)
    assert c.H == pytest.approx(3.0) and c.K == pytest.approx(9.0)


def test_mean_gauss_matches_eigenvalues():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.normal(size=(2, 2))
        Im = a @ a.T + 0.1 * np.eye(2)
        b = rng.normal(size=(2, 2))
        IIm = b + b.T
        I, II = Metric2(Im[0, 0], Im[0, 1], Im[1, 1]), Metric2(IIm[0, 0], IIm[0, 1], IIm[1, 1])
        ev = np.sort(np.linalg.eigvals(np.linalg.solve(Im, IIm)).real)
        c = mean_gauss(I, II)
        assert c.H == pytest.approx(ev.sum() / 2, abs=1e-10 * (1 + abs(ev).max()))
        assert c.K == pytest.approx(ev.prod(), abs=1e-10 * (1 + ev.prod() ** 2) ** 0.5)
        assert sorted([c.k2, c.k1]) == pytest.approx(ev, abs=1e-8)


def test_weingarten_examples():
    assert weingarten_residual(1.0, 17.0, -1.0) == 0
    assert weingarten_residual(-4.0, 1.0, 0.0) == 0
    assert weingarten_residual(2.0, 3.0, 1.0) == 2


def test_rodrigues_examples():
    assert rodrigues_offdiag(Metric2(2.0, 0.0, 5.0), Metric2(1.0, 0.0, 7.0)) == 0
    I = Metric2(2.0, 0.4, 1.0)
    assert rodrigues_offdiag(I, Metric2(*(1.5 * x for x in I))) == pytest.approx(0, abs=1e-15)
    assert rodrigues_offdiag(IDENTITY, Metric2(1.0, 1.0, 1.0)) > 0.1


def test_induced_metric_examples():
    for h in ("z", "z^3 + z", "exp(z)"):
        for mu in (-1.0, 0.0, 1.0, 2.0):
            chk = induced_metric_s(horosphere_lift(0, BCData.from_text(h, mu)))
            assert chk.target == 4
            assert chk.metric.E == pytest.approx(4, abs=1e-9)
    m = induced_metric_s(horosphere_lift(0, BCData.from_text("z", -1))).metric
    assert m == pytest.approx((4, 0, 4), abs=1e-9)
    flat = BCData.from_text("z", 0.0)
    for z in (0.3, -0.7 + 0.2j, 2j):
        assert induced_metric_s(horosphere_lift(z, flat)).metric == pytest.approx((4, 0, 4), abs=1e-9)


def test_conformal_factor():
    smp = horosphere_lift(0.45 + 0.2j, BCData.from_text("z^2", 1))
    assert conformal_factor_residual(smp) <= 1e-9
    assert conformal_factor_residual(replace(smp, r=2 * smp.r)) == pytest.approx(3, rel=1e-9)
    smp0 = horosphere_lift(0, BCData.from_text("z", 0.0))
    assert smp0.r == 0.5
    assert conformal_factor_residual(smp0) == 0


def test_brioschi_constant_metric():
    stencil = [[Metric2(4.0, 0.0, 4.0)] * 3 for _ in range(3)]
    assert brioschi_curvature(stencil, 1e-3) == 0
    with pytest.raises(StencilDegenerate):
        brioschi_curvature(stencil[:2], 1e-3)


def test_brioschi_on_exact_conformal_metric():
    mu, h = -1.0, 1e-3
    lam = lambda z: 4.0 / (1 - mu * abs(z) ** 2) ** 2
    stencil = [[Metric2(lam(complex(i * h, j * h)), 0.0, lam(complex(i * h, j * h))) for j in (-1, 0, 1)] for i in (-1, 0, 1)]
    assert brioschi_curvature(stencil, h) == pytest.approx(-mu, abs=1e-5)


def test_brioschi_on_pipeline_metric():
    data = BCData.from_text("z^3 + z", 2.0)
    z = 0.25 + 0.2j
    assert brioschi_curvature(metric_stencil(data, z), 1e-3) == pytest.approx(-2.0, abs=1e-3)
    assert brioschi_richardson(data, z) == pytest.approx(-2.0, abs=1e-5)


def test_wedge_vanishes_and_detects_perturbations():
    data = BCData.from_text("z^2", 1.0)
    z = 0.45 + 0.42j
    smp, env = envelope_at(z, data)
    st = envelope_stencil(data, z, center=env)
    assert sigma_wedge(smp, st, data.mu).norm <= 1e-6
    assert sigma_wedge(smp, st, data.mu + 1).norm > 1e-3
    bad = replace(data, r_scale=1.01)
    smp_b, env_b = envelope_at(z, bad)
    assert sigma_wedge(smp_b, envelope_stencil(bad, z, center=env_b), data.mu).norm > 1e-3


def test_cayley_hamilton_fit_matches_closed_form():
    for h, mu, z in [("z^2", 1.0, 0.45 + 0.42j), ("exp(z)", -1.0, 0.1 - 0.2j), ("z^3 + z", 2.0, 0.25 + 0.2j)]:
        d = envelope_stencil(BCData.from_text(h, mu), z).derivatives()
        I, II = fundamental_forms(d)
        III = third_form(d)
        c = mean_gauss(I, II)
        H, K = cayley_hamilton_fit(I, II, III)
        assert H == pytest.approx(c.H, abs=1e-8 * (1 + abs(c.H)))
        assert K == pytest.approx(c.K, abs=1e-8 * (1 + abs(c.K)))
        assert cayley_hamilton_residual(I, II, III, c.H, c.K) <= 1e-6


def test_node_report_statuses():
    data = BCData.from_text("z^2", 1.0)
    rep = node_report(data, 0.45 + 0.42j)
    assert rep.ok and rep.weingarten_residual < 1e-5
    assert node_report(data, 1.0).status == "DegenerateSphere"
    assert node_report(BCData.from_text("1/z", 1.0), 0).status == "PoleAtPoint"
    assert node_report(BCData.from_text("z", -1.0), 0.3).status == "NonImmersed"
    assert math.isnan(node_report(data, 1.0).H)


def test_envelope_stencil_missing_neighbour():
    data = BCData.from_text("z^2", 1.0)
    # the +x neighbour lands on the zero-radius circle |z| = 1
    st = envelope_stencil(data, 1.0 - 1e-3, step=1e-3)
    assert st.xp is None and st.xm is not None
    with pytest.raises(StencilDegenerate):
        st.derivatives()
    assert node_report(data, 1.0 - 1e-3, fd_step=1e-3).status == "StencilDegenerate"
