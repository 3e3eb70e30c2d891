import math

import numpy as np
import pytest

from cavity_loader import entangled_loading as el
from cavity_loader import lambda_memory as lm
from cavity_loader import numerics, pulses, two_level
from cavity_loader.entangled_loading import PolarizationQubit, SpdcParams
from cavity_loader.two_level import TwoLevelParams


SP = SpdcParams(T=2.0, T0=2.0)
PK = TwoLevelParams(g=1.0, kappa=1.0)


@pytest.fixture(scope="module")
def biphoton():
    return el.spdc_biphoton(SP)


def test_qubit_norm_enforced():
    with pytest.raises(ValueError):
        PolarizationQubit(1.0, 1.0)
    PolarizationQubit(1 / math.sqrt(2), 1j / math.sqrt(2))


def test_v_level_single_leg():
    pulse = pulses.make_sech(2.0, 2.0)
    q = PolarizationQubit(1.0, 0.0)
    p = el.v_level_load(q, PK, pulse, 3.0)
    _, ce = two_level.amplitude_closed_form(PK, pulse, 3.0)
    assert p == pytest.approx(abs(ce) ** 2, abs=1e-12)


def test_v_level_polarization_invariance():
    pulse = pulses.make_sech(2.0, 2.0)
    ref = el.v_level_load(PolarizationQubit(1.0, 0.0), PK, pulse, 3.0)
    rng = np.random.default_rng(5)
    for _ in range(25):
        z = rng.normal(size=4)
        alpha = complex(z[0], z[1])
        beta = complex(z[2], z[3])
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        q = PolarizationQubit(alpha / norm, beta / norm)
        assert el.v_level_load(q, PK, pulse, 3.0) == pytest.approx(ref, abs=1e-12)


def test_v_level_rejects_asymmetric_legs():
    pulse = pulses.make_sech(2.0, 2.0)
    other = TwoLevelParams(g=1.5, kappa=1.0)
    with pytest.raises(ValueError):
        el.v_level_load(PolarizationQubit(1.0, 0.0), PK, pulse, 3.0, leg_minus=other)


def test_spdc_symmetric(biphoton):
    rng = np.random.default_rng(9)
    ts = rng.uniform(0.0, 12.0, size=(40, 2))
    a = biphoton.joint(ts[:, 0], ts[:, 1])
    b = biphoton.joint(ts[:, 1], ts[:, 0])
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_spdc_box_support(biphoton):
    assert biphoton.joint(5.0, 5.0 + SP.T0 + 0.01) == 0.0
    assert biphoton.joint(9.0, 9.0 - SP.T0 - 0.01) == 0.0
    assert abs(biphoton.joint(6.0, 6.5)) > 0.0


def test_spdc_norm_via_quad2(biphoton):
    x0, x1, y0, y1 = biphoton.support
    spec = numerics.QuadratureSpec(rtol=1e-8, atol=1e-12, max_subdivisions=2000)

    def f(tau2):
        lo = max(x0, tau2 - SP.T0)
        hi = min(x1, tau2 + SP.T0)
        if hi <= lo:
            return 0.0 + 0.0j
        return numerics.quad1(
            lambda tau: abs(biphoton.joint(tau, tau2)) ** 2 + 0.0j, (lo, hi), spec
        )

    norm2 = numerics.quad1(f, (y0, y1), spec)
    assert norm2.real == pytest.approx(1.0, abs=1e-6)


def test_cee_factorizes_for_separable_input():
    p = TwoLevelParams(g=1.3, kappa=1.0, gamma=0.1, delta=0.4)
    p1 = pulses.make_sech(2.0, 2.0)
    p2 = pulses.make_named("exp_decaying", 1.5, 0.5)
    b = el.separable_biphoton(p1, p2)
    for t in (1.5, 3.0, 6.0):
        cee = el.c_ee(p, b, t, method="quad2")
        _, ce1 = two_level.amplitude_closed_form(p, p1, t)
        _, ce2 = two_level.amplitude_closed_form(p, p2, t)
        assert abs(cee - ce1 * ce2) < 1e-8


def test_cee_antisymmetric_vanishes():
    p1 = pulses.make_sech(2.0, 2.0)
    p2 = pulses.make_named("rectangular", 2.0, 2.0)

    def anti(tau, tau2):
        return (
            p1.amplitude(tau) * p2.amplitude(tau2)
            - p1.amplitude(tau2) * p2.amplitude(tau)
        ) / math.sqrt(2.0)

    lo = min(p1.support[0], p2.support[0])
    hi = max(p1.support[1], p2.support[1])
    b = el.BiphotonAmplitude(joint=anti, support=(lo, hi, lo, hi), norm_constant=1.0)
    assert abs(el.c_ee(PK, b, 3.0, method="quad2")) <= 1e-10


def test_cee_symmetrization_identity():
    # c_ee from an asymmetric separable amplitude equals c_ee from its
    # symmetrized version
    p1 = pulses.make_sech(2.0, 2.0)
    p2 = pulses.make_named("exp_decaying", 1.0, 1.0)

    def raw(tau, tau2):
        return p1.amplitude(tau) * p2.amplitude(tau2)

    def symmetrized(tau, tau2):
        return 0.5 * (raw(tau, tau2) + raw(tau2, tau))

    lo = min(p1.support[0], p2.support[0])
    hi = max(p1.support[1], p2.support[1])
    b_raw = el.BiphotonAmplitude(joint=raw, support=(lo, hi, lo, hi), norm_constant=1.0)
    b_sym = el.BiphotonAmplitude(
        joint=symmetrized, support=(lo, hi, lo, hi), norm_constant=1.0
    )
    spec = numerics.QuadratureSpec(rtol=1e-10, atol=1e-14, max_subdivisions=2000)
    a = el.c_ee(PK, b_raw, 3.5, method="quad2", spec=spec)
    b = el.c_ee(PK, b_sym, 3.5, method="quad2", spec=spec)
    assert abs(a - b) < 1e-10


def test_cee_fast_path_matches_quad2(biphoton):
    for t in (4.0, 7.0, 9.5):
        fast = el.c_ee(PK, biphoton, t, method="reduced")
        slow = el.c_ee(PK, biphoton, t, method="quad2")
        assert abs(fast - slow) < 1e-8


def test_cee_narrow_window_continuity():
    # as the phase-matching window closes, the joint amplitude approaches a
    # time-correlated ridge and |c_ee|^2 scales linearly with the window;
    # the ridge-normalized value converges smoothly
    vals = []
    for t0w in (0.05, 0.025):
        b = el.spdc_biphoton(SpdcParams(T=2.0, T0=t0w))
        _, p = el.peak_joint_loading(PK, b, horizon=b.support[1] + 2.0)
        vals.append(p / t0w)
    assert abs(vals[0] - vals[1]) / vals[1] < 0.02


def test_cee_bounded(biphoton):
    grid = np.linspace(0.0, biphoton.support[1] + 2.0, 300)
    traj = el.joint_trajectory(PK, biphoton, grid)
    pop = traj.population("c_ee")
    assert np.all(pop >= 0.0)
    assert np.all(pop <= 1.0 + 1e-6)


def test_mitnu_zero_control():
    memory = lm.LambdaParams(g_c=5.0, kappa=1.0, delta1=50.0, delta2=50.0, omega=0.0)
    assert el.mitnu_load(memory, SP, 7.0) == 0.0


def test_mitnu_reduces_to_effective_two_level(biphoton):
    memory = lm.LambdaParams(g_c=5.0, kappa=1.0, delta1=50.0, delta2=50.0, omega=5.0)
    t_load = 7.0
    p = el.mitnu_load(memory, SP, t_load)
    ref = abs(el.c_ee(TwoLevelParams(g=0.5, kappa=1.0), biphoton, t_load)) ** 2
    assert p == pytest.approx(ref, abs=1e-12)


def test_mitnu_rejects_asymmetric_memories():
    m1 = lm.LambdaParams(g_c=5.0, kappa=1.0, delta1=50.0, delta2=50.0, omega=5.0)
    m2 = lm.LambdaParams(g_c=4.0, kappa=1.0, delta1=50.0, delta2=50.0, omega=5.0)
    with pytest.raises(ValueError):
        el.mitnu_load(m1, SP, 7.0, memory_idler=m2)


def test_spdc_params_validation():
    with pytest.raises(ValueError):
        SpdcParams(T=0.0, T0=1.0)
    with pytest.raises(ValueError):
        SpdcParams(T=1.0, T0=-1.0)
