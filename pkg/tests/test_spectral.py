import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dft_brute, idft_brute
from ringtraj.errors import InvalidInputError
from ringtraj.spectral import (
    FourierSeries,
    FourierTrajectory,
    Spectrum,
    dft,
    feasibility_check,
    fit_ring,
    frequency_order,
    harmonics_for_terms,
    idft,
    make_feasible,
    reconstruct,
    sample,
    to_fourier_trajectory,
    truncate,
    wrap_angle,
)


@pytest.mark.parametrize("Q", [1, 2, 3, 7, 16, 33])
def test_dft_matches_brute_force(rng, Q):
    s = rng.normal(size=Q)
    F = dft(s).coefficients
    assert np.allclose(F, dft_brute(s), atol=1e-9 * max(1, np.abs(s).sum()))
    assert np.allclose(idft(dft(s)), idft_brute(dft_brute(s)).real, atol=1e-9)


def test_dft_cosine_and_impulse():
    t = np.arange(8)
    F = dft(np.cos(2 * np.pi * t / 8)).coefficients
    expected = np.zeros(8, dtype=complex)
    expected[1] = expected[7] = 4
    assert np.allclose(F, expected, atol=1e-12)
    imp = np.zeros(5)
    imp[0] = 1
    assert np.allclose(dft(imp).coefficients, np.ones(5))


def test_dft_rejects_empty():
    with pytest.raises(InvalidInputError):
        dft([])
    with pytest.raises(InvalidInputError):
        dft(np.zeros((2, 2)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=300))
def test_round_trip(s):
    s = np.asarray(s)
    assert np.allclose(idft(dft(s)), s, atol=1e-9 * max(1.0, np.abs(s).max()))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=300))
def test_parseval(s):
    s = np.asarray(s)
    lhs = float((s**2).sum())
    rhs = float((np.abs(dft(s).coefficients) ** 2).sum()) / len(s)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, lhs)


def test_linearity(rng):
    a, b = rng.normal(size=(2, 40))
    lhs = dft(2.5 * a - 3 * b).coefficients
    rhs = 2.5 * dft(a).coefficients - 3 * dft(b).coefficients
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_idft_guard_on_tampered_spectrum():
    sp = dft(np.arange(6.0))
    F = sp.coefficients.copy()
    F[1] += 1j  # breaks symmetry: guard does not apply, real part returned
    assert idft(Spectrum(F)).shape == (6,)


def test_frequency_order():
    assert frequency_order(1).tolist() == [0]
    assert frequency_order(4).tolist() == [0, 1, 3, 2]
    assert frequency_order(5).tolist() == [0, 1, 4, 2, 3]
    for Q in range(1, 40):
        assert sorted(frequency_order(Q).tolist()) == list(range(Q))


def test_truncate_full_is_identity(rng):
    s = rng.normal(size=17)
    assert np.allclose(reconstruct(s, 17), s, atol=1e-12)
    with pytest.raises(InvalidInputError):
        truncate(dft(s), 0)
    with pytest.raises(InvalidInputError):
        truncate(dft(s), 18)


def test_truncate_one_term_is_mean(rng):
    s = rng.normal(size=23)
    r = reconstruct(s, 1)
    assert np.allclose(r, s.mean())
    assert ((s - r) ** 2).sum() == pytest.approx(((s - s.mean()) ** 2).sum(), rel=1e-12)


def test_three_term_cosine_exact():
    Q = 32
    t = np.arange(Q)
    s = 3 + 2 * np.cos(2 * np.pi * t / Q)
    assert np.allclose(reconstruct(s, 3), s, atol=1e-12)
    assert not np.allclose(reconstruct(s, 2), s, atol=1e-3)


@pytest.mark.parametrize("Q", [9, 10, 64])
def test_series_matches_truncated_idft(rng, Q):
    xyz = rng.normal(size=(3, Q))
    spectra = [dft(v) for v in xyz]
    T = 7.5
    for H in range(0, (Q - 1) // 2 + 1, 3):
        tr = to_fourier_trajectory(spectra, T, H)
        got = tr.position(np.arange(Q) * T / Q)
        for axis in range(3):
            ref = idft(truncate(spectra[axis], 2 * H + 1))
            assert np.allclose(got[:, axis], ref, atol=1e-10)
        assert tr.sample_count == Q and tr.terms == 2 * H + 1
    with pytest.raises(InvalidInputError):
        to_fourier_trajectory(spectra, T, (Q - 1) // 2 + 1)


def test_harmonics_for_terms():
    assert harmonics_for_terms(1, 100) == 0
    assert harmonics_for_terms(21, 100) == 10
    assert harmonics_for_terms(22, 100) == 10
    assert harmonics_for_terms(500, 100) == 49


def _random_traj(rng, N, T=None, climb=0.0):
    T = T if T is not None else float(rng.uniform(1, 50))
    return FourierTrajectory(
        T=T,
        A=rng.normal(size=3),
        Ak=rng.normal(size=(N, 3)),
        Bk=rng.normal(size=(N, 3)),
        climb=climb,
    )


def test_periodicity(rng):
    tr = _random_traj(rng, 6)
    t = rng.uniform(0, tr.T, size=20)
    assert np.allclose(tr.position(t), tr.position(t + tr.T), atol=1e-9)
    assert np.allclose(tr.velocity(t), tr.velocity(t + 3 * tr.T), atol=1e-8)


def test_climb_advances_each_period(rng):
    tr = _random_traj(rng, 3, climb=2.5)
    t = rng.uniform(0, tr.T, size=10)
    d = tr.position(t + tr.T) - tr.position(t)
    assert np.allclose(d[:, :2], 0, atol=1e-9)
    assert np.allclose(d[:, 2], 2.5)


def test_velocity_matches_finite_difference(rng):
    for _ in range(10):
        tr = _random_traj(rng, int(rng.integers(1, 21)), climb=float(rng.normal()))
        t = rng.uniform(0, tr.T, size=5)
        h = 1e-6 * tr.T
        fd = (tr.position(t + h) - tr.position(t - h)) / (2 * h)
        v = tr.velocity(t)
        assert np.linalg.norm(fd - v) <= 1e-6 * max(1.0, np.linalg.norm(v))
        fd2 = (tr.velocity(t + h) - tr.velocity(t - h)) / (2 * h)
        assert np.allclose(fd2, tr.acceleration(t), rtol=1e-5, atol=1e-5 * np.abs(fd2).max())


@pytest.mark.parametrize("M", [5, 13, 64, 1001])
def test_uniform_samples_match_direct(rng, M):
    tr = _random_traj(rng, 6, climb=1.3)
    t = np.arange(M) * tr.T / M
    for order in range(3):
        assert np.allclose(tr.uniform_samples(M, order), tr.derivative(t, order), atol=1e-9)


def test_single_harmonic_feasibility():
    R, T = 5.0, 10.0
    tr = FourierTrajectory(T=T, A=np.zeros(3), Ak=[[R, 0, 0]], Bk=[[0, R, 0]])
    w = 2 * math.pi / T
    rep = feasibility_check(tr, a_max=100, v_max=100)
    assert rep.max_speed == pytest.approx(w * R, rel=1e-12)
    assert rep.max_acceleration == pytest.approx(w * w * R, rel=1e-12)
    assert rep.feasible
    assert not feasibility_check(tr, a_max=w * w * R * 0.99, v_max=100).feasible
    fixed, rep2 = make_feasible(tr, a_max=w * w * R * 0.5, v_max=100)
    assert rep2.feasible and fixed.T == pytest.approx(T * math.sqrt(2), rel=1e-5)
    assert fixed.T >= T * math.sqrt(2)


def test_scaling_law(rng):
    tr = _random_traj(rng, 8, T=4.0)
    r1 = feasibility_check(tr, 1, 1)
    r2 = feasibility_check(tr.with_period(8.0), 1, 1)
    assert r2.max_acceleration == pytest.approx(r1.max_acceleration / 4, rel=1e-2)
    assert r2.max_speed == pytest.approx(r1.max_speed / 2, rel=1e-2)


def test_analytic_bounds_dominate_samples(rng):
    for _ in range(20):
        tr = _random_traj(rng, int(rng.integers(1, 15)), climb=float(rng.normal()))
        rep = feasibility_check(tr, 1, 1)
        assert np.all(rep.max_velocity_axis <= rep.velocity_bound * (1 + 1e-9))
        assert np.all(rep.max_acceleration_axis <= rep.acceleration_bound * (1 + 1e-9))


def test_make_feasible_never_shrinks(rng):
    tr = _random_traj(rng, 2, T=1000.0)
    out, rep = make_feasible(tr, 10, 10)
    assert out.T == 1000.0 and rep.feasible


def test_fit_ring_linear_z():
    Q, T = 100, 20.0
    a = 2 * np.pi * np.arange(Q) / Q
    zs = 4 + 3 * np.arange(Q) / Q
    tr = fit_ring(3 * np.cos(a), 3 * np.sin(a), zs, T, terms=21)
    p = tr.position(np.arange(Q) * T / Q)
    assert np.allclose(p[:, 0], 3 * np.cos(a), atol=1e-10)
    assert np.allclose(p[:, 2], zs, atol=1e-12)
    assert tr.climb == pytest.approx(3.0)
    assert tr.N == 10 and tr.terms == 21


def test_fit_ring_mirrored_z():
    Q, T = 64, 10.0
    a = 2 * np.pi * np.arange(Q) / Q
    zs = 2 + 0.5 * np.arange(Q) / Q
    tr = fit_ring(np.cos(a), np.sin(a), zs, T, terms=41, z_mode="fourier-mirrored")
    assert tr.z_mirror is not None and tr.z_mirror.period == 2 * T
    z = tr.position(np.arange(Q) * T / Q)[:, 2]
    assert np.max(np.abs(z - zs)) < 0.02
    # mirrored z is smooth and periodic over 2T
    assert tr.position(0.3)[2] == pytest.approx(tr.position(0.3 + 2 * T)[2])
    assert tr.with_period(5.0).z_mirror.period == 10.0


def test_fit_ring_errors():
    with pytest.raises(InvalidInputError):
        fit_ring([0, 1], [0, 1], [0, 1], 1.0, 3)
    with pytest.raises(InvalidInputError):
        fit_ring([0, 1, 2], [0, 1, 2], [0, 1, 2], 1.0, 3, z_mode="cubic")


def test_dc_only_trajectory():
    tr = fit_ring(np.full(10, 2.0), np.full(10, 3.0), np.full(10, 1.0), 5.0, terms=1)
    assert tr.N == 0
    assert np.allclose(tr.position([0.0, 1.0]), [[2, 3, 1], [2, 3, 1]])
    assert feasibility_check(tr, 1, 1).max_speed == 0


def test_yaw_modes():
    tr = FourierTrajectory(T=4.0, A=[1, 1, 0], Ak=[[1, 0, 0]], Bk=[[0, 1, 0]], centroid=(1.0, 1.0))
    # at t=0 the vehicle sits east of the centroid and looks west
    assert tr.yaw(0.0) == pytest.approx(math.pi)
    tang = FourierTrajectory(T=4.0, A=[0, 0, 0], Ak=[[1, 0, 0]], Bk=[[0, 1, 0]], yaw_mode="tangent")
    assert tang.yaw(0.0) == pytest.approx(math.pi / 2)
    fixed = FourierTrajectory(T=4.0, A=[0, 0, 0], Ak=[[1, 0, 0]], Bk=[[0, 1, 0]], yaw_mode="fixed", fixed_yaw=-3 * math.pi)
    assert fixed.yaw(1.0) == pytest.approx(math.pi)


def test_wrap_angle():
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_sample():
    tr = FourierTrajectory(T=4.0, A=[0, 0, 0], Ak=[[1, 0, 0]], Bk=[[0, 1, 0]])
    s = sample(tr, 1.0)
    assert np.allclose(s.position, [0, 1, 0], atol=1e-12)
    assert np.allclose(s.velocity, [-math.pi / 2, 0, 0], atol=1e-12)
    with pytest.raises(InvalidInputError):
        sample(tr, -1.0)


def test_json_round_trip(rng):
    import json

    Q, T = 40, 6.0
    a = 2 * np.pi * np.arange(Q) / Q
    for mode in ("linear", "fourier-mirrored"):
        tr = fit_ring(np.cos(a), np.sin(a), np.arange(Q) / Q, T, 11, z_mode=mode, centroid=(0.5, 0.5))
        back = FourierTrajectory.from_dict(json.loads(json.dumps(tr.to_dict())))
        t = rng.uniform(0, 2 * T, 30)
        assert np.array_equal(back.position(t), tr.position(t))
        assert np.array_equal(back.yaw(t), tr.yaw(t))


def test_from_dict_rejects_gaps():
    d = FourierTrajectory(T=1.0, A=[0, 0, 0], Ak=np.ones((2, 3)), Bk=np.ones((2, 3))).to_dict()
    d["harmonics"][1]["k"] = 3
    with pytest.raises(InvalidInputError):
        FourierTrajectory.from_dict(d)
    with pytest.raises(InvalidInputError):
        FourierTrajectory.from_dict({"A": [0, 0, 0]})


def test_invalid_construction():
    with pytest.raises(InvalidInputError):
        FourierTrajectory(T=0.0, A=[0, 0, 0], Ak=[], Bk=[])
    with pytest.raises(InvalidInputError):
        FourierTrajectory(T=1.0, A=[0, 0, 0], Ak=np.ones((2, 3)), Bk=np.ones((1, 3)))


def test_fourier_series_derivatives():
    fs = FourierSeries(period=2.0, a0=1.0, a=np.array([0.5]), b=np.array([0.25]))
    t = np.linspace(0, 2, 7)
    w = math.pi
    assert np.allclose(fs(t), 1 + 0.5 * np.cos(w * t) + 0.25 * np.sin(w * t))
    assert np.allclose(fs(t, 1), w * (-0.5 * np.sin(w * t) + 0.25 * np.cos(w * t)))
    with pytest.raises(ValueError):
        fs(t, 3)
