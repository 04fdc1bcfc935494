import numpy as np
import pytest

from emdof import (
    ChannelProblem,
    InvalidArgumentError,
    NoChannelError,
    ResistancePair,
    capacity_vs_snr,
    channel_efficiencies,
    efficiency,
    radiation_modes,
    waterfill,
)

try:
    from hypothesis import given, settings
    from hypothesis import strategies as st

    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False


def waterlevel_oracle(nu, gamma, tol=1e-13):
    """Independent solve: bisection on the water level."""
    nu = np.asarray(nu, dtype=float)
    inv = np.where(nu > 0, 1.0 / (gamma * np.maximum(nu, 1e-300)), np.inf)

    def total(mu):
        return np.sum(np.maximum(mu - inv, 0.0))

    lo, hi = 0.0, np.min(inv) + 1.0
    while total(hi) < 1.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    mu = 0.5 * (lo + hi)
    return np.maximum(mu - inv, 0.0)


def grid_search_oracle(nu, gamma, levels=40):
    """Zooming grid search on the water level."""
    nu = np.asarray(nu, dtype=float)
    inv = np.where(nu > 0, 1.0 / (gamma * np.maximum(nu, 1e-300)), np.inf)
    lo, hi = 0.0, np.min(inv) + 2.0

    def total(mu):
        return np.sum(np.maximum(mu - inv, 0.0))

    while total(hi) < 1.0:
        hi *= 2.0
    for _ in range(levels):
        grid = np.linspace(lo, hi, 64)
        totals = np.array([total(m) for m in grid])
        idx = int(np.searchsorted(totals, 1.0))
        lo = grid[max(idx - 1, 0)]
        hi = grid[min(idx, 63)]
    mu = 0.5 * (lo + hi)
    return np.maximum(mu - inv, 0.0)


class TestWaterfill:
    def test_single_mode(self):
        alloc = waterfill(ChannelProblem(np.array([1.0]), 10.0))
        assert alloc.powers[0] == pytest.approx(1.0)
        assert alloc.capacity_bits == pytest.approx(np.log2(11.0))
        assert alloc.active_count == 1

    def test_symmetric_pair(self):
        for gamma in (0.1, 1.0, 42.0):
            alloc = waterfill(ChannelProblem(np.array([1.0, 1.0]), gamma))
            assert np.allclose(alloc.powers, [0.5, 0.5])

    def test_grid_oracle_agreement(self):
        nu = np.array([1.0, 0.75, 0.5, 0.1, 0.01])
        alloc = waterfill(ChannelProblem(nu, 10.0))
        oracle = grid_search_oracle(nu, 10.0)
        assert np.all(np.abs(alloc.powers - oracle) < 1e-6)
        assert alloc.powers[-1] == 0.0  # weakest mode unused at this SNR

    def test_bisection_oracle_random(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 7))
            nu = rng.uniform(0.01, 1.0, n)
            gamma = float(rng.uniform(0.1, 100.0))
            alloc = waterfill(ChannelProblem(nu, gamma))
            oracle = waterlevel_oracle(nu, gamma)
            assert np.all(np.abs(alloc.powers - oracle) < 1e-9)

    def test_kkt_conditions(self):
        nu = np.array([1.0, 0.75, 0.5, 0.1, 0.01])
        for gamma in (5.0, 10.0, 20.0):
            alloc = waterfill(ChannelProblem(nu, gamma))
            active = alloc.powers > 0
            levels = alloc.powers[active] + 1.0 / (gamma * nu[active])
            assert np.ptp(levels) <= 1e-9 * alloc.water_level
            inactive = ~active
            assert np.all(
                alloc.water_level <= 1.0 / (gamma * nu[inactive]) + 1e-12
            )

    def test_dominance_over_random_allocations(self):
        rng = np.random.default_rng(1)
        nu = np.array([1.0, 0.75, 0.5, 0.1, 0.01])
        for gamma in (1.0, 10.0, 100.0):
            best = waterfill(ChannelProblem(nu, gamma)).capacity_bits
            p = rng.dirichlet(np.ones(nu.size), size=20000)
            caps = np.sum(np.log2(1.0 + gamma * nu * p), axis=1)
            assert best >= caps.max() - 1e-12

    def test_label_equivariance(self):
        rng = np.random.default_rng(2)
        nu = np.array([0.9, 0.3, 0.6, 0.05])
        gamma = 7.0
        base = waterfill(ChannelProblem(nu, gamma)).powers
        for _ in range(5):
            perm = rng.permutation(nu.size)
            permuted = waterfill(ChannelProblem(nu[perm], gamma)).powers
            assert np.allclose(permuted, base[perm])

    def test_all_zero_rejected(self):
        with pytest.raises(NoChannelError):
            waterfill(ChannelProblem(np.zeros(3), 1.0))

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            ChannelProblem(np.array([1.5]), 1.0)
        with pytest.raises(InvalidArgumentError):
            ChannelProblem(np.array([0.5]), 0.0)

    if HAVE_HYPOTHESIS:

        @given(
            st.lists(
                st.floats(min_value=0.001, max_value=1.0), min_size=1, max_size=8
            ),
            st.floats(min_value=0.01, max_value=1000.0),
        )
        @settings(max_examples=100, deadline=None)
        def test_waterfill_properties(self, nu_list, gamma):
            nu = np.array(nu_list)
            alloc = waterfill(ChannelProblem(nu, gamma))
            assert abs(alloc.powers.sum() - 1.0) <= 1e-9
            assert np.all(alloc.powers >= 0)
            oracle = waterlevel_oracle(nu, gamma)
            assert np.all(np.abs(alloc.powers - oracle) < 1e-8)


class TestCapacityVsSnr:
    def test_low_snr_single_mode(self):
        table = capacity_vs_snr(np.array([1.0, 0.5]), np.array([1e-4]))
        assert table[0, 2] == 1

    def test_high_snr_all_modes(self):
        table = capacity_vs_snr(np.array([1.0, 0.5, 0.2]), np.array([1e6]))
        assert table[0, 2] == 3

    def test_monotonicity(self):
        grid = np.logspace(-2, 3, 12)
        table = capacity_vs_snr(np.array([1.0, 0.6, 0.3, 0.05]), grid)
        assert np.all(np.diff(table[:, 1]) > 0)
        assert np.all(np.diff(table[:, 2]) >= 0)

    def test_grid_validation(self):
        with pytest.raises(InvalidArgumentError):
            capacity_vs_snr(np.array([0.5]), np.array([2.0, 1.0]))
        with pytest.raises(InvalidArgumentError):
            capacity_vs_snr(np.array([0.5]), np.array([-1.0]))


class TestChannelEfficiencies:
    def test_identity_pair(self):
        pair = ResistancePair(np.eye(4), np.eye(4))
        assert np.allclose(channel_efficiencies(pair), 0.5)

    def test_diagonal_pair(self):
        pair = ResistancePair(np.diag([3.0, 1.0]), np.eye(2))
        assert np.allclose(channel_efficiencies(pair), [0.75, 0.5])

    def test_consistency_with_radiation_modes(self):
        rng = np.random.default_rng(4)
        n = 10
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        pair = ResistancePair(a @ a.conj().T, b @ b.conj().T + np.eye(n) * 0.1)
        spec, _ = radiation_modes(pair)
        nu = channel_efficiencies(pair)
        assert np.allclose(nu, efficiency(spec.eigenvalues), atol=1e-10)
