import numpy as np
import pytest
from numpy.testing import assert_allclose

from dgreen.green import (
    GreenTable,
    GridFunction,
    MemoryBudgetError,
    apply,
    cell_average_indicator,
    evolve,
    green_direct,
    green_spectral,
    norms,
    sample_step,
    spectral_sweep,
)
from dgreen.stencil import Stencil, beam_warming, lax_wendroff


def delta():
    return GridFunction(min_index=0, values=(1.0,))


class TestGridFunction:
    def test_tails(self):
        u = GridFunction(2, (1.0, 2.0), left_tail=-1.0, right_tail=3.0)
        assert u.value_at(1) == -1.0
        assert u.value_at(2) == 1.0
        assert u.value_at(3) == 2.0
        assert u.value_at(4) == 3.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            GridFunction(0, ())


class TestApply:
    def test_single_step_is_stencil(self):
        s = lax_wendroff(0.75)
        u = apply(s, delta())
        assert u.min_index == s.min_offset
        assert_allclose(u.values, s.as_array(), atol=0)

    def test_convolution_identity(self):
        # (L_a u)_j = sum_l a_l u_{j-l} checked entrywise on a dense window
        s = beam_warming(1.5)
        u = GridFunction(-1, (0.5, -1.0, 2.0, 0.25))
        v = apply(s, u)
        for j in range(v.min_index - 2, v.max_index + 3):
            expected = sum(s.coefficient(l) * u.value_at(j - l)
                           for l in range(s.min_offset, s.max_offset + 1))
            assert v.value_at(j) == pytest.approx(expected, abs=1e-15)

    def test_constant_tails_propagate(self):
        s = lax_wendroff(0.5)
        u = GridFunction(0, (0.3,), left_tail=1.0, right_tail=2.0)
        v = apply(s, u)
        # conservative stencil maps constant tails to themselves
        assert v.left_tail == pytest.approx(1.0, abs=1e-15)
        assert v.right_tail == pytest.approx(2.0, abs=1e-15)


class TestGreenTables:
    def test_n1_is_stencil(self):
        s = lax_wendroff(0.75)
        g = green_direct(s, 1)
        assert g.min_offset == -1
        assert_allclose(g.values, s.as_array(), atol=0)

    def test_n2_explicit_self_convolution(self):
        s = lax_wendroff(0.5)
        g = green_direct(s, 2)
        a = s.as_array()
        assert_allclose(g.values, np.convolve(a, a), atol=1e-16)

    @pytest.mark.parametrize("make,lam", [(lax_wendroff, 0.75),
                                          (beam_warming, 1.5),
                                          (beam_warming, 0.5)])
    @pytest.mark.parametrize("n", (1, 2, 7, 50, 64))
    def test_direct_vs_spectral(self, make, lam, n):
        s = make(lam)
        gd = green_direct(s, n)
        gs = green_spectral(s, n)
        assert gd.min_offset == gs.min_offset
        assert len(gd.values) == len(gs.values)
        assert np.max(np.abs(gd.values - gs.values)) <= 1e-10

    def test_value_at_outside_support(self):
        g = green_direct(lax_wendroff(0.75), 3)
        assert g.value_at(10) == 0.0
        assert g.value_at(-10) == 0.0

    def test_pure_shift_spectral(self):
        g = green_spectral(beam_warming(2.0), 5)
        assert g.min_offset == 10
        assert_allclose(g.values, [1.0], atol=0)

    def test_conservation_direct(self):
        g = green_direct(beam_warming(1.5), 40)
        assert complex(g.values.sum()).real == pytest.approx(1.0, abs=1e-12)

    def test_evolve_delta_matches_green(self):
        s = lax_wendroff(0.75)
        g = green_direct(s, 9)
        u = evolve(s, delta(), 9)
        assert u.min_index == g.min_offset
        assert_allclose(u.values, g.values, atol=1e-15)

    def test_memory_budget_refusal(self):
        with pytest.raises(MemoryBudgetError):
            green_spectral(lax_wendroff(0.75), 100000, memory_budget_mb=1.0)

    def test_memory_budget_env(self, monkeypatch):
        monkeypatch.setenv("DG_MEMORY_BUDGET_MB", "0.001")
        with pytest.raises(MemoryBudgetError):
            green_spectral(lax_wendroff(0.75), 10000)


class TestSweep:
    def test_sweep_matches_individual_tables(self):
        s = lax_wendroff(0.75)
        sums, l1, l2, linf = spectral_sweep(s, 12)
        for n in (1, 5, 12):
            g = green_spectral(s, n)
            mags = np.abs(g.values)
            assert sums[n - 1] == pytest.approx(complex(g.values.sum()),
                                                abs=1e-13)
            assert l1[n - 1] == pytest.approx(mags.sum(), abs=1e-13)
            assert linf[n - 1] == pytest.approx(mags.max(), abs=1e-13)
        assert l2.shape == (12,)

    def test_sweep_conservation_and_contraction(self):
        sums, _, l2, _ = spectral_sweep(beam_warming(1.5), 300)
        assert np.max(np.abs(sums - 1.0)) <= 1e-11
        assert np.all(np.diff(l2) <= 1e-12)
        assert l2[0] <= 1.0 + 1e-12


class TestStepData:
    def test_cell_average_edges(self):
        assert cell_average_indicator(-2.0, -1.0, 0.5) == 0.0
        assert cell_average_indicator(-0.1, 0.1, 0.5) == 1.0
        # cell straddling the right edge of [-0.5, 0.5]
        assert cell_average_indicator(0.4, 0.6, 0.5) == pytest.approx(0.5)

    def test_sample_step_partition(self):
        u = sample_step(0.25, 0.5, -4, 4)
        # cell sums times dx recover the measure of [-0.5, 0.5]
        assert float(u.values.real.sum()) * 0.25 == pytest.approx(1.0)
        assert u.dx == 0.25
        assert u.left_tail == 0.0

    def test_norms_tuple(self):
        res = norms(np.asarray([3.0, -4.0]))
        assert res.l1 == 7.0
        assert res.l2 == 5.0
        assert res.linf == 4.0
        assert res.sum == pytest.approx(-1.0)

    def test_norms_accepts_table(self):
        g = green_direct(lax_wendroff(0.5), 4)
        assert norms(g).sum == pytest.approx(1.0, abs=1e-14)
