"""Equilibrium finders: closed forms, polynomials, residuals and flags."""
import math

import numpy as np
import pytest

from bcdyn import DomainError, SystemState, residual_norm
from bcdyn.equilibria import (
    CONFIRM_TOL,
    coexisting,
    dead_type1,
    dead_type2,
    drug_level,
    estrogen_level,
    find_all,
    immune_clearance_rate,
    reduced_polynomials,
    tumor_free,
)
from bcdyn.numerics import Polynomial, poly_roots

from conftest import random_params


class TestClosedForms:
    def test_estrogen_blockade(self, base_params):
        # p_M below m keeps the immune/drug subsystem dissipative once the
        # estrogen suppression term vanishes at k = 1.
        pm = base_params.replace(k=1.0, p_M=0.05)
        assert estrogen_level(pm) == 0.0
        cands = tumor_free(pm)
        assert cands, "blockade scenario should admit a tumor-free point"
        for eq in cands:
            assert eq.point.N == pytest.approx(pm.a1 / pm.b1, rel=1e-12)
            assert eq.point.E == 0.0
            assert eq.confirmed

    def test_decoupled_immune_drug(self, base_params):
        pm = base_params.replace(chi=0.0, p_M=0.0)
        e0 = estrogen_level(pm)
        expect_m = pm.v_M / pm.n_M
        expect_i = pm.s / immune_clearance_rate(pm, e0)
        d1 = dead_type1(pm)
        assert len(d1) == 1
        assert d1[0].point.M == pytest.approx(expect_m, rel=1e-12)
        assert d1[0].point.I == pytest.approx(expect_i, rel=1e-12)
        for eq in tumor_free(pm):
            assert eq.point.M == pytest.approx(expect_m, rel=1e-12)
            assert eq.point.I == pytest.approx(expect_i, rel=1e-12)

    def test_shared_immune_drug_substate(self):
        """Tumor-free and dead type-1 points share (I, M) for the same
        params: the immune/drug subsystem does not see N when T = 0."""
        for seed in range(30):
            pm = random_params(seed)
            tf = tumor_free(pm)
            d1 = dead_type1(pm)
            if not tf or not d1:
                continue
            ims_tf = sorted((eq.point.I, eq.point.M) for eq in tf)
            ims_d1 = sorted((eq.point.I, eq.point.M) for eq in d1)
            for (ia, ma), (ib, mb) in zip(ims_tf, ims_d1):
                assert ia == pytest.approx(ib, rel=1e-10)
                assert ma == pytest.approx(mb, rel=1e-10)
            return
        pytest.fail("no seed produced both families")


class TestDead1:
    def test_quadratic_vieta(self):
        from bcdyn.equilibria import _dead1_quadratic_derived

        for seed in range(30):
            pm = random_params(seed)
            c2, c1, c0 = _dead1_quadratic_derived(pm)
            if abs(c2) < 1e-12:
                continue
            roots = poly_roots(Polynomial((c2, c1, c0))).roots
            rsum = sum(z.real for z in roots)
            rprod = (roots[0] * roots[1]).real
            assert rsum == pytest.approx(-c1 / c2, rel=1e-8, abs=1e-10)
            assert rprod == pytest.approx(c0 / c2, rel=1e-8, abs=1e-10)

    def test_exact_boundary_components(self):
        for seed in range(30):
            pm = random_params(seed)
            for eq in dead_type1(pm):
                assert eq.point.N == 0.0
                assert eq.point.T == 0.0
                assert eq.residual < CONFIRM_TOL


class TestDead2:
    def _find_instance(self):
        for seed in range(400):
            pm = random_params(seed)
            cands = dead_type2(pm)
            if cands:
                return pm, cands
        return None, []

    def test_tumor_immune_balance(self):
        pm, cands = self._find_instance()
        assert cands, "no dead type-2 instance found in the seed range"
        a2d = pm.a2 * pm.d
        for eq in cands:
            expect_i = (a2d - pm.b2 * eq.point.T - pm.m_d) / pm.g1
            assert eq.point.I == pytest.approx(expect_i, abs=1e-10, rel=1e-10)
            assert eq.point.N == 0.0
            assert eq.residual < CONFIRM_TOL

    def test_no_drug_limit(self):
        pm, cands = self._find_instance()
        assert cands
        pm0 = pm.replace(v_M=0.0)
        for eq in dead_type2(pm0):
            production = pm0.chi * eq.point.I / (pm0.xi + eq.point.I)
            if production < pm0.n_M:
                assert eq.point.M == 0.0
            assert eq.residual < CONFIRM_TOL


class TestCoexisting:
    def test_all_components_positive(self):
        found = 0
        for seed in range(60):
            pm = random_params(seed)
            for eq in coexisting(pm):
                found += 1
                assert all(v > 0 for v in eq.point.as_tuple())
                assert eq.residual < CONFIRM_TOL
        assert found > 0

    def test_sign_case_flags(self):
        for seed in range(60):
            pm = random_params(seed)
            for eq in coexisting(pm):
                c = eq.flag_values["coexist_c"]
                b = eq.flag_values["coexist_b"]
                assert eq.existence_flags["single_positive_root"] == (c < 0)
                assert eq.existence_flags["no_realistic_roots"] == (b > 0 and c > 0)


class TestFindAll:
    def test_residuals_and_count(self):
        for seed in range(40):
            pm = random_params(seed)
            catalog = find_all(pm)
            assert len(catalog) <= 7
            for eq in catalog:
                if eq.confirmed:
                    assert residual_norm(eq.point, pm) < CONFIRM_TOL

    def test_estrogen_component_bit_identical(self):
        for seed in range(40):
            pm = random_params(seed)
            e_star = estrogen_level(pm)
            for eq in find_all(pm):
                assert eq.point.E == e_star

    def test_cross_family_dedup(self, base_params):
        """A tumor-free point with N below the dedup tolerance collapses
        onto the dead type-1 point and is reported once."""
        pm = base_params.replace(k=1.0, p_M=0.05)
        pm = pm.replace(a1=pm.b1 * 1e-9)
        catalog = find_all(pm)
        boundary = [eq for eq in catalog if abs(eq.point.N) < 1e-6 and eq.point.T == 0.0]
        assert len(boundary) == 1

    def test_sorted_by_family_then_tumor(self):
        from bcdyn.equilibria import FAMILIES

        for seed in range(20):
            pm = random_params(seed)
            catalog = find_all(pm)
            keys = [(FAMILIES.index(eq.family), eq.point.T) for eq in catalog]
            assert keys == sorted(keys)

    def test_flags_idempotent(self):
        pm = random_params(7)
        a = find_all(pm)
        b = find_all(pm)
        assert [eq.existence_flags for eq in a] == [eq.existence_flags for eq in b]
        assert [eq.point for eq in a] == [eq.point for eq in b]

    def test_invalid_params_rejected(self, base_params):
        with pytest.raises(DomainError):
            find_all(base_params.replace(theta=-1.0))


class TestReducedPolynomials:
    def test_mismatch_report_always_emitted(self, base_params):
        rp = reduced_polynomials(base_params)
        report = rp.mismatch_report
        assert set(report["coefficient_deviations"]) == {"I^2", "I^1", "I^0"}
        assert isinstance(report["printed_form_confirmed"], bool)
        assert report["notes"]

    def test_printed_form_differs_generically(self, base_params):
        rp = reduced_polynomials(base_params)
        assert not rp.mismatch_report["printed_form_confirmed"]

    def test_derived_quadratic_roots_are_steady(self, base_params):
        """Positive roots of the derived quadratic zero the immune equation
        once M is eliminated: the defining property of the reduction."""
        from bcdyn.model import rhs

        rp = reduced_polynomials(base_params)
        e0 = estrogen_level(base_params)
        for z in poly_roots(rp.dead1_quadratic).roots:
            if abs(z.imag) > 1e-9 or z.real <= 0:
                continue
            I = z.real
            M = drug_level(base_params, I)
            assert M is not None
            out = rhs(SystemState(0.0, 0.0, I, e0, M), base_params)
            assert abs(out[2]) < 1e-9
            assert abs(out[4]) < 1e-9
