import numpy as np
import pytest

from discordant import ellipsoid as ell
from discordant import qcore
from discordant.errors import DegenerateInputError, UnsupportedReconstructionError, ValidationError
from discordant.sampling import random_x_muellers
from helpers import partial_transpose_b


def _on_surface(e, p):
    x, y, z = p
    return (x / e.a_x) ** 2 + (y / e.a_y) ** 2 + ((z - e.z_c) / e.a_z) ** 2


class TestExtraction:
    def test_ex1(self, ex1):
        e = ell.from_mueller(ex1)
        np.testing.assert_allclose((e.a_x, e.a_y, e.a_z, e.z_c),
                                   (0.7809364142, 0.6165287481, 0.7718297962, 0.1224791469), atol=1e-9)
        assert e.z_I == pytest.approx(0.3) and e.epsilon == 1

    def test_conditional_states_on_surface(self, rng):
        for m in random_x_muellers(20, seed=5):
            e = ell.from_mueller(m)
            if min(e.a_x, e.a_y, e.a_z) < 1e-3:
                continue
            for _ in range(10):
                n = rng.normal(size=3)
                n /= np.linalg.norm(n)
                p, bloch = qcore.conditional_state(m, np.concatenate([[1.0], n]))
                assert _on_surface(e, bloch) == pytest.approx(1.0, abs=1e-9)

    def test_pure_b_rejected(self):
        with pytest.raises(DegenerateInputError):
            ell.from_mueller(qcore.mueller_row(m03=1.0, m30=0.2, m33=0.2))

    def test_signature(self):
        m = qcore.mueller_row(m03=0.1, m11=0.4, m22=-0.1, m30=0.2, m33=0.4)
        assert ell.from_mueller(m).epsilon == -1

    def test_degenerate_flag(self):
        e = ell.from_mueller(qcore.mueller_row(m11=0.5, m30=0.2))
        assert e.degenerate and e.epsilon == 1


class TestReconstruction:
    def test_round_trip(self):
        for m in random_x_muellers(50, seed=9):
            e = ell.from_mueller(m)
            if e.a_z < 1e-6:
                continue
            np.testing.assert_allclose(ell.to_mueller(e), m, atol=1e-9)

    def test_state_matches_mueller(self):
        for m in random_x_muellers(50, seed=10):
            e = ell.from_mueller(m)
            if e.a_z < 1e-6:
                continue
            rho = ell.to_state(e)
            assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(rho, qcore.density_from_mueller(m), atol=1e-9)

    def test_flat_unsupported(self):
        e = ell.EllipsoidParams(0.4, 0.1, 0.0, 0.3, 0.3)
        with pytest.raises(UnsupportedReconstructionError):
            ell.to_mueller(e)
        with pytest.raises(UnsupportedReconstructionError):
            ell.to_state(e)

    @pytest.mark.parametrize("kw", [dict(a_x=0.3, a_y=0.4), dict(z_c=-0.1), dict(z_I=0.99), dict(epsilon=0)])
    def test_invalid_params(self, kw):
        base = dict(a_x=0.5, a_y=0.3, a_z=0.4, z_c=0.2, z_I=0.3, epsilon=1)
        base.update(kw)
        with pytest.raises(ValidationError):
            ell.EllipsoidParams(**base)


class TestInvariance:
    def test_boost_keeps_ellipsoid(self, ex1):
        e0 = ell.from_mueller(ex1)
        for mu in (-2.0, -0.3, 0.4, 1.5):
            e = ell.from_mueller(ell.boost(ex1, mu))
            np.testing.assert_allclose((e.a_x, e.a_y, e.a_z, e.z_c), (e0.a_x, e0.a_y, e0.a_z, e0.z_c), atol=1e-12)
            t = np.tanh(mu)
            assert e.z_I == pytest.approx((0.3 + 0.8 * t) / (1 + 0.23 * t), abs=1e-13)

    def test_boost_matches_matrix_product(self, ex1):
        out = ex1 @ ell.boost_matrix(0.7)
        np.testing.assert_allclose(ell.boost(ex1, 0.7), out / out[0, 0], atol=1e-14)

    def test_large_rapidity(self, ex1):
        m = ell.boost(ex1, 800.0)
        assert np.all(np.isfinite(m))
        assert m[0, 3] == pytest.approx(1.0)

    def test_inversion_is_partial_transpose(self, rng):
        for m in random_x_muellers(10, seed=3):
            rho = qcore.density_from_mueller(m)
            np.testing.assert_allclose(qcore.density_from_mueller(ell.spatial_inversion(m)),
                                       partial_transpose_b(rho), atol=1e-14)

    def test_inversion_flips_signature(self, ex1):
        assert ell.from_mueller(ex1).epsilon == 1
        assert ell.from_mueller(ell.spatial_inversion(ex1), check=False).epsilon == -1


class TestSeparability:
    def test_against_partial_transpose(self):
        ms = random_x_muellers(300, seed=21)
        verdicts = []
        for m in ms:
            lam = np.linalg.eigvalsh(partial_transpose_b(qcore.density_from_mueller(m))).min()
            if abs(lam) < 1e-9:
                continue
            v = ell.separability(ell.from_mueller(m))
            assert v.separable == (lam > 0)
            verdicts.append(v.separable)
        assert any(verdicts) and not all(verdicts)

    def test_ex1_entangled(self, ex1):
        assert not ell.separability(ell.from_mueller(ex1)).separable

    def test_volume_at_zero(self):
        v = ell.max_separable_volume(0.0)
        assert v.fraction == 1 / 27
        np.testing.assert_allclose(v.axes, (1 / 3, 1 / 3, 1 / 3), atol=1e-15)

    def test_volume_decreasing(self):
        vals = [ell.max_separable_volume(z).fraction for z in np.linspace(0, 0.9, 10)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_volume_ellipsoid_is_separable_boundary(self):
        for z_c in (0.1, 0.5, 0.8):
            axy, _, az = ell.max_separable_volume(z_c).axes
            e = ell.EllipsoidParams(axy, axy, az, z_c, z_c)
            assert ell.separability(e).margin == pytest.approx(0.0, abs=1e-12)
