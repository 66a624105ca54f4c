import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralpotts import BasisConfig, DimensionBudgetError, LocalOperator, ModelParams
from chiralpotts import build_x, build_z, embed_at_site, local_power
from chiralpotts.operators import digit_table, is_hermitian, max_abs

from oracles import configs, index_of, kron_at, weyl_pair


class TestModelParams:
    def test_valid(self):
        p = ModelParams(3, 4, 0.5)
        assert p.dim == 81

    @pytest.mark.parametrize("n, length", [(1, 4), (0, 3), (3, 1), (3, 0)])
    def test_rejects_small(self, n, length):
        with pytest.raises(ValueError):
            ModelParams(n, length, 0.5)

    @pytest.mark.parametrize("coupling", [float("nan"), float("inf")])
    def test_rejects_non_finite(self, coupling):
        with pytest.raises(ValueError):
            ModelParams(3, 3, coupling)

    def test_rejects_complex(self):
        with pytest.raises(TypeError):
            ModelParams(3, 3, 0.5 + 0.1j)

    def test_default_budget(self):
        ModelParams(2, 20)
        with pytest.raises(DimensionBudgetError):
            ModelParams(2, 21)

    def test_env_budget(self, monkeypatch):
        monkeypatch.setenv("CHAIN_DIM_BUDGET", "100")
        ModelParams(3, 4)
        with pytest.raises(DimensionBudgetError):
            ModelParams(3, 5)


class TestBasisConfig:
    def test_site_zero_most_significant(self):
        assert BasisConfig.from_digits((1, 0, 0), 2).index == 4
        assert BasisConfig.from_digits((0, 0, 1), 2).index == 1

    def test_round_trip(self):
        p = ModelParams(3, 4)
        for i in range(p.dim):
            cfg = BasisConfig.from_index(i, p)
            assert BasisConfig.from_digits(cfg.digits, 3) == cfg
            assert tuple(digit_table(p)[i]) == cfg.digits


class TestWeyl:
    def test_z_n2(self):
        np.testing.assert_allclose(build_z(2).matrix, np.diag([1, -1]), atol=1e-15)

    def test_z_n3(self):
        w = np.exp(2j * np.pi / 3)
        np.testing.assert_allclose(build_z(3).matrix, np.diag([1, w, w**2]), atol=1e-15)

    def test_x_n2(self):
        np.testing.assert_array_equal(build_x(2).matrix, [[0, 1], [1, 0]])

    def test_x_n3(self):
        x = build_x(3).matrix
        ones = {(1, 0), (2, 1), (0, 2)}
        for a in range(3):
            for b in range(3):
                assert x[a, b] == (1 if (a, b) in ones else 0)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_algebra(self, n):
        z, x = build_z(n).matrix, build_x(n).matrix
        omega = np.exp(2j * np.pi / n)
        assert max_abs(z @ x - omega * x @ z) <= 1e-14
        # closed-form powers: Z^N = X^N = id exactly after reduction
        zr = local_power(build_z(n), n - 1).matrix @ z
        xr = local_power(build_x(n), n - 1).matrix @ x
        assert max_abs(xr - np.eye(n)) == 0.0
        assert max_abs(zr - np.eye(n)) <= 1e-15

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_matches_oracle(self, n):
        z, x = weyl_pair(n)
        np.testing.assert_allclose(build_z(n).matrix, z, atol=1e-15)
        np.testing.assert_array_equal(build_x(n).matrix, x)

    @pytest.mark.parametrize("bad", [1, 0, -2])
    def test_rejects_small_n(self, bad):
        with pytest.raises(ValueError):
            build_z(bad)
        with pytest.raises(ValueError):
            build_x(bad)


class TestLocalPower:
    def test_zero_power(self):
        np.testing.assert_array_equal(local_power(build_z(3), 0).matrix, np.eye(3))

    def test_z_squared_n3(self):
        w = np.exp(2j * np.pi / 3)
        np.testing.assert_allclose(local_power(build_z(3), 2).matrix, np.diag([1, w**2, w]), atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_x_complement(self, n):
        x = build_x(n)
        for r in range(1, n):
            prod = local_power(x, r).matrix @ local_power(x, n - r).matrix
            np.testing.assert_array_equal(prod, np.eye(n))

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_closed_form_matches_repeated_product(self, n):
        for op in (build_z(n), build_x(n)):
            for r in range(n):
                np.testing.assert_allclose(
                    local_power(op, r).matrix, np.linalg.matrix_power(op.matrix, r), atol=1e-13
                )

    def test_generic_operator(self):
        m = LocalOperator(np.arange(9).reshape(3, 3))
        np.testing.assert_allclose(local_power(m, 2).matrix, m.matrix @ m.matrix)

    @pytest.mark.parametrize("r", [-1, 3])
    def test_range(self, r):
        with pytest.raises(ValueError):
            local_power(build_z(3), r)


class TestEmbed:
    def test_z_site0(self):
        m = embed_at_site(build_z(2), 0, ModelParams(2, 2))
        np.testing.assert_allclose(m.toarray(), np.diag([1, 1, -1, -1]), atol=1e-15)

    def test_z_site1(self):
        m = embed_at_site(build_z(2), 1, ModelParams(2, 2))
        np.testing.assert_allclose(m.toarray(), np.diag([1, -1, 1, -1]), atol=1e-15)

    def test_x_increments_digit(self):
        n, length = 3, 3
        p = ModelParams(n, length)
        for j in range(length):
            m = embed_at_site(build_x(n), j, p).toarray()
            for c in configs(n, length):
                col = np.zeros(p.dim)
                col[index_of(c, n)] = 1.0
                moved = list(c)
                moved[j] = (moved[j] + 1) % n
                expected = np.zeros(p.dim)
                expected[index_of(moved, n)] = 1.0
                np.testing.assert_array_equal(m @ col, expected)

    def test_matches_kron_oracle(self):
        p = ModelParams(3, 4)
        z, x = weyl_pair(3)
        for j in range(4):
            np.testing.assert_allclose(embed_at_site(build_z(3), j, p).toarray(), kron_at(z, j, 3, 4), atol=1e-15)
            np.testing.assert_array_equal(embed_at_site(build_x(3), j, p).toarray(), kron_at(x, j, 3, 4))

    def test_identity(self):
        p = ModelParams(3, 3)
        for j in range(3):
            m = embed_at_site(LocalOperator(np.eye(3)), j, p)
            assert max_abs(m - np.eye(p.dim)) == 0.0

    def test_prunes_exact_zeros(self):
        m = embed_at_site(build_x(3), 1, ModelParams(3, 3))
        assert m.nnz == 27
        assert np.all(np.abs(m.data) >= 1e-14)

    @pytest.mark.parametrize("site", [-1, 4])
    def test_site_range(self, site):
        with pytest.raises(ValueError):
            embed_at_site(build_z(3), site, ModelParams(3, 4))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            embed_at_site(build_z(2), 0, ModelParams(3, 3))

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), i=st.integers(0, 3), j=st.integers(0, 3))
    def test_distinct_sites_commute(self, seed, i, j):
        if i == j:
            return
        rng = np.random.default_rng(seed)
        p = ModelParams(3, 4)
        a = LocalOperator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        b = LocalOperator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        ea, eb = embed_at_site(a, i, p), embed_at_site(b, j, p)
        assert max_abs(ea @ eb - eb @ ea) <= 1e-13


def test_is_hermitian_relative():
    m = np.array([[1.0, 1e-13j], [0, 1.0]])
    assert is_hermitian(m, 1e-12)
    assert not is_hermitian(np.array([[0, 1.0], [0, 0]]), 1e-12)
