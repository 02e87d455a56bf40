import itertools
import math

import numpy as np
import pytest

from scarforge import qsim, refstates as rs


def test_fibonacci_values():
    assert [rs.fib(i) for i in range(1, 7)] == [1, 1, 2, 3, 5, 8]


@pytest.mark.parametrize("m", range(1, 21))
def test_fib_dim_by_enumeration(m):
    assert rs.fib_dim(m) == len(rs.constrained_indices(m))


def test_count_constrained():
    assert rs.count_constrained(14, 5) == 56
    assert rs.count_constrained(6, 2) == 3
    assert rs.count_constrained(6, 3) == 0


@pytest.mark.parametrize("N", range(4, 21))
def test_Z_at_one_is_fibonacci(N):
    assert rs.normalization_Z(N, 1.0) == rs.fib_dim(N - 2)


def test_xi_state_n4_signs():
    s = rs.xi_state(4, 1.0)
    a = 1 / math.sqrt(3)
    assert s.amplitude("0000") == pytest.approx(a)
    assert s.amplitude("0100") == pytest.approx(a)  # site 2, (-1)^2
    assert s.amplitude("0010") == pytest.approx(-a)  # site 3, (-1)^3
    assert np.count_nonzero(np.abs(s.amplitudes) > 1e-12) == 3


def test_xi_zero_is_vacuum():
    assert np.allclose(rs.xi_state(8, 0.0).amplitudes, qsim.zero_state(8).amplitudes)


def test_xi_state_n14_support():
    s = rs.xi_state(14, 1.0)
    assert np.count_nonzero(np.abs(s.amplitudes) > 1e-12) == 377
    assert rs.normalization_Z(14, 1.0) == 377


def test_xi_state_rejects_small_n():
    with pytest.raises(ValueError):
        rs.xi_state(3, 1.0)


def test_inner_state_examples():
    s = rs.xi_inner_state(2, 1, tilde=True)
    assert np.allclose(s.amplitudes, np.array([1, 1, 1, 0]) / math.sqrt(3))
    s = rs.xi_inner_state(4, 1, tilde=True)
    amps = np.abs(s.amplitudes)
    assert np.count_nonzero(amps > 1e-12) == 8 and np.allclose(amps[amps > 1e-12], 1 / math.sqrt(8))
    s = rs.xi_inner_state(3, 2, tilde=True)
    expect = {"000": 1, "100": 2, "010": 2, "001": 2, "101": 4}
    for b, v in expect.items():
        assert s.amplitude(b) == pytest.approx(v / math.sqrt(29))


@pytest.mark.parametrize("N", [4, 6, 9, 12])
@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0, 0.3 + 0.4j])
def test_embedding_identity(N, xi):
    full = rs.xi_state(N, xi)
    emb = rs.embed(rs.xi_inner_state(N - 2, xi))
    assert np.allclose(full.amplitudes, emb.amplitudes, atol=1e-12)


def test_scar_state_examples():
    assert np.allclose(rs.scar_state(8, 0).amplitudes, qsim.zero_state(8).amplitudes)
    s = rs.scar_state(14, 5)
    assert np.count_nonzero(np.abs(s.amplitudes) > 1e-12) == 56
    s = rs.scar_state(6, 2)
    support = sorted(qsim.bitstring(i, 6) for i in np.flatnonzero(np.abs(s.amplitudes) > 1e-12))
    assert support == ["001010", "010010", "010100"]
    with pytest.raises(ValueError):
        rs.scar_state(6, 3)


@pytest.mark.parametrize("N", [5, 8, 11])
def test_scar_amplitudes_and_signs(N):
    for k in range(rs.max_tower_k(N) + 1):
        s = rs.scar_state(N, k)
        mag = 1 / math.sqrt(rs.count_constrained(N, k))
        for i in np.flatnonzero(np.abs(s.amplitudes) > 1e-12):
            bits = qsim.bitstring(int(i), N)
            sign = (-1) ** sum(q + 1 for q, b in enumerate(bits) if b == "1")
            assert s.amplitudes[i] == pytest.approx(sign * mag)


def test_projected_dicke_examples():
    s = rs.projected_dicke(4, 2)
    for b in ("0101", "1001", "1010"):
        assert s.amplitude(b) == pytest.approx(1 / math.sqrt(3))
    s = rs.projected_dicke(6, 2)
    assert np.count_nonzero(np.abs(s.amplitudes) > 1e-12) == 10
    assert np.allclose(rs.projected_dicke(5, 0).amplitudes, qsim.zero_state(5).amplitudes)
    with pytest.raises(ValueError):
        rs.projected_dicke(3, 3)
    assert np.count_nonzero(np.abs(rs.dicke(5, 2).amplitudes) > 1e-12) == 10


@pytest.mark.parametrize("N", [6, 8, 10, 12])
def test_tilde_scar_is_boundary_embedded_dicke(N):
    for k in range(rs.max_tower_k(N) + 1):
        tilde = rs.tilde_transform(rs.scar_state(N, k))
        assert np.allclose(tilde.amplitudes, rs.embed(rs.projected_dicke(N - 2, k)).amplitudes, atol=1e-12)


def test_fib_projector_examples():
    _, w = rs.apply_fib_projector(qsim.basis_state("11"))
    assert w == 0
    blk = np.asarray(rs.xi_inner_state(2, 1, tilde=True).amplitudes)
    _, w = rs.apply_fib_projector(qsim.Statevector(4, np.kron(blk, blk)))
    assert w == pytest.approx(8 / 9, abs=1e-12)
    out, w = rs.apply_fib_projector(rs.dicke(4, 2))
    assert w == pytest.approx(0.5)
    assert np.allclose(out.renormalized().amplitudes, rs.projected_dicke(4, 2).amplitudes)
    with pytest.raises(ValueError):
        rs.apply_fib_projector(qsim.zero_state(3), 2, 1)


def test_fib_projector_partial_range():
    _, w = rs.apply_fib_projector(qsim.basis_state("1100"), first=1, last=3)
    assert w == 1.0
    _, w = rs.apply_fib_projector(qsim.basis_state("1100"), first=0, last=1)
    assert w == 0.0


def test_tilde_examples():
    v = rs.xi_state(8, 0.7)
    assert np.allclose(rs.tilde_transform(rs.tilde_transform(v)).amplitudes, v.amplitudes)
    z = qsim.zero_state(5)
    assert np.allclose(rs.tilde_transform(z).amplitudes, z.amplitudes)
    assert np.allclose(
        rs.tilde_transform(rs.embed(rs.projected_dicke(6, 2))).amplitudes, rs.scar_state(8, 2).amplitudes
    )


@pytest.mark.parametrize("N", [4, 7, 10, 12])
@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0])
def test_tower_decomposition(N, xi):
    Z = rs.normalization_Z(N, xi)
    acc = np.zeros(1 << N, dtype=complex)
    for k in range(rs.max_tower_k(N) + 1):
        if rs.count_constrained(N, k):
            acc += xi**k * math.sqrt(rs.count_constrained(N, k) / Z) * np.asarray(rs.scar_state(N, k).amplitudes)
    assert np.allclose(acc, rs.xi_state(N, xi).amplitudes, atol=1e-10)


def test_raising_operator_by_brute_force():
    N = 6
    dense = np.zeros((1 << N, 1 << N))
    for idx in range(1 << N):
        for site in range(2, N):
            q = site - 1
            bits = [(idx >> (N - 1 - j)) & 1 for j in range(N)]
            if bits[q - 1] == 0 and bits[q] == 0 and bits[q + 1] == 0:
                dense[idx | (1 << (N - 1 - q)), idx] += (-1) ** site
    for idx in (0, 0b000100, 0b010000):
        got = rs.raising_operator_apply({idx: 1.0}, N)
        vec = np.zeros(1 << N)
        for k, v in got.items():
            vec[k] = v
        assert np.allclose(vec, dense[:, idx])


@pytest.mark.parametrize("N", range(3, 15))
def test_dicke_recursion(N):
    for n in range(1, (N + 1) // 2 + 1):
        assert rs.dicke_recursion_residual(N, n) < 1e-12


def test_weight_sector():
    v, p = rs.weight_sector(rs.xi_state(8, 1.0), 2)
    assert p == pytest.approx(rs.count_constrained(8, 2) / 21)


def test_refstate_probabilities_sum_to_one():
    for s in (rs.xi_state(9, 0.4), rs.scar_state(9, 3), rs.projected_dicke(7, 3), rs.xi_inner_state(5, 2.0)):
        assert sum(qsim.probabilities(s).values()) == pytest.approx(1.0, abs=1e-10)
