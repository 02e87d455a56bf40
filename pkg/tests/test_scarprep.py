import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scarforge import circuits, hamiltonians as ham, qsim, refstates as rs, scarprep as sp


def test_layer_structure_8_2():
    spec = sp.build_ansatz(8, 2)
    assert spec.layers == ((3, 1), (4, 2), (5, 3, 1), (5, 4, 3, 2, 1))
    assert spec.n_params == 12
    assert spec.initial_bits() == "01010000"


@pytest.mark.parametrize("N,k,n", [(14, 5, 27), (15, 6, 24), (13, 5, 20), (14, 6, 17), (16, 7, 20), (7, 2, 8)])
def test_parameter_counts(N, k, n):
    assert sp.build_ansatz(N, k).n_params == n


def test_parameter_formula_all_sizes():
    for N in range(4, 17):
        for k in range(1, (N - 2) // 2 + 1):
            assert sp.build_ansatz(N, k).n_params == sp.n_params_formula(N, k)


def test_bad_sizes():
    with pytest.raises(ValueError):
        sp.build_ansatz(5, 2)
    with pytest.raises(ValueError):
        sp.build_ansatz(8, 0)


def test_zero_angles_keep_initial_state():
    spec = sp.build_ansatz(9, 3)
    out = sp.apply_ansatz(spec, np.zeros(spec.n_params))
    assert np.allclose(out.amplitudes, qsim.basis_state(spec.initial_bits()).amplitudes)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(8, 2), (9, 3), (10, 2), (11, 4)]), st.integers(0, 10_000))
def test_sector_conservation(nk, seed):
    N, k = nk
    spec = sp.build_ansatz(N, k)
    theta = np.random.default_rng(seed).uniform(0, 2 * math.pi, spec.n_params)
    out = sp.apply_ansatz(spec, theta)
    assert ham.expectation(ham.build_Mz(N), out) == pytest.approx(N - 2 * k, abs=1e-12)
    _, w = rs.apply_fib_projector(out)
    assert w == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("N,k", [(8, 2), (10, 3), (11, 2)])
def test_sector_model_matches_statevector(N, k):
    spec = sp.build_ansatz(N, k)
    model = sp.SectorModel(spec)
    theta = np.random.default_rng(N).uniform(0, 2 * math.pi, spec.n_params)
    full = sp.apply_ansatz(spec, theta)
    assert np.allclose(model.embed(model.forward(theta)).amplitudes, full.amplitudes, atol=1e-12)
    assert model.dim == rs.count_constrained(N, k)
    stripped = circuits.simulate(sp.ansatz_circuit(spec, theta, strip_boundary=True))
    assert np.allclose(stripped.amplitudes, rs.strip(full).amplitudes, atol=1e-12)


def test_gradient_matches_finite_difference():
    spec = sp.build_ansatz(10, 3)
    model = sp.SectorModel(spec)
    theta = np.random.default_rng(4).uniform(0, 2 * math.pi, spec.n_params)
    f, g = model.value_and_grad(theta)
    assert f == pytest.approx(model.infidelity(theta))
    eps = 1e-6
    for i in range(spec.n_params):
        e = np.zeros(spec.n_params)
        e[i] = eps
        fd = (model.infidelity(theta + e) - model.infidelity(theta - e)) / (2 * eps)
        assert g[i] == pytest.approx(fd, abs=1e-7)


def test_optimizer_deterministic_and_final_z():
    a = sp.optimize_ansatz(10, 3, restarts=3, seed=4, stop_below=0.0)
    b = sp.optimize_ansatz(10, 3, restarts=3, seed=4, stop_below=0.0)
    assert np.array_equal(a.theta, b.theta) and a.infidelity == b.infidelity
    assert len(a.history) == 3
    assert a.infidelity == min(h.infidelity for h in a.history)
    assert a.history_csv().splitlines()[0] == "restart,infidelity,iterations"
    spec = sp.build_ansatz(10, 3)
    out = circuits.simulate(sp.ansatz_circuit(spec, a.theta, final_z=True))
    fid = abs(np.vdot(rs.scar_state(10, 3).amplitudes, out.amplitudes)) ** 2
    assert 1 - fid == pytest.approx(a.infidelity, abs=1e-10)
    assert all(0 <= t < 2 * math.pi for t in a.theta)


def test_optimizer_small_exact_case():
    r = sp.optimize_ansatz(14, 6, restarts=20, seed=0)
    assert r.infidelity < 1e-8


def test_kmax_plan():
    p = sp.KmaxPlan(14)
    assert p.k_max == 6
    assert p.theta[-1] == pytest.approx(math.pi / 2)
    assert all(0 < t < math.pi for t in p.theta)
    with pytest.raises(ValueError):
        sp.KmaxPlan(7)


def test_kmax_n6_amplitudes():
    out = circuits.simulate(sp.kmax_circuit(6))
    for bits in ("010100", "010010", "001010"):
        assert out.amplitude(bits) == pytest.approx(1 / math.sqrt(3))


@pytest.mark.parametrize("N", [6, 8, 10, 12, 14])
def test_kmax_exact(N):
    circ = sp.kmax_circuit(N)
    out = circuits.simulate(circ)
    amps = np.abs(out.amplitudes)
    assert np.count_nonzero(amps > 1e-12) == N // 2
    assert np.allclose(amps[amps > 1e-12], math.sqrt(2 / N))
    zl = circuits.Circuit(N, tuple(circuits.z(q) for q in range(0, N, 2)))
    signed = circuits.simulate(zl, out)
    assert abs(np.vdot(rs.scar_state(N, N // 2 - 1).amplitudes, signed.amplitudes)) ** 2 >= 1 - 1e-10
    assert circuits.gate_counts(circ)["two_qubit"] == N - 3
    comp = circuits.simulate(sp.kmax_compressed_circuit(N))
    assert np.allclose(sp.decode_state(comp).amplitudes, out.amplitudes, atol=1e-12)
    with pytest.raises(ValueError):
        sp.kmax_circuit(N + 1)


def test_compressed_fib_projection():
    assert sp.compressed_fib_projection("10")
    assert not sp.compressed_fib_projection("01")
    for a in range(6):
        assert sp.compressed_fib_projection("1" * a + "0" * (5 - a))
    for s in ("0110", "1011", "001"):
        assert sp.compressed_fib_projection(s) == ("0110" not in sp.decode_bits(s))


PAIR_RULES = {
    ("Z", "I"): (1, "Z"), ("I", "Z"): (-1, "Z"), ("Z", "Z"): (-1, "I"),
    ("X", "X"): (1, "X"), ("X", "Y"): (-1, "Y"), ("Y", "X"): (1, "Y"), ("Y", "Y"): (1, "X"),
    ("X", "Z"): (0, "I"), ("Y", "Z"): (0, "I"), ("Z", "X"): (0, "I"), ("Z", "Y"): (0, "I"),
    ("X", "I"): (0, "I"), ("Y", "I"): (0, "I"), ("I", "X"): (0, "I"), ("I", "Y"): (0, "I"),
    ("I", "I"): (1, "I"),
}


def test_pair_rules():
    for pair, (c, q) in PAIR_RULES.items():
        got = sp.encode_pauli_pair(*pair)
        assert got[0] == c
        if c != 0:
            assert got[1] == q


def test_pair_rules_against_full_space_n6():
    N, n = 6, 2
    E = np.zeros((1 << N, 1 << n))
    for i in range(1 << n):
        E[int(sp.decode_bits(qsim.bitstring(i, n)), 2), i] = 1.0
    pauli = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}
    for pos in range(n):
        site = 2 * (pos + 1)
        for (pe, po), _ in PAIR_RULES.items():
            full = ham.site_term(N, {site: pe, site + 1: po}).toarray()
            comp = E.T @ full @ E
            c, q = sp.encode_pauli_pair(pe, po)
            ops = [np.eye(2)] * n
            ops[pos] = pauli[q]
            expect = c * np.kron(ops[0], ops[1])
            assert np.allclose(comp, expect)
    for site in (1, N):
        assert np.allclose(E.T @ ham.site_term(N, {site: "Z"}).toarray() @ E, np.eye(4))
