"""Greedy approximation engines: gains, selection rules, solves."""

import numpy as np
import pytest

from specrefine.basis import basis_for_shape
from specrefine.engines import (
    BA_DEFAULT,
    RBA_DEFAULT,
    EngineConfig,
    _GainScanner,
    ba_refine,
    extract_predictor,
    fsa_refine,
    projection_gain,
    rba_refine,
    solve_coefficient_update,
)
from specrefine.geometry import Patch, base_geometry
from specrefine.model import SparseModel, evaluate_model, weighted_error_energy
from specrefine.weights import build_weight_mask

from .oracles import dense_weighted_lstsq_energy, projection_gain_double_loop
from .seqgen import random_patch

BLOCK = 8  # 24x24 patches keep the suite quick


def _setup(seed=0, block=BLOCK):
    rng = np.random.default_rng(seed)
    geom = base_geometry(block, block)
    patch = random_patch(block, rng)
    mask = build_weight_mask(geom, 0.5, 0.8)
    basis = basis_for_shape(*geom.shape)
    return patch, mask, basis


def test_projection_gain_matches_double_loop():
    patch, mask, basis = _setup(1, block=4)
    rng = np.random.default_rng(4)
    for k in rng.integers(0, basis.size, 10):
        atom = basis.atom(int(k))
        fast = projection_gain(patch.values, mask, atom, int(k))
        slow_delta, slow_coeff = projection_gain_double_loop(
            patch.values, mask.weights, atom
        )
        assert fast.delta_e == pytest.approx(slow_delta, rel=1e-12)
        assert fast.coeff == pytest.approx(slow_coeff, rel=1e-12)


def test_zero_support_atom_has_zero_gain():
    patch, mask, basis = _setup(2, block=4)
    assert projection_gain(patch.values, mask, np.zeros(mask.shape), 0).delta_e == 0.0


def test_fft_scan_matches_direct_formula_for_every_atom():
    patch, mask, basis = _setup(3)
    scanner = _GainScanner(basis, mask)
    delta, coeff = scanner.gains(patch.values)
    for k in range(basis.size):
        direct = projection_gain(patch.values, mask, basis.atom(k), k)
        scale = max(abs(direct.delta_e), 1e-30)
        assert abs(delta[k] - direct.delta_e) <= 1e-10 * max(scale, 1.0)
        if direct.delta_e > 1e-12:
            assert coeff[k] == pytest.approx(direct.coeff, rel=1e-9)


def test_fsa_energy_is_non_increasing_and_trace_consistent():
    patch, mask, basis = _setup(5)
    trace = []
    model = fsa_refine(patch, mask, basis, EngineConfig(max_iterations=120), trace)
    energies = [t.energy for t in trace]
    assert all(b <= a + 1e-9 for a, b in zip(energies, energies[1:]))
    # The final trace energy equals the energy of the returned model.
    final = weighted_error_energy(patch, evaluate_model(model, basis), mask)
    assert final == pytest.approx(energies[-1], rel=1e-9, abs=1e-9)


def test_fsa_accumulates_on_reselection():
    # A tiny basis forces re-selection long before the iteration budget
    # runs out; distinct model atoms must then be fewer than iterations.
    patch, mask, basis = _setup(6, block=2)
    model = fsa_refine(patch, mask, basis, EngineConfig(max_iterations=300))
    assert model.iterations > len(model)
    assert len(set(model.indices)) == len(model.indices)
    # Accumulated coefficients still describe the traced energy path.
    final = weighted_error_energy(patch, evaluate_model(model, basis), mask)
    trace = []
    fsa_refine(patch, mask, basis, EngineConfig(max_iterations=300), trace)
    assert final == pytest.approx(trace[-1].energy, rel=1e-9, abs=1e-9)


def test_fsa_stop_energy_ends_early():
    patch, mask, basis = _setup(7)
    model = fsa_refine(patch, mask, basis, EngineConfig(200, stop_energy=1e12))
    assert model.iterations == 0
    assert len(model) == 0


def test_ba_matches_least_squares_oracle_each_iteration():
    patch, mask, basis = _setup(8)
    trace = []
    ba_refine(patch, mask, basis, EngineConfig(max_iterations=12), trace)
    selected = []
    for step in trace:
        selected.extend(step.selected)
        oracle = dense_weighted_lstsq_energy(
            patch.values, mask.weights, basis, selected
        )
        assert step.energy == pytest.approx(oracle, rel=1e-8, abs=1e-8)


def test_ba_residual_is_orthogonal_to_selected_atoms():
    patch, mask, basis = _setup(9)
    model = ba_refine(patch, mask, basis, EngineConfig(max_iterations=15))
    residual = patch.values - evaluate_model(model, basis)
    signal_energy = float(np.sum(mask.weights * patch.values**2))
    for k in model.indices:
        inner = float(np.sum(mask.weights * residual * basis.atom(k)))
        assert abs(inner) <= 1e-8 * signal_energy


def test_ba_never_reselects():
    patch, mask, basis = _setup(10, block=2)
    model = ba_refine(patch, mask, basis, EngineConfig(max_iterations=30))
    assert len(set(model.indices)) == len(model.indices)


def test_rba_each_admitted_gain_clears_the_relaxation_threshold():
    patch, mask, basis = _setup(11)
    tau = 0.6
    trace = []
    rba_refine(
        patch, mask, basis, EngineConfig(4, tau=tau, max_per_iteration=50), trace
    )
    for step in trace:
        gains = np.array(step.gains)
        # The global argmax always passes its own threshold, so the
        # per-iteration maximum admitted gain is the scan maximum.
        assert gains.min() >= tau * gains.max() * (1 - 1e-12)


def test_rba_honours_the_per_iteration_cap():
    patch, mask, basis = _setup(12)
    trace = []
    rba_refine(patch, mask, basis, EngineConfig(4, tau=0.1, max_per_iteration=3), trace)
    assert all(len(step.selected) <= 3 for step in trace)
    assert any(len(step.selected) == 3 for step in trace)


def test_rba_with_tau_one_reduces_to_ba():
    for seed in range(5):
        patch, mask, basis = _setup(100 + seed)
        m_ba = ba_refine(patch, mask, basis, EngineConfig(max_iterations=10))
        m_rba = rba_refine(
            patch, mask, basis, EngineConfig(10, tau=1.0, max_per_iteration=20)
        )
        assert m_ba.indices == m_rba.indices
        np.testing.assert_allclose(
            m_ba.coefficients, m_rba.coefficients, rtol=1e-10, atol=1e-12
        )


def test_rba_outpaces_fsa_at_equal_iteration_count():
    # The relaxed engine's whole point: one iteration admits a batch of
    # atoms and solves them jointly, so at the same iteration budget it
    # sits at a (much) lower error than single-atom greedy steps.
    patch, mask, basis = _setup(13)
    t_fsa, t_rba = [], []
    fsa_refine(patch, mask, basis, EngineConfig(4), t_fsa)
    rba_refine(patch, mask, basis, RBA_DEFAULT, t_rba)
    assert t_rba[-1].energy < t_fsa[-1].energy


def test_rba_marks_degenerate_systems_and_stays_monotone():
    # A corner patch (no reconstructed context) leaves only mu-weighted
    # target samples: 4 support points cannot make 20 atoms independent.
    geom = base_geometry(2, 2)
    labels = np.array(geom.labels).copy()
    labels[labels == 1] = 0
    from specrefine.geometry import PatchGeometry

    bare = PatchGeometry(2, 2, labels)
    rng = np.random.default_rng(14)
    values = np.where(labels == 2, rng.uniform(0, 255, bare.shape), 0.0)
    patch = Patch(bare, values)
    mask = build_weight_mask(bare, 0.5, 0.8)
    basis = basis_for_shape(*bare.shape)
    trace = []
    rba_refine(patch, mask, basis, EngineConfig(3, tau=0.2, max_per_iteration=20), trace)
    assert any(step.degenerate for step in trace)
    energies = [weighted_error_energy(patch, np.zeros(bare.shape), mask)] + [
        t.energy for t in trace
    ]
    assert all(b <= a + 1e-9 for a, b in zip(energies, energies[1:]))
    assert all(np.isfinite(t.energy) for t in trace)


def test_solve_coefficient_update_reaches_oracle_energy():
    patch, mask, basis = _setup(15)
    rng = np.random.default_rng(16)
    indices = tuple(int(k) for k in rng.choice(basis.size, 12, replace=False))
    dc, degenerate = solve_coefficient_update(patch.values, mask, basis, indices)
    assert not degenerate
    approx = sum(c * basis.atom(k) for k, c in zip(indices, dc))
    energy = weighted_error_energy(patch, approx, mask)
    oracle = dense_weighted_lstsq_energy(patch.values, mask.weights, basis, indices)
    assert energy == pytest.approx(oracle, rel=1e-9, abs=1e-9)


def test_solve_coefficient_update_rejects_empty_selection():
    patch, mask, basis = _setup(17)
    with pytest.raises(ValueError):
        solve_coefficient_update(patch.values, mask, basis, ())


def test_extract_predictor_clips_rounds_and_shapes():
    geom = base_geometry(4, 4)
    basis = basis_for_shape(*geom.shape)
    # DC coefficient far above the sample range must saturate at 255.
    high = SparseModel((0,), (1000.0,), 1)
    block = extract_predictor(high, basis, geom)
    assert block.shape == (4, 4)
    assert block.dtype == np.uint8
    assert np.all(block == 255)
    low = SparseModel((0,), (-5.0,), 1)
    assert np.all(extract_predictor(low, basis, geom) == 0)
    mid = SparseModel((0,), (100.4,), 1)
    assert np.all(extract_predictor(mid, basis, geom) == 100)


def test_engine_config_validation():
    for bad in [
        dict(max_iterations=0),
        dict(max_iterations=1, tau=-0.1),
        dict(max_iterations=1, tau=1.5),
        dict(max_iterations=1, max_per_iteration=0),
        dict(max_iterations=1, stop_energy=-1.0),
    ]:
        with pytest.raises(ValueError):
            EngineConfig(**bad)


def test_engines_reject_mismatched_shapes():
    patch, mask, _ = _setup(18, block=4)
    wrong_basis = basis_for_shape(6, 6)
    with pytest.raises(ValueError):
        fsa_refine(patch, mask, wrong_basis)


def test_engines_are_deterministic():
    for fn, cfg in [
        (fsa_refine, EngineConfig(60)),
        (ba_refine, BA_DEFAULT),
        (rba_refine, RBA_DEFAULT),
    ]:
        patch, mask, basis = _setup(19)
        a = fn(patch, mask, basis, cfg)
        b = fn(patch, mask, basis, cfg)
        assert a.indices == b.indices
        assert a.coefficients == b.coefficients
