import numpy as np
import pytest

import pdmsi.random as prandom
from pdmsi.channels import (
    KrausChannel,
    amplitude_damping_channel,
    channels_equal,
    dephasing_channel,
    identity_channel,
)
from pdmsi.coherence import (
    adversarial_coherent_state,
    block_positivity_test,
    build_ce_oi_channel,
    check_stochastic_matrix,
    classify_channel,
    pdm_blocks,
)
from pdmsi.exceptions import NoAsymmetricColumn
from pdmsi.pdm import pdm_closed_form, si_measure
from pdmsi.states import ket, ketbra, projector


def sm_kraus_pair():
    k0 = np.outer([1, 1], [1, 0]) / np.sqrt(2)
    k1 = np.outer([1, -1], [0, 1]) / np.sqrt(2)
    return KrausChannel([k0, k1])


def rabi_liouvillian(omega=1.0):
    """Coherent drive about X: generates and detects coherence."""
    h = omega * np.array([[0, 1], [1, 0]], dtype=complex)
    eye = np.eye(2)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def pure_dephasing_liouvillian(gamma=1.0):
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    return gamma * (np.kron(z, z) - np.kron(eye, eye))


class TestClassify:
    def test_dephasing_in_every_class(self):
        rep = classify_channel(dephasing_channel(2))
        assert rep.is_oi and rep.is_ce and rep.is_ci and rep.is_di and rep.is_ncgd

    def test_identity_channel(self):
        rep = classify_channel(identity_channel(2))
        assert rep.is_di and rep.is_ci
        assert not rep.is_oi and not rep.is_ce
        assert rep.is_ncgd
        assert rep.residuals["oi"] > 0.1

    def test_sm_pair_oi_but_not_ci(self):
        rep = classify_channel(sm_kraus_pair())
        assert rep.is_oi and rep.is_di
        assert not rep.is_ci and not rep.is_ce

    def test_amplitude_damping(self):
        rep = classify_channel(amplitude_damping_channel(0.4))
        assert rep.is_ci and rep.is_di
        assert not rep.is_oi and not rep.is_ce

    def test_hierarchy_implications(self):
        rng = np.random.default_rng(3)
        for t in range(100):
            d = int(rng.choice([2, 3]))
            if t % 3 == 0:
                ch = prandom.oi_channel(d, rng)
            elif t % 3 == 1:
                ch = build_ce_oi_channel(prandom.stochastic_matrix(d, rng))
            else:
                ch = prandom.channel(d, d, env_dim=3, rng=rng)
            rep = classify_channel(ch)
            assert rep.is_di or not rep.is_oi
            assert rep.is_ci or not rep.is_ce

    def test_ncgd_refuted_for_rabi_dynamics(self):
        rep = classify_channel(identity_channel(2), ncgd_probe=rabi_liouvillian())
        assert not rep.is_ncgd
        assert "grid" in rep.ncgd_mode

    def test_ncgd_holds_for_pure_dephasing(self):
        rep = classify_channel(identity_channel(2), ncgd_probe=pure_dephasing_liouvillian())
        assert rep.is_ncgd

    def test_ncgd_family_callable(self):
        from pdmsi.linalg import superop_exp

        gen = rabi_liouvillian(0.5)
        rep = classify_channel(identity_channel(2), ncgd_probe=lambda t: superop_exp(gen, t))
        assert not rep.is_ncgd


class TestBlockPositivity:
    def test_vertex_distribution_identity_fails_support(self):
        res = block_positivity_test([1.0, 0.0], identity_channel(2))
        assert not res.compatible
        assert res.failing_pair == (0, 1)
        assert res.failure_kind == "support"

    def test_oi_channels_always_compatible(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            d = int(rng.choice([2, 3]))
            ch = prandom.oi_channel(d, rng)
            probs = rng.dirichlet(np.ones(d))
            assert block_positivity_test(probs, ch).compatible

    def test_blocks_assemble_to_closed_form(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            d = int(rng.choice([2, 3]))
            probs = rng.dirichlet(np.ones(d))
            ch = prandom.channel(d, d, env_dim=3, rng=rng)
            dec = pdm_blocks(probs, ch)
            full = np.zeros((d * ch.out_dim, d * ch.out_dim), dtype=complex)
            for (i, j), block in dec.blocks.items():
                full += np.kron(ketbra(i, j, d), block)
            r = pdm_closed_form(np.diag(probs.astype(complex)), ch)
            assert np.max(np.abs(full - r.mat)) < 1e-10
            herm_defect = max(
                np.max(np.abs(dec.blocks[(i, j)] - dec.blocks[(j, i)].conj().T))
                for i in range(d)
                for j in range(d)
            )
            assert herm_defect < 1e-10

    def test_agrees_with_full_spectrum(self):
        rng = np.random.default_rng(11)
        for t in range(150):
            d = int(rng.choice([2, 3, 4]))
            probs = rng.dirichlet(np.ones(d))
            if t % 4 == 0:
                probs = np.zeros(d)
                probs[rng.integers(d)] = 1.0
            ch = prandom.channel(d, d, env_dim=3, rng=rng)
            block_ok = block_positivity_test(probs, ch).compatible
            full = pdm_closed_form(np.diag(probs.astype(complex)), ch)
            assert block_ok == (full.min_eigenvalue() >= -1e-9)


class TestAdversarialState:
    def test_dephasing_example(self):
        adv = adversarial_coherent_state(np.eye(2), 0, 1, 0, 0.5)
        assert abs(adv.block_det + 1.0 / 16.0) < 1e-15
        r = pdm_closed_form(adv.state, dephasing_channel(2))
        assert abs(r.min_eigenvalue() - (1 - np.sqrt(2)) / 4) < 1e-10

    def test_analytic_det_matches_numeric_block(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            d = int(rng.choice([2, 3, 4]))
            a = prandom.stochastic_matrix(d, rng)
            diffs = np.abs(a[:, :, None] - a[:, None, :])
            k, i, j = map(int, np.unravel_index(np.argmax(diffs), diffs.shape))
            if i == j or diffs[k, i, j] < 1e-6:
                continue
            p = float(rng.uniform(0.1, 0.9))
            adv = adversarial_coherent_state(a, i, j, k, p)
            ch = build_ce_oi_channel(a)
            r = pdm_closed_form(adv.state, ch)
            sub = np.array([
                [r.mat[i * d + k, i * d + k], r.mat[i * d + k, j * d + k]],
                [r.mat[j * d + k, i * d + k], r.mat[j * d + k, j * d + k]],
            ])
            assert abs(np.linalg.det(sub).real - adv.block_det) < 1e-10

    def test_exposes_si(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            d = int(rng.choice([2, 3]))
            a = prandom.stochastic_matrix(d, rng)
            diffs = np.abs(a[:, :, None] - a[:, None, :])
            k, i, j = map(int, np.unravel_index(np.argmax(diffs), diffs.shape))
            if i == j or diffs[k, i, j] < 1e-3:
                continue
            adv = adversarial_coherent_state(a, i, j, k, float(rng.uniform(0.1, 0.9)))
            value = si_measure(pdm_closed_form(adv.state, build_ce_oi_channel(a)), 1.0).value
            assert value > 1e-9

    def test_uniform_columns_rejected(self):
        a = np.full((2, 2), 0.5)
        with pytest.raises(NoAsymmetricColumn):
            adversarial_coherent_state(a, 0, 1, 0, 0.5)

    def test_bad_k_rejected(self):
        a = np.array([[1.0, 0.5, 0.0], [0.0, 0.25, 0.75], [0.0, 0.25, 0.25]])
        with pytest.raises(ValueError, match="pick another k"):
            adversarial_coherent_state(a, 1, 2, 2, 0.5)

    def test_p_range(self):
        with pytest.raises(ValueError):
            adversarial_coherent_state(np.eye(2), 0, 1, 0, 1.0)


class TestBuildCeOi:
    def test_identity_matrix_gives_dephasing(self):
        ch = build_ce_oi_channel(np.eye(2))
        assert channels_equal(ch, dephasing_channel(2))
        assert np.allclose(ch.jamiolkowski(), np.diag([1.0, 0, 0, 1.0]))

    def test_uniform_columns_classified(self):
        ch = build_ce_oi_channel(np.full((2, 2), 0.5))
        rep = classify_channel(ch)
        assert rep.is_oi and rep.is_ce

    def test_random_matrices_classified(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            d = int(rng.choice([2, 3]))
            ch = build_ce_oi_channel(prandom.stochastic_matrix(d, rng))
            rep = classify_channel(ch)
            assert rep.is_oi and rep.is_ce and rep.is_ci and rep.is_di

    def test_populations_follow_stochastic_matrix(self):
        rng = np.random.default_rng(23)
        a = prandom.stochastic_matrix(3, rng)
        ch = build_ce_oi_channel(a)
        for i in range(3):
            out = ch(projector(ket(i, 3)))
            assert np.allclose(np.diag(out).real, a[:, i], atol=1e-12)

    def test_stochastic_validation(self):
        with pytest.raises(ValueError):
            check_stochastic_matrix(np.array([[0.5, 0.2], [0.2, 0.8]]))
        with pytest.raises(ValueError):
            check_stochastic_matrix(np.array([[-0.1, 0.0], [1.1, 1.0]]))
