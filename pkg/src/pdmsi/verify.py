"""User-facing property suites: randomized invariant checks with trial counts.

Each check recomputes its claim from scratch (independent routes where the
library offers them) so a regression in one code path shows up as a named
failure rather than a silently agreeing pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import random as prandom
from .channels import identity_channel, unitary_channel
from .coherence import (
    adversarial_coherent_state,
    block_positivity_test,
    build_ce_oi_channel,
    classify_channel,
)
from .leggett_garg import LgScenario, lg_evaluate, lg_operator, spatial_lg_bound
from .linalg import kron
from .observables import PAULI_1Q
from .pdm import (
    Pdm,
    exact_correlators,
    pdm_closed_form,
    pdm_from_correlators,
    si_measure,
    synthesize_witness,
)
from .sampling import sample_two_time
from .states import ket, projector


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    trials: int
    detail: str = ""


def _random_pdm(rng, d1=2, d2=2) -> Pdm:
    if rng.random() < 0.5:
        rho = prandom.density_matrix(d1, rng)
        ch = prandom.channel(d1, d2, env_dim=3, rng=rng)
        return pdm_closed_form(rho, ch)
    return Pdm(prandom.unit_trace_hermitian(d1 * d2, rng), (d1, d2))


def verify_pdm(seed: int = 20240801, scale: float = 1.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    n = lambda k: max(1, int(k * scale))

    trials = n(500)
    worst = 0.0
    ok = True
    for _ in range(trials):
        r = _random_pdm(rng)
        rep = si_measure(r, 1.0)
        ok &= rep.value >= 0.0
        if r.min_eigenvalue() >= -1e-10:
            worst = max(worst, rep.value)
            ok &= rep.value == 0.0
    results.append(CheckResult("pdm", "T_p positivity and zero iff PSD", ok, trials, f"max on PSD {worst:.2e}"))

    trials = n(1000)
    worst = -np.inf
    for _ in range(trials):
        r1, r2 = _random_pdm(rng), _random_pdm(rng)
        w = rng.random()
        mixed = Pdm(w * r1.mat + (1 - w) * r2.mat, r1.dims)
        gap = si_measure(mixed, 1.0).value - (
            w * si_measure(r1, 1.0).value + (1 - w) * si_measure(r2, 1.0).value
        )
        worst = max(worst, gap)
    results.append(CheckResult("pdm", "T_1 convexity under mixing", worst <= 1e-9, trials, f"max gap {worst:.2e}"))

    trials = n(1000)
    worst = 0.0
    for _ in range(trials):
        r = _random_pdm(rng)
        u = prandom.haar_unitary(4, rng)
        rotated = Pdm(u @ r.mat @ u.conj().T, r.dims)
        p = rng.choice([1.0, 2.0])
        worst = max(worst, abs(si_measure(rotated, p).value - si_measure(r, p).value))
    results.append(CheckResult("pdm", "T_p unitary invariance", worst <= 1e-9, trials, f"max drift {worst:.2e}"))

    trials = n(1000)
    worst = -np.inf
    for _ in range(trials):
        r = _random_pdm(rng)
        cptp = prandom.channel(4, 4, env_dim=2, rng=rng)
        worst = max(worst, si_measure(Pdm(cptp(r.mat), r.dims), 1.0).value - si_measure(r, 1.0).value)
    results.append(CheckResult("pdm", "T_1 monotone under CPTP maps", worst <= 1e-9, trials, f"max gain {worst:.2e}"))

    trials = n(1000)
    worst = 0.0
    for _ in range(trials):
        r = _random_pdm(rng)
        closed = si_measure(r, 1.0, method="closed").value
        numeric = si_measure(r, 1.0, method="numeric").value
        worst = max(worst, abs(closed - numeric))
    results.append(CheckResult(
        "pdm", "T_1 closed form vs simplex optimizer", worst <= 1e-7, trials, f"max gap {worst:.2e}"
    ))

    trials = n(200)
    worst = 0.0
    for _ in range(trials):
        r = _random_pdm(rng)
        back = pdm_from_correlators(exact_correlators(r))
        worst = max(worst, float(np.max(np.abs(back.mat - r.mat))))
    results.append(CheckResult("pdm", "tomographic round trip", worst <= 1e-10, trials, f"max error {worst:.2e}"))

    trials = n(10_000)
    worst = -np.inf
    seen_saturation = False
    for t in range(trials):
        if t % 10 == 0:
            rho = projector(prandom.pure_state(2, rng))
            ch = unitary_channel(prandom.haar_unitary(2, rng))
        else:
            rho = prandom.density_matrix(2, rng)
            ch = prandom.channel(2, 2, env_dim=4, rng=rng)
        t1 = si_measure(pdm_closed_form(rho, ch), 1.0).value
        worst = max(worst, t1)
        seen_saturation |= t1 > 0.999
    ok = worst <= 1.0 + 1e-9 and seen_saturation
    results.append(CheckResult(
        "pdm", "qubit SI bound T_1 <= 1 with saturation", ok, trials,
        f"max T_1 {worst:.12f}, saturated: {seen_saturation}"
    ))

    trials = n(10_000)
    witness_floor = np.inf
    witnesses = [synthesize_witness(pdm_closed_form(projector(ket(0)), identity_channel(2)))]
    while len(witnesses) < 10:
        r = _random_pdm(rng)
        if r.min_eigenvalue() < -1e-6:
            witnesses.append(synthesize_witness(r, policy=str(
                rng.choice(["negative_eigenspace", "most_negative"])
            )))
    for k in range(trials):
        rho = prandom.density_matrix(4, rng)
        w = witnesses[k % len(witnesses)]
        witness_floor = min(witness_floor, float(np.trace(w.mat @ rho).real))
    results.append(CheckResult(
        "pdm", "witness soundness on random density matrices", witness_floor >= -1e-10,
        trials, f"{len(witnesses)} witnesses, min expectation {witness_floor:.2e}"
    ))

    extremal = pdm_closed_form(projector(ket(0)), identity_channel(2))
    value = si_measure(extremal, 2.0).value
    ok = abs(value - np.sqrt(0.375)) <= 1e-7
    results.append(CheckResult("pdm", "T_2 of the extremal PDM equals sqrt(0.375)", ok, 1, f"value {value:.9f}"))
    return results


def verify_coherence(seed: int = 20240802, scale: float = 1.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    n = lambda k: max(1, int(k * scale))

    trials = n(1000)
    disagreements = 0
    for t in range(trials):
        d = int(rng.choice([2, 3, 4]))
        probs = rng.dirichlet(np.ones(d))
        if t % 4 == 0:
            probs = np.zeros(d)
            probs[rng.integers(d)] = 1.0
        ch = prandom.channel(d, d, env_dim=3, rng=rng)
        block_ok = block_positivity_test(probs, ch).compatible
        full_ok = pdm_closed_form(np.diag(probs.astype(complex)), ch).min_eigenvalue() >= -1e-9
        disagreements += block_ok != full_ok
    results.append(CheckResult(
        "coherence", "Schur-block test agrees with full spectrum", disagreements == 0,
        trials, f"{disagreements} disagreements"
    ))

    trials = n(1000)
    ok = True
    for t in range(trials):
        d = int(rng.choice([2, 3]))
        if t % 3 == 0:
            ch = prandom.oi_channel(d, rng)
        elif t % 3 == 1:
            ch = build_ce_oi_channel(prandom.stochastic_matrix(d, rng))
        else:
            ch = prandom.channel(d, d, env_dim=3, rng=rng)
        rep = classify_channel(ch)
        ok &= (not rep.is_oi) or rep.is_di
        ok &= (not rep.is_ce) or rep.is_ci
    results.append(CheckResult("coherence", "hierarchy implications OI=>DI, CE=>CI", ok, trials))

    trials = n(100)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        ch = prandom.oi_channel(d, rng)
        rho = prandom.incoherent_state(d, rng)
        worst = max(worst, si_measure(pdm_closed_form(rho, ch), 1.0).value)
    results.append(CheckResult(
        "coherence", "OI channels stay compatible on incoherent states", worst <= 1e-9,
        trials, f"max negativity {worst:.2e}"
    ))

    trials = n(1000)
    floor = np.inf
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        a = prandom.stochastic_matrix(d, rng)
        diffs = np.abs(a[:, :, None] - a[:, None, :])
        k, i, j = np.unravel_index(np.argmax(diffs), diffs.shape)
        if diffs[k, i, j] <= 1e-9 or i == j:
            continue
        adv = adversarial_coherent_state(a, int(i), int(j), int(k), float(rng.uniform(0.05, 0.95)))
        value = si_measure(pdm_closed_form(adv.state, build_ce_oi_channel(a)), 1.0).value
        floor = min(floor, value)
    results.append(CheckResult(
        "coherence", "coherent input exposes SI of CE+OI channels", floor > 1e-9,
        trials, f"min negativity {floor:.2e}"
    ))
    return results


def verify_lg(seed: int = 20240803, scale: float = 1.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    n = lambda k: max(1, int(k * scale))

    trials = n(1000)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.choice([2, 2, 3]))
        qs = [prandom.dichotomic_observable(d, rng) for _ in range(3)]
        bound = spatial_lg_bound(*qs)
        worst = max(worst, abs(bound.max_k - 1.0), abs(bound.min_k + 3.0))
    results.append(CheckResult(
        "lg", "LG operator spectrum pinned to (-3, 1)", worst <= 1e-9, trials, f"max drift {worst:.2e}"
    ))

    trials = n(1000)
    ok = True
    for _ in range(trials):
        qs = [prandom.dichotomic_observable(2, rng) for _ in range(3)]
        rho = prandom.density_matrix(8, rng)
        k = float(np.trace(rho @ lg_operator(*qs)).real)
        ok &= -3.0 - 1e-9 <= k <= 1.0 + 1e-9
    results.append(CheckResult("lg", "tripartite states keep K in [-3, 1]", ok, trials))

    trials = n(200)
    worst = -np.inf
    z = PAULI_1Q["Z"]
    for _ in range(trials):
        ch = prandom.oi_channel(2, rng)
        rho = prandom.incoherent_state(2, rng)
        worst = max(worst, lg_evaluate(LgScenario(rho, ch, ch, z)).k)
    results.append(CheckResult(
        "lg", "OI legs with incoherent states respect K <= 1", worst <= 1.0 + 1e-9,
        trials, f"max K {worst:.9f}"
    ))

    trials = n(20)
    ok = True
    worst_sigma = 0.0
    for t in range(trials):
        rho = prandom.density_matrix(2, rng)
        ch = prandom.channel(2, 2, env_dim=3, rng=rng)
        obs = [PAULI_1Q[c] for c in "XYZ"]
        a = obs[t % 3]
        b = obs[(t + 1) % 3]
        exact = float(np.trace(pdm_closed_form(rho, ch).mat @ kron(a, b)).real)
        sample = sample_two_time(rho, ch, a, b, 100_000, int(rng.integers(2**32)))
        sigma = max(sample.stderr, 1e-12)
        pull = abs(sample.mean - exact) / sigma
        worst_sigma = max(worst_sigma, pull)
        ok &= pull <= 5.0
    results.append(CheckResult(
        "lg", "sampled correlators match exact within 5 sigma", ok, trials, f"max pull {worst_sigma:.2f}"
    ))
    return results


SUITES = {"pdm": verify_pdm, "coherence": verify_coherence, "lg": verify_lg}


def run_suites(which: str = "all", seed: int | None = None, scale: float = 1.0) -> list[CheckResult]:
    names = list(SUITES) if which == "all" else [which]
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
        kwargs = {"scale": scale}
        if seed is not None:
            kwargs["seed"] = seed
        results.extend(SUITES[name](**kwargs))
    return results
