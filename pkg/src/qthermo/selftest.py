"""Fast invariant corpus behind the `selftest` CLI subcommand."""

from __future__ import annotations

import math

import numpy as np

from . import channel, diagnostics, metrology, operators as op, states


def _assert(cond: bool, msg: str) -> None:
    if not cond:
        raise AssertionError(msg)


def check_kraus_completeness():
    for p in np.linspace(0, 1, 6):
        for q in np.linspace(0, 1, 6):
            ks = channel.kraus_ops(channel.ChannelParams(p=float(p), q=float(q), lam=-1.0, t=0.0))
            acc = sum(k.conj().T @ k for k in ks)
            _assert(np.max(np.abs(acc - np.eye(2))) < 1e-14, f"completeness fails at p={p}, q={q}")


def check_thermal_fixed_point():
    bath = channel.BathSpec(0.5)
    th = states.thermal_qubit(0.5)
    for t in (0.1, 1.0, 5.0):
        out = channel.evolve_single_closed(th, channel.channel_params(bath, t))
        _assert(np.max(np.abs(out.mat - th.mat)) < 1e-12, "thermal state must be invariant")


def check_closed_vs_lindblad():
    bath = channel.BathSpec(0.7, 1.3)
    rho = states.product_state(0.35, 0.9, 0.4, 1)
    for t in (0.05, 0.4, 2.0):
        a = channel.evolve_single_closed(rho, channel.channel_params(bath, t)).mat
        b = channel.evolve_single_lindblad(rho, bath, t).mat
        _assert(np.max(np.abs(np.abs(a) - np.abs(b))) < 1e-12, "population/coherence magnitudes differ")


def check_semigroup():
    bath = channel.BathSpec(0.4)
    rho = states.product_state(0.2, 0.7, 0.0, 1)
    one = channel.evolve_single_closed(
        channel.evolve_single_closed(rho, channel.channel_params(bath, 0.3)),
        channel.channel_params(bath, 0.5),
    )
    two = channel.evolve_single_closed(rho, channel.channel_params(bath, 0.8))
    _assert(np.max(np.abs(one.mat - two.mat)) < 1e-12, "semigroup composition fails")


def check_derivative_vs_fd():
    bath = channel.BathSpec(0.5)
    rho = states.squeezed(0.9, 0.2, 2)
    an = channel.d_evolve_dbeta(rho, bath, 0.3)
    fd = channel.d_evolve_dbeta(rho, bath, 0.3, method="finite_difference")
    _assert(np.max(np.abs(an - fd)) < 1e-8, "analytic derivative disagrees with finite difference")


def check_zero_time_qfi():
    bath = channel.BathSpec(0.5)
    _assert(metrology.qfi_at(states.StateSpec("ghz", 2), bath, 0.0) == 0.0, "QFI must vanish at t=0")


def check_asymptote():
    bath = channel.BathSpec(0.5)
    t = 20.0 / abs(bath.lam)
    got = metrology.qfi_at(states.StateSpec("ghz", 2), bath, t)
    _assert(abs(got - metrology.thermal_asymptote(bath, 2)) < 1e-6, "asymptote mismatch")


def check_additivity():
    bath = channel.BathSpec(0.5)
    q1 = metrology.qfi_of_state(states.product_state(0.3, 0.6, 0.9, 1), bath, 0.4)
    q3 = metrology.qfi_of_state(states.product_state(0.3, 0.6, 0.9, 3), bath, 0.4)
    _assert(abs(q3 - 3 * q1) / (3 * q1) < 1e-9, "QFI not additive on product states")


def check_m2_null():
    for beta in (0.3, 0.8):
        for t in (0.1, 1.0):
            rep = metrology.m1_m2(channel.BathSpec(beta), t)
            _assert(rep.m2_norm <= 1e-12, f"second information matrix not null at beta={beta}, t={t}")


def check_negativity_oracle():
    _assert(abs(diagnostics.negativity(states.ghz(2)) - 0.5) < 1e-12, "GHZ negativity must be 1/2")
    _assert(diagnostics.negativity(states.identity_mixture(1.0 / 3.0, 2)) < 1e-10, "separable at threshold")
    _assert(diagnostics.negativity(states.identity_mixture(0.6, 2)) > 0.0, "entangled above threshold")


def check_reduced_closed_form():
    got = states.reduced_squeezed_closed_form(0.7, 0.3, 4)
    brute = op.partial_trace(states.squeezed(0.7, 0.3, 4), {0})
    _assert(np.max(np.abs(got.mat - brute.mat)) < 1e-12, "closed-form reduction mismatch")


def check_phase_invariance():
    bath = channel.BathSpec(0.5)
    rho = states.squeezed(1.1, 0.0, 2)
    a = metrology.qfi_of_state(rho, bath, 0.3)
    b = metrology.qfi_of_state(rho, bath, 0.3, lab_frame=True)
    _assert(abs(a - b) < 1e-9, "QFI must not depend on the coherent phase")


def check_partial_trace_product():
    r1 = states.product_state(0.3, 0.5, 0.2, 1)
    r2 = states.thermal_qubit(1.0)
    joint = op.from_matrix(op.kron(r1.mat, r2.mat))
    _assert(np.max(np.abs(op.partial_trace(joint, {0}).mat - r1.mat)) < 1e-14, "keep-first fails")
    _assert(np.max(np.abs(op.partial_trace(joint, {1}).mat - r2.mat)) < 1e-14, "keep-second fails")


def check_local_vs_full_kraus():
    bath = channel.BathSpec(0.6)
    ks = channel.kraus_ops(channel.channel_params(bath, 0.25))
    rho = states.ghz(2)
    explicit = np.zeros((4, 4), dtype=complex)
    for k1 in ks:
        for k2 in ks:
            big = np.kron(k1, k2)
            explicit += big @ rho.mat @ big.conj().T
    seq = channel.evolve_ensemble(rho, bath, 0.25)
    _assert(np.max(np.abs(explicit - seq.mat)) < 1e-12, "sequential != explicit Kraus sum")


CHECKS = [
    ("kraus_completeness", check_kraus_completeness),
    ("thermal_fixed_point", check_thermal_fixed_point),
    ("closed_vs_lindblad", check_closed_vs_lindblad),
    ("semigroup", check_semigroup),
    ("derivative_vs_fd", check_derivative_vs_fd),
    ("zero_time_qfi", check_zero_time_qfi),
    ("asymptote", check_asymptote),
    ("additivity", check_additivity),
    ("m2_null", check_m2_null),
    ("negativity_oracle", check_negativity_oracle),
    ("reduced_closed_form", check_reduced_closed_form),
    ("phase_invariance", check_phase_invariance),
    ("partial_trace_product", check_partial_trace_product),
    ("local_vs_full_kraus", check_local_vs_full_kraus),
]


def run(out=print) -> int:
    failures = 0
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - report every failure kind
            failures += 1
            out(f"FAIL {name}: {exc}")
        else:
            out(f"ok   {name}")
    return failures
