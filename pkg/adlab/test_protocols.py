"""
Pruebas de los protocolos constructivos: destilación, dilución, bits y puente
"""

import math

import numpy as np
import pytest

from adlab.divergences import d_max, d_min, trace_distance
from adlab.errors import DimensionError, DomainError
from adlab.linalg import Box, State, apply, basis_state, compose, isometry_channel, pi_state, tensor
from adlab.protocols import (
    BitsBox, InfiniteCost, InfiniteDistinguishability, appending_channel, approx_distill_channel,
    bridge_protocol, discard_channel, exact_dilute_channel, exact_distill_channel, impossibility_witness,
    isometry_inverter, orthogonal_to_bits_channel, replay, standardize_bits
)
from adlab.sdp import smooth_dmin
from adlab.testkit import random_isometry, random_state


def test_bits_box():
    bits = BitsBox(2)
    assert bits.M == 4.0
    rho, sigma = bits.box()
    assert np.allclose(sigma.matrix, np.diag([0.25, 0.75]))
    assert bits.tensor_form().dim == 4
    with pytest.raises(DomainError):
        BitsBox(-1)
    with pytest.raises(DomainError):
        BitsBox(1.5).tensor_form()


def test_exact_distillation_reaches_dmin():
    rho, sigma = random_state(3, 2, seed=1), random_state(3, seed=2)
    result = exact_distill_channel(rho, sigma)
    assert math.log2(result.M) == pytest.approx(float(d_min(rho, sigma)), abs=1e-10)
    report = replay(result.channel, Box(rho, sigma), Box(basis_state(0, 2), pi_state(result.M)))
    assert report.first_state_error <= 1e-8
    assert report.second_state_residual <= 1e-8


def test_exact_dilution_reaches_dmax():
    rho, sigma = random_state(3, seed=3), random_state(3, seed=4)
    result = exact_dilute_channel(rho, sigma)
    assert result.lam == pytest.approx(float(d_max(rho, sigma)), abs=1e-10)
    report = replay(result.channel, BitsBox(result.lam).box(), Box(rho, sigma))
    assert report.first_state_error <= 1e-8
    assert report.second_state_residual <= 1e-8


def test_dilution_of_trivial_box_is_free():
    rho = random_state(2, seed=5)
    result = exact_dilute_channel(rho, rho)
    assert result.lam == 0.0
    report = replay(result.channel, BitsBox(0).box(), Box(rho, rho))
    assert report.first_state_error <= 1e-10


def test_infinite_signals():
    zero, one = basis_state(0, 2), basis_state(1, 2)
    distill = exact_distill_channel(zero, one)
    assert isinstance(distill, InfiniteDistinguishability)
    assert distill.value == math.inf
    assert isinstance(exact_dilute_channel(zero, one), InfiniteCost)
    assert isinstance(approx_distill_channel(zero, one, 0.1), InfiniteDistinguishability)


def test_approximate_distillation():
    rho, sigma = random_state(2, seed=6), random_state(2, seed=7)
    eps = 0.1
    result = approx_distill_channel(rho, sigma, eps)
    assert math.log2(result.M) == pytest.approx(float(smooth_dmin(rho, sigma, eps).value), abs=1e-6)
    report = replay(result.channel, Box(rho, sigma), Box(basis_state(0, 2), pi_state(result.M)))
    assert report.first_state_error <= eps + 1e-6
    assert report.second_state_residual <= 1e-8


@pytest.mark.parametrize('m', [1, 2, 3])
def test_standardize_bits(m):
    bits = BitsBox(m)
    compress = replay(standardize_bits('compress', m), bits.tensor_form(), bits.box())
    expand = replay(standardize_bits('expand', m), bits.box(), bits.tensor_form())
    for report in (compress, expand):
        assert report.first_state_error <= 1e-12
        assert report.second_state_residual <= 1e-12


def test_standardize_bits_rejects_bad_arguments():
    with pytest.raises(DomainError):
        standardize_bits('sideways', 2)
    with pytest.raises(DomainError):
        standardize_bits('compress', 1.5)


def test_orthogonal_pair_generates_any_bits():
    report = replay(orthogonal_to_bits_channel(2.5), Box(basis_state(0, 2), basis_state(1, 2)), BitsBox(2.5).box())
    assert report.first_state_error <= 1e-12
    assert report.second_state_residual <= 1e-12


def test_impossibility_witness():
    assert impossibility_witness(2, 3).min_eigenvalue < 0
    assert impossibility_witness(3, 2).min_eigenvalue >= 0
    assert impossibility_witness(2, 2).min_eigenvalue >= -1e-12
    with pytest.raises(DomainError):
        impossibility_witness(0, 1)


def test_isometry_inverter():
    U = random_isometry(2, 3, seed=8)
    tau = random_state(2, seed=9)
    rho = random_state(2, seed=10)
    inverter = isometry_inverter(U, tau)
    assert np.allclose(apply(inverter, apply(isometry_channel(U), rho)).matrix, rho.matrix, atol=1e-10)

    outside = np.eye(3) - U @ U.conj().T
    leftover = State(outside / np.real(np.trace(outside)))
    assert np.allclose(apply(inverter, leftover).matrix, tau.matrix, atol=1e-10)

    with pytest.raises(DomainError):
        isometry_inverter(2 * U, tau)


def test_appending_then_discarding_recovers_box():
    rho, sigma = random_state(2, seed=11), random_state(2, seed=12)
    tau = random_state(3, seed=13)
    append = appending_channel(2, tau)
    assert np.allclose(apply(append, rho).matrix, tensor(rho, tau).matrix, atol=1e-12)
    round_trip = compose(discard_channel(2, 3), append)
    report = replay(round_trip, Box(rho, sigma), Box(rho, sigma))
    assert report.first_state_error <= 1e-10
    assert report.second_state_residual <= 1e-10


def test_replay_validation():
    box = Box(random_state(2, seed=14), random_state(2, seed=15))
    with pytest.raises(DimensionError):
        replay(standardize_bits('compress', 2), box, box)
    with pytest.raises(DomainError):
        replay(orthogonal_to_bits_channel(1), box, box, metric='hellinger')
    report = replay(orthogonal_to_bits_channel(1), box, box, metric='fid')
    assert report.metric == 'infidelity'


def test_bridge_protocol():
    rho, sigma = random_state(2, seed=16), random_state(2, seed=17)
    eps1, eps2 = 0.1, 0.1
    report = bridge_protocol(rho, sigma, eps1, eps2)
    assert report.first_state_error <= eps1 + eps2 + 1e-6
    assert report.second_state_residual <= 1e-7
    assert report.bound_margin >= -1e-6


def test_bridge_protocol_infinite_and_invalid():
    report = bridge_protocol(basis_state(0, 2), basis_state(1, 2), 0.1, 0.2)
    assert report.bound_margin == math.inf
    with pytest.raises(DomainError):
        bridge_protocol(basis_state(0, 2), pi_state(2), 0.5, 0.5)


def _distill_then_dilute(rho, sigma) -> float:
    distill = exact_distill_channel(rho, sigma)
    dilute = exact_dilute_channel(rho, sigma)
    round_trip = compose(dilute.channel, distill.channel)
    report = replay(round_trip, Box(rho, sigma), Box(rho, sigma))
    return max(report.first_state_error, trace_distance(apply(round_trip, sigma), sigma))


def test_distill_then_dilute_loses_the_box():
    rho, sigma = State(np.diag([0.9, 0.1])), State(np.diag([0.5, 0.5]))
    assert float(d_min(rho, sigma)) < float(d_max(rho, sigma))
    # ρ de rango completo: se destilan 0 bits y σ vuelve como ρ
    assert _distill_then_dilute(rho, sigma) == pytest.approx(0.4, abs=1e-8)
    assert _distill_then_dilute(random_state(3, 2, seed=40), random_state(3, seed=41)) > 1e-3


@pytest.mark.parametrize('q', [0.5, 0.3, 0.05])
def test_distill_then_dilute_reversible_for_binary_pairs(q):
    rho, sigma = basis_state(0, 2), State(np.diag([q, 1.0 - q]))
    assert float(d_min(rho, sigma)) == pytest.approx(float(d_max(rho, sigma)), abs=1e-12)
    assert _distill_then_dilute(rho, sigma) <= 1e-8
