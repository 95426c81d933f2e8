from __future__ import annotations

import numpy as np
import pytest

from src.bloch import decompose
from src.errors import DimensionError, ValidationError
from src.matcore import partial_trace
from src.states import (
    StateSpec,
    biseparable_ket,
    build_state,
    ghz,
    maximally_mixed,
    random_biseparable,
    random_product,
    random_pure,
    w_state,
    white_noise_mix,
)


def test_ghz_qubit_entries():
    rho = ghz(2).rho
    for i, j in [(0, 0), (0, 7), (7, 0), (7, 7)]:
        assert rho[i, j] == pytest.approx(0.5, abs=1e-15)
    assert np.count_nonzero(np.abs(rho) > 1e-15) == 4


def test_ghz_qutrit_entries_and_purity():
    s = ghz(3)
    assert np.trace(s.rho).real == pytest.approx(1.0, abs=1e-12)
    assert s.purity() == pytest.approx(1.0, abs=1e-12)
    for i in (0, 13, 26):
        for j in (0, 13, 26):
            assert s.rho[i, j] == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_w_state_is_pure_and_symmetric():
    s = w_state(3)
    assert s.purity() == pytest.approx(1.0, abs=1e-12)
    for idx in (9, 3, 1):
        assert s.rho[idx, idx] == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("d", [0, 1])
def test_ghz_rejects_small_d(d):
    with pytest.raises(DimensionError):
        ghz(d)


def test_white_noise_endpoints():
    pure = ghz(2)
    assert white_noise_mix(pure, 1.0) is pure
    np.testing.assert_allclose(white_noise_mix(pure, 0.0).rho, maximally_mixed(2).rho, atol=0)


@pytest.mark.parametrize("v", [-0.1, 1.5, float("nan")])
def test_white_noise_rejects_bad_visibility(v):
    with pytest.raises(ValidationError, match="Visibility"):
        white_noise_mix(ghz(2), v)


def test_white_noise_scales_tensors_linearly():
    pure = decompose(ghz(3))
    for v in (0.2, 0.5, 0.9):
        mixed = decompose(white_noise_mix(ghz(3), v))
        np.testing.assert_allclose(mixed.T123, v * pure.T123, atol=1e-12)
        np.testing.assert_allclose(mixed.T12, v * pure.T12, atol=1e-12)


def test_random_pure_is_normalized_and_deterministic():
    a = random_pure(3, 3, seed=42)
    b = random_pure(3, 3, seed=42)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, random_pure(3, 3, seed=43))


def test_random_pure_real_option():
    v = random_pure(2, 3, seed=1, real=True)
    assert np.all(v.imag == 0.0)


def test_haar_single_qubit_purity_average():
    rng = np.random.default_rng(99)
    purities = []
    for _ in range(1000):
        v = random_pure(2, 2, rng)
        red = partial_trace(np.outer(v, v.conj()), (2, 2), keep=(1,))
        purities.append(np.trace(red @ red).real)
    # (m + n) / (mn + 1) for m = n = 2
    assert np.mean(purities) == pytest.approx(0.8, abs=0.02)


@pytest.mark.parametrize("bp", ["1|23", "2|13", "3|12"])
def test_biseparable_ket_places_the_pair(bp):
    single = np.array([0.0, 1.0])
    pair = np.array([1.0, 0.0, 0.0, 0.0])  # |00>
    ket = biseparable_ket(single, pair, bp)
    expected = {"1|23": 0b100, "2|13": 0b010, "3|12": 0b001}[bp]
    assert np.argmax(np.abs(ket)) == expected


def test_biseparable_ket_keeps_pair_order():
    single = np.array([1.0, 0.0])
    pair = np.array([0.0, 1.0, 0.0, 0.0])  # |01> on (g, h)
    # 2|13: g=1, h=3, so |0>_1 |0>_2 |1>_3
    assert np.argmax(np.abs(biseparable_ket(single, pair, "2|13"))) == 0b001


def test_random_biseparable_weights_and_psd():
    for seed in range(1000):
        s = random_biseparable("mixed", 2, seed, mixture_terms=3)
        assert np.trace(s.rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(s.rho).min() > -1e-10


def test_random_biseparable_single_term_is_pure_product():
    s = random_biseparable("2|13", 3, seed=5)
    assert s.purity() == pytest.approx(1.0, abs=1e-12)
    red = partial_trace(s.rho, (3, 3, 3), keep=(2,))
    assert np.trace(red @ red).real == pytest.approx(1.0, abs=1e-12)


def test_random_biseparable_rejects_bad_input():
    with pytest.raises(ValidationError):
        random_biseparable("12|3", 2, 0)
    with pytest.raises(ValidationError):
        random_biseparable("1|23", 2, 0, mixture_terms=0)


def test_random_product_reductions_are_pure():
    s = random_product(2, seed=3)
    for k in (1, 2, 3):
        red = partial_trace(s.rho, (2, 2, 2), keep=(k,))
        assert np.trace(red @ red).real == pytest.approx(1.0, abs=1e-12)


def test_state_spec_canonicalizes_and_validates():
    spec = StateSpec(family="GHZ", d=3, bipartition="b|ac")
    assert spec.family == "ghz"
    assert spec.bipartition == "2|13"
    with pytest.raises(ValidationError):
        StateSpec(family="cluster", d=2)
    with pytest.raises(ValidationError):
        StateSpec(family="ghz", d=2, visibility=1.2)
    with pytest.raises(DimensionError):
        StateSpec(family="ghz", d=1)


def test_build_state_families():
    assert build_state(StateSpec("ghz", 2, visibility=0.0)).purity() == pytest.approx(1 / 8)
    assert build_state(StateSpec("white-noise", 3, visibility=0.7)).purity() == pytest.approx(1 / 27)
    a = build_state(StateSpec("random-pure", 2, seed=4))
    b = build_state(StateSpec("random-pure", 2, seed=4))
    np.testing.assert_array_equal(a.rho, b.rho)
    assert build_state(StateSpec("bisep-mixture", 2, seed=1)).d == 2
    assert build_state(StateSpec("product", 3, seed=1)).purity() == pytest.approx(1.0, abs=1e-12)


def test_build_state_custom():
    g = ghz(2)
    assert build_state(StateSpec("custom", 2), custom=g) is g
    with pytest.raises(ValidationError):
        build_state(StateSpec("custom", 2))
    with pytest.raises(DimensionError):
        build_state(StateSpec("custom", 3), custom=g)
