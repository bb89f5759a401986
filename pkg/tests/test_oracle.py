"""Randomized modular spot-check oracle: determinism, soundness direction,
planted corruption detection."""

import pytest

from curvelim.exactpoly import Polynomial, VarTable, parse_polynomial
from curvelim.ideal import GeneratorSet, Relation, membership
from curvelim.oracle import (
    DEFAULT_PRIME,
    OracleError,
    SpotCheckConfig,
    check_certificate,
    check_identity,
    is_probable_prime,
    sample_point,
)

VT = VarTable(["x", "y", "z"])


def poly(text):
    return parse_polynomial(text, VT)


class TestConfig:
    def test_default_prime_is_prime_and_large(self):
        assert DEFAULT_PRIME > 2 ** 61
        assert is_probable_prime(DEFAULT_PRIME)

    def test_bad_modulus_rejected(self):
        with pytest.raises(OracleError):
            SpotCheckConfig(prime=2 ** 61 - 1)   # prime but too small
        with pytest.raises(OracleError):
            SpotCheckConfig(prime=2 ** 62)       # not prime
        with pytest.raises(OracleError):
            SpotCheckConfig(trials=0)


class TestIdentity:
    def test_true_identity_passes(self):
        res = check_identity(poly("(x + 1)^2"), poly("x^2 + 2*x + 1"),
                             SpotCheckConfig(trials=100))
        assert res.verdict == "pass"
        assert res.trials == 100

    def test_planted_non_identity_fails_with_witness(self):
        res = check_identity(poly("x^2"), poly("x"), SpotCheckConfig(trials=100))
        assert res.verdict == "fail"
        w = res.failures[0]
        assert int(w["residue"]) != 0
        # witness confirmed at three further primes
        assert len(w["confirmations"]) == 3
        assert all(c["residue"] != 0 for c in w["confirmations"])

    def test_per_trial_bound(self):
        from fractions import Fraction
        res = check_identity(poly("x^3*y^2"), poly("x^3*y^2"), SpotCheckConfig(trials=1))
        assert res.per_trial_bound == Fraction(res.total_degree, DEFAULT_PRIME)
        assert res.per_trial_bound < Fraction(1, 2 ** 40)


class TestDeterminism:
    def test_point_sequences_reproducible(self):
        cfg = SpotCheckConfig(seed=42)
        a = sample_point(cfg, "step", 3, ["x", "y"])
        b = sample_point(cfg, "step", 3, ["x", "y"])
        assert a == b
        c = sample_point(SpotCheckConfig(seed=43), "step", 3, ["x", "y"])
        assert a != c

    def test_verdicts_reproducible(self):
        cfg = SpotCheckConfig(seed=7, trials=20)
        r1 = check_identity(poly("x*y"), poly("y*x"), cfg)
        r2 = check_identity(poly("x*y"), poly("y*x"), cfg)
        assert r1.as_dict() == r2.as_dict()


class TestCertificates:
    def _certificate(self):
        gs = GeneratorSet(VT, [Relation("g1", poly("x - 1")),
                               Relation("g2", poly("y - x"))])
        cert = membership(poly("y^2 - 1"), gs)
        return cert, gs

    def test_zero_target_trivial_pass(self):
        gs = GeneratorSet(VT, [Relation("g", poly("x"))])
        cert = membership(Polynomial.zero(VT), gs)
        res = check_certificate(cert, cfg=SpotCheckConfig(trials=10))
        assert res.verdict == "pass"

    def test_real_certificate_passes(self):
        cert, gs = self._certificate()
        res = check_certificate(cert, gens=gs, cfg=SpotCheckConfig(trials=100))
        assert res.verdict == "pass"

    def test_corrupted_cofactor_fails(self):
        cert, gs = self._certificate()

        class Corrupted:
            target = cert.target
            multiplier = cert.multiplier
            power = cert.power
            target_id = "corrupted"
            pairs = {k: (v + poly("1") if i == 0 else v)
                     for i, (k, v) in enumerate(sorted(cert.pairs.items()))}

            def generator_poly(self, rid):
                return cert.generator_poly(rid)

        res = check_certificate(Corrupted(), cfg=SpotCheckConfig(trials=50))
        assert res.verdict == "fail"
        assert res.failures

    def test_dangling_generator_reference(self):
        cert, gs = self._certificate()
        small = GeneratorSet(VT, [Relation("g1", poly("x - 1"))])
        if "g2" in cert.pairs:
            with pytest.raises(OracleError):
                check_certificate(cert, gens=small, cfg=SpotCheckConfig(trials=1))
