"""Independent randomized verification of certificates and polynomial
identities by seeded modular evaluation (Schwartz-Zippel).

This module deliberately re-implements polynomial evaluation from scratch:
it reads the term dictionaries of ``exactpoly.Polynomial`` values directly and
never calls into the ideal machinery or the exactpoly evaluator, so a bug in
the symbolic reduction path cannot hide itself here.

Evaluation points come from counter-mode hashing of (seed, label, trial,
variable), so verdicts are independent of execution order and fully
reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

# 2**64 - 59: a published prime comfortably above 2**61.
DEFAULT_PRIME = 18446744073709551557

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (fixed base set)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class OracleError(Exception):
    """Structural misuse of the oracle (bad prime, dangling references)."""


@dataclass(frozen=True)
class SpotCheckConfig:
    seed: int = 0
    trials: int = 100
    prime: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.trials < 1:
            raise OracleError("trials must be at least 1")
        if self.prime <= 2 ** 61 or self.prime % 2 == 0 or not is_probable_prime(self.prime):
            raise OracleError("modulus must be an odd prime exceeding 2^61")


@dataclass
class SpotCheckResult:
    label: str
    trials: int
    failures: List[dict] = field(default_factory=list)
    per_trial_bound: Fraction = Fraction(0)
    total_degree: int = 0

    @property
    def verdict(self) -> str:
        return "pass" if not self.failures else "fail"

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "trials": self.trials,
            "failures": len(self.failures),
            "witnesses": self.failures[:3],
            "per_trial_bound": float(self.per_trial_bound),
            "total_degree": self.total_degree,
            "verdict": self.verdict,
        }


def _point_value(seed: int, label: str, trial: int, var: str, prime: int) -> int:
    """Counter-mode point derivation: uniform residue from a SHA-256 stream."""
    counter = 0
    while True:
        h = hashlib.sha256(
            f"{seed}|{label}|{trial}|{var}|{counter}".encode()
        ).digest()
        x = int.from_bytes(h[:16], "big")
        # rejection sampling onto [0, prime) from 128 bits
        limit = (1 << 128) - ((1 << 128) % prime)
        if x < limit:
            return x % prime
        counter += 1


def sample_point(cfg: SpotCheckConfig, label: str, trial: int,
                 variables: Sequence[str]) -> Dict[str, int]:
    return {v: _point_value(cfg.seed, label, trial, v, cfg.prime) for v in variables}


def _eval_terms(poly, point: Dict[str, int], prime: int) -> int:
    """Evaluate a Polynomial's term dict at a residue point.

    Independent implementation: walks the raw sparse terms, maps rational
    coefficients through the modular inverse, and accumulates mod the prime.
    """
    names = poly.table.names
    total = 0
    for mono, coeff in poly.terms.items():
        if isinstance(coeff, Fraction):
            c = coeff.numerator % prime * pow(coeff.denominator, -1, prime) % prime
        else:
            c = coeff % prime
        acc = c
        for i, e in enumerate(mono):
            if e:
                acc = acc * pow(point[names[i]], e, prime) % prime
        total = (total + acc) % prime
    return total


def _total_degree(poly) -> int:
    return max((sum(m) for m in poly.terms), default=0)


def check_identity(lhs, rhs, cfg: SpotCheckConfig, label: str = "identity") -> SpotCheckResult:
    """Evaluate lhs - rhs at cfg.trials independent points modulo the prime."""
    if lhs.table != rhs.table:
        raise OracleError("identity operands live over different variable tables")
    variables = sorted(set(lhs.variables()) | set(rhs.variables()))
    deg = max(_total_degree(lhs), _total_degree(rhs))
    result = SpotCheckResult(label, cfg.trials, total_degree=deg,
                             per_trial_bound=Fraction(max(deg, 1), cfg.prime))
    for trial in range(cfg.trials):
        point = sample_point(cfg, label, trial, variables)
        a = _eval_terms(lhs, point, cfg.prime)
        b = _eval_terms(rhs, point, cfg.prime)
        if a != b:
            result.failures.append(_witness(label, trial, point, (a - b) % cfg.prime,
                                            lhs, rhs, cfg))
    return result


def check_certificate(cert, gens=None, target=None,
                      cfg: Optional[SpotCheckConfig] = None,
                      label: str = "") -> SpotCheckResult:
    """Spot-check a certificate-shaped object:

        multiplier**power * target  ==  sum(cofactor_i * generator_i)

    ``cert`` needs attributes target, multiplier, power, pairs (id -> cofactor)
    and generator_poly(id); both ideal.Certificate and pipeline.Identity
    qualify.  ``gens``/``target`` optionally override the embedded references
    (a dangling generator id is a structural error).
    """
    cfg = cfg or SpotCheckConfig()
    label = label or f"certificate:{getattr(cert, 'target_id', '') or 'anonymous'}"
    tgt = target if target is not None else cert.target
    parts: List[Tuple[object, object]] = []
    for rid in sorted(cert.pairs):
        cof = cert.pairs[rid]
        if gens is not None:
            if rid not in gens:
                raise OracleError(f"certificate references unknown generator {rid!r}")
            gp = gens.get(rid).poly
        else:
            gp = cert.generator_poly(rid)
        parts.append((cof, gp))
    variables = set(tgt.variables())
    deg = _total_degree(tgt)
    if cert.power and cert.multiplier is not None:
        variables |= set(cert.multiplier.variables())
        deg += cert.power * _total_degree(cert.multiplier)
    for cof, gp in parts:
        variables |= set(cof.variables()) | set(gp.variables())
        deg = max(deg, _total_degree(cof) + _total_degree(gp))
    variables = sorted(variables)
    result = SpotCheckResult(label, cfg.trials, total_degree=deg,
                             per_trial_bound=Fraction(max(deg, 1), cfg.prime))
    p = cfg.prime
    for trial in range(cfg.trials):
        point = sample_point(cfg, label, trial, variables)
        lhs = _eval_terms(tgt, point, p)
        if cert.power and cert.multiplier is not None:
            lhs = lhs * pow(_eval_terms(cert.multiplier, point, p), cert.power, p) % p
        rhs = 0
        for cof, gp in parts:
            rhs = (rhs + _eval_terms(cof, point, p) * _eval_terms(gp, point, p)) % p
        if lhs != rhs:
            result.failures.append(_witness(label, trial, point, (lhs - rhs) % p,
                                            None, None, cfg))
    return result


def _witness(label: str, trial: int, point: Dict[str, int], residue: int,
             lhs, rhs, cfg: SpotCheckConfig) -> dict:
    """Failure record; the residue is re-checked at three further primes so a
    reported witness is never an artifact of the working modulus."""
    confirm = []
    if lhs is not None and rhs is not None:
        for extra in _extra_primes():
            pt = {v: x % extra for v, x in point.items()}
            a = _eval_terms(lhs, pt, extra)
            b = _eval_terms(rhs, pt, extra)
            confirm.append({"prime": extra, "residue": (a - b) % extra})
    return {
        "label": label,
        "trial": trial,
        "point": {v: str(x) for v, x in sorted(point.items())},
        "residue": str(residue),
        "confirmations": confirm,
    }


def _extra_primes() -> Tuple[int, int, int]:
    # fixed odd primes just above 2^61, for witness confirmation
    return (2305843009213693967, 2305843009213693973, 2305843009213694009)


def check_run_identities(identities: Dict[str, object],
                         cfg: Optional[SpotCheckConfig] = None) -> Dict[str, SpotCheckResult]:
    """Spot-check every certificate/identity a pipeline run produced."""
    cfg = cfg or SpotCheckConfig()
    out = {}
    for label in sorted(identities):
        out[label] = check_certificate(identities[label], cfg=cfg, label=label)
    return out
