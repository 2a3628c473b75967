"""Exception types shared across the package.

Each exception carries a short machine-readable ``category`` string; the CLI
maps categories onto exit codes and emits them as JSON on stderr.
"""


class KgsumsError(Exception):
    category = "error"


class NotAUnit(KgsumsError, ValueError):
    """A residue is not invertible for the given modulus."""

    category = "not_a_unit"

    def __init__(self, x: int, q: int, gcd: int):
        super().__init__(f"{x} is not a unit modulo {q}: gcd({x}, {q}) = {gcd}")
        self.x = x
        self.q = q
        self.gcd = gcd


class DomainRestriction(KgsumsError, ValueError):
    """Input lies outside the domain where the operation is defined."""

    category = "domain_restriction"


class InvalidWeight(KgsumsError, ValueError):
    """Weight vector keyed by a residue or character it must not contain."""

    category = "invalid_weight"


class ModulusMismatch(KgsumsError, ValueError):
    """Two objects that must share a modulus do not."""

    category = "modulus_mismatch"


class ResourceLimit(KgsumsError, RuntimeError):
    """An exact enumeration would exceed its documented cap."""

    category = "resource_limit"


class ConfigError(KgsumsError, ValueError):
    """Malformed run-plan configuration."""

    category = "config_error"


class VerificationError(KgsumsError, RuntimeError):
    """Two evaluation paths disagree beyond their combined error budget."""

    category = "verification_failed"
