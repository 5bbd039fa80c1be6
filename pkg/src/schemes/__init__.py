from src.schemes.library import ConservationTriple, Scheme, StepperKind, get_scheme, scheme_names
from src.schemes.ansatz import ansatz_names, get_ansatz
from src.schemes.verify import (
    SymmetryCheck,
    TripleReport,
    certified_triples,
    check_symmetries,
    describe_multipliers,
    verify_conservation_identity,
)

__all__ = [
    "ConservationTriple", "Scheme", "StepperKind", "SymmetryCheck", "TripleReport", "ansatz_names",
    "certified_triples", "check_symmetries", "describe_multipliers", "get_ansatz", "get_scheme",
    "scheme_names", "verify_conservation_identity",
]
