"""Variable polynomial families and the PET type reduction."""

from .certificate import (
    MPoly,
    ReductionCertificate,
    ReductionRun,
    VdCStep,
    VerificationReport,
    pet_reduce,
    pet_reduce_run,
    verify_certificate,
)
from .sp import ChangeOfVariables, SPProfile, TransformedCoefficient, change_of_variables, sp_profile
from .coeffs import AsymptoticCoefficient, LimitClass, coef
from .family import (
    FormEntry,
    FormReport,
    LeadingVector,
    PolyFamily,
    TypeVector,
    VariablePolynomial,
    bad_shifts,
    choose_pivot,
    family,
    family_type,
    leading_vector,
    lemma_form_check,
    poly,
    vdc_apply,
    vdc_symbolic,
)

__all__ = [
    "AsymptoticCoefficient", "LimitClass", "coef", "VariablePolynomial", "PolyFamily", "TypeVector",
    "LeadingVector", "FormEntry", "FormReport", "poly", "family", "family_type", "leading_vector",
    "vdc_apply", "vdc_symbolic", "lemma_form_check", "bad_shifts", "choose_pivot", "pet_reduce",
    "pet_reduce_run", "verify_certificate", "ReductionCertificate", "ReductionRun", "VdCStep",
    "VerificationReport", "MPoly", "SPProfile", "sp_profile", "ChangeOfVariables",
    "TransformedCoefficient", "change_of_variables",
]
