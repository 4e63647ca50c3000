"""Definitional extensions, mergers, equivalence chains and translations
between relational first-order theories, checked on all finite models up to
a bound."""

from defeq.definability import (
    ChainStep, DefEqCertificate, DefinitionSet, ExplicitDefinition, MergeCertificate,
    apply_extension, compose_disjoint_mergers, define, incompatibility_witness, search_merge,
    sentence_of, verify_defeq_chain, verify_merge,
)
from defeq.modelrel import check_model_intertrans, check_model_merge
from defeq.parser import ParseError, parse_formula, parse_theory, print_formula, print_theory
from defeq.renaming import (
    Renaming, apply_renaming, defeq_two_step, fresh_renaming, renaming_to_merger,
    transport_merger,
)
from defeq.semantics import (
    FiniteModel, bounded_entails, bounded_equivalent, defined_relation, enumerate_models,
    expand_by_definitions, models_of, models_theory, reduct, satisfies,
)
from defeq.syntax import (
    And, Eq, Exists, ExistsUnique, Forall, Formula, Iff, Implies, Not, Or, Pred, RelationSymbol,
    Signature, Theory, Var, apply_symbol_map, free_variables, substitute,
)
from defeq.translation import (
    Translation, apply_translation, check_intertranslatable, check_translation,
    defeq_to_intertranslation, merger_to_translations, model_map, translations_to_merger,
)

__version__ = "0.1.0"

__all__ = [
    "And", "apply_extension", "apply_renaming", "apply_symbol_map", "apply_translation",
    "bounded_entails", "bounded_equivalent", "ChainStep", "check_intertranslatable",
    "check_model_intertrans", "check_model_merge", "check_translation",
    "compose_disjoint_mergers", "defeq_to_intertranslation", "defeq_two_step",
    "DefEqCertificate", "define", "defined_relation", "DefinitionSet", "enumerate_models", "Eq",
    "Exists", "ExistsUnique", "expand_by_definitions", "ExplicitDefinition", "FiniteModel",
    "Forall", "Formula", "free_variables", "fresh_renaming", "Iff", "Implies",
    "incompatibility_witness", "MergeCertificate", "merger_to_translations", "model_map",
    "models_of", "models_theory", "Not", "Or", "parse_formula", "parse_theory", "ParseError",
    "Pred", "print_formula", "print_theory", "reduct", "RelationSymbol", "Renaming",
    "renaming_to_merger", "satisfies", "search_merge", "sentence_of", "Signature", "substitute",
    "Theory", "Translation", "translations_to_merger", "transport_merger", "Var",
    "verify_defeq_chain", "verify_merge",
]

