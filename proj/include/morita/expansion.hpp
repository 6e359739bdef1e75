#pragma once

// Expansion of models along extension steps.

#include <vector>

#include "morita/extension.hpp"
#include "morita/structure.hpp"

namespace morita {

/// The expansion of a model M of T to the signature derived by `step`:
/// products are Pair elements, coproducts InjL/InjR, subsorts Sub over the
/// satisfying elements and quotients one Class per equivalence class, named
/// by its least member. Throws AdmissibilityFailsInModel with the offending
/// tuple when a definition does not apply in M.
FiniteStructure expand_model(const FiniteStructure& M, const Theory& T, const ExtensionStep& step);

/// Left fold of expand_model; errors name the failing step.
FiniteStructure expand_chain(const FiniteStructure& M, const Theory& T,
                             const std::vector<ExtensionStep>& steps);

/// T extended by every step in turn.
Theory extend_chain(const Theory& T, const std::vector<ExtensionStep>& steps);

}  // namespace morita
