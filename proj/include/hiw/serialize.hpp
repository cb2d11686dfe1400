#pragma once

// JSON documents for spaces and eigenbases. Doubles are written with 17
// significant digits, so a round trip is exact.

#include <json.hpp>
#include <optional>
#include <string>

#include "hiw/forms.hpp"

namespace hiw {

inline constexpr int kFormsSchemaVersion = 1;

/// Everything the L-function and kernel layers need from one (k, N, psi).
struct FormsDocument {
  Space space;
  std::optional<Space> twisted;  // target of H_{4N} when it is not `space` itself
  Eigenbasis eigen;
};

FormsDocument build_forms(const SpaceParams& params, const SpaceOptions& options = {});

/// The Fricke target basis: `twisted` when present, otherwise `space`.
const Space& fricke_target(const FormsDocument& doc);

nlohmann::json to_json(const QExpansion& f);
QExpansion qexpansion_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Space& space);
Space space_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Eigenbasis& eb);
Eigenbasis eigenbasis_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FormsDocument& doc);
FormsDocument forms_from_json(const nlohmann::json& j);

std::string dump(const nlohmann::json& j);

}  // namespace hiw
