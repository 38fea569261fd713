#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "randclust/models.hpp"

namespace randclust {

using ModelSpec = std::variant<ScbmSpec, DcScbmSpec>;

/// Parse a JSON model spec {n, ky, kz, b, row_sizes, col_sizes} with optional
/// theta_y / theta_z (either one implies the degree-corrected model, with the
/// missing vector defaulting to all ones). The result is validated.
ModelSpec read_model_spec(std::istream& in);
ModelSpec read_model_spec_file(const std::string& path);

const ScbmSpec& base_spec(const ModelSpec& spec);

}  // namespace randclust
