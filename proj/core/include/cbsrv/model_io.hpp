#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cbsrv/model.hpp"

namespace cbsrv {

/// Text form (see docs/model-format.md) or, when the document starts with '{', JSON.
/// The result is validated.
/// Errors: SyntaxError; ValidationError listing every violation.
CompositeSystem parse_model(std::string_view text);

/// Same as parse_model without the validation pass.
CompositeSystem parse_model_unchecked(std::string_view text);

std::string render_model(const CompositeSystem& sys);
std::string render_model_json(const CompositeSystem& sys);
CompositeSystem parse_model_json(std::string_view text);

/// Reads a file and parses it. Errors as parse_model, plus Error(invalid_argument) when
/// the file cannot be read.
CompositeSystem load_model(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

}  // namespace cbsrv
