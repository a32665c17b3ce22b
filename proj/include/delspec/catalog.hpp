#pragma once

#include <string>
#include <vector>

namespace delspec {

/// Names of the built-in problems: hayes, ode, re-basic, delayed-mathieu.
std::vector<std::string> catalog_names();

/// JSON configuration document for a built-in problem, ready for
/// parse_config. Throws ConfigError for unknown names.
std::string catalog_document(const std::string& name);

}  // namespace delspec
