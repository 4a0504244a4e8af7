#pragma once

#include <functional>
#include <string_view>

namespace casimir {

using WarningHandler = std::function<void(std::string_view)>;

// Installs a sink for non-fatal warnings and returns the previous one. The
// default writes to stderr. Not synchronized: install before spawning work.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace casimir
