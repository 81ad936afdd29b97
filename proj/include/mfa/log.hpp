#pragma once

#include <string_view>

namespace mfa::log {

/// Warnings go to std::clog unless silenced (tests silence expected ones).
void warn(std::string_view message);
void setWarningsEnabled(bool enabled);
bool warningsEnabled();

} // namespace mfa::log
