#include "mfa/log.hpp"

#include <atomic>
#include <iostream>

namespace mfa::log {

namespace {
std::atomic<bool> gEnabled{true};
}

void warn(std::string_view message) {
    if (gEnabled.load(std::memory_order_relaxed)) {
        std::clog << "[mfa] warning: " << message << '\n';
    }
}

void setWarningsEnabled(bool enabled) {
    gEnabled.store(enabled, std::memory_order_relaxed);
}

bool warningsEnabled() {
    return gEnabled.load(std::memory_order_relaxed);
}

} // namespace mfa::log
