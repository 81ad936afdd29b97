#include "support.hpp"

#include "mfa/log.hpp"

namespace testing {

QuietWarnings::QuietWarnings() : previous(mfa::log::warningsEnabled()) { mfa::log::setWarningsEnabled(false); }
QuietWarnings::~QuietWarnings() { mfa::log::setWarningsEnabled(previous); }

} // namespace testing
