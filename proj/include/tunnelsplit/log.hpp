#pragma once

#include <functional>
#include <string_view>

namespace tunnelsplit::log {

using Sink = std::function<void(std::string_view)>;

/// Emits a warning through the installed sink (stderr by default).
void warn(std::string_view message);

/// Replaces the warning sink; pass an empty function to silence warnings.
/// Returns the previous sink.
Sink set_sink(Sink sink);

}  // namespace tunnelsplit::log
