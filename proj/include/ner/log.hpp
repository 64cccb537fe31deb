#pragma once

#include <string_view>

namespace ner::log {

// Warnings go to stderr unless silenced; safe to call from worker threads.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);
bool warnings_enabled();

}  // namespace ner::log
