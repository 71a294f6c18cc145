#pragma once

#include <filesystem>

#include "dq/context.hpp"

namespace dq {

/// Parses a .dqx contextual-system file. Sections: source, context,
/// external, mapping, cqp, quality (see docs/dqx-format.md). Contextual data
/// named by `data "<dir>".` loads relative to the file. The returned system
/// is fully validated.
ContextualSystem parse_system_file(const std::filesystem::path& path);

ContextualSystem parse_system_text(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace dq
