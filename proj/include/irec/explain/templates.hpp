#pragma once

#include <string>
#include <string_view>

namespace irec::explain {

enum class Strategy { UserTypes, ModelBased, HistoryBased, Combined };

// "user-types", "model", "history", "combined".
std::string_view to_string(Strategy strategy);
// Throws ConfigError on an unknown name.
Strategy parse_strategy(std::string_view name);

// System prompt for a strategy, byte-identical to prompts/<name>.txt. With
// keep_translation=false the closing French-translation instruction is replaced
// by a language-neutral one (the user-type prompt has no such clause).
std::string system_template(Strategy strategy, bool keep_translation = true);

}  // namespace irec::explain
