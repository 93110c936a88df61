#pragma once

#include <optional>
#include <string_view>

namespace sentinel {

enum class Verdict { kSafe, kCaution, kDanger };

std::string_view verdict_name(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view name);

}  // namespace sentinel
