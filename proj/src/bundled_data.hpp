#pragma once

#include <string_view>

namespace privrec::bundled {

// Generated at configure time from data/*.json.
extern const std::string_view kDefaultSchema;
extern const std::string_view kQuestionnaire;

}  // namespace privrec::bundled
