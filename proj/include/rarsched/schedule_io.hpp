#pragma once

#include <iosfwd>

#include "rarsched/types.hpp"

namespace rarsched {

// Schedule round trip: one CSV row per placement span, GPUs as
// space-separated server:gpu pairs.
void write_schedule_csv(const Schedule& schedule, std::ostream& out);
Schedule read_schedule_csv(std::istream& in);

}  // namespace rarsched
