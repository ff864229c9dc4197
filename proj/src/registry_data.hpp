#pragma once

#include <vector>

#include "socinstruct/registry.hpp"

namespace socinstruct::detail {

std::vector<TaskSpec> builtin_tasks();

}  // namespace socinstruct::detail
