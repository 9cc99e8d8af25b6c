#pragma once

#include <json.hpp>

namespace hpmine {

/// Insertion-ordered JSON; schema documents keep a fixed key order.
using Json = nlohmann::ordered_json;

}  // namespace hpmine
