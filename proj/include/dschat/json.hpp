#pragma once

#include <nlohmann/json.hpp>

namespace dschat {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

}  // namespace dschat
