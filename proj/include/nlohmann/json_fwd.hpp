#pragma once
// The vendored copy is a single header without a separate forward file;
// including it here keeps the <nlohmann/json_fwd.hpp> spelling working.
#include "../../vendor/json.hpp"
