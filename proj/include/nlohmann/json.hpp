#pragma once
// Path shim: the vendored single-header library lives at vendor/json.hpp.
#include "../../vendor/json.hpp"
