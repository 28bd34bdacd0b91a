#pragma once

// Single include point for the vendored JSON library.
#include <json.hpp>
