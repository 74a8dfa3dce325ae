#pragma once

// Single include point for cpp-httplib so every translation unit sees the
// same configuration.
#include "httplib.h"
