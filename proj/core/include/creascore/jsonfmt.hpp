// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace creascore {

// Doubles in every artifact are serialized with 17 significant digits so
// repeated runs diff byte-for-byte.
std::string format_double(double v);

// Escapes a string for embedding in a JSON document (quotes not included).
std::string json_escape(const std::string& s);

}  // namespace creascore
