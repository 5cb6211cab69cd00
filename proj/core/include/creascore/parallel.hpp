// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace creascore {

// Runs fn(i) for every i in [0, n) on up to `workers` threads. Exceptions
// are collected and the one with the lowest index is rethrown after all
// workers join, so failures are deterministic regardless of scheduling.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace creascore
