#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace wavezar {

/// Warnings go to stderr unless a sink is installed (tests capture them).
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

/// Worker count: WAVEZAR_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads.  Each index is
/// visited exactly once; the first exception thrown is rethrown after join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wavezar
