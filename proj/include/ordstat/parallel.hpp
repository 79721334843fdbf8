#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ordstat {

// Number of workers used when a call passes threads == 0.
unsigned default_threads();

// Runs body(task) for task in [0, tasks). Tasks are claimed dynamically, so
// callers must write results by task index to stay deterministic.
void parallel_for(std::size_t tasks, unsigned threads,
                  const std::function<void(std::size_t)>& body);

// Pairwise summation with a fixed tree shape; the result depends only on the
// input order.
double pairwise_sum(std::span<const double> values);

}  // namespace ordstat
