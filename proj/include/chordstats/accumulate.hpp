#pragma once

#include <concepts>
#include <optional>
#include <vector>

#include "chordstats/parallel.hpp"

namespace chordstats {

/// Something that can absorb a stream of lengths and be combined with a
/// sibling that absorbed a later part of the same stream.
template <class A>
concept LengthAccumulator = std::copy_constructible<A> &&
    requires(A a, const A& other, double x) {
      a.add(x);
      a.merge(other);
    };

/// Accumulators whose merge result does not depend on the order in which
/// parts are merged (integer histograms, for example) opt in with
/// `static constexpr bool order_independent = true;`.
template <class A>
constexpr bool order_independent_v = [] {
  if constexpr (requires { A::order_independent; }) {
    return A::order_independent;
  } else {
    return false;
  }
}();

/// Keeps every length in arrival order.
struct LengthCollector {
  std::vector<double> lengths;

  void add(double x) { lengths.push_back(x); }
  void merge(const LengthCollector& other) {
    lengths.insert(lengths.end(), other.lengths.begin(), other.lengths.end());
  }
};

/// Runs run_chunk(c, acc) for every chunk and merges the partial
/// accumulators. Ordered accumulators get one partial per chunk, merged in
/// chunk order; order-independent ones get one partial per worker.
template <LengthAccumulator Acc, class RunChunk>
Acc reduce_chunks(std::size_t chunks, unsigned threads, const Acc& prototype,
                  RunChunk&& run_chunk) {
  if constexpr (order_independent_v<Acc>) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(resolve_threads(threads), chunks));
    std::vector<Acc> partial(workers, prototype);
    for_each_chunk(chunks, workers,
                   [&](std::size_t c, unsigned w) { run_chunk(c, partial[w]); });
    Acc result = std::move(partial.front());
    for (std::size_t w = 1; w < partial.size(); ++w) result.merge(partial[w]);
    return result;
  } else {
    std::vector<std::optional<Acc>> partial(chunks);
    for_each_chunk(chunks, threads, [&](std::size_t c, unsigned) {
      Acc acc = prototype;
      run_chunk(c, acc);
      partial[c] = std::move(acc);
    });
    Acc result = prototype;
    for (auto& p : partial) result.merge(*p);
    return result;
  }
}

}  // namespace chordstats
