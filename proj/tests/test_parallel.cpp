#include <atomic>
#include <stdexcept>
#include <vector>

#include "avc/parallel.hpp"
#include "doctest.h"

TEST_CASE("parallel_for visits every index once") {
  for (unsigned threads : {0u, 1u, 2u, 5u}) {
    std::vector<int> hits(1000, 0);
    avc::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, threads);
    for (int h : hits) CHECK(h == 1);
  }
  avc::parallel_for(0, [](std::size_t) { FAIL("no work expected"); }, 4);
  CHECK(avc::default_threads() >= 1);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  for (unsigned threads : {1u, 3u}) {
    try {
      avc::parallel_for(
          200,
          [](std::size_t i) {
            if (i == 17 || i == 150) throw std::runtime_error("index " + std::to_string(i));
          },
          threads);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "index 17");
    }
  }
}
