#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "coalflow/dyadic.hpp"
#include "coalflow/random.hpp"
#include "coalflow/spectral.hpp"

namespace coalflow {

/// Largest top element accepted by enumerate_walk_zero_sets (4^10 paths).
inline constexpr int kWalkEnumerationLimit = 10;

/// Doubled-speed walk run backward in time from the top element:
/// values[x] = V(2(top - x)) for x = 0..top, with V(0) = 0 at x = top.
struct BackwardWalk {
    int n = 1;
    int top = 0;
    std::vector<int> values;

    /// Times x <= top where the walk is at zero; always contains top.
    TimeSet zero_set() const;
};

/// Draws the top uniformly on [0, n) and two +-1 steps per unit of x.
BackwardWalk sample_backward_walk(int n, SeededSource src);
TimeSet sample_R_walk(int n, SeededSource src);

/// Exact law of the zero set strictly below `top` of the backward walk, by
/// enumerating all 4^top step sequences. Entries are (ascending zero times,
/// probability), ordered by the time list. Throws std::invalid_argument for
/// top > kWalkEnumerationLimit.
std::vector<std::pair<std::vector<int>, Dyadic>> enumerate_walk_zero_sets(int top);

/// Zero-set law mixed over a uniform top in [0, n): the exact law the
/// backward-walk sampler produces.
std::map<TimeSet, mpq_class> walk_zero_mixture(int n);

/// One finite law sampled by exact inverse CDF in ascending value order.
struct DiscreteLaw {
    std::vector<int> values;
    std::vector<Dyadic> weights;
    std::vector<Dyadic> cumulative;

    Dyadic const& total() const { return cumulative.back(); }
    /// Index of the first entry with u * total < cumulative, u = u53 / 2^53.
    std::size_t pick(std::uint64_t u53) const;
};

/// y1 given x1: weights p(x1, y)^2 over y = -x1..x1, total p(2x1, 0).
DiscreteLaw start_law(int x1);
/// Increment over a gap of `gap` >= 1 time units:
/// weights ((p(gap-1, d-1) - p(gap-1, d+1)) / 2)^2 over d = -gap..gap,
/// total p(2 gap - 2, 0) - p(2 gap, 0).
DiscreteLaw increment_law(int gap);

/// Samples the spectral measure: the time set from the backward walk, then the
/// y-chain sequentially from start_law and increment_law. Laws are built
/// lazily and cached; the cache is synchronized so one sampler may be shared
/// between threads.
class SpectralSampler {
  public:
    explicit SpectralSampler(int n);

    int horizon() const { return n_; }

    /// The time set equals sample_R_walk(n, src); the y-chain draws come from
    /// a child stream of src.
    SpectralSet sample(SeededSource src) const;

  private:
    DiscreteLaw const& start(int x1) const;
    DiscreteLaw const& increment(int gap) const;

    int n_;
    mutable std::mutex mutex_;
    mutable std::vector<std::unique_ptr<DiscreteLaw>> starts_;
    mutable std::vector<std::unique_ptr<DiscreteLaw>> increments_;
};

SpectralSet sample_S(int n, SeededSource src);

struct SampleRecord {
    std::uint64_t index;
    SpectralSet set;
};

/// Draws `count` spectral sets, item i from src.substream(i), using up to
/// `threads` workers. Output is ordered by index and independent of `threads`.
std::vector<SampleRecord> sample_batch(int n, std::uint64_t count, SeededSource src, unsigned threads = 1);

/// Same fan-out for time sets only.
std::vector<TimeSet> sample_R_batch(int n, std::uint64_t count, SeededSource src, unsigned threads = 1);

}  // namespace coalflow
