#include "coalflow/sampler.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "coalflow/parallel.hpp"

namespace coalflow {

namespace {

// Child stream reserved for the y-chain draws of sample_S.
constexpr std::uint64_t kChainStream = 0x5EC7'0C4A'1157ull;

DiscreteLaw make_law(std::vector<int> values, std::vector<Dyadic> weights) {
    DiscreteLaw law{std::move(values), std::move(weights), {}};
    Dyadic running;
    law.cumulative.reserve(law.weights.size());
    for (auto const& w : law.weights) {
        running += w;
        law.cumulative.push_back(running);
    }
    return law;
}

}  // namespace

TimeSet BackwardWalk::zero_set() const {
    std::vector<int> xs;
    for (int x = 0; x <= top; ++x) {
        if (values[x] == 0) xs.push_back(x);
    }
    return TimeSet::make(std::move(xs), n);
}

BackwardWalk sample_backward_walk(int n, SeededSource src) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    DrawStream draws(src);
    BackwardWalk walk;
    walk.n = n;
    walk.top = static_cast<int>(draws.next_below(static_cast<std::uint64_t>(n)));
    walk.values.assign(static_cast<std::size_t>(walk.top) + 1, 0);
    int v = 0;
    for (int x = walk.top - 1; x >= 0; --x) {
        v += draws.next_sign();
        v += draws.next_sign();
        walk.values[x] = v;
    }
    return walk;
}

TimeSet sample_R_walk(int n, SeededSource src) { return sample_backward_walk(n, src).zero_set(); }

std::vector<std::pair<std::vector<int>, Dyadic>> enumerate_walk_zero_sets(int top) {
    if (top < 0 || top > kWalkEnumerationLimit) {
        throw std::invalid_argument("walk enumeration limited to 0 <= top <= " +
                                    std::to_string(kWalkEnumerationLimit));
    }
    // zero times below top -> number of step sequences
    std::map<std::vector<int>, long> counts;
    std::uint64_t paths = std::uint64_t{1} << (2 * top);
    for (std::uint64_t path = 0; path < paths; ++path) {
        std::vector<int> zeros;
        int v = 0;
        for (int step = 0; step < top; ++step) {
            v += ((path >> (2 * step)) & 1u) ? -1 : 1;
            v += ((path >> (2 * step + 1)) & 1u) ? -1 : 1;
            if (v == 0) zeros.push_back(top - 1 - step);
        }
        std::sort(zeros.begin(), zeros.end());
        ++counts[zeros];
    }
    std::vector<std::pair<std::vector<int>, Dyadic>> out;
    out.reserve(counts.size());
    for (auto& [zeros, count] : counts) {
        out.emplace_back(zeros, Dyadic::from_ratio(count, static_cast<std::uint64_t>(2 * top)));
    }
    return out;
}

std::map<TimeSet, mpq_class> walk_zero_mixture(int n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    std::map<TimeSet, mpq_class> law;
    for (int top = 0; top < n; ++top) {
        for (auto& [zeros, prob] : enumerate_walk_zero_sets(top)) {
            std::vector<int> xs = zeros;
            xs.push_back(top);
            mpq_class mass = prob.to_rational() / n;
            law[TimeSet::make(std::move(xs), n)] += mass;
        }
    }
    for (auto& [set, mass] : law) mass.canonicalize();
    return law;
}

std::size_t DiscreteLaw::pick(std::uint64_t u53) const {
    Dyadic target = total() * Dyadic(mpz_class(static_cast<unsigned long>(u53)), 53);
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        if (target < cumulative[i]) return i;
    }
    // unreachable for u < 1 and a positive total
    throw std::logic_error("inverse CDF fell off the support");
}

DiscreteLaw start_law(int x1) {
    std::vector<int> values;
    std::vector<Dyadic> weights;
    for (int y = -x1; y <= x1; y += 2) {
        Dyadic w = p(x1, y);
        values.push_back(y);
        weights.push_back(w * w);
    }
    return make_law(std::move(values), std::move(weights));
}

DiscreteLaw increment_law(int gap) {
    if (gap < 1) throw std::invalid_argument("gap must be >= 1");
    std::vector<int> values;
    std::vector<Dyadic> weights;
    for (int d = -gap; d <= gap; d += 2) {
        Dyadic f = (p(gap - 1, d - 1) - p(gap - 1, d + 1)).halved();
        values.push_back(d);
        weights.push_back(f * f);
    }
    return make_law(std::move(values), std::move(weights));
}

SpectralSampler::SpectralSampler(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    starts_.resize(static_cast<std::size_t>(n));
    increments_.resize(static_cast<std::size_t>(n));
}

DiscreteLaw const& SpectralSampler::start(int x1) const {
    std::lock_guard lock(mutex_);
    auto& slot = starts_[static_cast<std::size_t>(x1)];
    if (!slot) slot = std::make_unique<DiscreteLaw>(start_law(x1));
    return *slot;
}

DiscreteLaw const& SpectralSampler::increment(int gap) const {
    std::lock_guard lock(mutex_);
    auto& slot = increments_[static_cast<std::size_t>(gap)];
    if (!slot) slot = std::make_unique<DiscreteLaw>(increment_law(gap));
    return *slot;
}

SpectralSet SpectralSampler::sample(SeededSource src) const {
    TimeSet times = sample_R_walk(n_, src);
    DrawStream draws(src.substream(kChainStream));
    auto const& xs = times.times();
    std::vector<Site> sites;
    sites.reserve(xs.size());

    auto const& first = start(xs.front());
    sites.push_back({xs.front(), first.values[first.pick(draws.next_u53())]});
    for (std::size_t k = 1; k < xs.size(); ++k) {
        auto const& law = increment(xs[k] - xs[k - 1]);
        int y = sites.back().y + law.values[law.pick(draws.next_u53())];
        sites.push_back({xs[k], y});
    }
    return SpectralSet::make(std::move(sites), n_);
}

SpectralSet sample_S(int n, SeededSource src) { return SpectralSampler(n).sample(src); }

std::vector<SampleRecord> sample_batch(int n, std::uint64_t count, SeededSource src, unsigned threads) {
    SpectralSampler sampler(n);
    std::vector<std::optional<SpectralSet>> slots(count);
    parallel_for(count, threads, [&](std::uint64_t i) { slots[i] = sampler.sample(src.substream(i)); });
    std::vector<SampleRecord> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back({i, std::move(*slots[i])});
    return out;
}

std::vector<TimeSet> sample_R_batch(int n, std::uint64_t count, SeededSource src, unsigned threads) {
    std::vector<std::optional<TimeSet>> slots(count);
    parallel_for(count, threads, [&](std::uint64_t i) { slots[i] = sample_R_walk(n, src.substream(i)); });
    std::vector<TimeSet> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace coalflow
