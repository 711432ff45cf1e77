#include "coalflow/flow_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "coalflow/parallel.hpp"

namespace coalflow {

namespace {

std::uint64_t zigzag(int y) {
    auto v = static_cast<std::int64_t>(y);
    return static_cast<std::uint64_t>((v << 1) ^ (v >> 63));
}

void check_flip_rate(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("flip probability must lie in [0, 1], got " + std::to_string(eps));
    }
}

// Child streams of a trial source.
constexpr std::uint64_t kBaseStream = 0;
constexpr std::uint64_t kFlipStream = 1;

}  // namespace

char const* to_string(Boundary boundary) {
    return boundary == Boundary::reflect ? "reflect" : "unbounded";
}

bool flips_site(SeededSource flips, double eps, int x, int y) {
    if (eps <= 0.0) return false;
    if (eps >= 1.0) return true;
    return flips.uniform(static_cast<std::uint64_t>(x), zigzag(y)) < eps;
}

int SignField::sign(int x, int y) const {
    int s = (base_.bits(static_cast<std::uint64_t>(x), zigzag(y)) & 1u) ? -1 : 1;
    for (auto const& layer : layers_) {
        if (flips_site(layer.src, layer.eps, x, y)) s = -s;
    }
    return s;
}

SignField SignField::perturbed(double eps, SeededSource flips) const {
    check_flip_rate(eps);
    SignField out = *this;
    out.layers_.push_back({eps, flips});
    return out;
}

SignArray SignField::materialize(int n) const {
    SignArray tau(n);
    for (int x = 0; x < n; ++x) {
        for (int y = -x; y <= x; y += 2) tau.set_sign(x, y, sign(x, y));
    }
    return tau;
}

SignArray perturb(SignArray const& tau, double eps, SeededSource flips) {
    check_flip_rate(eps);
    SignArray out = tau;
    for (int x = 0; x < tau.horizon(); ++x) {
        for (int y = -x; y <= x; y += 2) {
            if (flips_site(flips, eps, x, y)) out.flip(site_index(x, y));
        }
    }
    return out;
}

int walk_endpoint(SignField const& field, int n) {
    int w = 0;
    for (int x = 0; x < n; ++x) w += field.sign(x, w);
    return w;
}

FlowResult simulate_flow(GridSpec const& grid, std::vector<StartPoint> const& starts, SignField const& field) {
    if (grid.length < 1) throw std::invalid_argument("grid length must be >= 1");
    bool bounded = grid.boundary == Boundary::reflect;
    if (bounded && grid.width < 1) throw std::invalid_argument("grid width must be >= 1");
    for (auto const& s : starts) {
        if (s.x < 0 || s.x > grid.length) {
            throw std::invalid_argument("start time " + std::to_string(s.x) + " outside [0, length]");
        }
        if (bounded && (s.y < 0 || s.y > grid.width)) {
            throw std::invalid_argument("start height " + std::to_string(s.y) + " outside the band [0, " +
                                        std::to_string(grid.width) + "]");
        }
    }

    FlowResult out;
    out.grid = grid;
    for (auto const& s : starts) {
        Trajectory t{s, {}};
        t.positions.reserve(static_cast<std::size_t>(grid.length - s.x + 1));
        int y = s.y;
        t.positions.push_back(y);
        for (int x = s.x; x < grid.length; ++x) {
            if (bounded && y == 0) {
                y = 1;
            } else if (bounded && y == grid.width) {
                y = grid.width - 1;
            } else {
                y += field.sign(x, y);
            }
            t.positions.push_back(y);
        }
        out.trajectories.push_back(std::move(t));
    }

    std::size_t count = out.trajectories.size();
    out.merge_times.assign(count, std::vector<int>(count, FlowResult::kNever));
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            auto const& ta = out.trajectories[a];
            auto const& tb = out.trajectories[b];
            for (int x = std::max(ta.start.x, tb.start.x); x <= grid.length; ++x) {
                if (ta.at(x) == tb.at(x)) {
                    out.merge_times[a][b] = x;
                    break;
                }
            }
        }
    }
    return out;
}

FlowResult simulate_flow(GridSpec const& grid, std::vector<StartPoint> const& starts, SeededSource src) {
    return simulate_flow(grid, starts, SignField(src));
}

std::vector<StartPoint> lattice_starts(GridSpec const& grid, int cols, int rows) {
    if (cols < 1 || rows < 1) throw std::invalid_argument("lattice needs at least one row and column");
    bool bounded = grid.boundary == Boundary::reflect;
    std::vector<StartPoint> starts;
    for (int c = 0; c < cols; ++c) {
        int x = grid.length * c / cols;
        for (int r = 0; r < rows; ++r) {
            // bounded: interior of the band; unbounded: centred on 0 at the same spacing
            int spacing = std::max(1, grid.width / (rows + 1));
            int y = bounded ? spacing * (r + 1) : (2 * r - (rows - 1)) * spacing / 2;
            if ((x + y) % 2 != 0) y += (bounded && y == grid.width) ? -1 : 1;
            starts.push_back({x, y});
        }
    }
    return starts;
}

NoiseReport noise_correlation_mc(int n, double eps, std::uint64_t trials, SeededSource src, unsigned threads) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    check_flip_rate(eps);

    // products W(n) W_eps(n) are integers, so the sums are exact and order-free
    std::vector<std::int64_t> products(trials);
    parallel_for(trials, threads, [&](std::uint64_t i) {
        SeededSource trial = src.substream(i);
        SignField base(trial.substream(kBaseStream));
        SignField noisy = base.perturbed(eps, trial.substream(kFlipStream));
        products[i] = static_cast<std::int64_t>(walk_endpoint(base, n)) * walk_endpoint(noisy, n);
    });

    __int128 sum = 0;
    __int128 sum_sq = 0;
    for (auto v : products) {
        sum += v;
        sum_sq += static_cast<__int128>(v) * v;
    }
    double t = static_cast<double>(trials);
    double mean = static_cast<double>(sum) / t;
    NoiseReport report;
    report.n = n;
    report.eps = eps;
    report.trials = trials;
    report.estimate = mean / n;
    if (trials > 1) {
        double centered = static_cast<double>(sum_sq) - static_cast<double>(sum) * mean;
        double var = std::max(0.0, centered / (t - 1.0)) / (static_cast<double>(n) * n);
        report.std_error = std::sqrt(var / t);
    }
    return report;
}

}  // namespace coalflow
