#pragma once

#include <cstdint>
#include <vector>

#include "coalflow/oracle.hpp"
#include "coalflow/random.hpp"

namespace coalflow {

enum class Boundary { unbounded, reflect };

char const* to_string(Boundary boundary);

/// Time extent `length`; for reflecting grids the band is y in [0, width].
struct GridSpec {
    int length = 1000;
    int width = 30;
    Boundary boundary = Boundary::unbounded;
};

struct StartPoint {
    int x = 0;
    int y = 0;
    friend bool operator==(StartPoint const&, StartPoint const&) = default;
};

/// Sign array generated on demand, keyed by site, plus a stack of independent
/// flip layers. Querying a site twice always yields the same sign, so the full
/// array never needs to exist.
class SignField {
  public:
    explicit SignField(SeededSource base) : base_(base) {}

    int sign(int x, int y) const;

    /// New field with every sign negated independently with probability eps.
    /// Throws std::invalid_argument unless 0 <= eps <= 1.
    SignField perturbed(double eps, SeededSource flips) const;

    /// Dense copy of the triangular array for horizon n.
    SignArray materialize(int n) const;

  private:
    struct FlipLayer {
        double eps;
        SeededSource src;
    };

    SeededSource base_;
    std::vector<FlipLayer> layers_;
};

/// Whether `flips` negates site (x, y) at rate eps; shared by the lazy and
/// dense perturbations so both see the same flips.
bool flips_site(SeededSource flips, double eps, int x, int y);

/// Dense counterpart of SignField::perturbed.
SignArray perturb(SignArray const& tau, double eps, SeededSource flips);

/// W(n) under a lazily generated field.
int walk_endpoint(SignField const& field, int n);

struct Trajectory {
    StartPoint start;
    /// positions[i] is the position at time start.x + i, up to time grid.length.
    std::vector<int> positions;

    int at(int x) const { return positions[static_cast<std::size_t>(x - start.x)]; }
};

struct FlowResult {
    GridSpec grid;
    std::vector<Trajectory> trajectories;
    /// First common time at which two walks share a position, or kNever.
    std::vector<std::vector<int>> merge_times;

    static constexpr int kNever = -1;
};

/// Runs every start through the same field. Throws std::invalid_argument for
/// starts outside the grid (or band, when reflecting). On a reflecting wall the
/// walk steps inward without reading a sign.
FlowResult simulate_flow(GridSpec const& grid, std::vector<StartPoint> const& starts, SignField const& field);
FlowResult simulate_flow(GridSpec const& grid, std::vector<StartPoint> const& starts, SeededSource src);

/// cols x rows evenly spaced starts (times by columns, heights by rows),
/// nudged onto the even sublattice x + y = 0 mod 2.
std::vector<StartPoint> lattice_starts(GridSpec const& grid, int cols = 4, int rows = 3);

struct NoiseReport {
    int n = 1;
    double eps = 0.0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo E[xi xi_eps]: trial i uses field src.substream(i) and its flip
/// layer; the result depends only on (n, eps, trials, src).
NoiseReport noise_correlation_mc(int n, double eps, std::uint64_t trials, SeededSource src,
                                 unsigned threads = 1);

}  // namespace coalflow
