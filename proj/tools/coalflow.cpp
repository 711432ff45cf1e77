// coalflow: command-line front end for the spectral library.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coalflow/flow_sim.hpp"
#include "coalflow/io.hpp"
#include "coalflow/oracle.hpp"
#include "coalflow/sampler.hpp"
#include "coalflow/spectral.hpp"
#include "coalflow/verify.hpp"

using namespace coalflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

// Largest n for which rdist lists every time set.
constexpr int kRdistListLimit = 20;
// Largest n for which size prints the full distribution by default.
constexpr int kSizeDistDefaultLimit = 2000;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    std::string timestamp;
    unsigned threads = 1;
};

std::uint64_t default_seed() {
    if (char const* env = std::getenv("COALFLOW_SEED")) {
        try {
            return std::stoull(env);
        } catch (std::exception const&) {
            throw UsageError(std::string("COALFLOW_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opts, std::vector<std::string> formats) {
    cmd->add_option("--seed", opts.seed, "Random seed (default: $COALFLOW_SEED or 0)");
    cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember(std::move(formats)));
    cmd->add_option("--out", opts.out, "Output path (default: stdout)");
    cmd->add_option("--timestamp", opts.timestamp, "Timestamp recorded in the manifest (default: none)");
    cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::Range(1u, 256u));
}

RunManifest make_manifest(std::string command, CommonOptions const& opts, json params, std::string mode) {
    RunManifest m;
    m.command = std::move(command);
    m.params = std::move(params);
    m.params["format"] = opts.format;
    m.seed = opts.seed;
    m.mode = std::move(mode);
    if (!opts.timestamp.empty()) m.timestamp = opts.timestamp;
    return m;
}

/// Output sink: --out file or stdout.
class Output {
  public:
    explicit Output(std::string const& path, bool binary = false) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
            if (!*file_) throw UsageError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

std::string join_times(std::vector<int> const& xs, char sep = ' ') {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(xs[i]);
    }
    return s;
}

std::string join_sites(std::span<Site const> sites) {
    std::string s;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(sites[i].x) + ":" + std::to_string(sites[i].y);
    }
    return s;
}

std::string format_bytes(std::uint64_t bytes) {
    if (bytes >= (std::uint64_t{1} << 20)) return std::to_string(bytes >> 20) + " MiB";
    if (bytes >= (std::uint64_t{1} << 10)) return std::to_string(bytes >> 10) + " KiB";
    return std::to_string(bytes) + " bytes";
}

std::string table_cost(int n) {
    if (index_set_size(n) > 55) return "more than 2^58 bytes";
    return format_bytes(transform_memory_bytes(n));
}

void require_horizon(int n) {
    if (n < 1) throw UsageError("n must be >= 1");
}

// ---------------------------------------------------------------------------

int run_coeff(CommonOptions const& opts, int n, std::string const& site_text) {
    require_horizon(n);
    std::vector<Site> sites;
    SpectralWeight weight;
    try {
        sites = parse_sites(site_text);
        weight = coefficient(sites, n);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    std::sort(sites.begin(), sites.end());
    bool admissible = is_admissible(sites, n);
    auto manifest = make_manifest("coeff", opts, {{"n", n}, {"sites", site_text}}, "exact");
    Output out(opts.out);
    if (opts.format == "csv") {
        write_csv_preamble(out.stream(), manifest, {{"n", std::to_string(n)}, {"mode", "exact"}});
        out.stream() << "sites,d,coefficient,weight,admissible\n"
                     << join_sites(sites) << ',' << weight.d.to_string() << ','
                     << format_double(weight.coefficient_value()) << ',' << format_double(weight.squared().get_d())
                     << ',' << (admissible ? "true" : "false") << '\n';
    } else {
        json j = spectral_set_to_json(sites, weight);
        j["coefficient"] = weight.coefficient_value();
        j["admissible"] = admissible;
        j["manifest"] = manifest.to_json();
        out.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_verify(CommonOptions const& opts, int n, bool no_oracle, bool allow_expensive) {
    require_horizon(n);
    VerifyOptions vo;
    vo.n = n;
    vo.oracle = !no_oracle;
    vo.oracle_limit = allow_expensive ? kOracleHardLimit : kOracleLimit;
    if (vo.oracle && n > vo.oracle_limit) {
        throw UsageError("oracle checks refused for n=" + std::to_string(n) + ": the brute-force table needs " +
                         table_cost(n) + " and 2^" +
                         std::to_string(index_set_size(n)) + " walk evaluations; use --no-oracle" +
                         (n <= kOracleHardLimit ? " or --allow-expensive" : ""));
    }
    std::vector<CheckResult> results;
    try {
        results = run_certification(vo);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    bool all = true;
    std::string first_failure;
    for (auto const& r : results) {
        if (!r.passed && all) first_failure = r.name;
        all = all && r.passed;
    }
    auto manifest = make_manifest("verify", opts, {{"n", n}, {"oracle", vo.oracle}}, "exact");
    Output out(opts.out);
    if (opts.format == "csv") {
        write_csv_preamble(out.stream(), manifest, {{"n", std::to_string(n)}, {"mode", "exact"}});
        out.stream() << "check,passed,detail\n";
        for (auto const& r : results) {
            out.stream() << r.name << ',' << (r.passed ? "true" : "false") << ",\"" << r.detail << "\"\n";
        }
    } else {
        json checks = json::array();
        for (auto const& r : results) checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        json j;
        j["n"] = n;
        j["passed"] = all;
        j["first_failure"] = all ? json(nullptr) : json(first_failure);
        j["checks"] = std::move(checks);
        j["manifest"] = manifest.to_json();
        out.stream() << j.dump(2) << '\n';
    }
    if (!all) {
        std::cerr << "verification failed: " << first_failure << '\n';
        return kExitVerifyFailed;
    }
    return kExitOk;
}

int run_rdist(CommonOptions const& opts, int n, int cumulative_k) {
    require_horizon(n);
    auto manifest = make_manifest("rdist", opts, {{"n", n}, {"cumulative", cumulative_k}}, "exact");
    Output out(opts.out);

    if (cumulative_k >= 0) {
        if (cumulative_k >= n) throw UsageError("--cumulative k must lie in [0, n)");
        mpq_class closed = r_cumulative(cumulative_k, n);
        json summed = nullptr;
        if (cumulative_k + 1 <= kRdistListLimit) {
            mpq_class total = 0;
            for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << (cumulative_k + 1)); ++subset) {
                std::vector<int> xs;
                for (int x = 0; x <= cumulative_k; ++x) {
                    if ((subset >> x) & 1u) xs.push_back(x);
                }
                total += r_distribution(TimeSet::make(std::move(xs), n));
            }
            total.canonicalize();
            summed = total.get_str();
        }
        if (opts.format == "csv") {
            write_csv_preamble(out.stream(), manifest, {{"n", std::to_string(n)}, {"mode", "exact"}});
            out.stream() << "k,cumulative,summed,value\n"
                         << cumulative_k << ',' << closed.get_str() << ','
                         << (summed.is_null() ? "" : summed.get<std::string>()) << ','
                         << format_double(closed.get_d()) << '\n';
        } else {
            json j{{"n", n}, {"k", cumulative_k}, {"cumulative", closed.get_str()}, {"summed", summed},
                   {"value", closed.get_d()}, {"manifest", manifest.to_json()}};
            out.stream() << j.dump(2) << '\n';
        }
        return kExitOk;
    }

    if (n > kRdistListLimit) {
        throw UsageError("listing every time set is limited to n <= " + std::to_string(kRdistListLimit));
    }
    std::vector<std::pair<std::vector<int>, mpq_class>> rows;
    for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << n); ++subset) {
        std::vector<int> xs;
        for (int x = 0; x < n; ++x) {
            if ((subset >> x) & 1u) xs.push_back(x);
        }
        auto prob = r_distribution(TimeSet::make(xs, n));
        rows.emplace_back(std::move(xs), std::move(prob));
    }
    std::sort(rows.begin(), rows.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    if (opts.format == "csv") {
        write_csv_preamble(out.stream(), manifest, {{"n", std::to_string(n)}, {"mode", "exact"}});
        out.stream() << "R,probability,value\n";
        for (auto const& [xs, prob] : rows) {
            out.stream() << join_times(xs) << ',' << prob.get_str() << ',' << format_double(prob.get_d()) << '\n';
        }
    } else {
        json arr = json::array();
        for (auto const& [xs, prob] : rows) arr.push_back({{"R", xs}, {"probability", prob.get_str()}, {"value", prob.get_d()}});
        json j{{"n", n}, {"mode", "exact"}, {"rows", std::move(arr)}, {"manifest", manifest.to_json()}};
        out.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_size(CommonOptions const& opts, int n, bool force_dist, bool no_dist) {
    require_horizon(n);
    bool with_dist = !no_dist && (force_dist || n <= kSizeDistDefaultLimit);
    auto mean = expected_size(n);
    auto mode = to_string(arithmetic_for(n));
    auto manifest = make_manifest("size", opts, {{"n", n}, {"distribution", with_dist}}, mode);
    double scaled = mean.value / std::sqrt(static_cast<double>(n));
    std::optional<SizeDistribution> dist;
    if (with_dist) dist = size_distribution(n);
    Output out(opts.out);
    if (opts.format == "csv") {
        write_csv_preamble(out.stream(), manifest,
                           {{"n", std::to_string(n)},
                            {"mode", mode},
                            {"expected_size", mean.exact ? mean.exact->get_str() : format_double(mean.value)},
                            {"expected_size_over_sqrt_n", format_double(scaled)}});
        out.stream() << "m,probability,value\n";
        if (dist) {
            for (std::size_t i = 0; i < dist->values.size(); ++i) {
                out.stream() << i + 1 << ',' << (dist->exact.empty() ? "" : dist->exact[i].get_str()) << ','
                             << format_double(dist->values[i]) << '\n';
            }
        }
    } else {
        json j;
        j["n"] = n;
        j["mode"] = mode;
        j["expected_size"] = mean.exact ? json(mean.exact->get_str()) : json(nullptr);
        j["expected_size_value"] = mean.value;
        j["expected_size_over_sqrt_n"] = scaled;
        if (dist) {
            json rows = json::array();
            for (std::size_t i = 0; i < dist->values.size(); ++i) {
                rows.push_back({{"m", i + 1},
                                {"probability", dist->exact.empty() ? json(nullptr) : json(dist->exact[i].get_str())},
                                {"value", dist->values[i]}});
            }
            j["distribution"] = std::move(rows);
        } else {
            j["distribution"] = nullptr;
        }
        j["manifest"] = manifest.to_json();
        out.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_noise(CommonOptions const& opts, int n, std::string const& eps_text, std::uint64_t mc_trials) {
    require_horizon(n);
    mpq_class eps;
    Quantity exact;
    try {
        eps = parse_rational(eps_text);
        exact = noise_correlation_exact(n, eps);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    std::optional<NoiseReport> mc;
    if (mc_trials > 0) mc = noise_correlation_mc(n, eps.get_d(), mc_trials, {opts.seed, 0}, opts.threads);
    auto mode = to_string(exact.mode);
    auto manifest = make_manifest("noise", opts, {{"n", n}, {"eps", eps_text}, {"mc_trials", mc_trials}}, mode);
    Output out(opts.out);
    if (opts.format == "csv") {
        write_csv_preamble(out.stream(), manifest, {{"n", std::to_string(n)}, {"mode", mode}});
        out.stream() << "eps,exact,value,mc_estimate,mc_stderr,mc_trials\n"
                     << eps.get_str() << ',' << (exact.exact ? exact.exact->get_str() : "") << ','
                     << format_double(exact.value) << ',';
        if (mc) {
            out.stream() << format_double(mc->estimate) << ',' << format_double(mc->std_error) << ',' << mc->trials;
        } else {
            out.stream() << ",,";
        }
        out.stream() << '\n';
    } else {
        json j;
        j["n"] = n;
        j["eps"] = eps.get_str();
        j["mode"] = mode;
        j["exact"] = exact.exact ? json(exact.exact->get_str()) : json(nullptr);
        j["value"] = exact.value;
        j["mc"] = mc ? noise_report_to_json(*mc) : json(nullptr);
        j["manifest"] = manifest.to_json();
        out.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_sample(CommonOptions const& opts, int n, std::uint64_t count, std::string const& trace_path) {
    require_horizon(n);
    SeededSource src{opts.seed, 0};
    auto records = sample_batch(n, count, src, opts.threads);
    auto manifest = make_manifest("sample", opts, {{"n", n}, {"count", count}}, "exact");
    {
        Output out(opts.out);
        if (opts.format == "csv") {
            write_csv_preamble(out.stream(), manifest, {{"n", std::to_string(n)}, {"mode", "exact"}});
            out.stream() << "index,R,S\n";
            for (auto const& r : records) {
                std::vector<int> xs;
                for (auto const& s : r.set.sites()) xs.push_back(s.x);
                out.stream() << r.index << ',' << join_times(xs) << ',' << join_sites(r.set.sites()) << '\n';
            }
        } else {
            for (auto const& r : records) out.stream() << sample_to_json(r).dump() << '\n';
        }
    }

    if (!opts.out.empty()) {
        std::ofstream m(opts.out + ".manifest.json");
        m << manifest.to_json().dump(2) << '\n';

        // empirical vs exact frequencies of the time projection
        std::map<std::vector<int>, std::uint64_t> freq;
        for (auto const& r : records) {
            std::vector<int> xs;
            for (auto const& s : r.set.sites()) xs.push_back(s.x);
            ++freq[xs];
        }
        std::ofstream summary(opts.out + ".summary.csv");
        write_csv_preamble(summary, manifest, {{"n", std::to_string(n)}, {"count", std::to_string(count)}});
        summary << "R,observed,frequency,exact\n";
        for (auto const& [xs, c] : freq) {
            summary << join_times(xs) << ',' << c << ','
                    << format_double(static_cast<double>(c) / static_cast<double>(count)) << ','
                    << r_distribution(TimeSet::make(xs, n)).get_str() << '\n';
        }
    }
    if (!trace_path.empty()) {
        // the walk behind sample 0, paired with its spectral set
        auto walk = sample_backward_walk(n, src.substream(0));
        std::ofstream trace(trace_path);
        if (!trace) throw UsageError("cannot open trace file '" + trace_path + "'");
        write_csv_preamble(trace, manifest, {{"n", std::to_string(n)}, {"top", std::to_string(walk.top)}});
        write_backward_walk_csv(trace, walk);
    }
    return kExitOk;
}

int run_flow(CommonOptions const& opts, GridSpec grid, std::string const& starts_text, std::string const& lattice,
             std::string const& eps_list, std::string const& prefix) {
    std::vector<StartPoint> starts;
    std::string start_source;
    if (!starts_text.empty()) {
        try {
            for (auto const& s : parse_sites(starts_text)) starts.push_back({s.x, s.y});
        } catch (std::invalid_argument const& e) {
            throw UsageError(e.what());
        }
        start_source = "explicit";
    } else {
        auto x = lattice.find('x');
        if (x == std::string::npos) throw UsageError("--lattice must look like 4x3");
        int cols = 0, rows = 0;
        try {
            cols = std::stoi(lattice.substr(0, x));
            rows = std::stoi(lattice.substr(x + 1));
        } catch (std::exception const&) {
            throw UsageError("--lattice must look like 4x3");
        }
        try {
            starts = lattice_starts(grid, cols, rows);
        } catch (std::invalid_argument const& e) {
            throw UsageError(e.what());
        }
        start_source = "evenly spaced " + lattice + " lattice";
    }

    std::vector<double> eps_values;
    std::vector<std::string> eps_texts;
    {
        std::stringstream ss(eps_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                double v = parse_rational(item).get_d();
                if (v < 0.0 || v > 1.0) throw std::invalid_argument("flip rate outside [0, 1]: " + item);
                eps_values.push_back(v);
                eps_texts.push_back(item);
            } catch (std::invalid_argument const& e) {
                throw UsageError(e.what());
            }
        }
    }
    if (eps_values.empty()) throw UsageError("--eps needs at least one value");

    json params{{"length", grid.length},
                {"width", grid.width},
                {"boundary", to_string(grid.boundary)},
                {"starts", start_source},
                {"eps", eps_texts},
                {"chained", true}};
    auto manifest = make_manifest("flow", opts, params, "float");

    SeededSource src{opts.seed, 0};
    SignField field(src.substream(0));
    json panels = json::array();
    for (std::size_t i = 0; i < eps_values.size(); ++i) {
        // each panel perturbs the previous one's array further
        if (eps_values[i] > 0.0) field = field.perturbed(eps_values[i], src.substream(i + 1));
        FlowResult flow;
        try {
            flow = simulate_flow(grid, starts, field);
        } catch (std::invalid_argument const& e) {
            throw UsageError(e.what());
        }
        std::string path = prefix + ".panel" + std::to_string(i) + ".csv";
        std::ofstream csv(path);
        if (!csv) throw UsageError("cannot open '" + path + "'");
        write_csv_preamble(csv, manifest,
                           {{"panel", std::to_string(i)}, {"eps", eps_texts[i]}, {"boundary", to_string(grid.boundary)}});
        write_trajectories_csv(csv, flow);

        std::vector<int> endpoints;
        for (auto const& t : flow.trajectories) endpoints.push_back(t.positions.back());
        std::sort(endpoints.begin(), endpoints.end());
        endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
        panels.push_back({{"panel", i}, {"eps", eps_texts[i]}, {"file", path}, {"distinct_endpoints", endpoints.size()}});
    }

    json starts_json = json::array();
    for (auto const& s : starts) starts_json.push_back({s.x, s.y});
    json j{{"grid", {{"length", grid.length}, {"width", grid.width}, {"boundary", to_string(grid.boundary)}}},
           {"starts", std::move(starts_json)},
           {"panels", std::move(panels)},
           {"manifest", manifest.to_json()}};
    Output out(opts.out);
    out.stream() << j.dump(2) << '\n';
    return kExitOk;
}

int run_transform(CommonOptions const& opts, int n, bool allow_expensive) {
    require_horizon(n);
    int limit = allow_expensive ? kOracleHardLimit : kOracleLimit;
    std::cerr << "transform n=" << n << ": 2^" << index_set_size(n) << " entries (" << table_cost(n) << ")\n";
    if (n > limit) {
        throw UsageError("transform refused for n=" + std::to_string(n) + " (limit " + std::to_string(limit) +
                         (n <= kOracleHardLimit ? ", pass --allow-expensive)" : ")"));
    }
    if (opts.format == "json" && n > 4) throw UsageError("JSON export is limited to n <= 4; use --format bin");
    auto transform = brute_force_transform(n, limit);
    Output out(opts.out, opts.format == "bin");
    if (opts.format == "bin") {
        if (opts.out.empty()) throw UsageError("binary output needs --out");
        write_transform_binary(out.stream(), transform);
        std::ofstream m(opts.out + ".manifest.json");
        m << make_manifest("transform", opts, {{"n", n}}, "exact").to_json().dump(2) << '\n';
    } else {
        json j = transform_to_json(transform);
        j["manifest"] = make_manifest("transform", opts, {{"n", n}}, "exact").to_json();
        out.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-Walsh spectrum of the coalescing-walk endpoint"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::uint64_t seed_default = 0;
    try {
        seed_default = default_seed();
    } catch (UsageError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::map<std::string, CommonOptions> opts;
    auto common = [&](CLI::App* cmd, std::vector<std::string> formats = {"json", "csv"}) -> CommonOptions& {
        auto& o = opts[cmd->get_name()];
        o.seed = seed_default;
        add_common(cmd, o, std::move(formats));
        return o;
    };

    int n = 1;
    std::string sites;
    auto* coeff = app.add_subcommand("coeff", "Closed-form coefficient of one site set");
    coeff->add_option("n", n, "Horizon")->required();
    coeff->add_option("sites", sites, "Sites as x:y,x:y,...")->required();
    auto& coeff_opts = common(coeff);

    bool no_oracle = false, allow_expensive = false;
    auto* verify = app.add_subcommand("verify", "Exact certification suite");
    verify->add_option("n", n, "Horizon")->required();
    verify->add_flag("--no-oracle", no_oracle, "Skip the brute-force oracle checks");
    verify->add_flag("--allow-expensive", allow_expensive, "Raise the oracle bound to n <= 7");
    auto& verify_opts = common(verify);

    int cumulative_k = -1;
    auto* rdist = app.add_subcommand("rdist", "Exact law of the time projection");
    rdist->add_option("n", n, "Horizon")->required();
    rdist->add_option("--cumulative", cumulative_k, "Report P[R within [0,k]] instead");
    auto& rdist_opts = common(rdist);

    bool force_dist = false, no_dist = false;
    auto* size = app.add_subcommand("size", "Distribution and mean of |R|");
    size->add_option("n", n, "Horizon")->required();
    size->add_flag("--dist", force_dist, "Always compute the distribution");
    size->add_flag("--no-dist", no_dist, "Only report the mean");
    auto& size_opts = common(size);

    std::string eps_text;
    std::uint64_t mc_trials = 0;
    auto* noise = app.add_subcommand("noise", "Noise correlation E[xi xi_eps]");
    noise->add_option("n", n, "Horizon")->required();
    noise->add_option("eps", eps_text, "Flip probability in [0, 1/2]")->required();
    noise->add_option("--mc", mc_trials, "Also run a Monte Carlo estimate with this many trials");
    auto& noise_opts = common(noise);

    std::uint64_t count = 1;
    std::string trace;
    auto* sample = app.add_subcommand("sample", "Draw spectral sets (newline-delimited JSON)");
    sample->add_option("n", n, "Horizon")->required();
    sample->add_option("count", count, "Number of samples")->required();
    sample->add_option("--trace", trace, "CSV of the backward walk behind sample 0");
    auto& sample_opts = common(sample);

    GridSpec grid;
    std::string boundary = "unbounded", starts_text, lattice = "4x3", eps_list = "0", prefix = "flow";
    auto* flow = app.add_subcommand("flow", "Coalescing flow trajectories under chained perturbations");
    flow->add_option("--length", grid.length, "Time extent")->check(CLI::PositiveNumber);
    flow->add_option("--width", grid.width, "Band height (reflecting boundary)")->check(CLI::PositiveNumber);
    flow->add_option("--boundary", boundary, "unbounded (default) or reflect")->check(CLI::IsMember({"reflect", "unbounded"}));
    flow->add_option("--starts", starts_text, "Explicit starts as x:y,x:y,...");
    flow->add_option("--lattice", lattice, "Evenly spaced starts, columns x rows (default 4x3)");
    flow->add_option("--eps", eps_list, "Comma-separated flip rates applied cumulatively, one panel each");
    flow->add_option("--prefix", prefix, "Trajectory CSV prefix; panel i goes to <prefix>.panel<i>.csv");
    auto& flow_opts = common(flow);

    auto* transform = app.add_subcommand("transform", "Brute-force Fourier-Walsh table");
    transform->add_option("n", n, "Horizon")->required();
    transform->add_flag("--allow-expensive", allow_expensive, "Raise the bound to n <= 7");
    auto& transform_opts = common(transform, {"json", "bin"});

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*coeff) return run_coeff(coeff_opts, n, sites);
        if (*verify) return run_verify(verify_opts, n, no_oracle, allow_expensive);
        if (*rdist) return run_rdist(rdist_opts, n, cumulative_k);
        if (*size) return run_size(size_opts, n, force_dist, no_dist);
        if (*noise) return run_noise(noise_opts, n, eps_text, mc_trials);
        if (*sample) return run_sample(sample_opts, n, count, trace);
        if (*flow) {
            grid.boundary = boundary == "reflect" ? Boundary::reflect : Boundary::unbounded;
            return run_flow(flow_opts, grid, starts_text, lattice, eps_list, prefix);
        }
        if (*transform) return run_transform(transform_opts, n, allow_expensive);
    } catch (UsageError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
