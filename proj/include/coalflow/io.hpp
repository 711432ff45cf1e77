#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "coalflow/flow_sim.hpp"
#include "coalflow/oracle.hpp"
#include "coalflow/sampler.hpp"
#include "coalflow/spectral.hpp"

namespace coalflow {

inline constexpr char const* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

/// Provenance block attached to every CLI output. Two runs with equal
/// manifests produce byte-identical files, so the timestamp is only filled
/// when the caller asks for one.
struct RunManifest {
    std::string command;
    json params = json::object();
    std::uint64_t seed = 0;
    std::string mode = "exact";
    std::string version = kVersion;
    std::optional<std::string> timestamp;

    json to_json() const;
};

/// "x:y,x:y,..."; throws std::invalid_argument on malformed input.
std::vector<Site> parse_sites(std::string const& text);
/// Exact value of a decimal literal such as "0.025", "1/4" or "3e-2".
mpq_class parse_rational(std::string const& text);

json sites_to_json(std::span<Site const> sites);
/// {"n", "sites", "d", "weight"} with d as "num/2^e" and weight = d^2 / n.
json spectral_set_to_json(std::span<Site const> sites, SpectralWeight const& weight);
/// {"index", "R", "S"}.
json sample_to_json(SampleRecord const& record);
json noise_report_to_json(NoiseReport const& report);
/// Dense JSON form: one "num/2^e" string per mask. Refused for n > 4.
json transform_to_json(FullTransform const& transform);

/// Little-endian dump:
///   char[4] "CWFT", u32 format version (1), u32 n, u32 site count L,
///   L x (i32 x, i32 y) in bit order, u32 exponent, u64 record count 2^L,
///   then 2^L i64 numerators; the coefficient of mask m is
///   numerator[m] / 2^exponent / sqrt(n).
void write_transform_binary(std::ostream& out, FullTransform const& transform);
FullTransform read_transform_binary(std::istream& in);

/// "# key=value" comment rows, then the embedded manifest as "# manifest=<json>".
void write_csv_preamble(std::ostream& out, RunManifest const& manifest,
                        std::vector<std::pair<std::string, std::string>> const& header_rows);

/// One row per (start-id, x, position).
void write_trajectories_csv(std::ostream& out, FlowResult const& flow);

/// Backward walk trace: one row per (x, V(2(top - x))).
void write_backward_walk_csv(std::ostream& out, BackwardWalk const& walk);

/// Shortest decimal that round-trips the double.
std::string format_double(double value);

}  // namespace coalflow
