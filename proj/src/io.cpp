#include "coalflow/io.hpp"

#include <array>
#include <charconv>
#include <cctype>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace coalflow {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'W', 'F', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put_le(std::ostream& out, T value) {
    auto u = static_cast<std::make_unsigned_t<T>>(value);
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xFFu);
    out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw std::runtime_error("truncated transform dump");
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
    return static_cast<T>(u);
}

int parse_int(std::string const& text, std::string const& context) {
    int value = 0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("malformed integer '" + text + "' in " + context);
    }
    return value;
}

}  // namespace

json RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["params"] = params;
    j["seed"] = seed;
    j["mode"] = mode;
    j["version"] = version;
    j["timestamp"] = timestamp ? json(*timestamp) : json(nullptr);
    return j;
}

std::vector<Site> parse_sites(std::string const& text) {
    std::vector<Site> sites;
    if (text.empty()) return sites;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("site '" + item + "' is not of the form x:y");
        sites.push_back({parse_int(item.substr(0, colon), "site '" + item + "'"),
                         parse_int(item.substr(colon + 1), "site '" + item + "'")});
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return sites;
}

mpq_class parse_rational(std::string const& text) {
    auto fail = [&] { return std::invalid_argument("malformed number '" + text + "'"); };
    if (text.empty()) throw fail();
    if (text.find('/') != std::string::npos) {
        mpq_class q;
        if (q.set_str(text, 10) != 0) throw fail();
        if (q.get_den() == 0) throw fail();
        q.canonicalize();
        return q;
    }
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_digit = false, seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            if (seen_point) --scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw fail();
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        scale += parse_int(text.substr(i + 1), "exponent of '" + text + "'");
    }
    mpz_class num(digits, 10);
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
    mpq_class q = scale >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
    q.canonicalize();
    return negative ? mpq_class(-q) : q;
}

json sites_to_json(std::span<Site const> sites) {
    json arr = json::array();
    for (auto const& s : sites) arr.push_back({s.x, s.y});
    return arr;
}

json spectral_set_to_json(std::span<Site const> sites, SpectralWeight const& weight) {
    json j;
    j["n"] = weight.n;
    j["sites"] = sites_to_json(sites);
    j["d"] = weight.d.to_string();
    j["weight"] = weight.squared().get_d();
    return j;
}

json sample_to_json(SampleRecord const& record) {
    json j;
    j["index"] = record.index;
    json times = json::array();
    for (auto const& s : record.set.sites()) times.push_back(s.x);
    j["R"] = std::move(times);
    j["S"] = sites_to_json(record.set.sites());
    return j;
}

json noise_report_to_json(NoiseReport const& report) {
    json j;
    j["n"] = report.n;
    j["eps"] = report.eps;
    j["trials"] = report.trials;
    j["estimate"] = report.estimate;
    j["stderr"] = report.std_error;
    return j;
}

json transform_to_json(FullTransform const& transform) {
    if (transform.n > 4) throw std::invalid_argument("JSON transform export is limited to n <= 4");
    json j;
    j["n"] = transform.n;
    j["site_order"] = "row-major: x ascending, then y ascending; bit i of a mask selects site i";
    std::vector<Site> sites;
    for (int i = 0; i < index_set_size(transform.n); ++i) sites.push_back(site_at(i));
    j["sites"] = sites_to_json(sites);
    json values = json::array();
    for (std::uint64_t m = 0; m < transform.size(); ++m) values.push_back(transform.coefficient(m).to_string());
    j["d"] = std::move(values);
    return j;
}

void write_transform_binary(std::ostream& out, FullTransform const& transform) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kFormatVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(transform.n));
    auto count = static_cast<std::uint32_t>(index_set_size(transform.n));
    put_le<std::uint32_t>(out, count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Site s = site_at(static_cast<int>(i));
        put_le<std::int32_t>(out, s.x);
        put_le<std::int32_t>(out, s.y);
    }
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(transform.exponent()));
    put_le<std::uint64_t>(out, transform.raw.size());
    for (auto v : transform.raw) put_le<std::int64_t>(out, v);
}

FullTransform read_transform_binary(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error("not a transform dump");
    if (get_le<std::uint32_t>(in) != kFormatVersion) throw std::runtime_error("unsupported dump version");
    FullTransform t;
    t.n = static_cast<int>(get_le<std::uint32_t>(in));
    if (t.n < 1 || t.n > kOracleHardLimit) throw std::runtime_error("dump horizon out of range");
    auto count = get_le<std::uint32_t>(in);
    if (count != static_cast<std::uint32_t>(index_set_size(t.n))) throw std::runtime_error("site count mismatch");
    for (std::uint32_t i = 0; i < count; ++i) {
        Site expected = site_at(static_cast<int>(i));
        auto x = get_le<std::int32_t>(in);
        auto y = get_le<std::int32_t>(in);
        if (x != expected.x || y != expected.y) throw std::runtime_error("unexpected site ordering");
    }
    if (get_le<std::uint32_t>(in) != count) throw std::runtime_error("exponent mismatch");
    auto records = get_le<std::uint64_t>(in);
    if (records != (std::uint64_t{1} << count)) throw std::runtime_error("record count mismatch");
    t.raw.resize(records);
    for (auto& v : t.raw) v = get_le<std::int64_t>(in);
    return t;
}

void write_csv_preamble(std::ostream& out, RunManifest const& manifest,
                        std::vector<std::pair<std::string, std::string>> const& header_rows) {
    for (auto const& [key, value] : header_rows) out << "# " << key << '=' << value << '\n';
    out << "# manifest=" << manifest.to_json().dump() << '\n';
}

void write_trajectories_csv(std::ostream& out, FlowResult const& flow) {
    out << "start_id,x,position\n";
    for (std::size_t id = 0; id < flow.trajectories.size(); ++id) {
        auto const& t = flow.trajectories[id];
        for (std::size_t i = 0; i < t.positions.size(); ++i) {
            out << id << ',' << t.start.x + static_cast<int>(i) << ',' << t.positions[i] << '\n';
        }
    }
}

void write_backward_walk_csv(std::ostream& out, BackwardWalk const& walk) {
    out << "x,V\n";
    for (int x = 0; x <= walk.top; ++x) out << x << ',' << walk.values[x] << '\n';
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

}  // namespace coalflow
