#include "posteval/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace posteval {

namespace {

constexpr std::array<const char*, 3> kEventColumns = {"event_id", "x", "z_true"};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

template <class T>
T parse_number(const std::string& field, const std::string& column, std::size_t line) {
    T value{};
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty())
        throw Error(at_line(line) + "cannot parse " + column + " from '" + field + "'");
    return value;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

std::vector<double> real_array(const nlohmann::json& d, const char* key) {
    if (!d.contains(key)) throw Error(std::string("missing field '") + key + "'");
    const auto& arr = d.at(key);
    if (!arr.is_array()) throw Error(std::string("field '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw Error(std::string("field '") + key + "' must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

double real_field(const nlohmann::json& d, const char* key) {
    if (!d.contains(key)) throw Error(std::string("missing field '") + key + "'");
    if (!d.at(key).is_number()) throw Error(std::string("field '") + key + "' must be a number");
    return d.at(key).get<double>();
}

}  // namespace

std::string format_real(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw Error("cannot format real");
    return std::string(buf.data(), ptr);
}

std::vector<EventRecord> parse_events(std::istream& in, std::map<std::string, std::string>* metadata) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<EventRecord> events;
    std::set<std::int64_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (!have_header) {
            if (!line.empty() && line[0] == '#') {
                const auto start = line.find_first_not_of("# ");
                if (metadata && start != std::string::npos) {
                    const auto body = line.substr(start);
                    const auto eq = body.find('=');
                    if (eq != std::string::npos) (*metadata)[body.substr(0, eq)] = body.substr(eq + 1);
                }
                continue;
            }
            const auto cols = split(line, ',');
            for (std::size_t c = 0; c < kEventColumns.size(); ++c)
                if (c >= cols.size() || cols[c] != kEventColumns[c])
                    throw Error(at_line(line_no) + "missing column " + kEventColumns[c] +
                                " (header must be event_id,x,z_true)");
            if (cols.size() > kEventColumns.size()) throw Error(at_line(line_no) + "unexpected extra header columns");
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < kEventColumns.size())
            throw Error(at_line(line_no) + "missing column " + kEventColumns[fields.size()]);
        if (fields.size() > kEventColumns.size()) throw Error(at_line(line_no) + "too many fields");
        EventRecord e;
        e.event_id = parse_number<std::int64_t>(fields[0], "event_id", line_no);
        e.x = parse_number<double>(fields[1], "x", line_no);
        e.z_true = parse_number<double>(fields[2], "z_true", line_no);
        if (!std::isfinite(e.x) || !std::isfinite(e.z_true)) throw Error(at_line(line_no) + "non-finite value");
        if (!seen.insert(e.event_id).second)
            throw Error(at_line(line_no) + "duplicate event_id " + std::to_string(e.event_id));
        events.push_back(e);
    }
    if (!have_header) throw Error("missing header event_id,x,z_true");
    return events;
}

EventsFile read_events_file(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    EventsFile file;
    try {
        file.events = parse_events(in, &file.metadata);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return file;
}

std::vector<EventRecord> read_events(const std::filesystem::path& path) { return read_events_file(path).events; }

void write_events(const std::filesystem::path& path, std::span<const EventRecord> events,
                  const std::map<std::string, std::string>& metadata) {
    validate_events(events);
    std::string out;
    out.reserve(events.size() * 48 + 64);
    for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
    out += "event_id,x,z_true\n";
    for (const auto& e : events) {
        out += std::to_string(e.event_id);
        out += ',';
        out += format_real(e.x);
        out += ',';
        out += format_real(e.z_true);
        out += '\n';
    }
    write_file_atomic(path, out);
}

nlohmann::ordered_json distribution_to_json(const PredictiveDistribution& dist) {
    nlohmann::ordered_json j;
    j["type"] = family_name(dist);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Point>) {
                j["value"] = d.value;
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                j["mu"] = d.mu;
                j["sigma"] = d.sigma;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                j["weights"] = d.weights;
                j["means"] = d.means;
                j["sigmas"] = d.sigmas;
            } else if constexpr (std::is_same_v<T, SampleEnsemble>) {
                j["values"] = std::vector<double>(d.sorted().begin(), d.sorted().end());
            } else {
                j["lo"] = d.lo;
                j["hi"] = d.hi;
                j["density"] = d.density;
            }
        },
        dist);
    return j;
}

PredictiveDistribution distribution_from_json(const nlohmann::json& d) {
    if (!d.is_object()) throw Error("'dist' must be an object");
    if (!d.contains("type") || !d.at("type").is_string()) throw Error("missing field 'type'");
    const auto type = d.at("type").get<std::string>();
    if (type == "point") return make_point(real_field(d, "value"));
    if (type == "gaussian") return make_gaussian(real_field(d, "mu"), real_field(d, "sigma"));
    if (type == "mixture")
        return make_mixture(real_array(d, "weights"), real_array(d, "means"), real_array(d, "sigmas"));
    if (type == "samples") return make_sample_ensemble(real_array(d, "values"));
    if (type == "grid") return make_gridded_density(real_field(d, "lo"), real_field(d, "hi"), real_array(d, "density"));
    throw Error("unknown distribution type '" + type + "'");
}

PredictionMap parse_predictions(std::istream& in) {
    PredictionMap out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            if (!j.is_object()) throw Error("line must be a JSON object");
            if (!j.contains("event_id") || !j.at("event_id").is_number_integer())
                throw Error("missing integer field 'event_id'");
            if (!j.contains("dist")) throw Error("missing field 'dist'");
            const auto id = j.at("event_id").get<std::int64_t>();
            auto dist = distribution_from_json(j.at("dist"));
            if (!out.emplace(id, std::move(dist)).second) throw Error("duplicate event_id " + std::to_string(id));
        } catch (const nlohmann::json::exception& e) {
            throw Error(at_line(line_no) + "invalid JSON: " + e.what());
        } catch (const Error& e) {
            throw Error(at_line(line_no) + e.what());
        }
    }
    return out;
}

PredictionMap read_predictions(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    try {
        return parse_predictions(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_predictions(const std::filesystem::path& path, std::span<const EventRecord> events,
                       std::span<const PredictiveDistribution> dists) {
    if (events.size() != dists.size()) throw Error("events and predictions differ in length");
    std::string out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        nlohmann::ordered_json j;
        j["event_id"] = events[i].event_id;
        j["dist"] = distribution_to_json(dists[i]);
        out += j.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::string dataset_hash(std::span<const EventRecord> events) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& e : events)
        feed(std::to_string(e.event_id) + "," + format_real(e.x) + "," + format_real(e.z_true) + "\n");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + path.string());
        out << content;
        out.flush();
        if (!out) throw Error("cannot write " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot write " + path.string());
    }
}

}  // namespace posteval
