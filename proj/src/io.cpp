#include "strbf/io.hpp"

#include <charconv>
#include <limits>
#include <fstream>
#include <map>
#include <sstream>

#include "strbf/errors.hpp"

namespace strbf {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        // from_chars rejects "inf"/"nan" spellings that some tools emit.
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw IoError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("csv: missing column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ',';
        s += fields[i];
    }
    return s;
}

}  // namespace

std::string to_csv(const CsvTable& t) {
    std::string out;
    for (const auto& c : t.comments) out += "# " + c + "\n";
    out += join(t.header) + "\n";
    for (const auto& r : t.rows) out += join(r) + "\n";
    return out;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    bool have_header = false;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            t.comments.emplace_back(line);
            continue;
        }
        auto fields = split(line, ',');
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != t.header.size())
                throw IoError("csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw IoError("csv: no header line");
    return t;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string series_to_csv(const TimeSeries& s) {
    CsvTable t;
    t.header = {"t", "value"};
    t.rows.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        t.rows.push_back({format_double(s.time_at(i)), format_double(s.values[i])});
    return to_csv(t);
}

TimeSeries series_from_csv(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const std::size_t ct = t.column("t");
    const std::size_t cv = t.column("value");
    if (t.rows.empty()) throw IoError("series csv: no samples");
    TimeSeries s;
    s.values.reserve(t.rows.size());
    for (const auto& r : t.rows) s.values.push_back(parse_double(r[cv]));
    s.t0 = parse_double(t.rows.front()[ct]);
    s.sample_interval = t.rows.size() > 1 ? parse_double(t.rows[1][ct]) - s.t0 : 1.0;
    if (!(s.sample_interval > 0.0)) throw IoError("series csv: time column must increase");
    return s;
}

std::string cluster_model_to_csv(const ClusterModel& m) {
    CsvTable t;
    t.header.push_back("cluster");
    for (std::size_t d = 0; d < m.dim; ++d) t.header.push_back("center_" + std::to_string(d));
    t.header.push_back("spread");
    for (std::size_t j = 0; j < m.k(); ++j) {
        std::vector<std::string> row{std::to_string(j)};
        for (double c : m.centroid(j)) row.push_back(format_double(c));
        row.push_back(format_double(m.spreads[j]));
        t.rows.push_back(std::move(row));
    }
    return to_csv(t);
}

std::string checkpoint_to_csv(const NetworkState& s) {
    s.validate();
    const Topology& topo = s.topology;
    const std::size_t dim = topo.kernel_dim();
    const KernelKind kind = s.kernels.front().kind;

    CsvTable t;
    std::ostringstream meta;
    meta << "model=" << to_string(topo.kind) << " spatial_size=" << topo.spatial_size
         << " temporal_depth=" << topo.temporal_depth << " input_dim=" << topo.input_dim
         << " branch_input=" << to_string(topo.branch_input) << " kernel=" << to_string(kind);
    t.comments.push_back(meta.str());

    t.header = {"branch", "neuron"};
    for (std::size_t d = 0; d < dim; ++d) t.header.push_back("center_" + std::to_string(d));
    t.header.push_back("spread");
    t.header.push_back("weight");

    for (std::size_t b = 0; b < topo.temporal_depth; ++b) {
        for (std::size_t i = 0; i < topo.spatial_size; ++i) {
            const std::size_t slot = s.slot(i, b);
            const KernelSpec& k = s.kernels[slot];
            if (k.kind != kind) throw ContractViolation("checkpoint: mixed kernel kinds are not serializable");
            std::vector<std::string> row{std::to_string(b), std::to_string(i)};
            for (double c : k.center) row.push_back(format_double(c));
            row.push_back(format_double(k.spread));
            row.push_back(format_double(s.weights[slot]));
            t.rows.push_back(std::move(row));
        }
    }
    std::vector<std::string> bias_row(t.header.size());
    bias_row.front() = "bias";
    bias_row.back() = format_double(s.bias);
    t.rows.push_back(std::move(bias_row));
    return to_csv(t);
}

NetworkState checkpoint_from_csv(std::string_view text) {
    const CsvTable t = parse_csv(text);
    std::map<std::string, std::string, std::less<>> meta;
    for (const auto& c : t.comments) {
        std::istringstream ss(c);
        std::string kv;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq != std::string::npos) meta[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = meta.find(key);
        if (it == meta.end()) throw IoError(std::string("checkpoint: missing metadata '") + key + "'");
        return it->second;
    };
    auto to_size = [](const std::string& v) {
        std::size_t x = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw IoError("checkpoint: bad integer '" + v + "'");
        return x;
    };

    NetworkState s;
    s.topology.kind = parse_model_kind(need("model"));
    s.topology.spatial_size = to_size(need("spatial_size"));
    s.topology.temporal_depth = to_size(need("temporal_depth"));
    s.topology.input_dim = to_size(need("input_dim"));
    s.topology.branch_input = parse_branch_input(need("branch_input"));
    s.topology.validate();
    const KernelKind kind = parse_kernel_kind(need("kernel"));

    const std::size_t dim = s.topology.kernel_dim();
    if (t.header.size() != dim + 4) throw IoError("checkpoint: column count does not match topology");
    const std::size_t n = s.topology.neuron_count();
    s.kernels.resize(n);
    s.weights.resize(n);
    std::vector<bool> seen(n, false);
    bool have_bias = false;
    for (const auto& r : t.rows) {
        if (r.front() == "bias") {
            s.bias = parse_double(r.back());
            have_bias = true;
            continue;
        }
        const std::size_t b = to_size(r[0]);
        const std::size_t i = to_size(r[1]);
        if (b >= s.topology.temporal_depth || i >= s.topology.spatial_size)
            throw IoError("checkpoint: neuron index out of range");
        const std::size_t slot = s.slot(i, b);
        KernelSpec k{kind, std::vector<double>(dim), parse_double(r[2 + dim])};
        for (std::size_t d = 0; d < dim; ++d) k.center[d] = parse_double(r[2 + d]);
        s.kernels[slot] = std::move(k);
        s.weights[slot] = parse_double(r[3 + dim]);
        seen[slot] = true;
    }
    for (bool v : seen)
        if (!v) throw IoError("checkpoint: missing neuron rows");
    if (!have_bias) throw IoError("checkpoint: missing bias row");
    s.validate();
    return s;
}

}  // namespace strbf
