#include "tgcn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tgcn/errors.hpp"
#include "tgcn/tensor_ops.hpp"

namespace tgcn {

namespace {

constexpr std::int64_t kDay = 86400;

const DatasetInfo kDatasets[] = {
    {DatasetKind::bitcoin_otc, "bitcoin_otc", 14 * kDay, 2, Metric::f1_negative, 95, 20, 20, 6005,
     35569, 135, 0},
    {DatasetKind::bitcoin_alpha, "bitcoin_alpha", 14 * kDay, 2, Metric::f1_negative, 95, 20, 20, 7604,
     24173, 135, 0},
    {DatasetKind::reddit, "reddit", 14 * kDay, 2, Metric::f1_negative, 66, 10, 10, 3818, 163008, 86, 0},
    {DatasetKind::chess, "chess", 31 * kDay, 3, Metric::accuracy, 80, 10, 10, 7301, 64958, 100, 2},
};

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& why) {
    throw DataError(path + ":" + std::to_string(line) + ": " + why);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

bool to_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool to_int64(const std::string& s, std::int64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

// Epoch seconds for a UTC civil timestamp (proleptic Gregorian).
std::int64_t civil_to_epoch(int y, int mo, int d, int hh, int mi, int ss) {
    std::int64_t yy = y;
    yy -= mo <= 2;
    const std::int64_t era = (yy >= 0 ? yy : yy - 399) / 400;
    const std::int64_t yoe = yy - era * 400;
    const std::int64_t doy = (153 * (mo + (mo > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const std::int64_t days = era * 146097 + doe - 719468;
    return days * kDay + hh * 3600 + mi * 60 + ss;
}

bool parse_timestamp(const std::string& s, std::int64_t& out) {
    // "YYYY-MM-DD HH:MM:SS"
    int y, mo, d, hh, mi, ss;
    if (std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &hh, &mi, &ss) != 6) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh < 0 || hh > 23 || mi < 0 || mi > 59 || ss < 0 ||
        ss > 60)
        return false;
    out = civil_to_epoch(y, mo, d, hh, mi, ss);
    return true;
}

std::vector<RawRecord> parse_bitcoin(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::vector<RawRecord> records;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_on(line, ',');
        if (f.size() != 4) parse_fail(path, lineno, "expected 4 comma-separated fields");
        RawRecord r;
        r.src = f[0];
        r.dst = f[1];
        std::int64_t id;
        if (!to_int64(f[0], id) || !to_int64(f[1], id))
            parse_fail(path, lineno, "node ids must be integers");
        if (!to_double(f[2], r.rating)) parse_fail(path, lineno, "bad rating field");
        if (!to_double(f[3], r.timestamp)) parse_fail(path, lineno, "bad time field");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RawRecord> parse_reddit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_on(line, '\t');
    auto col = [&](const char* name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw DataError(path + ": missing column " + name);
    };
    const int c_src = col("SOURCE_SUBREDDIT");
    const int c_dst = col("TARGET_SUBREDDIT");
    const int c_ts = col("TIMESTAMP");
    const int c_sent = col("LINK_SENTIMENT");

    std::vector<RawRecord> records;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_on(line, '\t');
        const int needed = std::max(std::max(c_src, c_dst), std::max(c_ts, c_sent));
        if (static_cast<int>(f.size()) <= needed) parse_fail(path, lineno, "too few tab fields");
        RawRecord r;
        r.src = f[c_src];
        r.dst = f[c_dst];
        std::int64_t ts;
        if (!parse_timestamp(f[c_ts], ts)) parse_fail(path, lineno, "bad TIMESTAMP field");
        r.timestamp = static_cast<double>(ts);
        if (!to_double(f[c_sent], r.rating)) parse_fail(path, lineno, "bad LINK_SENTIMENT field");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RawRecord> parse_chess(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::vector<RawRecord> records;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        std::string white, black, result, stamp;
        if (!(ss >> white >> black >> result >> stamp))
            parse_fail(path, lineno, "expected `white black result timestamp`");
        RawRecord r;
        r.src = white;
        r.dst = black;
        std::int64_t id;
        if (!to_int64(white, id) || !to_int64(black, id))
            parse_fail(path, lineno, "node ids must be integers");
        if (!to_double(result, r.rating)) parse_fail(path, lineno, "bad result field");
        if (!to_double(stamp, r.timestamp)) parse_fail(path, lineno, "bad timestamp field");
        records.push_back(std::move(r));
    }
    return records;
}

int class_of_sum(DatasetKind kind, double sum) {
    if (kind == DatasetKind::chess) return sum < 0.0 ? 0 : (sum > 0.0 ? 2 : 1);
    if (sum > 0.0) return 1;   // positive / friendly
    if (sum < 0.0) return 0;   // negative: the detection target
    return -1;                 // ambiguous aggregate, excluded from classification
}

}  // namespace

DatasetKind dataset_from_string(const std::string& s) {
    for (const DatasetInfo& d : kDatasets)
        if (s == d.name) return d.kind;
    throw ConfigError("unknown dataset: " + s);
}

std::string to_string(DatasetKind k) { return dataset_info(k).name; }

const DatasetInfo& dataset_info(DatasetKind kind) {
    for (const DatasetInfo& d : kDatasets)
        if (d.kind == kind) return d;
    throw ConfigError("unknown dataset kind");
}

std::vector<RawRecord> parse_dataset(DatasetKind kind, const std::string& path) {
    switch (kind) {
        case DatasetKind::bitcoin_otc:
        case DatasetKind::bitcoin_alpha: return parse_bitcoin(path);
        case DatasetKind::reddit: return parse_reddit(path);
        case DatasetKind::chess: return parse_chess(path);
    }
    throw ConfigError("unknown dataset kind");
}

DynamicGraph partition(const std::vector<RawRecord>& records, DatasetKind kind) {
    if (records.empty()) throw DataError("partition: no records");
    const DatasetInfo& info = dataset_info(kind);

    // Reddit keeps only subreddits with >= 20 interactions over the whole file.
    std::vector<char> keep(records.size(), 1);
    if (kind == DatasetKind::reddit) {
        std::unordered_map<std::string, long> interactions;
        for (const RawRecord& r : records) {
            ++interactions[r.src];
            ++interactions[r.dst];
        }
        for (std::size_t i = 0; i < records.size(); ++i)
            if (interactions[records[i].src] < 20 || interactions[records[i].dst] < 20) keep[i] = 0;
    }

    double min_ts = std::numeric_limits<double>::infinity();
    double max_ts = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!keep[i]) continue;
        min_ts = std::min(min_ts, records[i].timestamp);
        max_ts = std::max(max_ts, records[i].timestamp);
    }
    if (!std::isfinite(min_ts)) throw DataError("partition: no records left after filtering");

    const double len = static_cast<double>(info.window_seconds);
    const int depth = static_cast<int>(std::floor((max_ts - min_ts) / len));
    if (depth < 1) throw DataError("partition: data span shorter than one time window");

    DynamicGraph g;
    g.kind = kind;
    g.num_steps = depth;
    g.steps.assign(depth, {});

    // Window index per record; trailing partial window dropped.
    std::vector<int> window(records.size(), -1);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!keep[i]) continue;
        const int w = static_cast<int>(std::floor((records[i].timestamp - min_ts) / len));
        if (w >= depth) continue;
        window[i] = w;
        ++g.records_kept;
    }

    // Node indexing.
    std::unordered_map<std::string, int> name_index;
    std::int64_t min_id = 0, max_id = 0;
    const bool integer_ids = kind != DatasetKind::reddit;
    if (integer_ids) {
        bool first = true;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (window[i] < 0) continue;
            std::int64_t s, d;
            if (!to_int64(records[i].src, s) || !to_int64(records[i].dst, d))
                throw DataError("partition: non-integer node id");
            if (first) {
                min_id = std::min(s, d);
                max_id = std::max(s, d);
                first = false;
            } else {
                min_id = std::min(min_id, std::min(s, d));
                max_id = std::max(max_id, std::max(s, d));
            }
        }
        if (max_id - min_id + 1 > 10'000'000) throw DataError("partition: node id range too wide");
        g.num_nodes = static_cast<int>(max_id - min_id + 1);
        g.node_ids.resize(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i) g.node_ids[i] = std::to_string(min_id + i);
    } else {
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (window[i] < 0) continue;
            for (const std::string* name : {&records[i].src, &records[i].dst}) {
                if (name_index.emplace(*name, static_cast<int>(g.node_ids.size())).second)
                    g.node_ids.push_back(*name);
            }
        }
        g.num_nodes = static_cast<int>(g.node_ids.size());
    }

    // Aggregate (src, dst) duplicates within each window; label the sum.
    std::vector<std::map<std::pair<int, int>, double>> agg(depth);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (window[i] < 0) continue;
        int s, d;
        if (integer_ids) {
            std::int64_t si, di;
            to_int64(records[i].src, si);
            to_int64(records[i].dst, di);
            s = static_cast<int>(si - min_id);
            d = static_cast<int>(di - min_id);
        } else {
            s = name_index.at(records[i].src);
            d = name_index.at(records[i].dst);
        }
        agg[window[i]][{s, d}] += records[i].rating;
    }
    for (int t = 0; t < depth; ++t) {
        g.steps[t].reserve(agg[t].size());
        for (const auto& [key, sum] : agg[t])
            g.steps[t].push_back({key.first, key.second, sum, class_of_sum(kind, sum)});
    }
    return g;
}

IngestStats ingest_stats(const DynamicGraph& g) {
    return {static_cast<long>(g.num_nodes), g.records_kept, g.num_steps};
}

Tensor3 build_features(const DynamicGraph& g, bool log_scale) {
    Tensor3 x(g.num_nodes, 2, g.num_steps);
    for (int t = 0; t < g.num_steps; ++t)
        for (const StepEdge& e : g.steps[t]) {
            x(e.src, 0, t) += 1.0;  // outgoing
            x(e.dst, 1, t) += 1.0;  // incoming
        }
    if (log_scale)
        for (double& v : x.v) v = std::log1p(v);
    return x;
}

std::vector<CsrMatrix> binary_adjacency(const DynamicGraph& g) {
    std::vector<CsrMatrix> slices;
    slices.reserve(g.num_steps);
    for (int t = 0; t < g.num_steps; ++t) {
        std::vector<Coo> entries;
        entries.reserve(g.steps[t].size());
        for (const StepEdge& e : g.steps[t]) entries.push_back({e.src, e.dst, 1.0});
        slices.push_back(CsrMatrix::from_coo(g.num_nodes, g.num_nodes, std::move(entries)));
    }
    return slices;
}

std::vector<CsrMatrix> apply_edge_life(const std::vector<CsrMatrix>& slices, int life) {
    if (life < 1) throw ConfigError("edge life must be >= 1");
    if (life == 1) return slices;
    std::vector<CsrMatrix> out;
    out.reserve(slices.size());
    std::vector<const CsrMatrix*> parts;
    std::vector<double> ones;
    for (int t = 0; t < static_cast<int>(slices.size()); ++t) {
        parts.clear();
        for (int k = std::max(0, t - life + 1); k <= t; ++k) parts.push_back(&slices[k]);
        ones.assign(parts.size(), 1.0);
        out.push_back(add_scaled(parts, ones));
    }
    return out;
}

std::vector<int> top_degree_nodes(const DynamicGraph& g, int count) {
    std::vector<long> degree(g.num_nodes, 0);
    for (const auto& step : g.steps)
        for (const StepEdge& e : step) {
            ++degree[e.src];
            ++degree[e.dst];
        }
    std::vector<int> order(g.num_nodes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&degree](int a, int b) { return degree[a] > degree[b]; });
    order.resize(std::min<std::size_t>(order.size(), count));
    std::sort(order.begin(), order.end());
    return order;
}

DynamicGraph induce_subgraph(const DynamicGraph& g, const std::vector<int>& keep) {
    std::vector<int> remap(g.num_nodes, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= g.num_nodes) throw ShapeError("induce_subgraph: bad node index");
        remap[keep[i]] = static_cast<int>(i);
    }
    DynamicGraph out;
    out.kind = g.kind;
    out.num_nodes = static_cast<int>(keep.size());
    out.num_steps = g.num_steps;
    out.steps.assign(g.num_steps, {});
    out.node_ids.reserve(keep.size());
    for (int k : keep) out.node_ids.push_back(g.node_ids[k]);
    long kept_edges = 0;
    for (int t = 0; t < g.num_steps; ++t)
        for (const StepEdge& e : g.steps[t]) {
            if (remap[e.src] < 0 || remap[e.dst] < 0) continue;
            out.steps[t].push_back({remap[e.src], remap[e.dst], e.rating_sum, e.cls});
            ++kept_edges;
        }
    out.records_kept = kept_edges;  // raw record count is no longer meaningful here
    return out;
}

void SplitSpec::validate(int depth) const {
    if (s_train <= 0 || s_val <= 0 || s_test <= 0)
        throw ConfigError("split: every part must be positive");
    if (total() != depth)
        throw ConfigError("split: parts sum to " + std::to_string(total()) + " but the data has " +
                          std::to_string(depth) + " time steps");
}

std::vector<CsrMatrix> window_normalized_slices(const DynamicGraph& g, int offset, int length,
                                                const PrepareOptions& options) {
    if (offset < 0 || offset + length > g.num_steps) throw ShapeError("window out of range");
    const std::vector<CsrMatrix> lived = apply_edge_life(binary_adjacency(g), options.edge_life);
    std::vector<CsrMatrix> out;
    out.reserve(length);
    for (int t = offset; t < offset + length; ++t) {
        CsrMatrix s = options.symmetrize ? symmetrize(lived[t]) : lived[t];
        out.push_back(normalize_adjacency(s));
    }
    return out;
}

PreparedData make_windows(const DynamicGraph& g, const SplitSpec& split, const MixingMatrix& m,
                          const PrepareOptions& options) {
    split.validate(g.num_steps);
    if (m.size() != split.s_train)
        throw ConfigError("make_windows: mixing matrix must be s_train x s_train");

    const std::vector<CsrMatrix> lived = apply_edge_life(binary_adjacency(g), options.edge_life);
    std::vector<CsrMatrix> normalized;
    normalized.reserve(g.num_steps);
    for (const CsrMatrix& s : lived)
        normalized.push_back(normalize_adjacency(options.symmetrize ? symmetrize(s) : s));
    const Tensor3 features = build_features(g, options.log_features);

    PreparedData prep;
    prep.num_nodes = g.num_nodes;
    prep.split = split;

    struct WindowPlan {
        PreparedWindow* window;
        int offset;       // first global slice of the window
        int period_lo;    // global slice range whose labeled edges it scores
        int period_hi;
    };
    PreparedData* p = &prep;
    const WindowPlan plans[3] = {
        {&p->train_window, 0, 0, split.s_train},
        {&p->val_window, split.s_val, split.s_train, split.s_train + split.s_val},
        {&p->test_window, split.s_val + split.s_test, split.s_train + split.s_val, g.num_steps},
    };
    for (const WindowPlan& plan : plans) {
        std::vector<CsrMatrix> win(normalized.begin() + plan.offset,
                                   normalized.begin() + plan.offset + split.s_train);
        plan.window->a_hat = m_transform_sparse(win, m);

        Tensor3 xw(g.num_nodes, 2, split.s_train);
        for (int t = 0; t < split.s_train; ++t) {
            const double* src = features.slice(plan.offset + t);
            std::copy(src, src + features.slice_size(), xw.slice(t));
        }
        plan.window->x_hat = m_transform(xw, m);

        for (int t = plan.period_lo; t < plan.period_hi; ++t)
            for (const StepEdge& e : g.steps[t])
                if (e.cls >= 0) plan.window->edges.push_back({e.src, e.dst, t - plan.offset, e.cls});
    }
    return prep;
}

namespace {

constexpr std::uint32_t kCacheMagic = 0x54474347;  // "TGCG"
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
void get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw DataError("graph cache: truncated file");
}

}  // namespace

void save_graph_cache(const std::string& path, const DynamicGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write graph cache: " + path);
    put(out, kCacheMagic);
    put(out, kCacheVersion);
    put(out, static_cast<std::int32_t>(g.kind));
    put(out, static_cast<std::int32_t>(g.num_nodes));
    put(out, static_cast<std::int32_t>(g.num_steps));
    put(out, static_cast<std::int64_t>(g.records_kept));
    put(out, static_cast<std::int64_t>(g.node_ids.size()));
    for (const std::string& id : g.node_ids) {
        put(out, static_cast<std::int32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    for (const auto& step : g.steps) {
        put(out, static_cast<std::int64_t>(step.size()));
        for (const StepEdge& e : step) {
            put(out, static_cast<std::int32_t>(e.src));
            put(out, static_cast<std::int32_t>(e.dst));
            put(out, e.rating_sum);
            put(out, static_cast<std::int32_t>(e.cls));
        }
    }
}

DynamicGraph load_graph_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open graph cache: " + path);
    std::uint32_t magic = 0, version = 0;
    get(in, magic);
    get(in, version);
    if (magic != kCacheMagic) throw DataError("graph cache: bad magic");
    if (version != kCacheVersion) throw DataError("graph cache: unsupported version");
    DynamicGraph g;
    std::int32_t kind, nodes, steps;
    std::int64_t records, id_count;
    get(in, kind);
    get(in, nodes);
    get(in, steps);
    get(in, records);
    get(in, id_count);
    g.kind = static_cast<DatasetKind>(kind);
    g.num_nodes = nodes;
    g.num_steps = steps;
    g.records_kept = records;
    g.node_ids.resize(id_count);
    for (auto& id : g.node_ids) {
        std::int32_t len;
        get(in, len);
        if (len < 0 || len > 1 << 20) throw DataError("graph cache: bad id length");
        id.resize(len);
        in.read(id.data(), len);
        if (!in) throw DataError("graph cache: truncated file");
    }
    g.steps.resize(steps);
    for (auto& step : g.steps) {
        std::int64_t count;
        get(in, count);
        if (count < 0) throw DataError("graph cache: bad edge count");
        step.resize(count);
        for (StepEdge& e : step) {
            std::int32_t src, dst, cls;
            get(in, src);
            get(in, dst);
            get(in, e.rating_sum);
            get(in, cls);
            e.src = src;
            e.dst = dst;
            e.cls = cls;
        }
    }
    return g;
}

}  // namespace tgcn
