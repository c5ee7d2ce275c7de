#include "icsr/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace icsr {
namespace {

using json = nlohmann::json;

constexpr char kMagic[4] = {'I', 'C', 'S', 'R'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kFlagTruth = 0x01;

template <typename T>
void write_le(std::ofstream& f, T v) {
    unsigned char b[sizeof(T)];
    auto u = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        b[i] = static_cast<unsigned char>(u >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& f, const char* field) {
    unsigned char b[sizeof(T)];
    f.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!f) throw FormatError(field, std::string("truncated file while reading ") + field);
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return static_cast<T>(u);
}

void write_f64(std::ofstream& f, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_le<std::uint64_t>(f, bits);
}

double read_f64(std::ifstream& f, const char* field) {
    const auto bits = read_le<std::uint64_t>(f, field);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_embedding_file(const std::string& path, const EmbeddingSet& set) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(kMagic, 4);
    write_le<std::uint16_t>(f, kVersion);
    write_le<std::uint8_t>(f, set.has_truth() ? kFlagTruth : 0);
    write_le<std::uint64_t>(f, set.size());
    write_le<std::uint32_t>(f, static_cast<std::uint32_t>(set.dim()));
    write_le<std::uint32_t>(f, static_cast<std::uint32_t>(set.num_clusters));
    for (double v : set.features.data) write_f64(f, v);
    for (int a : set.assignments) write_le<std::uint32_t>(f, static_cast<std::uint32_t>(a));
    if (set.has_truth())
        for (int t : set.truth_labels)
            write_le<std::uint32_t>(f, static_cast<std::uint32_t>(t));
    if (!f) throw std::runtime_error("write failed: " + path);
}

EmbeddingSet read_embedding_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("path", "cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("magic", "bad magic bytes in " + path);
    const auto version = read_le<std::uint16_t>(f, "version");
    if (version != kVersion)
        throw FormatError("version",
                          "unsupported format version " + std::to_string(version));
    const auto flags = read_le<std::uint8_t>(f, "flags");
    const auto n = read_le<std::uint64_t>(f, "N");
    const auto d = read_le<std::uint32_t>(f, "D");
    const auto k = read_le<std::uint32_t>(f, "K");
    if (n == 0) throw FormatError("N", "sample count is zero");
    if (d == 0) throw FormatError("D", "dimension is zero");
    if (k == 0) throw FormatError("K", "cluster count is zero");

    EmbeddingSet set;
    set.features = Matrix(n, d);
    for (auto& v : set.features.data) v = read_f64(f, "features");
    set.assignments.resize(n);
    for (auto& a : set.assignments)
        a = static_cast<int>(read_le<std::uint32_t>(f, "assignments"));
    set.num_clusters = static_cast<int>(k);
    if (flags & kFlagTruth) {
        set.truth_labels.resize(n);
        for (auto& t : set.truth_labels)
            t = static_cast<int>(read_le<std::uint32_t>(f, "truth_labels"));
    }
    // trailing bytes mean the header lied about the layout
    f.peek();
    if (!f.eof()) throw FormatError("length", "trailing bytes after payload");
    set.sample_ids.resize(n);
    for (std::uint64_t i = 0; i < n; ++i)
        set.sample_ids[i] = static_cast<std::int64_t>(i);
    return set;
}

EmbeddingSet read_embedding_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("path", "cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw FormatError("header", "empty file");

    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols.size() < 3 || cols.front() != "id")
        throw FormatError("header", "expected header id,dim0..,cluster[,truth]");
    const bool has_truth = cols.back() == "truth";
    const std::size_t d = cols.size() - 2 - (has_truth ? 1 : 0);
    if (d == 0) throw FormatError("header", "no feature columns");

    std::vector<std::int64_t> ids;
    std::vector<double> feats;
    std::vector<int> assigns, truths;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != cols.size())
            throw FormatError("row", "wrong column count at line " +
                                         std::to_string(lineno));
        try {
            ids.push_back(std::stoll(cells[0]));
            for (std::size_t j = 0; j < d; ++j) feats.push_back(std::stod(cells[1 + j]));
            assigns.push_back(std::stoi(cells[1 + d]));
            if (has_truth) truths.push_back(std::stoi(cells[2 + d]));
        } catch (const std::exception&) {
            throw FormatError("row", "unparsable value at line " + std::to_string(lineno));
        }
    }
    if (ids.empty()) throw FormatError("rows", "no data rows");

    EmbeddingSet set;
    const std::size_t n = ids.size();
    set.features = Matrix(n, d);
    set.features.data = std::move(feats);
    set.assignments = std::move(assigns);
    set.truth_labels = std::move(truths);
    set.sample_ids = std::move(ids);
    int k = 0;
    for (int a : set.assignments) k = std::max(k, a + 1);
    set.num_clusters = k;
    return set;
}

void write_embedding_csv(const std::string& path, const EmbeddingSet& set) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "id";
    for (std::size_t j = 0; j < set.dim(); ++j) f << ",dim" << j;
    f << ",cluster";
    if (set.has_truth()) f << ",truth";
    f << "\n";
    f << std::setprecision(17);
    for (std::size_t i = 0; i < set.size(); ++i) {
        f << set.sample_ids[i];
        for (std::size_t j = 0; j < set.dim(); ++j) f << "," << set.features(i, j);
        f << "," << set.assignments[i];
        if (set.has_truth()) f << "," << set.truth_labels[i];
        f << "\n";
    }
}

std::string ranking_report_json(const std::vector<RankedGroups>& groups,
                                const RankingConfig& cfg, int epoch) {
    json doc;
    doc["schema"] = 1;
    doc["tool"] = "icsr";
    json cfg_echo;
    cfg_echo["k0_fraction"] = cfg.k0_fraction;
    cfg_echo["kmax_fraction"] = cfg.kmax_fraction;
    cfg_echo["k_step"] = cfg.k_step;
    cfg_echo["m"] = cfg.num_groups;
    cfg_echo["p_fractions"] = cfg.p_fractions;
    cfg_echo["effective_p_fractions"] = effective_p_fractions(cfg, epoch);
    cfg_echo["epoch"] = epoch;
    cfg_echo["metric"] =
        cfg.distance == DistanceMetric::euclidean ? "euclidean" : "cosine";
    cfg_echo["normalize_features"] = cfg.normalize_features;
    doc["config"] = cfg_echo;

    json clusters = json::array();
    for (const auto& rg : groups) {
        json c;
        c["cluster_id"] = rg.cluster_id;
        json gs = json::array();
        json sizes = json::array();
        for (const auto& g : rg.groups) {
            gs.push_back(g);
            sizes.push_back(g.size());
        }
        c["groups"] = gs;
        c["group_sizes"] = sizes;
        c["residual"] = rg.residual;
        clusters.push_back(c);
    }
    doc["clusters"] = clusters;
    return doc.dump(2);
}

std::vector<RankedGroups> parse_ranking_report(const std::string& json_text) {
    json doc = json::parse(json_text);
    if (!doc.contains("schema") || doc["schema"].get<int>() != 1)
        throw FormatError("schema", "unsupported ranking report schema");
    std::vector<RankedGroups> out;
    for (const auto& c : doc.at("clusters")) {
        RankedGroups rg;
        rg.cluster_id = c.at("cluster_id").get<int>();
        for (const auto& g : c.at("groups"))
            rg.groups.push_back(g.get<std::vector<std::int64_t>>());
        rg.residual = c.at("residual").get<std::vector<std::int64_t>>();
        out.push_back(std::move(rg));
    }
    return out;
}

std::string evaluation_report_json(const EvaluationReport& rep) {
    json doc;
    doc["schema"] = 1;
    doc["acc"] = rep.acc;
    doc["nmi"] = rep.nmi;
    doc["ari"] = rep.ari;
    doc["mapping"] = rep.mapping;
    json per_cluster = json::array();
    for (const auto& cr : rep.per_cluster_rsr) {
        json c;
        c["cluster_id"] = cr.cluster_id;
        json curve = json::array();
        for (const auto& pt : cr.curve) curve.push_back({{"p", pt.p}, {"rsr", pt.value}});
        c["rsr"] = curve;
        per_cluster.push_back(c);
    }
    doc["per_cluster_rsr"] = per_cluster;
    json pooled = json::array();
    for (const auto& pt : rep.pooled_rsr) pooled.push_back({{"p", pt.p}, {"rsr", pt.value}});
    doc["pooled_rsr"] = pooled;
    return doc.dump(2);
}

std::string evaluation_report_table(const EvaluationReport& rep) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "acc " << rep.acc << "\n";
    os << "nmi " << rep.nmi << "\n";
    os << "ari " << rep.ari << "\n";
    for (const auto& pt : rep.pooled_rsr)
        os << "rsr_pooled p=" << std::setprecision(2) << pt.p << std::setprecision(4)
           << " " << pt.value << "\n";
    for (const auto& cr : rep.per_cluster_rsr) {
        os << "cluster " << cr.cluster_id << ":";
        for (const auto& pt : cr.curve)
            os << " rsr(" << std::setprecision(2) << pt.p << ")=" << std::setprecision(4)
               << pt.value;
        os << "\n";
    }
    return os.str();
}

}  // namespace icsr
