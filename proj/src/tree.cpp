#include "fusetree/tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "fusetree/errors.hpp"

namespace fusetree {

namespace {
constexpr int kSchemaVersion = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

bool Partition::operator==(const Partition& other) const {
    if (cluster_of.size() != other.cluster_of.size()) return false;
    if (num_clusters != other.num_clusters) return false;
    Partition a = *this, b = other;
    a.canonicalize();
    b.canonicalize();
    return a.cluster_of == b.cluster_of;
}

void Partition::canonicalize() {
    std::vector<int> remap(num_clusters, -1);
    int next = 0;
    for (int& c : cluster_of) {
        if (remap[c] < 0) remap[c] = next++;
        c = remap[c];
    }
    num_clusters = next;
}

FusionTree::FusionTree(std::vector<Leaf> leaves, std::vector<FusionEvent> events,
                       WeightScheme scheme, std::int64_t n_total)
    : leaves_(std::move(leaves)),
      events_(std::move(events)),
      scheme_(scheme),
      n_total_(n_total) {
    rebuild_index();
}

void FusionTree::rebuild_index() {
    const int K = k();
    if (K == 0) throw DataError("empty tree");
    if (static_cast<int>(events_.size()) != K - 1)
        throw DataError("tree must have exactly K-1 events");
    const int nodes = 2 * K - 1;
    parent_.assign(nodes, -1);
    seg_lambda_.assign(nodes, 0.0);
    seg_beta_.assign(nodes, 0.0);
    seg_slope_.assign(nodes, 0.0);

    double prev = 0.0;
    for (int e = 0; e < K - 1; ++e) {
        const FusionEvent& ev = events_[e];
        const int id = K + e;
        if (ev.id != id) throw DataError("event ids must be K + position");
        if (ev.lambda < prev) throw DataError("events must be sorted by lambda");
        prev = ev.lambda;
        for (int child : {ev.left, ev.right}) {
            if (child < 0 || child >= id || parent_[child] != -1)
                throw DataError("malformed event children");
            parent_[child] = id;
        }
        seg_lambda_[id] = ev.lambda;
        seg_beta_[id] = ev.beta;
        seg_slope_[id] = ev.slope;
    }
    for (int g = 0; g < K; ++g) {
        seg_lambda_[g] = 0.0;
        seg_beta_[g] = leaves_[g].mean;
        const int p = parent_[g];
        if (p >= 0 && events_[p - K].lambda > 0.0)
            seg_slope_[g] = (events_[p - K].beta - leaves_[g].mean) / events_[p - K].lambda;
    }
    int roots = 0;
    for (int v = 0; v < nodes; ++v)
        if (parent_[v] < 0) ++roots;
    if (roots != 1) throw DataError("tree is not connected");
}

double FusionTree::root_lambda() const {
    return events_.empty() ? 0.0 : events_.back().lambda;
}

double FusionTree::grand_mean() const {
    if (!events_.empty()) return events_.back().beta;
    return leaves_[0].mean;
}

double FusionTree::beta_at(int group, double lambda) const {
    if (group < 0 || group >= k()) throw DataError("unknown group index");
    if (lambda < 0) throw DataError("lambda must be >= 0");
    int node = group;
    while (parent_[node] >= 0 && events_[parent_[node] - k()].lambda <= lambda)
        node = parent_[node];
    return seg_beta_[node] + seg_slope_[node] * (lambda - seg_lambda_[node]);
}

Partition FusionTree::cut(double lambda) const {
    if (lambda < 0) throw DataError("lambda must be >= 0");
    const int K = k();
    std::vector<int> top(2 * K - 1, -1);
    Partition part;
    part.cluster_of.resize(K);
    for (int g = 0; g < K; ++g) {
        int node = g;
        std::vector<int> chain;
        while (top[node] < 0 && parent_[node] >= 0 &&
               events_[parent_[node] - K].lambda <= lambda) {
            chain.push_back(node);
            node = parent_[node];
        }
        const int t = top[node] < 0 ? node : top[node];
        top[node] = t;
        for (int v : chain) top[v] = t;
        part.cluster_of[g] = t;
    }
    part.num_clusters = K;  // placeholder, fixed by canonicalize
    std::vector<int> remap(2 * K - 1, -1);
    int next = 0;
    for (int& c : part.cluster_of) {
        if (remap[c] < 0) remap[c] = next++;
        c = remap[c];
    }
    part.num_clusters = next;
    return part;
}

FusionTree::CutK FusionTree::cut_k(int target_clusters) const {
    const int K = k();
    if (target_clusters < 1 || target_clusters > K)
        throw DataError("target cluster count out of range");
    auto interval = [&](int events_done) -> std::pair<double, double> {
        const double lo = events_done == 0 ? 0.0 : events_[events_done - 1].lambda;
        const double hi = events_done == K - 1 ? kInf : events_[events_done].lambda;
        return {lo, hi};
    };
    CutK result;
    int j = K - target_clusters;
    auto [lo, hi] = interval(j);
    while (hi <= lo && j < K - 1) {  // ties skipped this size
        result.exact = false;
        ++j;
        std::tie(lo, hi) = interval(j);
    }
    result.lambda_lo = lo;
    result.lambda_hi = hi;
    result.partition = cut(lo);
    return result;
}

namespace {

std::string quote_label(const std::string& label) {
    bool plain = !label.empty();
    for (char c : label)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
    if (plain) return label;
    std::string out = "'";
    for (char c : label) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out.push_back('\'');
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string FusionTree::to_newick() const {
    const int K = k();
    if (K == 1) return quote_label(leaves_[0].label) + ";";
    // branch length = parent lambda - own lambda (0 for leaves)
    auto render = [&](auto&& self, int node) -> std::string {
        if (node < K) return quote_label(leaves_[node].label);
        const FusionEvent& ev = events_[node - K];
        auto branch = [&](int child) {
            const double child_lambda = child < K ? 0.0 : events_[child - K].lambda;
            return self(self, child) + ":" + format_double(ev.lambda - child_lambda);
        };
        return "(" + branch(ev.left) + "," + branch(ev.right) + ")";
    };
    return render(render, 2 * K - 2) + ";";
}

std::string FusionTree::to_json() const {
    nlohmann::json doc;
    doc["version"] = kSchemaVersion;
    doc["n"] = n_total_;
    doc["k"] = k();
    doc["weights"] = {{"scheme", scheme_.name()},
                      {"alpha", scheme_.alpha},
                      {"gamma", scheme_.gamma}};
    auto& leaves = doc["leaves"] = nlohmann::json::array();
    for (const auto& leaf : leaves_)
        leaves.push_back({{"id", leaf.id},
                          {"label", leaf.label},
                          {"n", leaf.n},
                          {"mean", leaf.mean}});
    auto& events = doc["events"] = nlohmann::json::array();
    for (const auto& ev : events_)
        events.push_back({{"lambda", ev.lambda},
                          {"left", ev.left},
                          {"right", ev.right},
                          {"id", ev.id},
                          {"beta", ev.beta},
                          {"slope", ev.slope},
                          {"size", ev.size}});
    return doc.dump();
}

FusionTree FusionTree::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed tree document: ") + e.what());
    }
    try {
        if (!doc.contains("version")) throw DataError("tree document missing 'version'");
        if (doc["version"].get<int>() != kSchemaVersion)
            throw DataError("unsupported tree schema version " + doc["version"].dump());
        for (const char* key : {"n", "k", "weights", "leaves", "events"})
            if (!doc.contains(key))
                throw DataError(std::string("tree document missing '") + key + "'");

        WeightScheme scheme = WeightScheme::parse(doc["weights"]["scheme"].get<std::string>(),
                                                  doc["weights"]["alpha"].get<double>(),
                                                  doc["weights"]["gamma"].get<double>());
        std::vector<Leaf> leaves;
        for (const auto& item : doc["leaves"])
            leaves.push_back({item["id"].get<int>(), item["label"].get<std::string>(),
                              item["n"].get<std::int64_t>(), item["mean"].get<double>()});
        std::vector<FusionEvent> events;
        for (const auto& item : doc["events"])
            events.push_back({item["lambda"].get<double>(), item["left"].get<int>(),
                              item["right"].get<int>(), item["id"].get<int>(),
                              item["beta"].get<double>(), item["slope"].get<double>(),
                              item["size"].get<std::int64_t>()});
        if (static_cast<int>(leaves.size()) != doc["k"].get<int>())
            throw DataError("leaf count does not match 'k'");
        return FusionTree(std::move(leaves), std::move(events), scheme,
                          doc["n"].get<std::int64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("tree document schema error: ") + e.what());
    }
}

namespace {

struct NewickParser {
    const std::string& text;
    std::size_t pos = 0;

    int peek() { return pos < text.size() ? text[pos] : EOF; }

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    NewickNode parse_node() {
        skip_space();
        NewickNode node;
        if (peek() == '(') {
            ++pos;
            node.children.push_back(parse_node());
            while (peek() == ',') {
                ++pos;
                node.children.push_back(parse_node());
            }
            if (peek() != ')') throw DataError("newick: expected ')'");
            ++pos;
        }
        skip_space();
        node.name = parse_label();
        skip_space();
        if (peek() == ':') {
            ++pos;
            node.length = parse_number();
        }
        return node;
    }

    std::string parse_label() {
        std::string out;
        if (peek() == '\'') {
            ++pos;
            while (true) {
                if (pos >= text.size()) throw DataError("newick: unterminated quote");
                char c = text[pos++];
                if (c == '\'') {
                    if (peek() == '\'') { out.push_back('\''); ++pos; }
                    else break;
                } else {
                    out.push_back(c);
                }
            }
        } else {
            while (pos < text.size()) {
                char c = text[pos];
                if (c == ':' || c == ',' || c == ')' || c == '(' || c == ';') break;
                if (std::isspace(static_cast<unsigned char>(c))) break;
                out.push_back(c);
                ++pos;
            }
        }
        return out;
    }

    double parse_number() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ')' && text[pos] != ';')
            ++pos;
        try {
            return std::stod(text.substr(start, pos - start));
        } catch (...) {
            throw DataError("newick: bad branch length");
        }
    }
};

}  // namespace

NewickNode parse_newick(const std::string& text) {
    NewickParser parser{text};
    NewickNode root = parser.parse_node();
    parser.skip_space();
    if (parser.peek() != ';') throw DataError("newick: missing ';'");
    return root;
}

}  // namespace fusetree
