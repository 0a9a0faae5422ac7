#include "camsearch/predict.hpp"

#include "camsearch/error.hpp"
#include "io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace camsearch {

std::size_t NeighborDistribution::argmax() const
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best] || (probs[i] == probs[best] && camera_ids[i] < camera_ids[best]))
            best = i;
    }
    return best;
}

bool NeighborDistribution::is_valid_for(const CameraGraph& g, CameraId current, double tol) const
{
    auto nbrs = g.neighbors(current);
    if (camera_ids.size() != nbrs.size() || probs.size() != nbrs.size())
        return false;
    if (!std::equal(camera_ids.begin(), camera_ids.end(), nbrs.begin()))
        return false;
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0))
            return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

std::vector<NeighborDistribution> Predictor::predict_hops(CameraHistory sequence) const
{
    std::vector<NeighborDistribution> out;
    for (std::size_t k = 1; k < sequence.size(); ++k)
        out.push_back(predict(sequence.first(k)));
    return out;
}

std::uint64_t TransitionCounts::count(CameraId from, CameraId to) const
{
    auto it = counts.find({from, to});
    return it == counts.end() ? 0 : it->second;
}

namespace {

CameraId current_camera(const CameraGraph& g, CameraHistory history)
{
    if (history.empty())
        throw ConfigError("camera history must not be empty");
    CameraId cur = history.back();
    if (cur >= g.num_cameras())
        throw ConfigError("camera " + std::to_string(cur) + " is not in the graph");
    return cur;
}

} // namespace

NeighborDistribution smoothed_distribution(const CameraGraph& g, CameraId current,
                                           std::span<const std::uint64_t> neighbor_counts, double lambda)
{
    auto nbrs = g.neighbors(current);
    NeighborDistribution d;
    d.camera_ids.assign(nbrs.begin(), nbrs.end());
    d.probs.resize(nbrs.size());
    double total = 0.0;
    for (auto c : neighbor_counts)
        total += static_cast<double>(c);
    const double denom = total + lambda * static_cast<double>(nbrs.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        d.probs[i] = denom > 0.0 ? (static_cast<double>(neighbor_counts[i]) + lambda) / denom
                                 : 1.0 / static_cast<double>(nbrs.size());
    }
    return d;
}

TransitionCounts fit_mle(const std::vector<Trajectory>& trajs)
{
    TransitionCounts out;
    for (const auto& t : trajs)
        for (std::size_t i = 1; i < t.visits.size(); ++i)
            ++out.counts[{t.visits[i - 1].camera, t.visits[i].camera}];
    return out;
}

NeighborDistribution predict_mle(const CameraGraph& g, const TransitionCounts& counts, CameraHistory history,
                                 double lambda)
{
    CameraId cur = current_camera(g, history);
    auto nbrs = g.neighbors(cur);
    std::vector<std::uint64_t> c(nbrs.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i)
        c[i] = counts.count(cur, nbrs[i]);
    return smoothed_distribution(g, cur, c, lambda);
}

NgramModel fit_ngram(const std::vector<Trajectory>& trajs, std::size_t order)
{
    if (order < 2)
        throw ConfigError("n-gram order must be >= 2");
    NgramModel model;
    model.order = order;
    model.tables.resize(order - 1);
    for (const auto& t : trajs) {
        auto seq = t.cameras();
        for (std::size_t m = 2; m <= order; ++m) {
            auto& table = model.tables[m - 2];
            for (std::size_t end = m; end <= seq.size(); ++end) {
                std::vector<CameraId> context(seq.begin() + static_cast<std::ptrdiff_t>(end - m),
                                              seq.begin() + static_cast<std::ptrdiff_t>(end - 1));
                ++table[context][seq[end - 1]];
            }
        }
    }
    return model;
}

NeighborDistribution predict_ngram(const CameraGraph& g, const NgramModel& model, CameraHistory history,
                                   double lambda)
{
    CameraId cur = current_camera(g, history);
    auto nbrs = g.neighbors(cur);
    std::vector<std::uint64_t> c(nbrs.size());
    const std::size_t longest = std::min(model.order - 1, history.size());
    for (std::size_t len = longest; len >= 1; --len) {
        if (len - 1 >= model.tables.size())
            continue;
        const auto& table = model.tables[len - 1];
        std::vector<CameraId> context(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
        auto it = table.find(context);
        if (it == table.end())
            continue;
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            auto s = it->second.find(nbrs[i]);
            c[i] = s == it->second.end() ? 0 : s->second;
            total += c[i];
        }
        if (total > 0)
            return smoothed_distribution(g, cur, c, lambda);
    }
    std::fill(c.begin(), c.end(), 0);
    return smoothed_distribution(g, cur, c, lambda);
}

NeighborDistribution uniform_predict(const CameraGraph& g, CameraHistory history)
{
    CameraId cur = current_camera(g, history);
    std::vector<std::uint64_t> zeros(g.degree(cur), 0);
    return smoothed_distribution(g, cur, zeros, 1.0);
}

double predictor_accuracy(const Predictor& predictor, const std::vector<Trajectory>& test_trajs)
{
    std::size_t hops = 0;
    std::size_t correct = 0;
    for (const auto& t : test_trajs) {
        if (t.visits.size() < 2)
            continue;
        auto seq = t.cameras();
        auto dists = predictor.predict_hops(seq);
        for (std::size_t k = 0; k < dists.size(); ++k) {
            const auto& d = dists[k];
            if (d.size() == 0)
                continue;
            ++hops;
            if (d.camera_ids[d.argmax()] == seq[k + 1])
                ++correct;
        }
    }
    if (hops == 0)
        throw ConfigError("predictor accuracy needs at least one trajectory with two visits");
    return static_cast<double>(correct) / static_cast<double>(hops);
}

// ---- model files ----

namespace {

nlohmann::json parse_model_json(const std::string& text, const std::string& expected_type)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != expected_type)
        throw DataError("model file is not of type '" + expected_type + "'");
    for (const char* key : {"lambda", "graph_checksum"})
        if (!doc.contains(key))
            throw DataError(std::string("model file lacks field '") + key + "'");
    return doc;
}

} // namespace

std::string mle_to_json(const MleModelFile& m)
{
    nlohmann::ordered_json doc;
    doc["type"] = "mle";
    doc["lambda"] = m.lambda;
    doc["graph_checksum"] = checksum_hex(m.graph_checksum);
    auto counts = nlohmann::ordered_json::array();
    for (const auto& [edge, c] : m.counts.counts)
        counts.push_back({edge.first, edge.second, c});
    doc["counts"] = std::move(counts);
    return doc.dump() + "\n";
}

MleModelFile mle_from_json(const std::string& text)
{
    auto doc = parse_model_json(text, "mle");
    MleModelFile m;
    try {
        m.lambda = doc["lambda"].get<double>();
        m.graph_checksum = parse_checksum_hex(doc["graph_checksum"].get<std::string>());
        for (const auto& row : doc.at("counts")) {
            if (!row.is_array() || row.size() != 3)
                throw DataError("mle count rows are [from, to, count]");
            m.counts.counts[{row[0].get<CameraId>(), row[1].get<CameraId>()}] = row[2].get<std::uint64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed mle model: ") + e.what());
    }
    return m;
}

std::string ngram_to_json(const NgramModelFile& m)
{
    nlohmann::ordered_json doc;
    doc["type"] = "ngram";
    doc["order"] = m.model.order;
    doc["lambda"] = m.lambda;
    doc["graph_checksum"] = checksum_hex(m.graph_checksum);
    auto tables = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.model.tables.size(); ++i) {
        nlohmann::ordered_json table;
        table["order"] = i + 2;
        auto entries = nlohmann::ordered_json::array();
        for (const auto& [context, successors] : m.model.tables[i]) {
            for (const auto& [next, c] : successors) {
                auto row = nlohmann::ordered_json::array();
                for (CameraId cam : context)
                    row.push_back(cam);
                row.push_back(next);
                row.push_back(c);
                entries.push_back(std::move(row));
            }
        }
        table["entries"] = std::move(entries);
        tables.push_back(std::move(table));
    }
    doc["tables"] = std::move(tables);
    return doc.dump() + "\n";
}

NgramModelFile ngram_from_json(const std::string& text)
{
    auto doc = parse_model_json(text, "ngram");
    NgramModelFile m;
    try {
        m.lambda = doc["lambda"].get<double>();
        m.graph_checksum = parse_checksum_hex(doc["graph_checksum"].get<std::string>());
        m.model.order = doc.at("order").get<std::size_t>();
        if (m.model.order < 2)
            throw DataError("n-gram order must be >= 2");
        m.model.tables.resize(m.model.order - 1);
        for (const auto& table : doc.at("tables")) {
            auto order = table.at("order").get<std::size_t>();
            if (order < 2 || order > m.model.order)
                throw DataError("n-gram table order " + std::to_string(order) + " out of range");
            for (const auto& row : table.at("entries")) {
                if (!row.is_array() || row.size() != order + 1)
                    throw DataError("order-" + std::to_string(order) + " rows need " + std::to_string(order + 1) +
                                    " integers");
                std::vector<CameraId> context;
                for (std::size_t k = 0; k + 1 < order; ++k)
                    context.push_back(row[k].get<CameraId>());
                m.model.tables[order - 2][context][row[order - 1].get<CameraId>()] = row[order].get<std::uint64_t>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed n-gram model: ") + e.what());
    }
    return m;
}

void save_mle(const MleModelFile& m, const std::filesystem::path& path) { detail::write_text_file(path, mle_to_json(m)); }

MleModelFile load_mle(const std::filesystem::path& path) { return mle_from_json(detail::read_text_file(path)); }

void save_ngram(const NgramModelFile& m, const std::filesystem::path& path)
{
    detail::write_text_file(path, ngram_to_json(m));
}

NgramModelFile load_ngram(const std::filesystem::path& path) { return ngram_from_json(detail::read_text_file(path)); }

} // namespace camsearch
