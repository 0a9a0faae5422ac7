#include "camsearch/rnn.hpp"

#include "camsearch/error.hpp"
#include "camsearch/rng.hpp"
#include "io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace camsearch {

void RnnConfig::validate() const
{
    if (hidden_size < 1 || embed_size < 1 || batch_size < 1 || max_epochs < 1)
        throw ConfigError("rnn sizes, batch size and epochs must be >= 1");
    if (!(learning_rate > 0.0))
        throw ConfigError("rnn learning rate must be > 0");
    if (!(clip_norm > 0.0))
        throw ConfigError("rnn clip norm must be > 0");
}

RnnParams RnnParams::zeros_like() const
{
    RnnParams z = *this;
    z.visit([](const std::string&, auto& t) { t.setZero(); });
    return z;
}

bool RnnParams::all_finite() const
{
    bool ok = true;
    visit([&ok](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
}

bool RnnParams::operator==(const RnnParams& other) const
{
    std::vector<const double*> mine;
    std::vector<std::pair<const double*, Eigen::Index>> theirs;
    visit([&mine](const std::string&, const auto& t) { mine.push_back(t.data()); });
    other.visit([&theirs](const std::string&, const auto& t) { theirs.emplace_back(t.data(), t.size()); });
    bool same = true;
    std::size_t k = 0;
    visit([&](const std::string&, const auto& t) {
        same = same && t.size() == theirs[k].second &&
               std::memcmp(t.data(), theirs[k].first, sizeof(double) * static_cast<std::size_t>(t.size())) == 0;
        ++k;
    });
    return same;
}

RnnModel::RnnModel(std::size_t num_cameras, const RnnConfig& config, std::uint64_t graph_checksum)
    : num_cameras_(num_cameras), config_(config), graph_checksum_(graph_checksum)
{
    config_.validate();
    const auto V = static_cast<Eigen::Index>(vocab());
    const auto E = static_cast<Eigen::Index>(config.embed_size);
    const auto H = static_cast<Eigen::Index>(config.hidden_size);
    params.embedding = Eigen::MatrixXd::Zero(V, E);
    for (std::size_t k = 0; k < 4; ++k) {
        params.gate_w[k] = Eigen::MatrixXd::Zero(H, E + H);
        params.gate_b[k] = Eigen::VectorXd::Zero(H);
    }
    params.head_w = Eigen::MatrixXd::Zero(V, H);
    params.head_b = Eigen::VectorXd::Zero(V);
}

RnnModel RnnModel::initialized(std::size_t num_cameras, const RnnConfig& config, std::uint64_t graph_checksum)
{
    RnnModel m(num_cameras, config, graph_checksum);
    Rng rng(derive_seed(config.seed, 0x1417));
    const double scale = 1.0 / std::sqrt(static_cast<double>(config.hidden_size));
    m.params.visit([&](const std::string&, auto& t) {
        for (Eigen::Index c = 0; c < t.cols(); ++c)
            for (Eigen::Index r = 0; r < t.rows(); ++r)
                t(r, c) = scale * (2.0 * rng.uniform01() - 1.0);
    });
    m.params.gate_b[1].setOnes();
    return m;
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

MatrixXd sigmoid(const MatrixXd& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

struct Step {
    MatrixXd z; // (E + H) x B
    std::array<MatrixXd, 4> gate;
    MatrixXd c;
    MatrixXd tanh_c;
    MatrixXd h;
};

// tokens[t][b] is the input of column b at step t.
std::vector<Step> unroll(const RnnParams& p, const std::vector<std::vector<CameraId>>& tokens)
{
    const Index E = p.embedding.cols();
    const Index H = p.gate_w[0].rows();
    const Index B = tokens.empty() ? 0 : static_cast<Index>(tokens[0].size());
    std::vector<Step> steps(tokens.size());
    MatrixXd h_prev = MatrixXd::Zero(H, B);
    MatrixXd c_prev = MatrixXd::Zero(H, B);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        Step& s = steps[t];
        s.z.resize(E + H, B);
        for (Index b = 0; b < B; ++b)
            s.z.col(b).head(E) = p.embedding.row(tokens[t][static_cast<std::size_t>(b)]).transpose();
        s.z.bottomRows(H) = h_prev;
        for (std::size_t k = 0; k < 4; ++k) {
            MatrixXd a = p.gate_w[k] * s.z;
            a.colwise() += p.gate_b[k];
            s.gate[k] = k == 2 ? MatrixXd(a.array().tanh()) : sigmoid(a);
        }
        s.c = (s.gate[1].array() * c_prev.array() + s.gate[0].array() * s.gate[2].array()).matrix();
        s.tanh_c = s.c.array().tanh().matrix();
        s.h = (s.gate[3].array() * s.tanh_c.array()).matrix();
        h_prev = s.h;
        c_prev = s.c;
    }
    return steps;
}

MatrixXd head_logits(const RnnParams& p, const MatrixXd& h)
{
    MatrixXd logits = p.head_w * h;
    logits.colwise() += p.head_b;
    return logits;
}

void check_tokens(const RnnModel& model, std::span<const CameraId> seq)
{
    for (CameraId c : seq)
        if (c >= model.num_cameras())
            throw ConfigError("camera " + std::to_string(c) + " is outside the model vocabulary");
}

} // namespace

Eigen::MatrixXd forward(const RnnModel& model, std::span<const CameraId> sequence)
{
    if (sequence.empty())
        throw ConfigError("rnn forward needs a non-empty sequence");
    check_tokens(model, sequence);
    std::vector<std::vector<CameraId>> tokens;
    tokens.reserve(sequence.size() + 1);
    tokens.push_back({model.start_token()});
    for (CameraId c : sequence)
        tokens.push_back({c});
    auto steps = unroll(model.params, tokens);
    MatrixXd out(static_cast<Index>(sequence.size()), static_cast<Index>(model.vocab()));
    for (std::size_t t = 1; t < steps.size(); ++t)
        out.row(static_cast<Index>(t - 1)) = head_logits(model.params, steps[t].h).transpose();
    return out;
}

LossAndGradients loss_and_gradients(const RnnModel& model, const std::vector<std::vector<CameraId>>& batch)
{
    if (batch.empty())
        throw ConfigError("loss needs a non-empty batch");
    const RnnParams& p = model.params;
    const auto B = batch.size();
    std::size_t T = 0;
    std::size_t n_labels = 0;
    for (const auto& seq : batch) {
        if (seq.empty())
            throw ConfigError("training sequences must be non-empty");
        check_tokens(model, seq);
        T = std::max(T, seq.size());
        n_labels += seq.size();
    }

    std::vector<std::vector<CameraId>> tokens(T, std::vector<CameraId>(B, model.start_token()));
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t t = 1; t < batch[b].size(); ++t)
            tokens[t][b] = batch[b][t - 1];
    auto steps = unroll(p, tokens);

    LossAndGradients out;
    out.tokens = n_labels;
    out.gradients = p.zeros_like();
    RnnParams& g = out.gradients;
    const double inv_n = 1.0 / static_cast<double>(n_labels);

    std::vector<MatrixXd> dlogits(T);
    double loss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        MatrixXd logits = head_logits(p, steps[t].h);
        MatrixXd& d = dlogits[t];
        d = MatrixXd::Zero(logits.rows(), logits.cols());
        for (std::size_t b = 0; b < B; ++b) {
            if (t >= batch[b].size())
                continue;
            auto col = logits.col(static_cast<Index>(b));
            const double mx = col.maxCoeff();
            Eigen::VectorXd e = (col.array() - mx).exp();
            const double z = e.sum();
            const auto label = static_cast<Index>(batch[b][t]);
            loss += -(col(label) - mx - std::log(z));
            d.col(static_cast<Index>(b)) = e / z * inv_n;
            d(label, static_cast<Index>(b)) -= inv_n;
        }
    }
    out.loss = loss * inv_n;

    const Index E = p.embedding.cols();
    const Index H = p.gate_w[0].rows();
    const auto Bi = static_cast<Index>(B);
    MatrixXd dh_next = MatrixXd::Zero(H, Bi);
    MatrixXd dc_next = MatrixXd::Zero(H, Bi);
    for (std::size_t tt = T; tt-- > 0;) {
        const Step& s = steps[tt];
        g.head_w.noalias() += dlogits[tt] * s.h.transpose();
        g.head_b += dlogits[tt].rowwise().sum();
        MatrixXd dh = p.head_w.transpose() * dlogits[tt] + dh_next;

        const auto& i = s.gate[0].array();
        const auto& f = s.gate[1].array();
        const auto& gg = s.gate[2].array();
        const auto& o = s.gate[3].array();
        MatrixXd c_prev = tt > 0 ? steps[tt - 1].c : MatrixXd::Zero(H, Bi);

        Eigen::ArrayXXd dc = dh.array() * o * (1.0 - s.tanh_c.array().square()) + dc_next.array();
        std::array<MatrixXd, 4> da;
        da[0] = (dc * gg * i * (1.0 - i)).matrix();
        da[1] = (dc * c_prev.array() * f * (1.0 - f)).matrix();
        da[2] = (dc * i * (1.0 - gg.square())).matrix();
        da[3] = (dh.array() * s.tanh_c.array() * o * (1.0 - o)).matrix();
        dc_next = (dc * f).matrix();

        MatrixXd dz = MatrixXd::Zero(E + H, Bi);
        for (std::size_t k = 0; k < 4; ++k) {
            g.gate_w[k].noalias() += da[k] * s.z.transpose();
            g.gate_b[k] += da[k].rowwise().sum();
            dz.noalias() += p.gate_w[k].transpose() * da[k];
        }
        dh_next = dz.bottomRows(H);
        for (std::size_t b = 0; b < B; ++b)
            g.embedding.row(tokens[tt][b]) += dz.col(static_cast<Index>(b)).head(E).transpose();
    }
    return out;
}

namespace {

std::size_t masked_argmax(const CameraGraph& g, CameraId current, const Eigen::Ref<const Eigen::RowVectorXd>& logits)
{
    auto nbrs = g.neighbors(current);
    std::size_t best = 0;
    for (std::size_t i = 1; i < nbrs.size(); ++i)
        if (logits(static_cast<Index>(nbrs[i])) > logits(static_cast<Index>(nbrs[best])))
            best = i;
    return best;
}

double hop_accuracy(const RnnModel& model, const CameraGraph& g, const std::vector<std::vector<CameraId>>& seqs)
{
    std::size_t hops = 0;
    std::size_t correct = 0;
    for (const auto& seq : seqs) {
        if (seq.size() < 2)
            continue;
        MatrixXd logits = forward(model, std::span<const CameraId>(seq).first(seq.size() - 1));
        for (std::size_t k = 1; k < seq.size(); ++k) {
            if (g.degree(seq[k - 1]) == 0)
                continue;
            ++hops;
            auto best = masked_argmax(g, seq[k - 1], logits.row(static_cast<Index>(k - 1)));
            if (g.neighbors(seq[k - 1])[best] == seq[k])
                ++correct;
        }
    }
    return hops == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(hops);
}

struct Adam {
    RnnParams m;
    RnnParams v;
    std::size_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void apply(RnnParams& params, const RnnParams& grads, double lr)
    {
        ++step;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        std::vector<double*> ps, ms, vs;
        std::vector<const double*> gs;
        std::vector<Index> sizes;
        params.visit([&](const std::string&, auto& t) {
            ps.push_back(t.data());
            sizes.push_back(t.size());
        });
        m.visit([&](const std::string&, auto& t) { ms.push_back(t.data()); });
        v.visit([&](const std::string&, auto& t) { vs.push_back(t.data()); });
        grads.visit([&](const std::string&, const auto& t) { gs.push_back(t.data()); });
        for (std::size_t k = 0; k < ps.size(); ++k) {
            for (Index j = 0; j < sizes[k]; ++j) {
                const double gj = gs[k][j];
                ms[k][j] = beta1 * ms[k][j] + (1.0 - beta1) * gj;
                vs[k][j] = beta2 * vs[k][j] + (1.0 - beta2) * gj * gj;
                ps[k][j] -= lr * (ms[k][j] / c1) / (std::sqrt(vs[k][j] / c2) + eps);
            }
        }
    }
};

void clip_global_norm(RnnParams& grads, double max_norm)
{
    double sq = 0.0;
    grads.visit([&sq](const std::string&, const auto& t) { sq += t.squaredNorm(); });
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        grads.visit([scale](const std::string&, auto& t) { t *= scale; });
    }
}

} // namespace

std::pair<RnnModel, TrainReport> train_rnn(const std::vector<Trajectory>& trajs, const CameraGraph& g,
                                           const RnnConfig& cfg)
{
    cfg.validate();
    std::vector<std::vector<CameraId>> seqs;
    for (const auto& t : trajs)
        if (t.visits.size() >= 2)
            seqs.push_back(t.cameras());
    if (seqs.size() < 2)
        throw ConfigError("rnn training needs at least two trajectories with two or more visits");

    std::vector<std::size_t> order(seqs.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(cfg.seed, 0x5117));
    split_rng.shuffle(std::span<std::size_t>(order));
    std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(seqs.size()))));
    n_val = std::min(n_val, seqs.size() - 1);
    std::vector<std::vector<CameraId>> train, val;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_val ? val : train).push_back(seqs[order[i]]);

    RnnModel model = RnnModel::initialized(g.num_cameras(), cfg, g.checksum());
    RnnParams best = model.params;
    Adam adam{model.params.zeros_like(), model.params.zeros_like()};
    Rng shuffle_rng(derive_seed(cfg.seed, 0x5401));
    TrainReport report;
    double best_accuracy = -1.0;

    std::vector<std::size_t> train_order(train.size());
    std::iota(train_order.begin(), train_order.end(), 0);
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(std::span<std::size_t>(train_order));
        double loss_sum = 0.0;
        std::size_t token_sum = 0;
        for (std::size_t start = 0; start < train_order.size(); start += cfg.batch_size) {
            std::vector<std::vector<CameraId>> batch;
            for (std::size_t j = start; j < std::min(start + cfg.batch_size, train_order.size()); ++j)
                batch.push_back(train[train_order[j]]);
            auto lg = loss_and_gradients(model, batch);
            if (!std::isfinite(lg.loss) || !lg.gradients.all_finite())
                throw DataError("rnn training diverged at epoch " + std::to_string(epoch) + ", batch starting at " +
                                std::to_string(start) + " (loss " + std::to_string(lg.loss) + ")");
            clip_global_norm(lg.gradients, cfg.clip_norm);
            adam.apply(model.params, lg.gradients, cfg.learning_rate);
            loss_sum += lg.loss * static_cast<double>(lg.tokens);
            token_sum += lg.tokens;
        }
        if (!model.params.all_finite())
            throw DataError("rnn parameters became non-finite at epoch " + std::to_string(epoch));
        const double accuracy = hop_accuracy(model, g, val);
        report.train_loss.push_back(loss_sum / static_cast<double>(token_sum));
        report.validation_accuracy.push_back(accuracy);
        report.epochs_run = epoch;
        if (accuracy > best_accuracy) {
            best_accuracy = accuracy;
            best = model.params;
            report.best_epoch = epoch;
        } else if (epoch - report.best_epoch >= cfg.patience) {
            break;
        }
    }
    model.params = std::move(best);
    return {std::move(model), std::move(report)};
}

NeighborDistribution predict_rnn(const RnnModel& model, const CameraGraph& g, CameraHistory history)
{
    if (history.empty())
        throw ConfigError("camera history must not be empty");
    MatrixXd logits = forward(model, history);
    Eigen::RowVectorXd last = logits.row(logits.rows() - 1);
    auto nbrs = g.neighbors(history.back());
    NeighborDistribution d;
    d.camera_ids.assign(nbrs.begin(), nbrs.end());
    d.probs.resize(nbrs.size());
    if (nbrs.empty())
        return d;
    double mx = -std::numeric_limits<double>::infinity();
    for (CameraId c : nbrs)
        mx = std::max(mx, last(static_cast<Index>(c)));
    double z = 0.0;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        d.probs[i] = std::exp(last(static_cast<Index>(nbrs[i])) - mx);
        z += d.probs[i];
    }
    for (auto& p : d.probs)
        p /= z;
    return d;
}

NeighborDistribution RnnPredictor::predict(CameraHistory history) const { return predict_rnn(model_, graph_, history); }

std::vector<NeighborDistribution> RnnPredictor::predict_hops(CameraHistory sequence) const
{
    std::vector<NeighborDistribution> out;
    if (sequence.size() < 2)
        return out;
    MatrixXd logits = forward(model_, sequence.first(sequence.size() - 1));
    for (std::size_t k = 1; k < sequence.size(); ++k) {
        auto nbrs = graph_.neighbors(sequence[k - 1]);
        NeighborDistribution d;
        d.camera_ids.assign(nbrs.begin(), nbrs.end());
        d.probs.resize(nbrs.size());
        double mx = -std::numeric_limits<double>::infinity();
        for (CameraId c : nbrs)
            mx = std::max(mx, logits(static_cast<Index>(k - 1), static_cast<Index>(c)));
        double z = 0.0;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            d.probs[i] = std::exp(logits(static_cast<Index>(k - 1), static_cast<Index>(nbrs[i])) - mx);
            z += d.probs[i];
        }
        for (auto& p : d.probs)
            p /= z;
        out.push_back(std::move(d));
    }
    return out;
}

// ---- checkpoint ----

namespace {

constexpr char kMagic[8] = {'C', 'S', 'R', 'N', 'N', 'C', 'K', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

void put_f64(std::string& out, double d)
{
    auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffU));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    void need(std::size_t n) const
    {
        if (pos_ + n > bytes_.size())
            throw DataError("corrupt checkpoint: truncated at byte " + std::to_string(bytes_.size()));
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }
    std::string take(std::size_t n)
    {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

nlohmann::ordered_json config_to_json(const RnnConfig& c)
{
    nlohmann::ordered_json j;
    j["hidden_size"] = c.hidden_size;
    j["embed_size"] = c.embed_size;
    j["learning_rate"] = c.learning_rate;
    j["batch_size"] = c.batch_size;
    j["max_epochs"] = c.max_epochs;
    j["patience"] = c.patience;
    j["clip_norm"] = c.clip_norm;
    j["seed"] = c.seed;
    return j;
}

RnnConfig config_from_json(const nlohmann::json& j)
{
    RnnConfig c;
    c.hidden_size = j.at("hidden_size").get<std::size_t>();
    c.embed_size = j.at("embed_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.clip_norm = j.at("clip_norm").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

} // namespace

std::string serialize_model(const RnnModel& model)
{
    nlohmann::ordered_json header;
    header["format_version"] = kFormatVersion;
    header["config"] = config_to_json(model.config());
    header["num_cameras"] = model.num_cameras();
    header["vocab"] = model.vocab();
    header["graph_checksum"] = checksum_hex(model.graph_checksum());
    auto tensors = nlohmann::ordered_json::array();
    model.params.visit([&tensors](const std::string& name, const auto& t) {
        nlohmann::ordered_json jt;
        jt["name"] = name;
        jt["shape"] = {t.rows(), t.cols()};
        tensors.push_back(std::move(jt));
    });
    header["tensors"] = std::move(tensors);
    const std::string text = header.dump();

    std::string out(kMagic, sizeof kMagic);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out += text;
    model.params.visit([&out](const std::string&, const auto& t) {
        for (Index r = 0; r < t.rows(); ++r)
            for (Index c = 0; c < t.cols(); ++c)
                put_f64(out, t(r, c));
    });
    return out;
}

RnnModel deserialize_model(const std::string& bytes)
{
    Reader in(bytes);
    if (in.take(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
        throw DataError("corrupt checkpoint: bad magic");
    if (auto version = in.u32(); version != kFormatVersion)
        throw DataError("unsupported checkpoint format version " + std::to_string(version));
    const std::uint32_t header_len = in.u32();
    nlohmann::json header;
    RnnConfig cfg;
    std::size_t num_cameras = 0;
    std::uint64_t checksum = 0;
    try {
        header = nlohmann::json::parse(in.take(header_len));
        cfg = config_from_json(header.at("config"));
        num_cameras = header.at("num_cameras").get<std::size_t>();
        checksum = parse_checksum_hex(header.at("graph_checksum").get<std::string>());
        if (header.at("vocab").get<std::size_t>() != num_cameras + 1)
            throw DataError("corrupt checkpoint: vocab does not match camera count");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("corrupt checkpoint header: ") + e.what());
    }
    RnnModel model(num_cameras, cfg, checksum);
    const auto& declared = header.at("tensors");
    std::size_t k = 0;
    model.params.visit([&](const std::string& name, auto& t) {
        if (k >= declared.size() || declared[k].at("name").get<std::string>() != name ||
            declared[k].at("shape")[0].get<Index>() != t.rows() || declared[k].at("shape")[1].get<Index>() != t.cols())
            throw DataError("checkpoint shape mismatch at tensor '" + name + "'");
        ++k;
        for (Index r = 0; r < t.rows(); ++r)
            for (Index c = 0; c < t.cols(); ++c)
                t(r, c) = in.f64();
    });
    if (k != declared.size())
        throw DataError("checkpoint declares " + std::to_string(declared.size()) + " tensors, expected " +
                        std::to_string(k));
    if (!in.at_end())
        throw DataError("corrupt checkpoint: trailing bytes");
    if (!model.params.all_finite())
        throw DataError("corrupt checkpoint: non-finite parameters");
    return model;
}

void save_model(const RnnModel& model, const std::filesystem::path& path)
{
    detail::write_text_file(path, serialize_model(model));
}

RnnModel load_model(const std::filesystem::path& path)
{
    try {
        return deserialize_model(detail::read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

RnnModel load_model(const std::filesystem::path& path, const CameraGraph& g)
{
    RnnModel m = load_model(path);
    if (m.graph_checksum() != g.checksum() || m.num_cameras() != g.num_cameras())
        throw DataError(path.string() + ": checkpoint graph checksum " + checksum_hex(m.graph_checksum()) +
                        " does not match graph " + checksum_hex(g.checksum()));
    return m;
}

} // namespace camsearch
