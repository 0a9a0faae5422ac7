#include "camsearch/search.hpp"

#include "camsearch/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace camsearch {

void CostModel::validate() const
{
    if (!(detector_cost >= 0.0) || !(reid_cost >= 0.0) || !(occupancy >= 0.0) || !(predictor_cost >= 0.0))
        throw ConfigError("cost model entries must be >= 0");
}

void SearchConfig::validate() const
{
    if (window < 1)
        throw ConfigError("search window must be >= 1 frame");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ConfigError("alpha must lie in (0, 1]");
    if (horizon < 0 || (horizon > 0 && window > horizon))
        throw ConfigError("search window must not exceed the horizon");
    cost.validate();
}

FrameOracle::FrameOracle(const Dataset& dataset, ObjectId object_id, std::size_t num_cameras)
    : traj_(dataset.find(object_id)), horizon_(dataset.horizon), num_cameras_(num_cameras)
{
    if (traj_ == nullptr)
        throw ConfigError("unknown object id " + std::to_string(object_id));
}

void FrameOracle::check(CameraId camera, Frame frame) const
{
    if (camera >= num_cameras_)
        throw ConfigError("unknown camera id " + std::to_string(camera));
    if (frame < 0 || frame >= horizon_)
        throw ConfigError("frame " + std::to_string(frame) + " outside [0, " + std::to_string(horizon_) + ")");
}

bool FrameOracle::present(CameraId camera, Frame frame)
{
    check(camera, frame);
    ++frames_;
    return std::any_of(traj_->visits.begin(), traj_->visits.end(),
                       [&](const CameraVisit& v) { return v.camera == camera && v.contains(frame); });
}

std::optional<Frame> FrameOracle::scan(CameraId camera, Frame first, Frame last)
{
    if (last < first)
        return std::nullopt;
    check(camera, first);
    check(camera, last);
    // Earliest visible frame in [first, last]; equivalent to calling present() frame by frame.
    std::optional<Frame> hit;
    for (const auto& v : traj_->visits) {
        if (v.camera != camera || v.exit < first || v.entry > last)
            continue;
        Frame f = std::max(v.entry, first);
        if (!hit || f < *hit)
            hit = f;
    }
    frames_ += static_cast<std::uint64_t>((hit ? *hit : last) - first + 1);
    return hit;
}

NeighborDistribution update_probabilities(const NeighborDistribution& dist, std::size_t sampled_index, double alpha)
{
    if (sampled_index >= dist.size())
        throw ConfigError("sampled index out of range");
    NeighborDistribution out = dist;
    const std::size_t n = dist.size();
    if (n == 1)
        return out;
    const double moved = dist.probs[sampled_index] * (1.0 - alpha);
    const double share = moved / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j)
        out.probs[j] = j == sampled_index ? dist.probs[j] - moved : dist.probs[j] + share;
    return out;
}

namespace {

// Inverse-CDF draw restricted to active entries; uniform over them when
// their mass is zero.
std::size_t sample_active(const std::vector<double>& probs, const std::vector<bool>& active, double u)
{
    double mass = 0.0;
    std::size_t n_active = 0;
    std::size_t last_active = 0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!active[j])
            continue;
        mass += probs[j];
        ++n_active;
        last_active = j;
    }
    const bool flat = !(mass > 0.0);
    const double target = u * (flat ? static_cast<double>(n_active) : mass);
    double cum = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!active[j])
            continue;
        cum += flat ? 1.0 : probs[j];
        if (target < cum)
            return j;
    }
    return last_active;
}

} // namespace

HopResult adaptive_hop(FrameOracle& oracle, const NeighborDistribution& dist0, Frame t_last, const SearchConfig& cfg,
                       const UnitSampler& uniform, bool update_probs)
{
    const Frame horizon = cfg.horizon > 0 ? std::min(cfg.horizon, oracle.horizon()) : oracle.horizon();
    if (t_last < 0 || t_last >= horizon)
        throw ConfigError("t_last must lie in [0, horizon)");
    HopResult out;
    const std::size_t n = dist0.size();
    NeighborDistribution dist = dist0;
    std::vector<Frame> cursor(n, t_last);
    std::vector<bool> active(n, true);
    std::size_t n_active = n;
    const std::uint64_t before = oracle.frames_examined();

    while (n_active > 0) {
        const std::size_t k = sample_active(dist.probs, active, uniform());
        const CameraId cam = dist.camera_ids[k];
        const Frame first = cursor[k];
        const Frame last = std::min(first + cfg.window, horizon) - 1;
        auto hit = oracle.scan(cam, first, last);
        ++out.rounds;
        out.trace.push_back({cam, first, last, hit.has_value()});
        if (hit) {
            out.sighting = Sighting{cam, *hit};
            break;
        }
        cursor[k] = last + 1;
        if (cursor[k] >= horizon) {
            active[k] = false;
            --n_active;
        }
        if (update_probs)
            dist = update_probabilities(dist, k, cfg.alpha);
    }
    out.frames_examined = oracle.frames_examined() - before;
    return out;
}

std::size_t source_visit_index(const Trajectory& t, const Query& query)
{
    for (std::size_t i = 0; i < t.visits.size(); ++i)
        if (t.visits[i].camera == query.source_camera && t.visits[i].contains(query.source_frame))
            return i;
    throw ConfigError("object " + std::to_string(query.object_id) + " is not at camera " +
                      std::to_string(query.source_camera) + " during frame " + std::to_string(query.source_frame));
}

double query_recall(const Trajectory& t, std::size_t source_index, const std::vector<Sighting>& sightings)
{
    std::set<CameraId> truth;
    for (std::size_t i = source_index + 1; i < t.visits.size(); ++i)
        truth.insert(t.visits[i].camera);
    if (truth.empty())
        return 1.0;
    std::size_t found = 0;
    for (CameraId c : truth)
        if (std::any_of(sightings.begin(), sightings.end(), [c](const Sighting& s) { return s.camera == c; }))
            ++found;
    return static_cast<double>(found) / static_cast<double>(truth.size());
}

namespace {

SearchConfig resolved(const SearchConfig& cfg, const Dataset& dataset)
{
    SearchConfig c = cfg;
    c.horizon = cfg.horizon > 0 ? std::min(cfg.horizon, dataset.horizon) : dataset.horizon;
    c.validate();
    return c;
}

} // namespace

QueryResult run_query_adaptive(const Dataset& dataset, const CameraGraph& g, const Query& query,
                               const Predictor& predictor, const SearchConfig& cfg, Rng& rng, bool static_probs)
{
    const SearchConfig c = resolved(cfg, dataset);
    FrameOracle oracle(dataset, query.object_id, g.num_cameras());
    const std::size_t src = source_visit_index(oracle.trajectory(), query);
    const UnitSampler uniform = [&rng] { return rng.uniform01(); };

    QueryResult r;
    std::vector<CameraId> history{query.source_camera};
    Frame t_last = query.source_frame;
    for (;;) {
        NeighborDistribution dist = predictor.predict(history);
        if (!dist.is_valid_for(g, history.back(), 1e-6))
            throw DataError(predictor.name() + " returned an invalid distribution at camera " +
                            std::to_string(history.back()));
        HopResult hop = adaptive_hop(oracle, dist, t_last, c, uniform, !static_probs);
        r.sampling_rounds += hop.rounds;
        if (!hop.sighting)
            break;
        r.sightings.push_back(*hop.sighting);
        history.push_back(hop.sighting->camera);
        t_last = hop.sighting->frame;
    }
    r.frames_examined = oracle.frames_examined();
    r.oracle_calls = r.frames_examined;
    r.modeled_latency = c.cost.latency(r.frames_examined, r.sampling_rounds);
    r.recall = query_recall(oracle.trajectory(), src, r.sightings);
    return r;
}

QueryResult run_query_naive(const Dataset& dataset, const CameraGraph& g, const Query& query, const SearchConfig& cfg)
{
    const SearchConfig c = resolved(cfg, dataset);
    FrameOracle oracle(dataset, query.object_id, g.num_cameras());
    const std::size_t src = source_visit_index(oracle.trajectory(), query);
    const CameraVisit& source_visit = oracle.trajectory().visits[src];

    QueryResult r;
    for (CameraId cam = 0; cam < g.num_cameras(); ++cam) {
        auto hit = oracle.scan(cam, query.source_frame, c.horizon - 1);
        if (!hit)
            continue;
        if (cam == source_visit.camera && source_visit.contains(*hit))
            continue;
        r.sightings.push_back({cam, *hit});
    }
    std::sort(r.sightings.begin(), r.sightings.end(),
              [](const Sighting& a, const Sighting& b) { return a.frame < b.frame; });
    r.frames_examined = oracle.frames_examined();
    r.oracle_calls = r.frames_examined;
    r.modeled_latency = c.cost.latency(r.frames_examined, 0);
    r.recall = query_recall(oracle.trajectory(), src, r.sightings);
    return r;
}

QueryResult run_query_oracle(const Dataset& dataset, const Query& query, const CostModel& cost)
{
    const Trajectory* t = dataset.find(query.object_id);
    if (t == nullptr)
        throw ConfigError("unknown object id " + std::to_string(query.object_id));
    const std::size_t src = source_visit_index(*t, query);
    QueryResult r;
    for (std::size_t i = src + 1; i < t->visits.size(); ++i)
        r.sightings.push_back({t->visits[i].camera, t->visits[i].entry});
    r.frames_examined = r.sightings.size();
    r.oracle_calls = r.frames_examined;
    r.modeled_latency = cost.latency(r.frames_examined, 0);
    r.recall = query_recall(*t, src, r.sightings);
    return r;
}

Frame default_window(const std::vector<Trajectory>& train)
{
    const double d = mean_dwell(train);
    if (!(d > 0.0))
        throw ConfigError("cannot derive a search window from an empty training set");
    return std::max<Frame>(1, std::llround(d));
}

} // namespace camsearch
