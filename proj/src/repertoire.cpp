#include "qdreach/repertoire.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace qdreach {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

const char* to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNone: return "none";
    case FailureReason::kJointLimit: return "joint_limit";
    case FailureReason::kVelocityLimit: return "velocity_limit";
    case FailureReason::kGroundCollision: return "ground_collision";
    case FailureReason::kNoContact: return "no_contact";
    case FailureReason::kNoLanding: return "no_landing";
  }
  return "unknown";
}

Repertoire::Repertoire(int genotype_dim, int behavior_dim, std::vector<int> control_dims,
                       BehaviorBounds bounds, double l_repertoire)
    : genotype_dim_(genotype_dim),
      behavior_dim_(behavior_dim),
      control_dims_(std::move(control_dims)),
      bounds_(std::move(bounds)),
      l_repertoire_(l_repertoire) {
  require(genotype_dim_ > 0, "genotype dimension must be positive");
  require(behavior_dim_ > 0, "behavior dimension must be positive");
  bounds_.check();
  require(bounds_.dim() == behavior_dim_, "behavior bounds dimension mismatch");
  require(!control_dims_.empty(), "control dimension set must be non-empty");
  for (int d : control_dims_)
    require(d >= 0 && d < behavior_dim_, "control dimension out of range");
  require(l_repertoire_ > 0.0, "l_repertoire must be positive");
  behavior_cols_.resize(static_cast<std::size_t>(behavior_dim_));
  genotype_cols_.resize(static_cast<std::size_t>(genotype_dim_));
}

int Repertoire::index_of_id(std::int64_t id) const {
  for (int i = 0; i < size(); ++i)
    if (individuals_[static_cast<std::size_t>(i)].id == id) return i;
  return -1;
}

int Repertoire::index_of_genotype(const Vec& genotype) const {
  require(genotype.size() == genotype_dim_, "genotype dimension mismatch");
  for (int i = 0; i < size(); ++i)
    if (individuals_[static_cast<std::size_t>(i)].genotype.values == genotype) return i;
  return -1;
}

double Repertoire::behavior_distance(const Vec& a, const Vec& b) const {
  require(a.size() == behavior_dim_ && b.size() == behavior_dim_,
          "behavior dimension mismatch");
  double acc = 0.0;
  for (int d = 0; d < behavior_dim_; ++d) {
    const double diff = (a[d] - b[d]) / (bounds_.hi[d] - bounds_.lo[d]);
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

double Repertoire::nearest_behavior_distance(const Vec& behavior) const {
  require(!individuals_.empty(), "nearest query on empty repertoire");
  require(behavior.size() == behavior_dim_, "behavior dimension mismatch");
  Vec q(behavior_dim_);
  for (int d = 0; d < behavior_dim_; ++d) q[d] = bounds_.normalize(behavior[d], d);
  double best = 0.0;
  kernels::ops().argmin_sqdist(q.data(), behavior_cols(), &best);
  return std::sqrt(best);
}

InsertOutcome Repertoire::insert(const Genotype& genotype, const Behavior& behavior,
                                 double quality, double eps_q) {
  require(genotype.values.size() == genotype_dim_, "genotype dimension mismatch");
  require(behavior.values.size() == behavior_dim_, "behavior dimension mismatch");

  Individual candidate;
  candidate.genotype = genotype;
  candidate.behavior = behavior;
  candidate.quality = quality;
  candidate.compensation = Vec::Zero(behavior_dim_);

  InsertOutcome outcome;
  if (individuals_.empty()) {
    candidate.id = next_id_++;
    outcome.kind = InsertOutcome::kAdded;
    outcome.id = candidate.id;
    individuals_.push_back(std::move(candidate));
    push_cols(individuals_.back());
    return outcome;
  }

  Vec q(behavior_dim_);
  for (int d = 0; d < behavior_dim_; ++d) q[d] = bounds_.normalize(behavior.values[d], d);
  double best_sq = 0.0;
  const std::size_t nearest =
      kernels::ops().argmin_sqdist(q.data(), behavior_cols(), &best_sq);

  if (std::sqrt(best_sq) > l_repertoire_) {
    candidate.id = next_id_++;
    outcome.kind = InsertOutcome::kAdded;
    outcome.id = candidate.id;
    individuals_.push_back(std::move(candidate));
    push_cols(individuals_.back());
    return outcome;
  }

  Individual& occupant = individuals_[nearest];
  if (quality > occupant.quality + eps_q) {
    outcome.kind = InsertOutcome::kReplaced;
    outcome.replaced_id = occupant.id;
    candidate.id = next_id_++;
    outcome.id = candidate.id;
    occupant = std::move(candidate);
    refresh_behavior_row(static_cast<int>(nearest));
    for (int d = 0; d < genotype_dim_; ++d)
      genotype_cols_[static_cast<std::size_t>(d)][nearest] = occupant.genotype.values[d];
    return outcome;
  }

  outcome.kind = InsertOutcome::kRejected;
  return outcome;
}

std::int64_t Repertoire::add_observation(const Genotype& genotype, const Behavior& behavior,
                                         double quality) {
  require(genotype.values.size() == genotype_dim_, "genotype dimension mismatch");
  require(behavior.values.size() == behavior_dim_, "behavior dimension mismatch");
  Individual ind;
  ind.id = next_id_++;
  ind.genotype = genotype;
  ind.behavior = behavior;
  ind.quality = quality;
  ind.compensation = Vec::Zero(behavior_dim_);
  individuals_.push_back(std::move(ind));
  push_cols(individuals_.back());
  return individuals_.back().id;
}

std::vector<std::pair<int, double>> Repertoire::nearest_behavior(const Vec& target, int k,
                                                                 bool control_only) const {
  require(!individuals_.empty(), "nearest query on empty repertoire");
  require(k > 0, "neighbor count must be positive");
  const auto& dims = control_dims_;
  Vec q;
  kernels::ColsView view;
  std::vector<const double*> ptrs;
  if (control_only) {
    require(target.size() == static_cast<Eigen::Index>(dims.size()),
            "control-dim target dimension mismatch");
    q.resize(static_cast<Eigen::Index>(dims.size()));
    for (std::size_t i = 0; i < dims.size(); ++i)
      q[static_cast<Eigen::Index>(i)] = bounds_.normalize(target[static_cast<Eigen::Index>(i)],
                                                          dims[i]);
    ptrs = control_ptrs();
    view = kernels::ColsView{ptrs.data(), individuals_.size(), dims.size()};
  } else {
    require(target.size() == behavior_dim_, "behavior dimension mismatch");
    q.resize(behavior_dim_);
    for (int d = 0; d < behavior_dim_; ++d) q[d] = bounds_.normalize(target[d], d);
    view = behavior_cols();
  }

  std::vector<double> sq(individuals_.size());
  kernels::ops().sqdist(q.data(), view, sq.data());

  std::vector<int> order(individuals_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const auto by_distance_then_id = [&](int a, int b) {
    const double da = sq[static_cast<std::size_t>(a)];
    const double db = sq[static_cast<std::size_t>(b)];
    if (da != db) return da < db;
    return individuals_[static_cast<std::size_t>(a)].id < individuals_[static_cast<std::size_t>(b)].id;
  };
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), by_distance_then_id);

  std::vector<std::pair<int, double>> result;
  result.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    result.emplace_back(order[i], std::sqrt(sq[static_cast<std::size_t>(order[i])]));
  return result;
}

std::vector<std::pair<int, double>> Repertoire::genotype_neighbors(const Vec& genotype,
                                                                   int max_count,
                                                                   double radius) const {
  require(genotype.size() == genotype_dim_, "genotype dimension mismatch");
  require(max_count > 0, "neighbor count must be positive");
  require(radius > 0.0, "neighbor radius must be positive");
  if (individuals_.empty()) return {};

  std::vector<double> sq(individuals_.size());
  kernels::ops().sqdist(genotype.data(), genotype_cols(), sq.data());

  const double r2 = radius * radius;
  std::vector<int> candidates;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (sq[i] == 0.0) continue;  // exact genotype duplicates carry no slope information
    if (sq[i] <= r2) candidates.push_back(static_cast<int>(i));
  }
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    const double da = sq[static_cast<std::size_t>(a)];
    const double db = sq[static_cast<std::size_t>(b)];
    if (da != db) return da < db;
    return individuals_[static_cast<std::size_t>(a)].id < individuals_[static_cast<std::size_t>(b)].id;
  });
  if (candidates.size() > static_cast<std::size_t>(max_count))
    candidates.resize(static_cast<std::size_t>(max_count));

  std::vector<std::pair<int, double>> result;
  result.reserve(candidates.size());
  for (int idx : candidates)
    result.emplace_back(idx, std::sqrt(sq[static_cast<std::size_t>(idx)]));
  return result;
}

void Repertoire::set_novelty(int index, double novelty) {
  individuals_.at(static_cast<std::size_t>(index)).novelty = novelty;
}

void Repertoire::add_compensation(int index, const Vec& delta) {
  require(delta.size() == behavior_dim_, "compensation dimension mismatch");
  Individual& ind = individuals_.at(static_cast<std::size_t>(index));
  ind.compensation += delta;
  refresh_behavior_row(index);
}

kernels::ColsView Repertoire::behavior_cols() const {
  behavior_ptrs_.resize(behavior_cols_.size());
  for (std::size_t d = 0; d < behavior_cols_.size(); ++d)
    behavior_ptrs_[d] = behavior_cols_[d].data();
  return {behavior_ptrs_.data(), individuals_.size(), behavior_cols_.size()};
}

kernels::ColsView Repertoire::control_cols() const {
  control_ptrs_ = control_ptrs();
  return {control_ptrs_.data(), individuals_.size(), control_dims_.size()};
}

kernels::ColsView Repertoire::genotype_cols() const {
  genotype_ptrs_.resize(genotype_cols_.size());
  for (std::size_t d = 0; d < genotype_cols_.size(); ++d)
    genotype_ptrs_[d] = genotype_cols_[d].data();
  return {genotype_ptrs_.data(), individuals_.size(), genotype_cols_.size()};
}

std::vector<const double*> Repertoire::control_ptrs() const {
  std::vector<const double*> ptrs(control_dims_.size());
  for (std::size_t i = 0; i < control_dims_.size(); ++i)
    ptrs[i] = behavior_cols_[static_cast<std::size_t>(control_dims_[i])].data();
  return ptrs;
}

void Repertoire::push_cols(const Individual& ind) {
  const Vec comp = ind.compensated();
  for (int d = 0; d < behavior_dim_; ++d)
    behavior_cols_[static_cast<std::size_t>(d)].push_back(bounds_.normalize(comp[d], d));
  for (int d = 0; d < genotype_dim_; ++d)
    genotype_cols_[static_cast<std::size_t>(d)].push_back(ind.genotype.values[d]);
}

void Repertoire::refresh_behavior_row(int index) {
  const Vec comp = individuals_[static_cast<std::size_t>(index)].compensated();
  for (int d = 0; d < behavior_dim_; ++d)
    behavior_cols_[static_cast<std::size_t>(d)][static_cast<std::size_t>(index)] =
        bounds_.normalize(comp[d], d);
}

void Repertoire::save(std::ostream& out) const {
  ordered_json header;
  header["format_version"] = 1;
  header["n"] = genotype_dim_;
  header["m"] = behavior_dim_;
  header["l_repertoire"] = l_repertoire_;
  header["behavior_bounds"] = {{"lo", to_std(bounds_.lo)}, {"hi", to_std(bounds_.hi)}};
  header["control_dims"] = control_dims_;
  out << header.dump() << '\n';
  for (const Individual& ind : individuals_) {
    ordered_json line;
    line["id"] = ind.id;
    line["genotype"] = to_std(ind.genotype.values);
    line["behavior"] = to_std(ind.behavior.values);
    line["control_dims"] = control_dims_;
    line["quality"] = ind.quality;
    line["compensation"] = to_std(ind.compensation);
    out << line.dump() << '\n';
  }
}

Repertoire Repertoire::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line()) throw parse_error("missing repertoire header", 1);

  ordered_json header;
  try {
    header = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("bad header JSON: ") + e.what(), line_no);
  }

  try {
    const int version = header.at("format_version").get<int>();
    if (version != 1) throw parse_error("unsupported format_version", line_no);
    const int n = header.at("n").get<int>();
    const int m = header.at("m").get<int>();
    const double l = header.at("l_repertoire").get<double>();
    BehaviorBounds bounds;
    bounds.lo = to_vec(header.at("behavior_bounds").at("lo").get<std::vector<double>>());
    bounds.hi = to_vec(header.at("behavior_bounds").at("hi").get<std::vector<double>>());
    const auto control = header.at("control_dims").get<std::vector<int>>();

    Repertoire rep(n, m, control, bounds, l);

    std::unordered_set<std::int64_t> seen_ids;
    std::int64_t max_id = -1;
    while (next_line()) {
      ordered_json rec;
      try {
        rec = ordered_json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad individual JSON: ") + e.what(), line_no);
      }
      Individual ind;
      ind.id = rec.at("id").get<std::int64_t>();
      ind.genotype.values = to_vec(rec.at("genotype").get<std::vector<double>>());
      ind.behavior.values = to_vec(rec.at("behavior").get<std::vector<double>>());
      ind.quality = rec.at("quality").get<double>();
      ind.compensation = to_vec(rec.at("compensation").get<std::vector<double>>());

      if (ind.genotype.values.size() != n)
        throw parse_error("genotype dimension mismatch", line_no);
      if (ind.behavior.values.size() != m)
        throw parse_error("behavior dimension mismatch", line_no);
      if (ind.compensation.size() != m)
        throw parse_error("compensation dimension mismatch", line_no);
      if (!all_finite(ind.genotype.values) || !all_finite(ind.behavior.values) ||
          !all_finite(ind.compensation) || !std::isfinite(ind.quality))
        throw parse_error("non-finite value", line_no);
      for (int d = 0; d < n; ++d)
        if (ind.genotype.values[d] < 0.0 || ind.genotype.values[d] > 1.0)
          throw parse_error("genotype outside the unit box", line_no);
      if (rec.at("control_dims").get<std::vector<int>>() != control)
        throw parse_error("control_dims mismatch", line_no);
      if (!seen_ids.insert(ind.id).second) throw parse_error("duplicate id", line_no);

      max_id = std::max(max_id, ind.id);
      rep.individuals_.push_back(std::move(ind));
      rep.push_cols(rep.individuals_.back());
    }
    rep.next_id_ = max_id + 1;
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed repertoire record: ") + e.what(), line_no);
  }
}

}  // namespace qdreach
