#include "prefrank/pairgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <ostream>

#include "prefrank/csvio.hpp"
#include "prefrank/errors.hpp"

namespace prefrank {

PairPlan::PairPlan(int n_systems) : n_systems_(n_systems) {
  if (n_systems < 2) throw ValidationError("pair plan needs at least 2 systems");
  counts_.assign(static_cast<std::size_t>(pair_combinations(n_systems)), 0);
}

std::size_t PairPlan::slot(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (a < 0 || b >= n_systems_ || a == b)
    throw ValidationError("pair (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") out of range for " + std::to_string(n_systems_) + " systems");
  // row-major upper triangle without the diagonal
  return static_cast<std::size_t>(a) * n_systems_ - static_cast<std::size_t>(a) * (a + 1) / 2 +
         (b - a - 1);
}

std::int64_t PairPlan::count(int a, int b) const { return counts_[slot(a, b)]; }

void PairPlan::add(int a, int b, std::int64_t count) {
  if (count < 1) throw ValidationError("pair count must be positive");
  counts_[slot(a, b)] += count;
  total_ += count;
}

std::vector<std::int64_t> PairPlan::incidence() const {
  std::vector<std::int64_t> inc(n_systems_, 0);
  for_each([&](int a, int b, std::int64_t c) {
    inc[a] += c;
    inc[b] += c;
  });
  return inc;
}

std::int64_t pair_combinations(int n_systems) {
  return static_cast<std::int64_t>(n_systems) * (n_systems - 1) / 2;
}

const char* pair_method_name(PairMethod m) {
  switch (m) {
    case PairMethod::Rand: return "RAND";
    case PairMethod::Link: return "LINK";
    case PairMethod::Bs: return "BS";
  }
  return "?";
}

PairMethod pair_method_from_name(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "RAND") return PairMethod::Rand;
  if (upper == "LINK") return PairMethod::Link;
  if (upper == "BS") return PairMethod::Bs;
  throw ValidationError("unknown pair generation method '" + name + "'");
}

void check_plan_args(PairMethod m, int n_systems, std::int64_t k) {
  switch (m) {
    case PairMethod::Rand: {
      if (n_systems < 2) throw ValidationError("random plan needs at least 2 systems");
      if (k < 1) throw ValidationError("pair budget must be positive");
      break;
    }
    case PairMethod::Link: {
      if (n_systems < 3) throw ValidationError("linked plan needs at least 3 systems");
      if (k < 1 || k % n_systems != 0)
        throw ValidationError("pair budget " + std::to_string(k) +
                              " must be a positive multiple of " + std::to_string(n_systems) +
                              " systems");
      break;
    }
    case PairMethod::Bs: {
      if (n_systems < 2) throw ValidationError("balanced plan needs at least 2 systems");
      const std::int64_t combos = pair_combinations(n_systems);
      if (k < 1 || k % combos != 0)
        throw ValidationError("pair budget " + std::to_string(k) +
                              " must be a positive multiple of the " + std::to_string(combos) +
                              " system pairs");
      break;
    }
  }
}

PairPlan generate_plan(PairMethod m, int n_systems, std::int64_t k, Rng& rng) {
  switch (m) {
    case PairMethod::Rand: return gen_rand(n_systems, k, rng);
    case PairMethod::Link: return gen_link(n_systems, k, rng);
    case PairMethod::Bs: return gen_bs(n_systems, k);
  }
  throw ValidationError("unknown pair generation method");
}

PairPlan gen_rand(int n_systems, std::int64_t k, Rng& rng) {
  check_plan_args(PairMethod::Rand, n_systems, k);
  PairPlan plan(n_systems);
  for (std::int64_t t = 0; t < k; ++t) {
    const int a = static_cast<int>(rng.uniform_index(n_systems));
    int b = static_cast<int>(rng.uniform_index(n_systems - 1));
    if (b >= a) ++b;
    plan.add(a, b);
  }
  return plan;
}

PairPlan gen_link(int n_systems, std::int64_t k, Rng& rng) {
  check_plan_args(PairMethod::Link, n_systems, k);
  PairPlan plan(n_systems);
  std::vector<int> ring(n_systems);
  std::iota(ring.begin(), ring.end(), 0);
  const std::int64_t rounds = k / n_systems;
  for (std::int64_t r = 0; r < rounds; ++r) {
    rng.shuffle(ring.data(), ring.size());
    for (int i = 0; i < n_systems; ++i)
      plan.add(ring[i], ring[(i + 1) % n_systems]);
  }
  return plan;
}

PairPlan gen_bs(int n_systems, std::int64_t k) {
  check_plan_args(PairMethod::Bs, n_systems, k);
  const std::int64_t per = k / pair_combinations(n_systems);
  PairPlan plan(n_systems);
  for (int a = 0; a < n_systems; ++a)
    for (int b = a + 1; b < n_systems; ++b) plan.add(a, b, per);
  return plan;
}

PairRealizer::PairRealizer(const Dataset& ds) : ds_(ds) {
  const int n = static_cast<int>(ds.systems().size());
  groups_.resize(n);
  group_ratings_.resize(n);
  for (int s = 0; s < n; ++s) {
    std::vector<std::uint32_t> idx = ds.ratings_of_system(s);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t x, std::uint32_t y) {
      const int lx = ds.listener_of(x), ly = ds.listener_of(y);
      return lx != ly ? lx < ly : x < y;
    });
    group_ratings_[s] = std::move(idx);
    const auto& flat = group_ratings_[s];
    for (std::uint32_t i = 0; i < flat.size();) {
      const int lis = ds.listener_of(flat[i]);
      std::uint32_t j = i;
      while (j < flat.size() && ds.listener_of(flat[j]) == lis) ++j;
      groups_[s].push_back(ListenerGroup{lis, i, j});
      i = j;
    }
  }
}

RealizedPairs PairRealizer::realize(const PairPlan& plan, bool same_listener, bool strict,
                                    Rng& rng) const {
  if (plan.n_systems() != static_cast<int>(ds_.systems().size()))
    throw ValidationError("plan covers " + std::to_string(plan.n_systems()) +
                          " systems but dataset has " +
                          std::to_string(ds_.systems().size()));

  RealizedPairs out;
  out.pairs.reserve(static_cast<std::size_t>(plan.total()));

  auto draw_from_system = [&](int sys) {
    const auto& idx = ds_.ratings_of_system(sys);
    return idx[rng.uniform_index(idx.size())];
  };

  // listeners shared by the current pair, as group positions in a and b
  std::vector<std::pair<std::uint32_t, std::uint32_t>> common;
  plan.for_each([&](int a, int b, std::int64_t count) {
    common.clear();
    if (same_listener) {
      const auto& ga = groups_[a];
      const auto& gb = groups_[b];
      std::uint32_t i = 0, j = 0;
      while (i < ga.size() && j < gb.size()) {
        if (ga[i].listener < gb[j].listener) ++i;
        else if (gb[j].listener < ga[i].listener) ++j;
        else { common.emplace_back(i, j); ++i; ++j; }
      }
      if (common.empty() && strict)
        throw ValidationError("no listener rated both '" + ds_.systems()[a] + "' and '" +
                              ds_.systems()[b] + "'");
    }

    for (std::int64_t t = 0; t < count; ++t) {
      const bool flip = rng.coin();
      const int first_sys = flip ? b : a;
      const int second_sys = flip ? a : b;
      RatingPair rp;
      if (same_listener && !common.empty()) {
        const auto [pa, pb] = common[rng.uniform_index(common.size())];
        const ListenerGroup& la = groups_[a][pa];
        const ListenerGroup& lb = groups_[b][pb];
        const ListenerGroup& lf = flip ? lb : la;
        const ListenerGroup& ls = flip ? la : lb;
        rp.first = group_ratings_[first_sys][lf.begin + rng.uniform_index(lf.end - lf.begin)];
        rp.second = group_ratings_[second_sys][ls.begin + rng.uniform_index(ls.end - ls.begin)];
        rp.same_listener = true;
      } else {
        rp.first = draw_from_system(first_sys);
        rp.second = draw_from_system(second_sys);
        if (same_listener) ++out.fallback_count;
      }
      out.pairs.push_back(rp);
    }
  });
  return out;
}

RealizedPairs realize_plan(const PairPlan& plan, const Dataset& ds, bool same_listener,
                           bool strict, Rng& rng) {
  return PairRealizer(ds).realize(plan, same_listener, strict, rng);
}

RatingPair sample_training_pair(const Dataset& ds, const std::vector<int>& eligible, Rng& rng) {
  if (eligible.empty())
    throw ValidationError("no listener with at least two ratings");
  const int lis = eligible[rng.uniform_index(eligible.size())];
  const auto& idx = ds.ratings_of_listener(lis);
  const std::size_t i = rng.uniform_index(idx.size());
  std::size_t j = rng.uniform_index(idx.size() - 1);
  if (j >= i) ++j;
  return RatingPair{idx[i], idx[j], true};
}

RatingPair sample_training_pair(const Dataset& ds, Rng& rng) {
  return sample_training_pair(ds, eligible_listeners(ds), rng);
}

std::vector<int> eligible_listeners(const Dataset& ds) {
  std::vector<int> eligible;
  for (std::size_t l = 0; l < ds.listeners().size(); ++l)
    if (ds.ratings_of_listener(static_cast<int>(l)).size() >= 2)
      eligible.push_back(static_cast<int>(l));
  return eligible;
}

static const char kPlanHeader[] = "system_a,system_b,count";

void save_plan_csv(const PairPlan& plan, const std::vector<std::string>& labels,
                   std::ostream& out) {
  if (static_cast<int>(labels.size()) != plan.n_systems())
    throw ValidationError("plan covers " + std::to_string(plan.n_systems()) +
                          " systems but got " + std::to_string(labels.size()) + " labels");
  out << kPlanHeader << '\n';
  plan.for_each([&](int a, int b, std::int64_t c) {
    out << labels[a] << ',' << labels[b] << ',' << c << '\n';
  });
}

std::vector<LabeledPlanRow> load_plan_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPlanHeader)
    throw ParseError(path + ": line 1: expected header '" + std::string(kPlanHeader) + "'");
  std::vector<LabeledPlanRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    const std::string context = path + ": line " + std::to_string(line_no);
    if (f.size() != 3) throw ParseError(context + ": expected 3 columns");
    const std::int64_t count = parse_int(f[2], context);
    if (count < 1) throw ParseError(context + ": count must be positive");
    if (f[0] == f[1]) throw ParseError(context + ": system paired with itself");
    rows.push_back(LabeledPlanRow{f[0], f[1], count});
  }
  return rows;
}

PairPlan bind_plan(const std::vector<LabeledPlanRow>& rows, const Dataset& ds) {
  PairPlan plan(static_cast<int>(ds.systems().size()));
  for (const LabeledPlanRow& row : rows)
    plan.add(ds.system_index(row.system_a), ds.system_index(row.system_b), row.count);
  return plan;
}

static const char kPairsHeader[] =
    "sys_a,utt_a,lis_a,score_a,sys_b,utt_b,lis_b,score_b";

void save_pairs_csv(const std::vector<RatingPair>& pairs, const Dataset& ds,
                    std::ostream& out) {
  out << kPairsHeader << '\n';
  for (const RatingPair& p : pairs) {
    const Rating& a = ds.rating(p.first);
    const Rating& b = ds.rating(p.second);
    out << a.system_id << ',' << a.utterance_id << ',' << a.listener_id << ','
        << format_double(a.score) << ',' << b.system_id << ',' << b.utterance_id << ','
        << b.listener_id << ',' << format_double(b.score) << '\n';
  }
}

} // namespace prefrank
