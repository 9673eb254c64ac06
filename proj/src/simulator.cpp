#include "ptd/simulator.hpp"

#include <cmath>
#include <map>
#include <random>

#include "ptd/error.hpp"
#include "ptd/parallel.hpp"

namespace ptd {

namespace {

constexpr std::size_t kBlock = 4096;

struct BlockTally {
  std::size_t fwer = 0;
  std::vector<std::size_t> reject, recommend;
  double sum_n = 0.0, sum_n2 = 0.0;
  std::map<double, std::size_t> sizes;
};

}  // namespace

void SimPlan::validate() const {
  const std::size_t K = arms.size();
  if (K == 0) throw ConfigError("simulation plan has no arms");
  if (segments.empty()) throw ConfigError("simulation plan has no segments");
  std::vector<int> looks(K, 0);
  for (const auto& s : segments) {
    if (s.arm.size() != K || s.analysis.size() != K) throw ShapeError("segment arm vectors have the wrong length");
    if (!(s.control >= 0.0)) throw ConfigError("negative control count in a segment");
    for (std::size_t k = 0; k < K; ++k) {
      if (!(s.arm[k] >= 0.0)) throw ConfigError("negative arm count in a segment");
      if (s.analysis[k] != 0 && s.analysis[k] != ++looks[k]) throw ConfigError("arm analyses must be numbered 1, 2, ...");
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    const auto& a = arms[k];
    if (a.first_segment < 0 || a.first_segment >= static_cast<int>(segments.size()))
      throw ConfigError("arm start segment out of range");
    if (a.lower.size() != a.upper.size() || static_cast<int>(a.upper.size()) != looks[k])
      throw ConfigError("arm boundaries do not match its analyses");
    for (std::size_t j = 0; j < a.upper.size(); ++j)
      if (a.lower[j] > a.upper[j]) throw ConfigError("lower boundary above upper boundary");
    if (!a.upper.empty() && a.lower.back() != a.upper.back())
      throw ConfigError("the last analysis of an arm must force a decision");
  }
}

SimPlan plan_from_design(const CalibratedDesign& design) {
  const DesignSpec& spec = design.spec;
  const Schedule& sch = design.schedule;
  SimPlan plan;
  for (int m = 1; m <= spec.control_stages; ++m) {
    SimSegment seg{sch.increments[m - 1], std::vector<double>(spec.arms, 0.0), std::vector<int>(spec.arms, 0)};
    for (int k = 0; k < spec.arms; ++k) {
      const int j = m - spec.adding_stage[k];
      if (j < 1 || j > spec.stages[k]) continue;
      seg.arm[k] = sch.active[k][j - 1] - (j > 1 ? sch.active[k][j - 2] : 0.0);
      seg.analysis[k] = j;
    }
    plan.segments.push_back(std::move(seg));
  }
  for (int k = 0; k < spec.arms; ++k)
    plan.arms.push_back(SimArm{spec.adding_stage[k], design.bounds[k].lower, design.bounds[k].upper});
  return plan;
}

Estimate proportion(std::size_t hits, std::size_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

SimReport simulate(const SimConfig& cfg) {
  const SimPlan& plan = cfg.plan;
  plan.validate();
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be positive");
  const std::size_t K = plan.arms.size();
  const std::size_t G = plan.segments.size();
  if (cfg.theta.theta.size() != K) throw ShapeError("effect vector length differs from the arm count");

  // Cumulative counts: control through segment g, arm k through g.
  std::vector<double> ccum(G);
  std::vector<std::vector<double>> acum(K, std::vector<double>(G));
  for (std::size_t g = 0; g < G; ++g) {
    ccum[g] = plan.segments[g].control + (g ? ccum[g - 1] : 0.0);
    for (std::size_t k = 0; k < K; ++k) acum[k][g] = plan.segments[g].arm[k] + (g ? acum[k][g - 1] : 0.0);
  }
  std::vector<int> last_segment(K, -1);
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t k = 0; k < K; ++k)
      if (plan.segments[g].analysis[k]) last_segment[k] = static_cast<int>(g);

  const std::size_t blocks = (cfg.replicates + kBlock - 1) / kBlock;
  std::vector<BlockTally> tallies(blocks);
  const double sigma = cfg.sigma;

  parallel_for(blocks, 1, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> csum(G);
    std::vector<double> asum(K);
    std::vector<char> active(K), rejected(K);
    std::vector<double> z(K), mean(K);
    for (std::size_t b = b0; b < b1; ++b) {
      BlockTally& tally = tallies[b];
      tally.reject.assign(K, 0);
      tally.recommend.assign(K, 0);
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal;
      const std::size_t r_end = std::min(cfg.replicates, (b + 1) * kBlock);
      for (std::size_t r = b * kBlock; r < r_end; ++r) {
        std::fill(asum.begin(), asum.end(), 0.0);
        std::fill(rejected.begin(), rejected.end(), 0);
        for (std::size_t k = 0; k < K; ++k) active[k] = 1;
        double n_total = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
          const SimSegment& seg = plan.segments[g];
          const double c = seg.control;
          csum[g] = (g ? csum[g - 1] : 0.0) + (c > 0.0 ? sigma * std::sqrt(c) * normal(rng) : 0.0);
          n_total += c;
          for (std::size_t k = 0; k < K; ++k) {
            const double m = seg.arm[k];
            if (!active[k] || m <= 0.0) continue;
            asum[k] += m * cfg.theta.theta[k] + sigma * std::sqrt(m) * normal(rng);
            n_total += m;
          }
          bool any_cross = false;
          for (std::size_t k = 0; k < K; ++k) {
            const int j = seg.analysis[k];
            if (!active[k] || j == 0) continue;
            const int s = plan.arms[k].first_segment;
            const double nk = acum[k][g];
            const double d = ccum[g] - (s ? ccum[s - 1] : 0.0);
            const double xc = (csum[g] - (s ? csum[s - 1] : 0.0)) / d;
            mean[k] = asum[k] / nk;
            z[k] = (mean[k] - xc) / (sigma * std::sqrt(1.0 / nk + 1.0 / d));
            if (z[k] > plan.arms[k].upper[j - 1]) {
              rejected[k] = 1;
              any_cross = true;
            } else if (z[k] <= plan.arms[k].lower[j - 1]) {
              active[k] = 0;
            } else if (static_cast<int>(g) == last_segment[k]) {
              active[k] = 0;
            }
          }
          if (any_cross) {
            // Ties have probability zero; the lowest index wins.
            int best = -1;
            for (std::size_t k = 0; k < K; ++k) {
              if (!rejected[k]) continue;
              const double key = cfg.ranking == Ranking::ZStatistic ? z[k] : mean[k];
              const double cur = best < 0 ? 0.0 : (cfg.ranking == Ranking::ZStatistic ? z[best] : mean[best]);
              if (best < 0 || key > cur) best = static_cast<int>(k);
            }
            ++tally.recommend[best];
            bool true_null = false;
            for (std::size_t k = 0; k < K; ++k) {
              if (!rejected[k]) continue;
              ++tally.reject[k];
              if (cfg.theta.theta[k] <= 0.0) true_null = true;
            }
            if (true_null) ++tally.fwer;
            break;
          }
          bool pending = false;
          for (std::size_t k = 0; k < K; ++k)
            if (active[k] && (last_segment[k] > static_cast<int>(g))) pending = true;
          if (!pending) break;
        }
        tally.sum_n += n_total;
        tally.sum_n2 += n_total * n_total;
        ++tally.sizes[n_total];
      }
    }
  });

  SimReport rep;
  rep.replicates = cfg.replicates;
  rep.seed = cfg.seed;
  std::size_t fwer = 0;
  std::vector<std::size_t> reject(K, 0), recommend(K, 0);
  double sum_n = 0.0, sum_n2 = 0.0;
  std::map<double, std::size_t> sizes;
  for (const auto& t : tallies) {
    fwer += t.fwer;
    for (std::size_t k = 0; k < K; ++k) {
      reject[k] += t.reject[k];
      recommend[k] += t.recommend[k];
    }
    sum_n += t.sum_n;
    sum_n2 += t.sum_n2;
    for (const auto& [n, c] : t.sizes) sizes[n] += c;
  }
  const double R = static_cast<double>(cfg.replicates);
  rep.fwer = proportion(fwer, cfg.replicates);
  for (std::size_t k = 0; k < K; ++k) {
    rep.reject.push_back(proportion(reject[k], cfg.replicates));
    rep.recommend.push_back(proportion(recommend[k], cfg.replicates));
  }
  const double mean_n = sum_n / R;
  const double var = cfg.replicates > 1 ? std::max(0.0, (sum_n2 - R * mean_n * mean_n) / (R - 1.0)) : 0.0;
  rep.expected_n = {mean_n, std::sqrt(var / R)};
  for (const auto& [n, c] : sizes) {
    rep.pmf.support.push_back(n);
    rep.pmf.prob.push_back(static_cast<double>(c) / R);
  }
  return rep;
}

}  // namespace ptd
