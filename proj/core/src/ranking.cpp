#include "ebae/ranking.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace ebae {

void PreferenceProfile::validate() const {
  const auto n = candidates.size();
  if (n < 2) throw std::invalid_argument("preference profile needs >= 2 candidates");
  if (orders.empty()) throw std::invalid_argument("preference profile needs >= 1 voter");
  if (!voter_names.empty() && voter_names.size() != orders.size()) {
    throw std::invalid_argument("preference profile: voter name count mismatch");
  }
  for (const auto& order : orders) {
    if (order.size() != n) throw std::invalid_argument("voter order does not rank every candidate");
    std::vector<bool> seen(n, false);
    for (auto c : order) {
      if (c >= n || seen[c]) throw std::invalid_argument("voter order is not a permutation");
      seen[c] = true;
    }
  }
}

int PreferenceProfile::rank_of(std::size_t voter, std::size_t candidate) const {
  const auto& order = orders.at(voter);
  const auto it = std::find(order.begin(), order.end(), candidate);
  if (it == order.end()) throw std::invalid_argument("candidate missing from voter order");
  return static_cast<int>(it - order.begin()) + 1;
}

MarginMatrix majority_margins(const PreferenceProfile& profile) {
  profile.validate();
  const auto n = profile.candidates.size();
  MarginMatrix mm(n, std::vector<int>(n, 0));
  std::vector<std::size_t> position(n);
  for (const auto& order : profile.orders) {
    for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (x != y) mm[x][y] += position[x] < position[y] ? 1 : -1;
      }
    }
  }
  return mm;
}

double rank_stability_xi(std::span<const int> ranks) {
  if (ranks.size() < 2) throw std::invalid_argument("rank stability needs >= 2 voters");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    for (std::size_t j = i + 1; j < ranks.size(); ++j) {
      sum += std::abs(ranks[i] - ranks[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

RankingOutcome borda_rank(const PreferenceProfile& profile) {
  RankingOutcome out;
  out.margins = majority_margins(profile);
  out.candidates = profile.candidates;
  const auto n = out.candidates.size();
  out.scores.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    out.scores[x] = std::accumulate(out.margins[x].begin(), out.margins[x].end(), 0);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.scores[a] > out.scores[b]; });
  out.rank.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = order[i];
    if (i > 0 && out.scores[c] == out.scores[order[i - 1]]) {
      out.tiers.back().push_back(c);
      out.rank[c] = out.rank[order[i - 1]];
    } else {
      out.tiers.push_back({c});
      out.rank[c] = static_cast<int>(i) + 1;
    }
  }

  out.xi.assign(n, 0.0);
  out.voter_names = profile.voter_names;
  out.voter_ranks.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    auto& ranks = out.voter_ranks[c];
    for (std::size_t v = 0; v < profile.orders.size(); ++v) ranks.push_back(profile.rank_of(v, c));
    if (ranks.size() >= 2) out.xi[c] = rank_stability_xi(ranks);
  }
  return out;
}

std::string RankingOutcome::render() const {
  std::string s;
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    if (t > 0) s += " ≻ ";
    const auto& tier = tiers[t];
    if (tier.size() > 1) s += "(";
    for (std::size_t i = 0; i < tier.size(); ++i) {
      if (i > 0) s += "~";
      s += candidates[tier[i]];
    }
    if (tier.size() > 1) s += ")";
  }
  return s;
}

PreferenceProfile profile_from_measures(
    std::vector<std::string> labels,
    std::span<const std::pair<std::string, std::vector<double>>> measures) {
  PreferenceProfile p;
  p.candidates = std::move(labels);
  for (const auto& [name, values] : measures) {
    if (values.size() != p.candidates.size()) {
      throw std::invalid_argument("measure '" + name + "' does not cover every candidate");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a] != values[b]) return values[a] < values[b];
      return p.candidates[a] < p.candidates[b];
    });
    p.voter_names.push_back(name);
    p.orders.push_back(std::move(order));
  }
  return p;
}

}  // namespace ebae
