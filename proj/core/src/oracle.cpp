#include "attn/oracle.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace attn::oracle {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

using Matrix = std::vector<std::vector<bool>>;

Matrix make_matrix(int n) { return Matrix(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n))); }

// Template adjacency for family m on k vertices.
Matrix build_template(Motif m, int k) {
  Matrix t = make_matrix(k);
  auto edge = [&](int a, int b) { t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true; };
  switch (m) {
    case Motif::self_loop: edge(0, 0); break;
    case Motif::dyadic: edge(0, 1); edge(1, 0); break;
    case Motif::chain:
      for (int i = 1; i < k; ++i) edge(i - 1, i);
      break;
    case Motif::loop:
      for (int i = 1; i < k; ++i) edge(i - 1, i);
      edge(k - 1, 0);
      break;
    case Motif::outgoing_star:
      for (int i = 1; i < k; ++i) edge(0, i);
      break;
    case Motif::incoming_star:
      for (int i = 1; i < k; ++i) edge(i, 0);
      break;
  }
  return t;
}

bool embeds(const Matrix& t, const Matrix& g, bool induced) {
  const int k = static_cast<int>(t.size());
  const int n = static_cast<int>(g.size());
  std::vector<int> image;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  auto ok = [&]() {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const bool te = t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        const bool ge = g[static_cast<std::size_t>(image[static_cast<std::size_t>(a)])]
                         [static_cast<std::size_t>(image[static_cast<std::size_t>(b)])];
        if (te && !ge) return false;
        if (induced && ge && !te) return false;
      }
    }
    return true;
  };
  auto rec = [&](auto& self) -> bool {
    if (static_cast<int>(image.size()) == k) return ok();
    for (int v = 0; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = true;
      image.push_back(v);
      const bool found = self(self);
      image.pop_back();
      used[static_cast<std::size_t>(v)] = false;
      if (found) return true;
    }
    return false;
  };
  return rec(rec);
}

}  // namespace

std::vector<std::vector<std::string>> reply_components(std::span<const Message> group_messages) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < group_messages.size(); ++i) index.emplace(group_messages[i].message_id, i);
  UnionFind uf(group_messages.size());
  for (std::size_t i = 0; i < group_messages.size(); ++i) {
    const auto& m = group_messages[i];
    if (!m.reply_to) continue;
    const auto it = index.find(*m.reply_to);
    if (it != index.end()) uf.unite(i, it->second);
  }
  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < group_messages.size(); ++i) groups[uf.find(i)].push_back(group_messages[i].message_id);
  std::vector<std::vector<std::string>> out;
  for (auto& [rep, members] : groups) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::map<std::string, int> bfs_depths(std::span<const Message> group_messages, const std::vector<std::string>& members) {
  std::map<std::string, std::vector<std::string>> children;
  std::string root;
  for (const auto& m : group_messages) {
    if (!std::binary_search(members.begin(), members.end(), m.message_id)) continue;
    if (m.reply_to) {
      children[*m.reply_to].push_back(m.message_id);
    } else {
      root = m.message_id;
    }
  }
  std::map<std::string, int> depth{{root, 0}};
  std::deque<std::string> queue{root};
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (const auto& c : children[v]) {
      depth[c] = depth[v] + 1;
      queue.push_back(c);
    }
  }
  return depth;
}

double all_pairs_virality(std::span<const int> parent) {
  const std::size_t n = parent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (parent[v] < 0) continue;
    adj[v].push_back(static_cast<std::size_t>(parent[v]));
    adj[static_cast<std::size_t>(parent[v])].push_back(v);
  }
  long double total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<long> dist(n, -1);
    std::deque<std::size_t> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto w : adj[v]) {
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
    for (std::size_t t = s + 1; t < n; ++t) total += dist[t];
  }
  const long double pairs = static_cast<long double>(n) * static_cast<long double>(n - 1) / 2;
  return static_cast<double>(total / pairs);
}

MotifPresenceSet brute_force_motifs(int order, std::span<const std::pair<int, int>> edges, int max_n,
                                    StarLoopSemantics star_loop) {
  Matrix g = make_matrix(order);
  for (const auto& [a, b] : edges) g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
  const int cap = max_n > 0 ? max_n : order;
  const int limit = std::min(cap, order);

  MotifPresenceSet out{};
  for (std::size_t i = 0; i < kAllMotifs.size(); ++i) {
    const Motif m = kAllMotifs[i];
    int lo = 3, hi = limit;
    bool induced = star_loop == StarLoopSemantics::induced;
    if (m == Motif::self_loop) {
      lo = hi = 1;
      induced = true;
    } else if (m == Motif::dyadic) {
      lo = hi = 2;
      induced = false;
    } else if (m == Motif::chain) {
      lo = 2;
      induced = false;
    }
    out[i] = MotifPresence::absent;
    if (order >= lo && order <= hi && order <= cap && embeds(build_template(m, order), g, true)) {
      out[i] = MotifPresence::exact;
      continue;
    }
    for (int k = lo; k <= std::min(hi, limit); ++k) {
      if (embeds(build_template(m, k), g, induced)) {
        out[i] = MotifPresence::subgraph;
        break;
      }
    }
  }
  return out;
}

}  // namespace attn::oracle
