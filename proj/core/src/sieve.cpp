#include "vertexkit/sieve.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>

namespace vertexkit::sieves {

namespace {
constexpr const char* kBullet = "\xE2\x80\xA2";  // UTF-8 bullet
}

bool Sieve::valid() const {
  if (width == 0 || depth == 0) return false;
  if (vanish.size() != static_cast<std::size_t>(width) - 1) return false;
  for (auto v : vanish)
    if (v < 1 || v > depth) return false;
  return true;
}

IntervalPartition Sieve::level(std::uint32_t m) const {
  IntervalPartition ends;
  for (std::uint32_t c = 1; c < width; ++c)
    if (m < vanish[c - 1]) ends.push_back(c);  // cut still present at E_m
  ends.push_back(width);
  return ends;
}

std::vector<IntervalPartition> Sieve::reduced_chain() const {
  std::vector<IntervalPartition> chain;
  for (std::uint32_t m = 0; m <= depth; ++m) {
    IntervalPartition p = level(m);
    if (chain.empty() || chain.back() != p) chain.push_back(std::move(p));
  }
  return chain;
}

std::vector<Sieve> sieve_enumerate(std::uint32_t n, std::uint32_t d) {
  if (n < 1 || d < 1) throw std::invalid_argument("sieve_enumerate: need n >= 1, d >= 1");
  std::vector<Sieve> out;
  Sieve s;
  s.width = n;
  s.depth = d;
  s.vanish.assign(n - 1, 1);
  while (true) {
    out.push_back(s);
    std::size_t pos = 0;
    while (pos < s.vanish.size() && s.vanish[pos] == d) {
      s.vanish[pos] = 1;
      ++pos;
    }
    if (pos == s.vanish.size()) break;
    ++s.vanish[pos];
  }
  return out;
}

bool sieve_le(const Sieve& p, const Sieve& q) {
  if (p.width != q.width) return false;
  std::set<IntervalPartition> qs;
  for (std::uint32_t m = 0; m <= q.depth; ++m) qs.insert(q.level(m));
  for (std::uint32_t m = 0; m <= p.depth; ++m)
    if (!qs.count(p.level(m))) return false;
  return true;
}

Sieve sieve_compose(const Sieve& q, const std::vector<Sieve>& ps) {
  if (ps.size() != q.width) throw std::invalid_argument("sieve_compose: arity mismatch");
  std::uint32_t inner_depth = ps.front().depth;
  for (const auto& p : ps)
    if (p.depth != inner_depth) throw std::invalid_argument("sieve_compose: depth mismatch among ps");
  Sieve r;
  r.depth = q.depth + inner_depth;
  r.width = 0;
  for (const auto& p : ps) r.width += p.width;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (auto v : ps[i].vanish) r.vanish.push_back(v);
    if (i + 1 < ps.size()) r.vanish.push_back(inner_depth + q.vanish[i]);
  }
  return r;
}

namespace {

struct Node {
  std::uint32_t level;  // 0 for leaves
  std::uint32_t first;  // leftmost leaf (1-based), for determinism
  std::uint32_t leaves;
  std::vector<std::unique_ptr<Node>> children;
};

/// Build the class tree over levels 0..depth; returns the root (level depth).
std::unique_ptr<Node> build_tree(const Sieve& s) {
  std::vector<std::unique_ptr<Node>> layer;
  for (std::uint32_t i = 1; i <= s.width; ++i) {
    auto leaf = std::make_unique<Node>();
    leaf->level = 0;
    leaf->first = i;
    leaf->leaves = 1;
    layer.push_back(std::move(leaf));
  }
  for (std::uint32_t m = 1; m <= s.depth; ++m) {
    IntervalPartition part = s.level(m);
    std::vector<std::unique_ptr<Node>> next;
    std::size_t child = 0;
    std::uint32_t start = 1;
    for (auto end : part) {
      auto node = std::make_unique<Node>();
      node->level = m;
      node->first = start;
      node->leaves = 0;
      while (child < layer.size() && layer[child]->first + layer[child]->leaves - 1 <= end &&
             layer[child]->first >= start) {
        node->leaves += layer[child]->leaves;
        node->children.push_back(std::move(layer[child]));
        ++child;
      }
      next.push_back(std::move(node));
      start = end + 1;
    }
    layer = std::move(next);
  }
  return std::move(layer.front());
}

void render_rec(const Node& n, bool splice_single, std::string& out) {
  if (n.level == 0) {
    out += kBullet;
    return;
  }
  bool drop = splice_single && n.children.size() == 1;
  if (!drop) out += "(";
  for (const auto& c : n.children) render_rec(*c, splice_single, out);
  if (!drop) out += ")";
}

}  // namespace

std::string render_full(const Sieve& s) {
  auto root = build_tree(s);
  std::string out;
  for (const auto& c : root->children) render_rec(*c, false, out);
  return out;
}

std::string render_display(const Sieve& s) {
  auto root = build_tree(s);
  std::string out;
  for (const auto& c : root->children) render_rec(*c, true, out);
  return out;
}

namespace {

struct ParseNode {
  bool leaf = false;
  std::vector<ParseNode> children;
  std::uint32_t leaves() const {
    if (leaf) return 1;
    std::uint32_t n = 0;
    for (const auto& c : children) n += c.leaves();
    return n;
  }
};

ParseNode parse_group(const std::string& t, std::size_t& pos);

std::vector<ParseNode> parse_list(const std::string& t, std::size_t& pos) {
  std::vector<ParseNode> out;
  while (pos < t.size() && t[pos] != ')') out.push_back(parse_group(t, pos));
  return out;
}

ParseNode parse_group(const std::string& t, std::size_t& pos) {
  if (t.compare(pos, 3, kBullet) == 0) {
    pos += 3;
    return ParseNode{true, {}};
  }
  if (t[pos] == '*' || t[pos] == 'o') {  // ASCII fallbacks for the bullet
    ++pos;
    return ParseNode{true, {}};
  }
  if (t[pos] != '(') throw std::invalid_argument("parse_sieve: unexpected character");
  ++pos;
  ParseNode n;
  n.children = parse_list(t, pos);
  if (pos >= t.size() || t[pos] != ')') throw std::invalid_argument("parse_sieve: missing ')'");
  ++pos;
  if (n.children.empty()) {  // "()" is an innermost pair, same as a bullet
    n.leaf = true;
  }
  return n;
}

/// Assign cut-vanishing levels. Each node sits at the level equal to the
/// target depth minus its nesting; single-child chains dropped by the
/// abbreviated renderer re-enter implicitly because a child may sit more
/// than one level below its parent.
void assign(const ParseNode& n, std::uint32_t level, std::uint32_t& next_leaf, Sieve& s) {
  if (n.leaf) {
    ++next_leaf;
    return;
  }
  if (level == 0) throw std::invalid_argument("parse_sieve: nesting deeper than depth");
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    assign(n.children[k], level - 1, next_leaf, s);
    if (k + 1 < n.children.size()) s.vanish[next_leaf - 1] = level;
  }
}

}  // namespace

Sieve parse_sieve(const std::string& text, std::uint32_t depth) {
  std::size_t pos = 0;
  std::vector<ParseNode> top = parse_list(text, pos);
  if (pos != text.size()) throw std::invalid_argument("parse_sieve: trailing characters");
  if (top.empty()) throw std::invalid_argument("parse_sieve: empty input");

  auto attempt = [&](const ParseNode& root) {
    Sieve s;
    s.width = root.leaves();
    s.depth = depth;
    if (s.width == 0) throw std::invalid_argument("parse_sieve: empty input");
    s.vanish.assign(s.width - 1, depth);
    std::uint32_t leaf = 0;
    assign(root, depth, leaf, s);
    if (!s.valid()) throw std::invalid_argument("parse_sieve: invalid sieve");
    return s;
  };

  // Canonical forms omit the root pair: the top-level items are its children.
  ParseNode wrapper;
  wrapper.children = top;
  try {
    return attempt(wrapper);
  } catch (const std::invalid_argument&) {
    // Paper-style inputs may carry an explicit outer pair.
    if (top.size() == 1 && !top.front().leaf) return attempt(top.front());
    throw;
  }
}

std::uint32_t ExpansionOrder::rank_of(std::uint32_t point) const {
  for (std::uint32_t r = 0; r < ranking.size(); ++r)
    if (ranking[r] == point) return r;
  throw std::out_of_range("point not in expansion order");
}

ExpansionOrder ExpansionOrder::from_ranking(std::vector<std::uint32_t> ranking_outermost_first) {
  ExpansionOrder o;
  o.width = static_cast<std::uint32_t>(ranking_outermost_first.size());
  o.ranking = std::move(ranking_outermost_first);
  return o;
}

namespace {
void rank_rec(const Node& n, std::vector<std::uint32_t>& out) {
  if (n.level == 0) {
    out.push_back(n.first - 1);  // 0-based point index
    return;
  }
  std::vector<const Node*> kids;
  for (const auto& c : n.children) kids.push_back(c.get());
  std::stable_sort(kids.begin(), kids.end(), [](const Node* a, const Node* b) {
    if (a->leaves != b->leaves) return a->leaves < b->leaves;  // smaller block outer
    return a->first < b->first;                                // ties left-to-right
  });
  for (const Node* k : kids) rank_rec(*k, out);
}
}  // namespace

ExpansionOrder sieve_expansion_order(const Sieve& p) {
  if (!p.valid()) throw std::invalid_argument("sieve_expansion_order: invalid sieve");
  auto root = build_tree(p);
  ExpansionOrder o;
  o.width = p.width;
  rank_rec(*root, o.ranking);
  o.source = p;
  return o;
}

}  // namespace vertexkit::sieves
